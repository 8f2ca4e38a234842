"""Command line front end.

Six subcommands: solve-power, solve-rate and optimize-offsets act on a
single scenario config; sweep-power, sweep-rate and convergence run the
Monte Carlo harness.  All outputs land in --output (or $FDABEAM_OUTPUT_DIR,
or the working directory).  Exit codes: 0 success, 1 usage/config error,
2 infeasible single solve.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beamforming import PowerBudget, SecrecyTarget, max_rate_beamformer, min_power_beamformer
from .config import (
    ConfigError,
    format_dbm,
    format_mhz,
    load_experiment_config,
    load_scenario_config,
)
from .coupling import g_value, optimize_offsets
from .experiments import (
    linear_fda_plan,
    run_convergence_study,
    run_power_sweep,
    run_rate_sweep,
    write_convergence_csv,
    write_sweep_csv,
    write_trace_csv,
)
from .scenario import channel_pair

OUTPUT_DIR_ENV = "FDABEAM_OUTPUT_DIR"

_COMMANDS = ("solve-power", "solve-rate", "optimize-offsets",
             "sweep-power", "sweep-rate", "convergence")


@dataclass
class CliConfig:
    command: str
    config_path: str
    output_dir: str | None = None
    seed: int | None = None
    overrides: tuple = ()
    workers: int | None = None
    emit_plot_script: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fdabeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", "-c", required=True, help="config file path")
        p.add_argument("--output", "-o", default=None,
                       help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the experiment seed")
        p.add_argument("--workers", "-j", type=int, default=None,
                       help="worker processes for sweeps (default: all cores)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE",
                       help="override a config entry; repeatable")
        p.add_argument("--plot-script", action="store_true",
                       help="also emit a matplotlib script next to the CSV")
    return parser


def _resolve_output(cfg: CliConfig) -> Path:
    out = cfg.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_solution_csv(path: Path, offsets: np.ndarray, w: np.ndarray | None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["element", "offset_hz", "w_real", "w_imag"])
        for i, off in enumerate(offsets):
            if w is None:
                writer.writerow([i, f"{off:.17g}", "", ""])
            else:
                writer.writerow([i, f"{off:.17g}", f"{w[i].real:.17g}",
                                 f"{w[i].imag:.17g}"])


def _plot_script(csv_name: str, xlabel: str, ylabel: str, logy: bool) -> str:
    yscale = 'ax.set_yscale("log")\n' if logy else ""
    return (
        '"""Plot a sweep CSV produced by fdabeam."""\n'
        "import csv\n"
        "from collections import defaultdict\n\n"
        "import matplotlib.pyplot as plt\n\n"
        "series = defaultdict(list)\n"
        f'with open("{csv_name}") as fh:\n'
        "    for row in csv.DictReader(fh):\n"
        '        series[row["scheme"]].append((float(row["axis"]),\n'
        '                                      float(row["mean_metric"])))\n'
        "fig, ax = plt.subplots()\n"
        "for scheme, pts in sorted(series.items()):\n"
        "    pts.sort()\n"
        '    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",\n'
        "            label=scheme)\n"
        f'ax.set_xlabel("{xlabel}")\n'
        f'ax.set_ylabel("{ylabel}")\n'
        f"{yscale}"
        "ax.legend()\n"
        "ax.grid(True, which=\"both\", alpha=0.3)\n"
        f'fig.savefig("{csv_name.removesuffix(".csv")}.png", dpi=150)\n'
    )


def _initial_plan(scenario, opts):
    if opts.initialization == "linear":
        return linear_fda_plan(scenario.array.element_count, scenario.rf.max_offset)
    return None


def _cmd_solve_power(cfg: CliConfig, out: Path) -> int:
    scenario, opts = load_scenario_config(cfg.config_path, cfg.overrides)
    if opts.target_rate is None:
        raise ConfigError("solver.target_rate is required for solve-power")
    plan, trace = optimize_offsets(scenario, initial=_initial_plan(scenario, opts),
                                   tol=opts.tolerance, max_outer=opts.max_outer)
    pair = channel_pair(scenario, plan, opts.time)
    sol = min_power_beamformer(pair, SecrecyTarget(opts.target_rate))
    write_trace_csv(trace.objective_history, out / "trace.csv")
    if not sol.feasible:
        print(f"secrecy target infeasible (lambda1 = {sol.lambda1:.17g})",
              file=sys.stderr)
        return 2
    _write_solution_csv(out / "solution.csv", plan.offsets, sol.beamformer)
    print(f"offsets: {' '.join(format_mhz(o) for o in plan.offsets)}")
    print(f"transmit_power: {sol.power:.17g} W ({format_dbm(sol.power)})")
    print(f"secrecy_rate_target: {opts.target_rate:.17g} bits")
    print(f"lambda1: {sol.lambda1:.17g}")
    print(f"coupling: {g_value(scenario, plan):.17g}")
    print(f"outer_iterations: {trace.outer_iterations}")
    print(f"converged: {trace.converged}")
    print(f"wrote: {out / 'solution.csv'}")
    return 0


def _cmd_solve_rate(cfg: CliConfig, out: Path) -> int:
    scenario, opts = load_scenario_config(cfg.config_path, cfg.overrides)
    if opts.power_budget is None:
        raise ConfigError("solver.power_budget is required for solve-rate")
    plan, trace = optimize_offsets(scenario, initial=_initial_plan(scenario, opts),
                                   tol=opts.tolerance, max_outer=opts.max_outer)
    pair = channel_pair(scenario, plan, opts.time)
    sol = max_rate_beamformer(pair, PowerBudget(opts.power_budget))
    write_trace_csv(trace.objective_history, out / "trace.csv")
    _write_solution_csv(out / "solution.csv", plan.offsets, sol.beamformer)
    print(f"offsets: {' '.join(format_mhz(o) for o in plan.offsets)}")
    print(f"power_budget: {opts.power_budget:.17g} W ({format_dbm(opts.power_budget)})")
    print(f"secrecy_rate: {sol.rate:.17g} bits")
    print(f"lambda_delta: {sol.lambda_delta:.17g}")
    print(f"outer_iterations: {trace.outer_iterations}")
    print(f"wrote: {out / 'solution.csv'}")
    return 0


def _cmd_optimize_offsets(cfg: CliConfig, out: Path) -> int:
    scenario, opts = load_scenario_config(cfg.config_path, cfg.overrides)
    plan, trace = optimize_offsets(scenario, initial=_initial_plan(scenario, opts),
                                   tol=opts.tolerance, max_outer=opts.max_outer)
    write_trace_csv(trace.objective_history, out / "trace.csv")
    _write_solution_csv(out / "offsets.csv", plan.offsets, None)
    print(f"offsets: {' '.join(format_mhz(o) for o in plan.offsets)}")
    print(f"coupling: {g_value(scenario, plan):.17g}")
    print(f"outer_iterations: {trace.outer_iterations}")
    print(f"converged: {trace.converged}")
    print(f"wrote: {out / 'offsets.csv'}")
    return 0


def _experiment_config(cfg: CliConfig):
    config = load_experiment_config(cfg.config_path, cfg.overrides)
    if cfg.seed is not None:
        config = dataclasses.replace(config, rng_seed=cfg.seed)
    return config


def _workers(cfg: CliConfig) -> int:
    if cfg.workers is not None:
        if cfg.workers < 1:
            raise ConfigError("--workers must be at least 1")
        return cfg.workers
    return os.cpu_count() or 1


def _cmd_sweep(cfg: CliConfig, out: Path, which: str) -> int:
    config = _experiment_config(cfg)
    if which == "power":
        result = run_power_sweep(config, workers=_workers(cfg))
        name, xlabel, ylabel = "power_sweep.csv", "array elements", "mean power (W)"
    else:
        result = run_rate_sweep(config, workers=_workers(cfg))
        name, xlabel, ylabel = "rate_sweep.csv", "transmit power (W)", "mean secrecy rate (bits)"
    write_sweep_csv(result, out / name)
    print(f"wrote: {out / name}")
    if cfg.emit_plot_script:
        script = out / f"plot_{name.removesuffix('.csv')}.py"
        script.write_text(_plot_script(name, xlabel, ylabel, logy=(which == "power")))
        print(f"wrote: {script}")
    return 0


def _cmd_convergence(cfg: CliConfig, out: Path) -> int:
    config = _experiment_config(cfg)
    result = run_convergence_study(config, workers=_workers(cfg))
    write_convergence_csv(result, out / "convergence.csv")
    for n in result.antenna_counts:
        print(f"N={n}: median_outer_iterations={result.median_outer[n]:g}")
    print(f"wrote: {out / 'convergence.csv'}")
    return 0


def run(cfg: CliConfig) -> int:
    out = _resolve_output(cfg)
    if cfg.command == "solve-power":
        return _cmd_solve_power(cfg, out)
    if cfg.command == "solve-rate":
        return _cmd_solve_rate(cfg, out)
    if cfg.command == "optimize-offsets":
        return _cmd_optimize_offsets(cfg, out)
    if cfg.command == "sweep-power":
        return _cmd_sweep(cfg, out, "power")
    if cfg.command == "sweep-rate":
        return _cmd_sweep(cfg, out, "rate")
    if cfg.command == "convergence":
        return _cmd_convergence(cfg, out)
    raise ConfigError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        cfg = CliConfig(command=ns.command, config_path=ns.config,
                        output_dir=ns.output, seed=ns.seed,
                        overrides=tuple(ns.overrides), workers=ns.workers,
                        emit_plot_script=ns.plot_script)
        return run(cfg)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
