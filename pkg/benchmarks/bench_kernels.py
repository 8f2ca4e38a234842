"""Time the numba kernels against their pure-numpy fallbacks.

Runs the three hot kernels on representative workloads:

* ``coupling_power``       -- one objective evaluation, N = 8 (the optimizer
                              inner loop calls this once per coordinate).
* ``coupling_power_batch`` -- 10^6 frequency vectors, N = 3 (the exhaustive
                              grid oracle at 100 points per axis).
* ``coordinate_scan``      -- 10^6-point scan of a 7-term cosine sum (dense
                              verification of one N = 8 coordinate update).

Usage::

    python3 benchmarks/bench_kernels.py [--repeat R]

Both implementations are imported explicitly, so the timings do not depend
on ``FDABEAM_DISABLE_NUMBA``.
"""

import argparse
import math
import time

import numpy as np

from fdabeam import kernels
from fdabeam.coupling import coupling_coefficients
from fdabeam.scenario import ArrayGeometry, NodePlacement, RfParams, Scenario


def make_scenario(n):
    rf = RfParams(carrier_frequency=2.4e9, max_offset=3e6,
                  noise_power_bob=1e-13, noise_power_eve=1e-13)
    return Scenario(rf=rf,
                    array=ArrayGeometry(element_count=n),
                    bob=NodePlacement(range_m=100.0, angle_rad=math.pi / 3),
                    eve=NodePlacement(range_m=120.0, angle_rad=math.pi / 3))


def best_of(fn, args, repeat, inner=1):
    """Best wall-clock time of ``inner`` back-to-back calls, over ``repeat``
    trials.  The first call is untimed so numba compilation never counts."""
    fn(*args)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def report(label, t_numba, t_numpy, unit_scale, unit):
    ratio = t_numpy / t_numba if t_numba else float("inf")
    print(f"{label:<42} {t_numba * unit_scale:>9.2f} {unit}  "
          f"{t_numpy * unit_scale:>9.2f} {unit}  {ratio:>6.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing trials per workload (default 5)")
    args = parser.parse_args()

    if kernels.coupling_power_numba is None:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)

    scen8 = make_scenario(8)
    c8 = coupling_coefficients(scen8)
    freqs8 = scen8.rf.carrier_frequency + rng.uniform(0.0, scen8.rf.max_offset, 8)

    scen3 = make_scenario(3)
    c3 = coupling_coefficients(scen3)
    rows = scen3.rf.carrier_frequency + rng.uniform(0.0, scen3.rf.max_offset,
                                                    (1_000_000, 3))

    weights = 2.0 * c8.alpha[0] * c8.alpha[1:]
    phases = c8.omega[1:] * freqs8[1:]
    slope = float(c8.omega[0])
    f_lo = scen8.rf.carrier_frequency
    f_hi = f_lo + scen8.rf.max_offset
    count = 1_000_001

    # sanity: the two paths must agree before we bother timing them
    assert np.isclose(kernels.coupling_power_numba(c8.alpha, c8.omega, freqs8),
                      kernels.coupling_power_numpy(c8.alpha, c8.omega, freqs8),
                      rtol=1e-12)
    assert np.allclose(
        kernels.coupling_power_batch_numba(c3.alpha, c3.omega, rows[:1000]),
        kernels.coupling_power_batch_numpy(c3.alpha, c3.omega, rows[:1000]),
        rtol=1e-12)
    fa, va = kernels.coordinate_scan_numba(weights, phases, slope, f_lo, f_hi, 10001)
    fb, vb = kernels.coordinate_scan_numpy(weights, phases, slope, f_lo, f_hi, 10001)
    assert fa == fb and np.isclose(va, vb, rtol=1e-12)

    print(f"{'workload':<42} {'numba':>12}  {'numpy':>12}  {'ratio':>7}")
    report("coupling_power, N=8 (per call)",
           best_of(kernels.coupling_power_numba, (c8.alpha, c8.omega, freqs8),
                   args.repeat, inner=10_000),
           best_of(kernels.coupling_power_numpy, (c8.alpha, c8.omega, freqs8),
                   args.repeat, inner=10_000),
           1e6, "us")
    report("coupling_power_batch, 1e6 x 3",
           best_of(kernels.coupling_power_batch_numba, (c3.alpha, c3.omega, rows),
                   args.repeat),
           best_of(kernels.coupling_power_batch_numpy, (c3.alpha, c3.omega, rows),
                   args.repeat),
           1e3, "ms")
    report("coordinate_scan, 1e6 points x 7 terms",
           best_of(kernels.coordinate_scan_numba,
                   (weights, phases, slope, f_lo, f_hi, count), args.repeat),
           best_of(kernels.coordinate_scan_numpy,
                   (weights, phases, slope, f_lo, f_hi, count), args.repeat),
           1e3, "ms")


if __name__ == "__main__":
    main()
