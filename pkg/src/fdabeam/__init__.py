"""Secure beamforming with frequency diverse arrays.

Optimizes per-element frequency offsets to decouple an eavesdropper's
channel from the legitimate one, then designs minimum-power or
maximum-secrecy-rate beamformers in closed form.
"""

from .beamforming import (
    PowerBudget,
    PowerMinSolution,
    RateMaxSolution,
    SecrecyTarget,
    channel_stats,
    lambda1_closed_form,
    lambda_delta_closed_form,
    max_rate_beamformer,
    min_power_beamformer,
    mrt_beamformer,
    mrt_rate,
    mrt_required_power,
    power_lower_bound,
    principal_eigvec_span2,
    secrecy_rate,
    snr,
)
from .coupling import (
    CosineTerm,
    CouplingCoefficients,
    OptimizerTrace,
    cosine_argmin,
    cosine_term,
    coupling_coefficients,
    coupling_prefactor,
    g_value,
    grid_oracle,
    optimize_offsets,
    update_frequency,
    update_frequency_case_table,
)
from .experiments import (
    ConvergenceResult,
    ExperimentConfig,
    SweepResult,
    bound_metrics,
    linear_fda_plan,
    phased_array_plan,
    run_convergence_study,
    run_power_sweep,
    run_rate_sweep,
    sample_scenario,
    write_sweep_csv,
)
from .scenario import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    ChannelPair,
    FrequencyPlan,
    NodePlacement,
    RfParams,
    Scenario,
    channel_pair,
    channel_vector,
    element_positions,
    propagation_distances,
)

__version__ = "0.1.0"
