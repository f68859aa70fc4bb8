"""Artificial-noise-aided hybrid secure beamforming for two-user downlink NOMA.

Library plus CLI for evaluating and optimizing the secrecy sum rate of a
multi-antenna base station serving two users in the presence of a passive
multi-antenna eavesdropper: exact per-realization rates, the deterministic
large-N approximation, closed-form and search-based power allocation, beam
scalar optimization and benchmark comparisons.
"""

from .allocation import (
    AllocContext,
    AllocSolution,
    alloc_context,
    an_tradeoff_derivative,
    feasibility_pmin,
    inner_power_split,
    no_an_power_split,
    optimize_power,
    optimize_power_highsnr,
    qos_power_mass,
    split_objective_derivatives,
    user_rate_objective,
)
from .beamform import BeamformSet, BetaPair, build_set, build_v1, build_v2
from .channel import (
    ChannelSet,
    SystemConfig,
    config_from_db,
    draw_channels,
    snr_to_variances,
    trial_rng,
)
from .errors import (
    DataQualityError,
    DegenerateChannelError,
    InfeasibleConfigError,
    SecnomaError,
)
from .linalg import inner, logdet_hpd, null_space_basis
from .rates import (
    PowerSplit,
    RateReport,
    approx_sinr_u1,
    approx_ssr,
    beam_coefficients,
    exact_rates,
    sinr_u1_exact,
)
from .schemes import (
    SchemeResult,
    SchemeSpec,
    beta2_from_beta1_highsnr,
    coupling_residual,
    optimize_betas,
    optimize_betas_highsnr,
    run_scheme,
)
from .sweep import (
    SweepRow,
    SweepSpec,
    load_config_file,
    mc_validate,
    rows_to_csv,
    run_sweep,
    sweep_spec_from_mapping,
    system_config_from_mapping,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AllocContext",
    "AllocSolution",
    "BeamformSet",
    "BetaPair",
    "ChannelSet",
    "DataQualityError",
    "DegenerateChannelError",
    "InfeasibleConfigError",
    "PowerSplit",
    "RateReport",
    "SchemeResult",
    "SchemeSpec",
    "SecnomaError",
    "SweepRow",
    "SweepSpec",
    "SystemConfig",
    "alloc_context",
    "an_tradeoff_derivative",
    "approx_sinr_u1",
    "approx_ssr",
    "beam_coefficients",
    "beta2_from_beta1_highsnr",
    "build_set",
    "build_v1",
    "build_v2",
    "config_from_db",
    "coupling_residual",
    "draw_channels",
    "exact_rates",
    "feasibility_pmin",
    "inner",
    "inner_power_split",
    "load_config_file",
    "logdet_hpd",
    "mc_validate",
    "no_an_power_split",
    "null_space_basis",
    "optimize_betas",
    "optimize_betas_highsnr",
    "optimize_power",
    "optimize_power_highsnr",
    "qos_power_mass",
    "rows_to_csv",
    "run_scheme",
    "run_sweep",
    "sinr_u1_exact",
    "snr_to_variances",
    "split_objective_derivatives",
    "sweep_spec_from_mapping",
    "system_config_from_mapping",
    "trial_rng",
    "user_rate_objective",
    "write_csv",
]
