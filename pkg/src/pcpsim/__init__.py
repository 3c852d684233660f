"""Symbol-level simulator and closed-form statistics for phase-coded-pilot
distributed phase synchronization in coherent over-the-air computation."""

from .model import (
    FixedSpeed,
    MobilityModel,
    NodeRealization,
    ParameterVector,
    PilotSymbol,
    RayleighSpeed,
    Static,
    SystemConfig,
    node_amp,
    snr_db_to_noise_var,
    validate,
    wavelength,
)
from .channel import (
    complex_noise,
    dl_phase,
    dl_receive,
    ul_phase,
    ul_receive,
    wrap_phase,
)
from .protocol import (
    OacOutcome,
    PhaseEstimates,
    Schedule,
    build_schedule,
    decompose_error,
    estimate_phase,
    run_oac_phase,
    run_sync_phase,
)
from .theory import (
    VarianceBreakdown,
    cdf_abs_deviation,
    rate_oac,
    rate_traditional,
    rmse_theory,
    round_trip_lag,
    var_cfo,
    var_mob_fixed,
    var_mob_rayleigh,
    var_noise,
)
from .montecarlo import (
    DeviationStats,
    TrialPlan,
    draw_realization,
    empirical_cdf,
    ks_distance,
    run_trials,
    trial_rng,
)
from .config_io import ConfigError, ExperimentSpec, SweepGrid, expand_sweep, parse_config

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DeviationStats",
    "ExperimentSpec",
    "FixedSpeed",
    "MobilityModel",
    "NodeRealization",
    "OacOutcome",
    "ParameterVector",
    "PhaseEstimates",
    "PilotSymbol",
    "RayleighSpeed",
    "Schedule",
    "Static",
    "SweepGrid",
    "SystemConfig",
    "TrialPlan",
    "VarianceBreakdown",
    "build_schedule",
    "cdf_abs_deviation",
    "complex_noise",
    "decompose_error",
    "dl_phase",
    "dl_receive",
    "draw_realization",
    "empirical_cdf",
    "estimate_phase",
    "expand_sweep",
    "ks_distance",
    "node_amp",
    "parse_config",
    "rate_oac",
    "rate_traditional",
    "rmse_theory",
    "round_trip_lag",
    "run_oac_phase",
    "run_sync_phase",
    "run_trials",
    "snr_db_to_noise_var",
    "trial_rng",
    "ul_phase",
    "ul_receive",
    "validate",
    "var_cfo",
    "var_mob_fixed",
    "var_mob_rayleigh",
    "var_noise",
    "wavelength",
    "wrap_phase",
]
