"""Dyadic-band spectral toolkit for incompressible flow on the periodic
unit box: smooth frequency projections, banded derivative norms, a
dealiased viscous solver, and the weighted double-series diagnostics
built on top of them."""

from .spectral import (
    Grid,
    PhysicalField,
    RealnessError,
    SpectralField,
    forward_transform,
    inverse_transform,
    spectral_derivative,
    spectral_from_mode,
)
from .bands import (
    BandDecomposition,
    band_multiplier,
    decompose,
    default_top_band,
    lowpass_multiplier,
    project_band,
    project_leq,
)
from .norms import DsigmaField, LogNorm, band_norm_term, dsigma_magnitude, lq_norm
from .dealias import refined_product
from .generators import (
    FieldGenerator,
    RANDOM_BAND_LIMITED,
    SINGLE_MODE,
    SMOOTH_DECAYING,
    WAVE_PACKET,
)
from .solver import (
    BlowUpError,
    EnergyMonitor,
    InitialSpec,
    SolverConfig,
    VelocityState,
    beltrami_state,
    pressure_solve,
    random_divfree_state,
    read_checkpoint,
    run,
    step,
    taylor_green_state,
    write_checkpoint,
)
from .series import (
    BarrierConfig,
    BarrierResult,
    SeriesMonitor,
    SeriesParams,
    aggregate_series,
    barrier_ode,
    epsilon_threshold,
    series_value,
    term_table,
)
from .checks import CHECK_NAMES, CheckReport, default_reports, write_reports_csv
from .config import ConfigError, RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "Grid", "PhysicalField", "RealnessError", "SpectralField",
    "forward_transform", "inverse_transform", "spectral_derivative",
    "spectral_from_mode",
    "BandDecomposition", "band_multiplier", "decompose", "default_top_band",
    "lowpass_multiplier", "project_band", "project_leq",
    "DsigmaField", "LogNorm", "band_norm_term", "dsigma_magnitude", "lq_norm",
    "refined_product",
    "FieldGenerator", "RANDOM_BAND_LIMITED", "SINGLE_MODE", "SMOOTH_DECAYING",
    "WAVE_PACKET",
    "BlowUpError", "EnergyMonitor", "InitialSpec", "SolverConfig",
    "VelocityState", "beltrami_state", "pressure_solve", "random_divfree_state",
    "read_checkpoint", "run", "step", "taylor_green_state", "write_checkpoint",
    "BarrierConfig", "BarrierResult", "SeriesMonitor", "SeriesParams",
    "aggregate_series", "barrier_ode", "epsilon_threshold", "series_value",
    "term_table",
    "CHECK_NAMES", "CheckReport", "default_reports", "write_reports_csv",
    "ConfigError", "RunConfig", "load_config",
    "__version__",
]
