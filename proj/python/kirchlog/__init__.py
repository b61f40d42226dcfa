"""Potential-well laboratory for a pseudo-parabolic Kirchhoff equation with logarithmic source."""

from ._core import (
    PHASE_MAP_CSV_HEADER,
    TRACE_CSV_HEADER,
    ConfigError,
    EnergyBreakdown,
    Grid,
    KirchlogError,
    ModelParams,
    __version__,
    classify,
    cmd_classify,
    cmd_constants,
    cmd_ground_state,
    cmd_simulate,
    cmd_sweep,
    cmd_well,
    embedding_constants,
    eval_energy,
    eval_I_delta,
    find_lambda_star,
    ground_state,
    nehari_project,
    run,
    sine_mode,
    well_depth,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
