"""Configuration, Monte-Carlo sweeps, result files and the command line."""

from .config import SweepSpec, load_config, parse_config
from .observe import ObservationResult, run_observation_suite
from .results import COLUMNS, emit_results, results_csv
from .sweep import CdrPoint, PfaResult, run_cdr_sweep, run_pfa_calibration, wilson_interval

__all__ = [
    "COLUMNS",
    "CdrPoint",
    "ObservationResult",
    "PfaResult",
    "SweepSpec",
    "emit_results",
    "load_config",
    "parse_config",
    "results_csv",
    "run_cdr_sweep",
    "run_observation_suite",
    "run_pfa_calibration",
    "wilson_interval",
]
