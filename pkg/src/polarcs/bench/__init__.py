"""Monte Carlo experiment runner."""
from .config import ExperimentConfig, PRESETS, dump_config, load_config, parse_lines
from .runner import TrialRecord, run_sweep, run_trial, summarize, write_results

__all__ = [
    "ExperimentConfig",
    "PRESETS",
    "TrialRecord",
    "dump_config",
    "load_config",
    "parse_lines",
    "run_sweep",
    "run_trial",
    "summarize",
    "write_results",
]
