"""Monte Carlo harness: experiment configs, runner and CLI."""

from .config import ConfigError, ExperimentConfig, load_config
from .runner import TrialRecord, aggregate_ber, run, run_ber_trial

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "TrialRecord",
    "aggregate_ber",
    "run",
    "run_ber_trial",
]
