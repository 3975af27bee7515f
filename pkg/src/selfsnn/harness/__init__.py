"""Experiment registry, configuration, seeded execution and export."""

from .config import ConfigError, ExperimentConfig, coerce, load_yaml, parse_set
from .registry import LEVELS, REGISTRY, Experiment, get_experiment, list_experiments
from .runner import (
    RESULTS_CSV_HEADER,
    SUMMARY_KEYS,
    RunResult,
    execute,
    export_results,
    run_experiment,
    run_many,
    summary_text,
)

__all__ = [
    "ConfigError",
    "Experiment",
    "ExperimentConfig",
    "LEVELS",
    "REGISTRY",
    "RESULTS_CSV_HEADER",
    "RunResult",
    "SUMMARY_KEYS",
    "coerce",
    "execute",
    "export_results",
    "get_experiment",
    "list_experiments",
    "load_yaml",
    "parse_set",
    "run_experiment",
    "run_many",
    "summary_text",
]
