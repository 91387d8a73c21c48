"""CLI and experiment orchestration."""

from .config import ExperimentConfig, resolve_x0
from .runner import (
    RunReport,
    classify_regions,
    compare_methods,
    emit_beta_field,
    list_methods,
    list_problems,
    run_experiment,
)

__all__ = [
    "ExperimentConfig",
    "resolve_x0",
    "RunReport",
    "run_experiment",
    "compare_methods",
    "emit_beta_field",
    "classify_regions",
    "list_problems",
    "list_methods",
]
