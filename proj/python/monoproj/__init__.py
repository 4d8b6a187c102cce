"""Monotone projection of Gaussian process posteriors."""

from ._core import (
    NumericalError,
    ValidationError,
    fit,
    minmax_oracle,
    pava,
    project_surface,
    run_cli,
    simulate_curve,
    simulate_surface,
    upper_set_oracle,
)

__all__ = [
    "NumericalError",
    "ValidationError",
    "fit",
    "minmax_oracle",
    "pava",
    "project_surface",
    "run_cli",
    "simulate_curve",
    "simulate_surface",
    "upper_set_oracle",
]
