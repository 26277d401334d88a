"""Gaussian bandits with side observations."""

from ._core import (
    EpisodeError,
    Instance,
    ValidationError,
    anytime_tail_bound,
    anytime_tail_bound_loose,
    confidence_radius,
    epsilon_worst_case,
    etc_schedule,
    full,
    gaps,
    lower_bound_value,
    run,
    solve_lp,
    standard,
    verify_anytime,
    verify_stopping_interval,
    verify_stopping_threshold,
)

__all__ = [
    "EpisodeError",
    "Instance",
    "ValidationError",
    "anytime_tail_bound",
    "anytime_tail_bound_loose",
    "confidence_radius",
    "epsilon_worst_case",
    "etc_schedule",
    "full",
    "gaps",
    "lower_bound_value",
    "run",
    "solve_lp",
    "standard",
    "verify_anytime",
    "verify_stopping_interval",
    "verify_stopping_threshold",
]
