"""Digamma/polygamma evaluation and numerical checks of their inequalities."""

from .errors import ConvergenceError, DomainError, EvalError, PoleError
from .specfun import (
    CONSTANTS,
    EvalOptions,
    EvalResult,
    binet_oracle,
    cm_check,
    digamma,
    polygamma,
    polygamma_bounds,
    psi,
    recurrence_shift,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS", "EvalOptions", "EvalResult", "digamma", "polygamma", "psi",
    "recurrence_shift", "binet_oracle", "polygamma_bounds", "cm_check",
    "EvalError", "DomainError", "PoleError", "ConvergenceError",
]
