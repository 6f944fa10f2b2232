from .core import Capfin
from .errors import (
    BracketError,
    CapfinError,
    MomentNotFiniteError,
    MonotonicityError,
    NonConvergenceError,
    NonFiniteIntegrandError,
    NumericalError,
    ValidationError,
)

__all__ = [
    "BracketError",
    "Capfin",
    "CapfinError",
    "MomentNotFiniteError",
    "MonotonicityError",
    "NonConvergenceError",
    "NonFiniteIntegrandError",
    "NumericalError",
    "ValidationError",
]
