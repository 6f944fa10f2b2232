"""
Exception hierarchy shared by the library and the CLI.

The CLI maps ``ValidationError`` to exit status 2 and ``NumericalError`` to
exit status 3.
"""

from __future__ import annotations

from typing import Any, Optional


class CapfinError(Exception):
    """Base class for every error raised by capfin."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class ValidationError(CapfinError, ValueError):
    """Invalid parameters, specs or configurations."""


class NumericalError(CapfinError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy number."""


class NonConvergenceError(NumericalError):
    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result


class NonFiniteIntegrandError(NumericalError):
    def __init__(self, x: float, value: float):
        super().__init__(f"integrand returned non-finite value {value!r} at x={x!r}")
        self.x = x
        self.value = value


class MomentNotFiniteError(NonConvergenceError):
    """The moment integral does not converge at the configured tolerance."""


class BracketError(NumericalError):
    def __init__(self, message: str, cost_lo: float | None = None, cost_hi: float | None = None):
        super().__init__(message)
        self.cost_lo = cost_lo
        self.cost_hi = cost_hi

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["cost_at_lo"] = self.cost_lo
        out["cost_at_hi"] = self.cost_hi
        return out


class MonotonicityError(NumericalError):
    """A monotonicity certificate failed (supremum ratio, Lagrangian trace or budget sweep)."""

    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result
