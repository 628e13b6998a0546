"""Exception types shared across the package."""

from __future__ import annotations


class ChypError(Exception):
    """Base class for all package errors."""


class PreconditionError(ChypError, ValueError):
    """An input violates a documented precondition."""


class PoleError(PreconditionError):
    """Evaluation lands on a pole (parameter pole, orbit collision, ...)."""


class StencilError(PreconditionError):
    """A finite-difference stencil leaves the domain of the field."""


class NumericFailure(ChypError, ArithmeticError):
    """A quadrature or series failed to converge.

    ``residual`` carries the last error estimate so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message: str, residual: float = float("nan"), value=None):
        super().__init__(f"{message} (residual estimate {residual:.3e})")
        self.residual = residual
        self.value = value


class ConditioningError(NumericFailure):
    """A quotient is too ill-conditioned to be trusted."""
