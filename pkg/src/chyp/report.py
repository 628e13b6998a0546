"""Spectral parameters and verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .errors import PreconditionError

__all__ = ["SpectralParam", "VerificationReport", "jsonable"]


@dataclass(frozen=True)
class SpectralParam:
    """Complex s together with the dimension n it belongs to.

    ``lam`` is the eigenvalue s(s - n - 1).  ``split`` is the pair (a, b)
    with a + b = s used by the two-variable kernel; when it is not given,
    :meth:`kernel_split` picks the pair that sits equally far inside the
    region Re a > 1, Re b > n - 1.
    """

    s: complex
    n: int
    split: tuple[complex, complex] | None = None

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        if self.n < 1:
            raise PreconditionError("n must be >= 1")
        if self.split is not None:
            a, b = (complex(v) for v in self.split)
            if abs(a + b - self.s) > 1e-12 * max(1.0, abs(self.s)):
                raise PreconditionError(f"split {a} + {b} does not add up to s = {self.s}")
            object.__setattr__(self, "split", (a, b))

    @property
    def lam(self) -> complex:
        return self.s * (self.s - self.n - 1)

    @property
    def real_s(self) -> float | complex:
        return self.s.real if self.s.imag == 0 else self.s

    def kernel_split(self) -> tuple[complex, complex]:
        if self.split is not None:
            return self.split
        a = 0.5 * (self.s - self.n + 2)
        return a, self.s - a

    def reflected(self) -> "SpectralParam":
        """The parameter n + 1 - s, which has the same eigenvalue."""
        return SpectralParam(self.n + 1 - self.s, self.n)


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars, complex numbers and tuples for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class VerificationReport:
    """Outcome of one identity check: the largest residual against its tolerance."""

    check: str
    paper_ref: str
    max_residual: float
    tolerance: float
    points: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "paper_ref": self.paper_ref,
            "points": jsonable(self.points),
            "max_residual": jsonable(float(self.max_residual)),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "details": jsonable(self.details),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.check}: residual {self.max_residual:.3e} (tol {self.tolerance:.1e})"
