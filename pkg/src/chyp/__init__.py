"""Numerics for automorphic functions on complex hyperbolic space.

Submodules: :mod:`specfun` (special functions), :mod:`geometry` (points,
group, invariants), :mod:`operator` (finite-difference Laplacians),
:mod:`series` (Eisenstein, Poincare and boundary series, Fourier
coefficients), :mod:`modular` (E_{k,m} and j_m), :mod:`cli`.
"""

__version__ = "0.1.0"

from .errors import (
    ChypError,
    ConditioningError,
    NumericFailure,
    PoleError,
    PreconditionError,
    StencilError,
)
from .geometry import BallPoint, BoundaryPoint, GroupElement, HeisenbergElement, SiegelPoint, act, cayley
from .lattice import Truncation
from .modular import WeightIndex, eisenstein_km_partial, j_invariant
from .operator import ScalarField, StencilSpec
from .quadrature import QuadratureSpec, SeriesSpec
from .report import SpectralParam, VerificationReport
from .series import eisenstein_partial, poincare_partial

__all__ = [
    "__version__",
    "ChypError", "ConditioningError", "NumericFailure", "PoleError", "PreconditionError", "StencilError",
    "BallPoint", "BoundaryPoint", "GroupElement", "HeisenbergElement", "SiegelPoint", "act", "cayley",
    "Truncation", "WeightIndex", "eisenstein_km_partial", "j_invariant",
    "ScalarField", "StencilSpec", "QuadratureSpec", "SeriesSpec", "SpectralParam", "VerificationReport",
    "eisenstein_partial", "poincare_partial",
]
