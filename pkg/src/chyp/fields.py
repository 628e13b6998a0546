"""Closed-form eigenfunctions of the Laplacian, as functions of a Siegel point.

Wrap them with :meth:`ScalarField.from_point` to pick a chart.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError
from .geometry import SiegelPoint, _zeta
from .specfun import bessel_k

__all__ = [
    "rho_power",
    "rho_beta_power",
    "normal_solution",
    "singular_solution",
    "poisson_power",
]

PointFunction = Callable[[SiegelPoint], complex]


def rho_power(s) -> PointFunction:
    s = complex(s)
    return lambda Z: Z.rho ** s


def rho_beta_power(s, mu: int) -> PointFunction:
    """rho^s beta^mu, an eigenfunction for mu = 0 and mu = 1 - n."""
    s = complex(s)
    return lambda Z: Z.rho ** s * Z.beta ** mu


def normal_solution(s, n: int, m: int) -> PointFunction:
    """rho^((n+1)/2) K_{s-(n+1)/2}(2 pi |m| rho) prod_j K_0(2 pi |m| beta_j) e(m t)."""
    if m == 0:
        raise PreconditionError("the normal family needs m != 0")
    s = complex(s)
    c = 2 * math.pi * abs(m)
    half = (n + 1) / 2

    def f(Z: SiegelPoint) -> complex:
        if Z.n != n:
            raise PreconditionError(f"field built for n={n}, point has n={Z.n}")
        val = Z.rho ** half * bessel_k(s - half, c * Z.rho) * np.exp(2j * math.pi * m * Z.t)
        for zj in Z.z:
            val = val * bessel_k(0, c * abs(zj) ** 2)
        return complex(val)

    return f


def singular_solution(s, n: int, a: Sequence[float]) -> PointFunction:
    """omega^(n+1) K_{2s-(n+1)}(2 pi |a| omega) e(a . tau), with omega = sqrt(rho)
    and tau = (Re z_1, ..., Re z_n, Im z_1, ..., Im z_n)."""
    a = np.asarray(a, dtype=float)
    if a.shape != (2 * n,):
        raise PreconditionError(f"a must have 2n = {2 * n} entries")
    norm = float(np.linalg.norm(a))
    if norm == 0:
        raise PreconditionError("a must be nonzero")
    s = complex(s)

    def f(Z: SiegelPoint) -> complex:
        om = math.sqrt(Z.rho)
        tau = np.concatenate([Z.z.real, Z.z.imag])
        return complex(om ** (n + 1) * bessel_k(2 * s - (n + 1), 2 * math.pi * norm * om)
                       * np.exp(2j * math.pi * float(a @ tau)))

    return f


def poisson_power(s, zeta) -> PointFunction:
    """P(Z, zeta)^s with P = rho / ((rho + beta)^2 + (t - zeta)^2)."""
    s, zt = complex(s), _zeta(zeta)
    return lambda Z: (Z.rho / (Z.zlast.imag ** 2 + (Z.t - zt) ** 2)) ** s
