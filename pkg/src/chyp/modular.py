"""Slash action, the Eisenstein series E_{k,m}, and the j_m invariants.

With tau = z_{n+1} and S(z) = z_1^2 + ... + z_n^2 (holomorphic squares),

    (phi | gamma)(Z) = (c tau + d)^-k e^m(-c S(z) / (c tau + d)) phi(gamma Z),
    E_{k,m}(Z) = 1/2 sum over coprime (c, d) of (c tau + d)^-k e^m(-c S(z) / (c tau + d)),

where e^m(x) = exp(2 pi i m x).  The index m may be any rational number.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConditioningError, PreconditionError
from .geometry import GroupElement, SiegelPoint, act
from .lattice import Truncation, ordered_sum
from .report import VerificationReport

__all__ = [
    "WeightIndex",
    "parse_index",
    "e_index",
    "slash",
    "eisenstein_km_partial",
    "verify_inversion_identity",
    "verify_translation_identity",
    "verify_weight_additivity",
    "g2", "g3", "discriminant",
    "j_invariant",
    "classical_j",
    "classical_j_coefficients",
    "verify_degenerate_reduction",
    "check_local_boundedness",
]


def parse_index(m) -> Fraction:
    """Index as an exact fraction; accepts ints, Fractions and strings like '3/2'."""
    try:
        return Fraction(m) if not isinstance(m, float) else Fraction(m).limit_denominator(10 ** 9)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"cannot read index {m!r}: {exc}") from None


@dataclass(frozen=True)
class WeightIndex:
    """Weight k (even, >= 0) and rational index m."""

    k: int
    m: Fraction = Fraction(0)

    def __post_init__(self):
        if self.k < 0 or self.k % 2:
            raise PreconditionError(f"weight must be even and nonnegative, got {self.k}")
        object.__setattr__(self, "m", parse_index(self.m))

    def as_dict(self) -> dict:
        return {"k": self.k, "m": str(self.m)}


def _square_sum(z: np.ndarray) -> complex:
    """z_1^2 + ... + z_n^2, exactly rounded so it ignores the order of the z_j."""
    sq = z * z
    return complex(math.fsum(sq.real.tolist()), math.fsum(sq.imag.tolist()))


def e_index(m, x):
    """e^m(x) = exp(2 pi i m x); works on arrays."""
    return np.exp(2j * math.pi * float(parse_index(m)) * np.asarray(x))


def slash(phi: Callable[[SiegelPoint], complex], gamma: GroupElement, wi: WeightIndex,
          Z: SiegelPoint) -> complex:
    j = gamma.c * Z.zlast + gamma.d
    factor = j ** (-wi.k) * complex(e_index(wi.m, -gamma.c * _square_sum(Z.z) / j))
    return factor * complex(phi(act(gamma, Z)))


def eisenstein_km_partial(Z: SiegelPoint, wi: WeightIndex, tr: Truncation) -> complex:
    """Box-truncated E_{k,m}; needs k >= 4 for the full series to converge."""
    if wi.k < 4:
        raise PreconditionError("E_{k,m} needs weight k >= 4")
    c, d = tr.bottom_rows()
    S = _square_sum(Z.z)
    tau = Z.zlast
    mm = float(wi.m)

    def terms(ch):
        cf, df = c[ch].astype(float), d[ch].astype(float)
        j = cf * tau + df
        out = j ** (-wi.k)
        if mm != 0 and S != 0:
            out = out * np.exp(-2j * math.pi * mm * cf * S / j)
        return out

    return complex(0.5 * ordered_sum(terms, c.size))


def verify_inversion_identity(Z: SiegelPoint, wi: WeightIndex, tr: Truncation, *,
                              tolerance: float = 1e-10) -> VerificationReport:
    """E(z/tau, -1/tau) against tau^k e^m(S(z)/tau) E(z, tau), same box on both sides.

    The reindexing (c, d) -> (d, -c) maps the box onto itself, so the two
    sides agree up to rounding rather than up to truncation.
    """
    W = act(GroupElement.inversion(Z.n), Z)
    lhs = eisenstein_km_partial(W, wi, tr)
    rhs = Z.zlast ** wi.k * complex(e_index(wi.m, _square_sum(Z.z) / Z.zlast)) * eisenstein_km_partial(Z, wi, tr)
    gap = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return VerificationReport("inversion-identity", "E_{k,m} under z -> z/tau, tau -> -1/tau",
                              gap, tolerance, points=[Z.to_json()],
                              details={"weight_index": wi.as_dict(), "lhs": lhs, "rhs": rhs, "N": tr.N})


def verify_translation_identity(Z: SiegelPoint, wi: WeightIndex, tr: Truncation, *,
                                tolerance: float = 1e-6) -> VerificationReport:
    """E(z, tau + 1) against E(z, tau) at a fixed box.

    The shift moves the box to a sheared copy, so the two sides differ by
    the terms in the symmetric difference; ``shear_bound`` in the details
    is 1/2 the sum of their absolute values.
    """
    lhs = eisenstein_km_partial(SiegelPoint(Z.z, Z.zlast + 1), wi, tr)
    rhs = eisenstein_km_partial(Z, wi, tr)
    gap = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return VerificationReport("translation-identity", "E_{k,m} under tau -> tau + 1",
                              gap, tolerance, points=[Z.to_json()],
                              details={"weight_index": wi.as_dict(), "lhs": lhs, "rhs": rhs, "N": tr.N,
                                       "shear_bound": _shear_bound(Z, wi, tr.N) / max(abs(rhs), 1e-300)})


def _shear_bound(Z: SiegelPoint, wi: WeightIndex, N: int) -> float:
    """1/2 sum of |term| over the box minus its shear (c, d) -> (c, d + c) and vice versa."""
    r = np.arange(-2 * N, 2 * N + 1, dtype=np.int64)
    C, D = np.meshgrid(np.arange(-N, N + 1, dtype=np.int64), r, indexing="ij")
    in_box = np.abs(D) <= N
    in_shear = np.abs(D - C) <= N
    keep = (in_box ^ in_shear) & (np.gcd(C, D) == 1)
    c, d = C[keep].astype(float), D[keep].astype(float)
    j = c * Z.zlast + d
    S = _square_sum(Z.z)
    mag = np.abs(j) ** (-wi.k) * np.exp(-2 * math.pi * float(wi.m) * np.imag(-c * S / j))
    return 0.5 * math.fsum(mag.tolist())


def verify_weight_additivity(Z: SiegelPoint, m, tr: Truncation, *,
                             tolerance: float = 1e-10) -> VerificationReport:
    """Delta_m picks up tau^12 e^{3m}(S(z)/tau) under inversion, so j_m is invariant."""
    m = parse_index(m)
    W = act(GroupElement.inversion(Z.n), Z)
    _, _, d0 = discriminant(Z, m, tr)
    _, _, d1 = discriminant(W, m, tr)
    factor = Z.zlast ** 12 * complex(e_index(3 * m, _square_sum(Z.z) / Z.zlast))
    gap_delta = abs(d1 - factor * d0) / abs(factor * d0)
    j0, j1 = 1728 * g2(Z, m, tr) ** 3 / d0, 1728 * g2(W, m, tr) ** 3 / d1
    gap_j = abs(j1 - j0) / abs(j0)
    return VerificationReport("weight-additivity", "Delta_m has weight 12 and index 3m, j_m weight 0",
                              max(gap_delta, gap_j), tolerance, points=[Z.to_json()],
                              details={"m": str(m), "delta_gap": gap_delta, "j_gap": gap_j, "N": tr.N})


def g2(Z: SiegelPoint, m, tr: Truncation) -> complex:
    return 4.0 / 3.0 * math.pi ** 4 * eisenstein_km_partial(Z, WeightIndex(4, parse_index(m)), tr)


def g3(Z: SiegelPoint, m, tr: Truncation) -> complex:
    return 8.0 / 27.0 * math.pi ** 6 * eisenstein_km_partial(Z, WeightIndex(6, parse_index(m)), tr)


def discriminant(Z: SiegelPoint, m, tr: Truncation) -> tuple[complex, complex, complex]:
    """(g_{2,m}, g_{3,3m/2}, Delta_m = g_{2,m}^3 - 27 g_{3,3m/2}^2)."""
    m = parse_index(m)
    a = g2(Z, m, tr)
    b = g3(Z, Fraction(3, 2) * m, tr)
    return a, b, a ** 3 - 27 * b ** 2


def j_invariant(Z: SiegelPoint, m, tr: Truncation, *, min_relative_delta: float = 1e-10) -> complex:
    """1728 g_{2,m}^3 / Delta_m.

    Raises :class:`ConditioningError` when Delta_m is lost in cancellation,
    i.e. |Delta| < min_relative_delta * (|g2|^3 + 27 |g3|^2).
    """
    a, b, delta = discriminant(Z, m, tr)
    scale = abs(a) ** 3 + 27 * abs(b) ** 2
    if abs(delta) < min_relative_delta * scale:
        raise ConditioningError(f"Delta_m is numerically zero (|Delta| = {abs(delta):.3e})",
                                 abs(delta), delta)
    return 1728.0 * a ** 3 / delta


# ---------------------------------------------------------------------------
# classical j from q-expansions
# ---------------------------------------------------------------------------

def _sigma(p: int, n: int) -> int:
    return sum(d ** p for d in range(1, n + 1) if n % d == 0)


def _mul(a: list[int], b: list[int], L: int) -> list[int]:
    out = [0] * L
    for i, x in enumerate(a[:L]):
        if x:
            for j, y in enumerate(b[: L - i]):
                out[i + j] += x * y
    return out


def classical_j_coefficients(order: int = 10) -> list[int]:
    """Coefficients of q^-1, q^0, ..., q^order of j, from the E4 and E6 expansions.

    Integer power-series arithmetic: Delta = (E4^3 - E6^2) / 1728 = q D(q)
    with D(0) = 1, then j = q^-1 E4^3 / D.
    """
    L = order + 2
    e4 = [1] + [240 * _sigma(3, k) for k in range(1, L + 1)]
    e6 = [1] + [-504 * _sigma(5, k) for k in range(1, L + 1)]
    e4c = _mul(_mul(e4, e4, L + 1), e4, L + 1)
    e6s = _mul(e6, e6, L + 1)
    delta = [(x - y) // 1728 for x, y in zip(e4c, e6s)]
    D = delta[1:L + 1]  # Delta / q
    inv = [0] * L
    inv[0] = 1
    for k in range(1, L):
        inv[k] = -sum(D[i] * inv[k - i] for i in range(1, k + 1))
    return _mul(e4c, inv, L)


def classical_j(tau: complex, order: int = 10) -> complex:
    """Classical j(tau) from its q-expansion through q^order."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise PreconditionError("tau must lie in the upper half-plane")
    q = cmath.exp(2j * math.pi * tau)
    coeffs = classical_j_coefficients(order)
    return sum(cf * q ** (k - 1) for k, cf in enumerate(coeffs))


def verify_degenerate_reduction(z_last: complex, m, tr: Truncation, *, n: int = 1,
                                tolerance: float = 5e-3) -> VerificationReport:
    """j_m at (0, ..., 0, z_last) against the classical j."""
    z_last = complex(z_last)
    if not z_last.imag > 0:
        raise PreconditionError("z_last must have positive imaginary part")
    Z = SiegelPoint(np.zeros(n), z_last)
    val = j_invariant(Z, m, tr)
    ref = classical_j(z_last)
    gap = abs(val - ref) / abs(ref)
    return VerificationReport("degenerate-j", "j_m on the slice z = 0 equals the classical j",
                              gap, tolerance, points=[Z.to_json()],
                              details={"m": str(parse_index(m)), "j_m": val, "classical": ref, "N": tr.N})


def check_local_boundedness(phi: Callable[[SiegelPoint], complex], path: Sequence[SiegelPoint]
                            ) -> VerificationReport:
    """Fit log|phi| against log Im z_{n+1} along the path; bounded iff the slope is not positive.

    The tolerance is the fit's standard error (at least 1e-9), so a flat
    profile passes and a genuine power-law growth fails.
    """
    if len(path) < 3:
        raise PreconditionError("need at least three path samples")
    h = np.array([P.zlast.imag for P in path])
    if np.any(np.diff(h) <= 0):
        raise PreconditionError("path must have increasing Im z_(n+1)")
    vals = np.array([abs(complex(phi(P))) for P in path])
    X, Y = np.log(h), np.log(np.maximum(vals, 1e-300))
    A = np.column_stack([X, np.ones_like(X)])
    coef, res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    slope = float(coef[0])
    dof = max(len(X) - 2, 1)
    resid = Y - A @ coef
    s2 = float(resid @ resid) / dof
    stderr = math.sqrt(s2 / float(np.sum((X - X.mean()) ** 2)))
    return VerificationReport("local-boundedness", "boundedness as Im z_(n+1) grows",
                              slope, max(stderr, 1e-9), points=[P.to_json() for P in path],
                              details={"max_abs": float(vals.max()), "slope": slope, "stderr": stderr})
