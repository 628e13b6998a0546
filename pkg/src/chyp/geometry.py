"""Siegel domain, unit ball, the integral group and point-pair invariants.

Points of the Siegel domain are Z = (z_1, ..., z_n, z_{n+1}) with
Im z_{n+1} > sum |z_j|^2.  Each :class:`SiegelPoint` caches

    t = Re z_{n+1},   beta = sum |z_j|^2,   rho = Im z_{n+1} - beta,

and every formula below reads the cache.  beta is computed with an exactly
rounded sum, so it does not change when the z_j are permuted.

Group elements are gamma = (sigma; a, b, c, d) with ad - bc = 1 acting by

    z_j     -> z_{sigma(j)} / (c z_{n+1} + d)
    z_{n+1} -> (a z_{n+1} + b) / (c z_{n+1} + d).

Permutations are 0-based index arrays: ``sigma[j]`` is the source slot of
output slot ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PoleError, PreconditionError
from .quadrature import DEFAULT_QUAD, QuadratureSpec, tanh_sinh

__all__ = [
    "SiegelPoint",
    "BallPoint",
    "GroupElement",
    "BoundaryPoint",
    "HeisenbergElement",
    "cayley",
    "cayley_inverse",
    "act",
    "automorphy",
    "chart",
    "moebius_real",
    "moebius_real_derivative",
    "pair_invariants_uv",
    "pair_invariants_xy",
    "halfplane_pair",
    "cygan_distance",
    "heisenberg_mul",
    "haar_density",
    "truncated_volume_integral",
    "random_siegel_point",
    "random_group_element",
    "random_ball_point",
]


def _complex_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


def _sq_norm(z: np.ndarray) -> float:
    return math.fsum((z.real * z.real + z.imag * z.imag).tolist())


class SiegelPoint:
    """A point of the Siegel domain with cached (t, rho, beta)."""

    __slots__ = ("z", "zlast", "t", "rho", "beta")

    def __init__(self, z: Sequence[complex], zlast: complex):
        zv = _complex_vector(z)
        if zv.size < 1:
            raise PreconditionError("a Siegel point needs n >= 1 coordinates z_j")
        zl = complex(zlast)
        beta = _sq_norm(zv)
        rho = zl.imag - beta
        if not (rho > 0 and math.isfinite(rho)):
            raise PreconditionError(f"point is not interior: Im z_(n+1) - sum|z_j|^2 = {rho}")
        object.__setattr__(self, "z", zv)
        object.__setattr__(self, "zlast", zl)
        object.__setattr__(self, "t", zl.real)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "beta", beta)

    def __setattr__(self, name, value):
        raise AttributeError("SiegelPoint is immutable")

    @classmethod
    def from_chart(cls, z: Sequence[complex], t: float, rho: float) -> "SiegelPoint":
        """Build the point with horizontal part ``z``, height ``t`` and depth ``rho``."""
        zv = _complex_vector(z)
        return cls(zv, complex(t, rho + _sq_norm(zv)))

    @property
    def n(self) -> int:
        return self.z.size

    def chart(self) -> tuple[float, float, float]:
        return self.t, self.rho, self.beta

    def permuted(self, sigma: Sequence[int]) -> "SiegelPoint":
        return SiegelPoint(self.z[list(sigma)], self.zlast)

    def to_json(self) -> dict:
        return {"z": [[v.real, v.imag] for v in self.z], "zlast": [self.zlast.real, self.zlast.imag]}

    @classmethod
    def from_json(cls, obj: dict) -> "SiegelPoint":
        try:
            z = [complex(re, im) for re, im in obj["z"]]
            zl = complex(*obj["zlast"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed point JSON: {exc}") from None
        return cls(z, zl)

    def __eq__(self, other):
        return (isinstance(other, SiegelPoint) and self.zlast == other.zlast
                and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.zlast, tuple(self.z.tolist())))

    def __repr__(self):
        return f"SiegelPoint(z={self.z.tolist()}, zlast={self.zlast})"


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point (w_1, ..., w_{n+1}) of the open unit ball."""

    w: np.ndarray

    def __post_init__(self):
        wv = _complex_vector(self.w)
        if wv.size < 2:
            raise PreconditionError("a ball point needs n + 1 >= 2 coordinates")
        if not _sq_norm(wv) < 1.0:
            raise PreconditionError("ball point must satisfy sum |w_j|^2 < 1")
        object.__setattr__(self, "w", wv)

    @property
    def n(self) -> int:
        return self.w.size - 1


@dataclass(frozen=True)
class BoundaryPoint:
    """A point zeta of the free boundary (the real line)."""

    zeta: float

    def __post_init__(self):
        if not math.isfinite(self.zeta):
            raise PreconditionError("boundary point must be finite")


def _zeta(p) -> float:
    return p.zeta if isinstance(p, BoundaryPoint) else float(p)


@dataclass(frozen=True)
class GroupElement:
    """gamma = (sigma; a, b, c, d) with integer entries and ad - bc = 1."""

    sigma: tuple
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        sig = tuple(int(i) for i in self.sigma)
        if sorted(sig) != list(range(len(sig))):
            raise PreconditionError(f"sigma {sig} is not a permutation of 0..n-1")
        a, b, c, d = (int(v) for v in (self.a, self.b, self.c, self.d))
        if a * d - b * c != 1:
            raise PreconditionError(f"determinant ad - bc = {a * d - b * c}, expected 1")
        object.__setattr__(self, "sigma", sig)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def abcd(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(tuple(range(n)), 1, 0, 0, 1)

    @classmethod
    def inversion(cls, n: int) -> "GroupElement":
        return cls(tuple(range(n)), 0, -1, 1, 0)

    @classmethod
    def translation(cls, n: int, b: int = 1) -> "GroupElement":
        return cls(tuple(range(n)), 1, b, 0, 1)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        """Product self * other, so that act(self @ other, Z) = act(self, act(other, Z))."""
        if self.n != other.n:
            raise PreconditionError("group elements act on different dimensions")
        sig = tuple(other.sigma[j] for j in self.sigma)
        a1, b1, c1, d1 = self.abcd
        a2, b2, c2, d2 = other.abcd
        return GroupElement(sig, a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
                            c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)

    def inverse(self) -> "GroupElement":
        inv = [0] * self.n
        for j, s in enumerate(self.sigma):
            inv[s] = j
        return GroupElement(tuple(inv), self.d, -self.b, -self.c, self.a)

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "abcd": list(self.abcd)}

    @classmethod
    def from_json(cls, obj: dict) -> "GroupElement":
        try:
            return cls(tuple(obj["sigma"]), *obj["abcd"])
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed group element JSON: {exc}") from None


@dataclass(frozen=True)
class HeisenbergElement:
    """(z, t) in C^n x R."""

    z: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "z", _complex_vector(self.z))
        object.__setattr__(self, "t", float(self.t))

    def __eq__(self, other):
        return (isinstance(other, HeisenbergElement) and self.t == other.t
                and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.t, tuple(self.z.tolist())))

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.z, -self.t)


# ---------------------------------------------------------------------------
# maps and actions
# ---------------------------------------------------------------------------

def cayley(w: BallPoint) -> SiegelPoint:
    """Cayley transform from the unit ball onto the Siegel domain."""
    wl = w.w[-1]
    den = 1.0 - wl
    if den == 0:
        raise PoleError("Cayley transform pole at w_(n+1) = 1")
    return SiegelPoint(1j * w.w[:-1] / den, 1j * (1.0 + wl) / den)


def cayley_inverse(Z: SiegelPoint) -> BallPoint:
    den = Z.zlast + 1j
    return BallPoint(np.append(2.0 * Z.z / den, (Z.zlast - 1j) / den))


def automorphy(gamma: GroupElement, Z: SiegelPoint) -> complex:
    """The factor c z_{n+1} + d."""
    return gamma.c * Z.zlast + gamma.d


def act(gamma: GroupElement, Z: SiegelPoint) -> SiegelPoint:
    if gamma.n != Z.n:
        raise PreconditionError(f"group element for n={gamma.n} applied to a point with n={Z.n}")
    j = automorphy(gamma, Z)
    if j == 0:
        raise PoleError("c z_(n+1) + d = 0")
    return SiegelPoint(Z.z[list(gamma.sigma)] / j, (gamma.a * Z.zlast + gamma.b) / j)


def chart(Z: SiegelPoint) -> tuple[float, float, float]:
    """(t, rho, beta) of a point."""
    return Z.chart()


def moebius_real(gamma: GroupElement, zeta) -> float:
    x = _zeta(zeta)
    den = gamma.c * x + gamma.d
    if den == 0:
        raise PoleError(f"c*zeta + d = 0 at zeta = {x}")
    return (gamma.a * x + gamma.b) / den


def moebius_real_derivative(gamma: GroupElement, zeta) -> float:
    """(c zeta + d)^-2, the derivative of the real Moebius map."""
    x = _zeta(zeta)
    den = gamma.c * x + gamma.d
    if den == 0:
        raise PoleError(f"c*zeta + d = 0 at zeta = {x}")
    return 1.0 / (den * den)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def _numerator(Z: SiegelPoint, Zp: SiegelPoint) -> float:
    dt = Z.t - Zp.t
    dh = Z.zlast.imag - Zp.zlast.imag
    return dt * dt + dh * dh


def pair_invariants_uv(Z: SiegelPoint, Zp: SiegelPoint) -> tuple[float, float]:
    """u = |z_{n+1} - z'_{n+1}|^2 / (4 rho rho'),  v = beta beta' / (rho rho')."""
    u = _numerator(Z, Zp) / (4.0 * Z.rho * Zp.rho)
    v = Z.beta * Zp.beta / (Z.rho * Zp.rho)
    return u, v


def pair_invariants_xy(Z: SiegelPoint, Zp: SiegelPoint) -> tuple[float, float]:
    """x = |z_{n+1} - z'_{n+1}|^2 / (4 rho (rho' + beta')),  y = beta / rho."""
    x = _numerator(Z, Zp) / (4.0 * Z.rho * (Zp.rho + Zp.beta))
    return x, Z.beta / Z.rho


def halfplane_pair(w: complex, wp: complex) -> float:
    """|w - w'|^2 / (4 Im w Im w'), the upper half-plane point-pair form."""
    return abs(w - wp) ** 2 / (4.0 * w.imag * wp.imag)


def cygan_distance(Z: SiegelPoint, Zp: SiegelPoint) -> float:
    """log of (1/sqrt(rho)) | |z - z'|^2 + rho' + i(t - t' + 2 Im <z, z'>) |^(1/2).

    <z, z'> = sum z_j conj(z'_j).  Not symmetric: the first argument
    supplies the 1/sqrt(rho) normalization.  As a function of its second
    argument it is harmonic for the Laplace-Beltrami operator.
    """
    dz = Z.z - Zp.z
    herm = complex(np.sum(Z.z * np.conj(Zp.z)))
    gauge = complex(_sq_norm(dz) + Zp.rho, Z.t - Zp.t + 2.0 * herm.imag)
    return 0.5 * math.log(abs(gauge)) - 0.5 * math.log(Z.rho)


def heisenberg_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    """(z, t)(z', t') = (z + z', t + t' + 2 Im sum z_j conj(z'_j))."""
    if g.z.size != h.z.size:
        raise PreconditionError("Heisenberg elements of different dimension")
    # Im(z conj z') = y x' - x y', written out so that h = g^-1 gives exactly 0
    twist = 2.0 * math.fsum((g.z.imag * h.z.real - g.z.real * h.z.imag).tolist())
    return HeisenbergElement(g.z + h.z, g.t + h.t + twist)


def haar_density(Z: SiegelPoint) -> float:
    """rho^-(n+2), the density of the left Haar measure in (z, t, rho)."""
    return Z.rho ** (-(Z.n + 2))


def truncated_volume_integral(y_last: float, epsilon: float, n: int,
                              quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """1/2 int_epsilon^y (y - t)^(n-1) t^-(n+2) dt, computed in the variable log t.

    Grows like epsilon^-(n+1) as epsilon -> 0, which is the divergence of the
    covolume.
    """
    if not (0 < epsilon < y_last):
        raise PreconditionError("need 0 < epsilon < y_last")
    if n < 1:
        raise PreconditionError("n must be >= 1")

    def g(v):
        t = np.exp(v)
        return (y_last - t) ** (n - 1) * t ** (-(n + 1))

    return 0.5 * tanh_sinh(g, math.log(epsilon), math.log(y_last), quad,
                           what="truncated volume integral")


# ---------------------------------------------------------------------------
# random sampling helpers (seeded, for property checks)
# ---------------------------------------------------------------------------

def random_siegel_point(rng: np.random.Generator, n: int, *, zmax: float = 0.8, zmin: float = 0.0,
                        rho_range: tuple[float, float] = (0.3, 2.0),
                        t_range: tuple[float, float] = (-1.0, 1.0)) -> SiegelPoint:
    """Uniform-ish interior point: zmin <= |z_j| <= zmax, rho and t uniform on their ranges."""
    r = np.sqrt(rng.uniform(zmin ** 2, zmax ** 2, n))
    ang = rng.uniform(0.0, 2 * math.pi, n)
    return SiegelPoint.from_chart(r * np.exp(1j * ang), rng.uniform(*t_range),
                                  rng.uniform(*rho_range))


def random_ball_point(rng: np.random.Generator, n: int, radius: float = 0.9) -> BallPoint:
    v = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    v /= np.linalg.norm(v)
    return BallPoint(v * radius * rng.uniform(0.0, 1.0) ** (1.0 / (2 * n + 2)))


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def random_group_element(rng: np.random.Generator, n: int, max_entry: int = 6) -> GroupElement:
    """Random element: random coprime bottom row, a shifted top row, random sigma."""
    while True:
        c, d = (int(v) for v in rng.integers(-max_entry, max_entry + 1, 2))
        g, x, y = _egcd(c, d)
        if abs(g) == 1:
            break
    # a d - b c = 1 with a = g*y, b = -g*x solves it; shift along (c, d)
    a, b = g * y, -g * x
    k = int(rng.integers(-2, 3))
    sigma = tuple(int(i) for i in rng.permutation(n))
    return GroupElement(sigma, a + k * c, b + k * d, c, d)
