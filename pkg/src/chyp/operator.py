"""The Laplace-Beltrami operator in several charts, by central differences.

Each chart names a coordinate system and the form the operator takes in it:

``ball``
    complex w = (w_1, ..., w_{n+1}) in the unit ball;
    (1 - |w|^2) [sum_j d_j dbar_j - sum_{j,k} w_j conj(w_k) d_j dbar_k].
``siegel``
    complex (z_1, ..., z_{n+1});
    rho [sum_{j<=n+1} 2i (conj(z_j) d_{n+1} dbar_j - z_j dbar_{n+1} d_j) + sum_{j<=n} d_j dbar_j].
``horo``
    real (x_1..x_n, y_1..y_n, t, rho) with z_j = x_j + i y_j;
    rho [1/4 sum (d_xj^2 + d_yj^2) + (rho + beta) d_t^2 + rho d_rho^2 - n d_rho
         + sum (y_j d_xj - x_j d_yj) d_t].
``beta-theta``
    real (beta_1..beta_n, theta_1..theta_n, t, rho) with z_j = sqrt(beta_j) e^(i theta_j);
    rho [sum beta_j d_bj^2 + rho d_rho^2 + (rho + beta) d_t^2 + sum d_thj^2 / (4 beta_j)
         - sum d_thj d_t + sum d_bj - n d_rho].
``aggregate``
    real (beta, t, rho), for fields depending on the z_j only through beta;
    rho [beta d_b^2 + rho d_rho^2 + (rho + beta) d_t^2 + n d_b - n d_rho].
``radial-tau-omega``
    real (x_1..x_n, y_1..y_n, omega) with omega = sqrt(rho), for t-independent fields;
    1/4 [omega^2 (sum d_tau^2 + d_omega^2) - (2n + 1) omega d_omega].
``radial-xy``
    the two point-pair invariants (x, y) of the kernel equation, see
    :func:`apply_radial_operator`.

Wirtinger derivatives come from real stencils: with w = a + i b,
d_j dbar_k = 1/4 [H(a_j, a_k) + H(b_j, b_k) + i (H(a_j, b_k) - H(b_j, a_k))].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError, StencilError
from .geometry import (
    BallPoint,
    SiegelPoint,
    cayley,
    cygan_distance,
    pair_invariants_uv,
)
from .report import SpectralParam, VerificationReport

__all__ = [
    "CHARTS",
    "StencilSpec",
    "ScalarField",
    "chart_coordinates",
    "apply_ball_laplacian",
    "apply_siegel_laplacian",
    "apply_radial_operator",
    "apply_pair_operator",
    "eigen_residual",
    "harmonicity_check_cygan",
    "pullback_check",
]

CHARTS = ("ball", "siegel", "horo", "beta-theta", "aggregate", "radial-tau-omega", "radial-xy")

# first-derivative weights (offset -> weight, in units of 1/h)
_D1 = {
    2: {-1: -0.5, 1: 0.5},
    4: {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12},
}
# second-derivative weights (offset -> weight, in units of 1/h^2)
_D2 = {
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    4: {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12},
}


@dataclass(frozen=True)
class StencilSpec:
    """Central-difference settings.

    ``h`` is a single step or one per coordinate.  Coordinates that are
    positive by nature (rho, beta, omega, x, y) use the step relative to
    their value; the rest use h * max(1, |coordinate|).
    """

    h: float | tuple = 1e-3
    order: int = 2

    def __post_init__(self):
        if self.order not in (2, 4):
            raise PreconditionError("stencil order must be 2 or 4")
        hs = self.h if isinstance(self.h, tuple) else (self.h,)
        if not all(v > 0 for v in hs):
            raise PreconditionError("stencil steps must be positive")

    def base_step(self, i: int) -> float:
        if isinstance(self.h, tuple):
            return self.h[i]
        return self.h

    @property
    def reach(self) -> int:
        return self.order // 2

    def as_dict(self) -> dict:
        return {"h": self.h, "order": self.order}


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def _positive_mask(chart: str, n: int) -> list[bool]:
    """Which coordinates must stay positive (and use relative steps)."""
    if chart in ("ball", "siegel"):
        return [False] * (n + 1)
    if chart == "horo":
        return [False] * (2 * n + 1) + [True]
    if chart == "beta-theta":
        return [True] * n + [False] * (n + 1) + [True]
    if chart == "aggregate":
        return [True, False, True]
    if chart == "radial-tau-omega":
        return [False] * (2 * n) + [True]
    if chart == "radial-xy":
        return [True, True]
    raise PreconditionError(f"unknown chart {chart!r}")


def chart_coordinates(Z, chart: str) -> np.ndarray:
    """Coordinates of a point in a chart (a ball point for ``ball``)."""
    if chart == "ball":
        if not isinstance(Z, BallPoint):
            raise PreconditionError("the ball chart needs a BallPoint")
        return Z.w.copy()
    if not isinstance(Z, SiegelPoint):
        raise PreconditionError(f"chart {chart!r} needs a SiegelPoint")
    if chart == "siegel":
        return np.append(Z.z, Z.zlast)
    if chart == "horo":
        return np.concatenate([Z.z.real, Z.z.imag, [Z.t, Z.rho]])
    if chart == "beta-theta":
        return np.concatenate([np.abs(Z.z) ** 2, np.angle(Z.z), [Z.t, Z.rho]])
    if chart == "aggregate":
        return np.array([Z.beta, Z.t, Z.rho])
    if chart == "radial-tau-omega":
        return np.concatenate([Z.z.real, Z.z.imag, [math.sqrt(Z.rho)]])
    raise PreconditionError(f"chart {chart!r} has no Siegel-point coordinates")


def _point_from_chart(coords: np.ndarray, chart: str) -> SiegelPoint:
    if chart == "siegel":
        return SiegelPoint(coords[:-1], coords[-1])
    c = np.asarray(coords, dtype=float)
    if chart == "horo":
        n = (c.size - 2) // 2
        return SiegelPoint.from_chart(c[:n] + 1j * c[n:2 * n], c[-2], c[-1])
    if chart == "beta-theta":
        n = (c.size - 2) // 2
        return SiegelPoint.from_chart(np.sqrt(c[:n]) * np.exp(1j * c[n:2 * n]), c[-2], c[-1])
    if chart == "radial-tau-omega":
        n = (c.size - 1) // 2
        return SiegelPoint.from_chart(c[:n] + 1j * c[n:2 * n], 0.0, c[-1] ** 2)
    raise PreconditionError(f"cannot rebuild a point from chart {chart!r}")


@dataclass(frozen=True)
class ScalarField:
    """A callback on chart coordinates, tagged with its chart.

    Complex charts (``ball``, ``siegel``) pass a complex vector, the others
    a real vector.  Use :meth:`from_point` to wrap a function of
    :class:`SiegelPoint`.
    """

    func: Callable[[np.ndarray], complex]
    chart: str

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise PreconditionError(f"unknown chart {self.chart!r}; choose from {CHARTS}")

    def __call__(self, coords: np.ndarray) -> complex:
        return self.func(coords)

    @classmethod
    def from_point(cls, g: Callable[[SiegelPoint], complex], chart: str) -> "ScalarField":
        """Wrap ``g`` on the Siegel domain; for ``ball`` it is pulled back by the Cayley map."""
        if chart == "ball":
            return cls(lambda w: g(cayley(BallPoint(w))), chart)
        if chart in ("aggregate", "radial-xy"):
            raise PreconditionError(f"chart {chart!r} does not determine a point; pass a callback")
        return cls(lambda c: g(_point_from_chart(c, chart)), chart)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        if self.chart != other.chart:
            raise PreconditionError("cannot add fields on different charts")
        f, g = self.func, other.func
        return ScalarField(lambda c: f(c) + g(c), self.chart)

    def scaled(self, k: complex) -> "ScalarField":
        f = self.func
        return ScalarField(lambda c: k * f(c), self.chart)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

class _Stencil:
    """Memoized central differences of a field around one point."""

    def __init__(self, field: ScalarField, center: np.ndarray, st: StencilSpec,
                 positive: Sequence[bool]):
        self.f = field
        self.complex_chart = field.chart in ("ball", "siegel")
        self.center = np.asarray(center, dtype=complex if self.complex_chart else float)
        self.st = st
        self.cache: dict = {}
        if self.complex_chart:
            # real coordinates: a_0, b_0, a_1, b_1, ...
            self.real = np.column_stack([self.center.real, self.center.imag]).ravel()
        else:
            self.real = self.center.astype(float)
        d = self.real.size
        self.steps = np.empty(d)
        for i in range(d):
            h = st.base_step(i)
            c = self.real[i]
            if self.complex_chart or not positive[i]:
                self.steps[i] = h * max(1.0, abs(c))
            else:
                if not c > 0:
                    raise StencilError(f"coordinate {i} must be positive, got {c}")
                self.steps[i] = h * c
        for i in range(d):
            if not self.complex_chart and positive[i] and self.real[i] - st.reach * self.steps[i] <= 0:
                raise StencilError(f"stencil crosses zero in coordinate {i}")

    def _coords(self, offsets: tuple) -> np.ndarray:
        x = self.real.copy()
        for i, k in offsets:
            x[i] += k * self.steps[i]
        if self.complex_chart:
            return x[0::2] + 1j * x[1::2]
        return x

    def value(self, offsets: tuple = ()) -> complex:
        key = tuple(sorted((i, k) for i, k in offsets if k != 0))
        if key not in self.cache:
            self.cache[key] = complex(self.f(self._coords(key)))
        return self.cache[key]

    def d1(self, i: int) -> complex:
        w = _D1[self.st.order]
        return sum(c * self.value(((i, k),)) for k, c in w.items()) / self.steps[i]

    def d2(self, i: int, j: int) -> complex:
        if i == j:
            w = _D2[self.st.order]
            return sum(c * self.value(((i, k),)) for k, c in w.items()) / self.steps[i] ** 2
        w = _D1[self.st.order]
        tot = 0.0
        for k, ck in w.items():
            for l, cl in w.items():
                tot += ck * cl * self.value(((i, k), (j, l)))
        return tot / (self.steps[i] * self.steps[j])

    def wirtinger(self, j: int, k: int) -> complex:
        """d_j dbar_k on complex coordinate indices j, k."""
        aj, bj, ak, bk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
        return 0.25 * (self.d2(aj, ak) + self.d2(bj, bk) + 1j * (self.d2(aj, bk) - self.d2(bj, ak)))


def _check_interior_siegel(Z: SiegelPoint, st: StencilSpec, chart: str):
    h = max(st.base_step(i) for i in range(len(st.h))) if isinstance(st.h, tuple) else st.h
    if chart in ("siegel", "horo", "beta-theta", "aggregate") and Z.rho < 10 * h:
        raise StencilError(f"rho = {Z.rho} is below 10 h; point too close to the boundary")


def apply_ball_laplacian(f: ScalarField, w: BallPoint, st: StencilSpec = StencilSpec()) -> complex:
    if f.chart != "ball":
        raise PreconditionError(f"field is on chart {f.chart!r}, expected 'ball'")
    wv = w.w
    r2 = float(np.sum(np.abs(wv) ** 2))
    h = st.h if not isinstance(st.h, tuple) else max(st.h)
    if 1.0 - math.sqrt(r2) < 10 * h * st.reach:
        raise StencilError("stencil leaves the unit ball")
    S = _Stencil(f, wv, st, [False] * wv.size)
    m = wv.size
    diag = sum(S.wirtinger(j, j) for j in range(m))
    mixed = sum(wv[j] * np.conj(wv[k]) * S.wirtinger(j, k) for j in range(m) for k in range(m))
    return (1.0 - r2) * (diag - mixed)


def _siegel_form(S: _Stencil, coords: np.ndarray) -> complex:
    z = coords
    m = z.size
    last = m - 1
    rho = z[last].imag - float(np.sum(np.abs(z[:last]) ** 2))
    acc = 0.0
    for j in range(m):
        acc += 2j * (np.conj(z[j]) * S.wirtinger(last, j) - z[j] * S.wirtinger(j, last))
    acc += sum(S.wirtinger(j, j) for j in range(last))
    return rho * acc


def _horo_form(S: _Stencil, c: np.ndarray) -> complex:
    n = (c.size - 2) // 2
    it, ir = 2 * n, 2 * n + 1
    x, y, rho = c[:n], c[n:2 * n], c[ir]
    beta = float(np.sum(x * x + y * y))
    acc = 0.25 * sum(S.d2(i, i) for i in range(2 * n))
    acc += (rho + beta) * S.d2(it, it) + rho * S.d2(ir, ir) - n * S.d1(ir)
    acc += sum(y[j] * S.d2(j, it) - x[j] * S.d2(n + j, it) for j in range(n))
    return rho * acc


def _beta_theta_form(S: _Stencil, c: np.ndarray) -> complex:
    n = (c.size - 2) // 2
    it, ir = 2 * n, 2 * n + 1
    b, rho = c[:n], c[ir]
    acc = sum(b[j] * S.d2(j, j) + S.d1(j) for j in range(n))
    acc += rho * S.d2(ir, ir) + (rho + float(np.sum(b))) * S.d2(it, it)
    acc += sum(S.d2(n + j, n + j) / (4.0 * b[j]) - S.d2(n + j, it) for j in range(n))
    acc -= n * S.d1(ir)
    return rho * acc


def _aggregate_form(S: _Stencil, c: np.ndarray, n: int) -> complex:
    beta, rho = c[0], c[2]
    acc = beta * S.d2(0, 0) + rho * S.d2(2, 2) + (rho + beta) * S.d2(1, 1)
    acc += n * S.d1(0) - n * S.d1(2)
    return rho * acc


def _tau_omega_form(S: _Stencil, c: np.ndarray) -> complex:
    n = (c.size - 1) // 2
    io = 2 * n
    om = c[io]
    lap = sum(S.d2(i, i) for i in range(2 * n)) + S.d2(io, io)
    return 0.25 * (om * om * lap - (2 * n + 1) * om * S.d1(io))


def apply_siegel_laplacian(f: ScalarField, Z: SiegelPoint, chart: str | None = None,
                           st: StencilSpec = StencilSpec()) -> complex:
    """L f at Z, using the form of the operator native to ``chart`` (default: the field's chart).

    The ``horo`` chart is only stated for x_j != 0 and y_j != 0 and the
    ``beta-theta`` chart for beta_j > 0; those conditions are enforced.
    """
    chart = chart or f.chart
    if chart != f.chart:
        raise PreconditionError(f"field lives on chart {f.chart!r}, operator requested on {chart!r}")
    if chart in ("ball", "radial-xy"):
        raise PreconditionError(f"chart {chart!r} has its own operator function")
    _check_interior_siegel(Z, st, chart)
    coords = chart_coordinates(Z, chart)
    n = Z.n
    if chart == "horo" and (np.any(Z.z.real == 0) or np.any(Z.z.imag == 0)):
        raise PreconditionError("the (x, y, t, rho) form needs every x_j and y_j nonzero")
    if chart == "beta-theta" and np.any(np.abs(Z.z) == 0):
        raise PreconditionError("the (beta, theta, t, rho) form needs every beta_j > 0")
    S = _Stencil(f, coords, st, _positive_mask(chart, n))
    if chart == "siegel":
        return _siegel_form(S, coords)
    if chart == "horo":
        return _horo_form(S, coords)
    if chart == "beta-theta":
        return _beta_theta_form(S, coords)
    if chart == "aggregate":
        return _aggregate_form(S, coords, n)
    return _tau_omega_form(S, coords)


def apply_radial_operator(g: ScalarField, x: float, y: float, s: SpectralParam, n: int | None = None,
                          st: StencilSpec = StencilSpec()) -> complex:
    """M g at (x, y), where M g = 0 is the kernel equation:

    x(x+1) g_xx + 2xy g_xy + y(y+1) g_yy + ((n+2)x + 1) g_x + ((n+2)y + n) g_y + s(n+1-s) g.
    """
    if g.chart != "radial-xy":
        raise PreconditionError("apply_radial_operator needs a field on chart 'radial-xy'")
    n = s.n if n is None else n
    if not (x > 0 and y > 0):
        raise PreconditionError("need x > 0 and y > 0")
    S = _Stencil(g, np.array([x, y], dtype=float), st, [True, True])
    val = S.value()
    return (x * (x + 1) * S.d2(0, 0) + 2 * x * y * S.d2(0, 1) + y * (y + 1) * S.d2(1, 1)
            + ((n + 2) * x + 1) * S.d1(0) + ((n + 2) * y + n) * S.d1(1)
            + s.s * (n + 1 - s.s) * val)


def apply_pair_operator(g: Callable[[float, float], complex], u: float, v: float, lam: float,
                        n: int, st: StencilSpec = StencilSpec()) -> complex:
    """The Laplacian written in the point-pair invariants (u, v), with lam = beta'/rho' fixed:

    (u^2 + (lam+1)u) g_uu + 2uv g_uv + v(v+lam) g_vv + ((n+2)u + lam + 1) g_u + ((n+2)v + n lam) g_v.
    """
    field = ScalarField(lambda c: g(c[0], c[1]), "radial-xy")
    S = _Stencil(field, np.array([u, v], dtype=float), st, [True, True])
    return ((u * u + (lam + 1) * u) * S.d2(0, 0) + 2 * u * v * S.d2(0, 1)
            + v * (v + lam) * S.d2(1, 1) + ((n + 2) * u + lam + 1) * S.d1(0)
            + ((n + 2) * v + n * lam) * S.d1(1))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def eigen_residual(f: ScalarField, s: SpectralParam, points: Sequence, st: StencilSpec = StencilSpec(),
                   *, tolerance: float = 1e-4, check: str = "eigenfunction",
                   paper_ref: str = "eigenfunction of the Laplace-Beltrami operator") -> VerificationReport:
    """max over points of |L f - s(s-n-1) f| / (1 + |f|).

    ``points`` are Siegel points, or ball points when the field is on the
    ball chart.
    """
    worst = 0.0
    per_point = []
    for P in points:
        if f.chart == "ball":
            Lf = apply_ball_laplacian(f, P, st)
            fv = complex(f(P.w))
        else:
            Lf = apply_siegel_laplacian(f, P, f.chart, st)
            fv = complex(f(chart_coordinates(P, f.chart)))
        r = abs(Lf - s.lam * fv) / (1.0 + abs(fv))
        per_point.append(r)
        worst = max(worst, r)
    return VerificationReport(check, paper_ref, worst, tolerance,
                              points=[getattr(P, "to_json", lambda: P.w)() for P in points],
                              details={"s": s.s, "n": s.n, "lambda": s.lam, "stencil": st.as_dict(),
                                       "chart": f.chart, "per_point": per_point})


def harmonicity_check_cygan(Zp: SiegelPoint, points: Sequence[SiegelPoint],
                            st: StencilSpec = StencilSpec(), *, chart: str = "siegel",
                            tolerance: float = 1e-4) -> VerificationReport:
    """max |L d*(Zp, .)| over the query points (Zp stays in the first slot)."""
    f = ScalarField.from_point(lambda Z: cygan_distance(Zp, Z), chart)
    res = []
    for P in points:
        if P == Zp:
            raise PreconditionError("query point coincides with the fixed point")
        res.append(abs(apply_siegel_laplacian(f, P, chart, st)))
    return VerificationReport("cygan-harmonicity", "pseudo-distance is harmonic in its second argument",
                              max(res), tolerance, points=[P.to_json() for P in points],
                              details={"fixed": Zp.to_json(), "chart": chart, "stencil": st.as_dict(),
                                       "per_point": res})


def pullback_check(g: Callable[[float, float], complex], Z: SiegelPoint, Zp: SiegelPoint,
                   st: StencilSpec = StencilSpec(), *, tolerance: float = 1e-5,
                   chart: str = "siegel") -> VerificationReport:
    """Compare L[g(u(., Zp), v(., Zp))] at Z with the (u, v)-form of the operator.

    The residual is |lhs - rhs| / (1 + |rhs|).
    """
    n = Z.n
    lam = Zp.beta / Zp.rho
    field = ScalarField.from_point(lambda P: g(*pair_invariants_uv(P, Zp)), chart)
    lhs = apply_siegel_laplacian(field, Z, chart, st)
    u, v = pair_invariants_uv(Z, Zp)
    rhs = apply_pair_operator(g, u, v, lam, n, st)
    res = abs(lhs - rhs) / (1.0 + abs(rhs))
    return VerificationReport("pair-invariant-pullback", "Laplacian of a function of the point-pair invariants u, v",
                              res, tolerance, points=[Z.to_json(), Zp.to_json()],
                              details={"lhs": lhs, "rhs": rhs, "u": u, "v": v, "lambda": lam,
                                       "stencil": st.as_dict()})
