"""Quadrature and series-control plumbing.

All integrals in the package go through the double-exponential rules
defined here (exp-sinh on a half line, tanh-sinh on a finite interval) or
through the tensor Gauss-Jacobi rule on the unit simplex.  Each rule
refines its step until two successive estimates agree, and raises
:class:`~chyp.errors.NumericFailure` with the last difference otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from .errors import NumericFailure, PreconditionError

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy controls for every integral evaluation.

    ``scheme`` is ``"de"`` (double-exponential, the default) and is kept as
    a field so reports can record what produced a number.  ``max_subdivisions``
    bounds the number of step halvings (or node doublings for the simplex
    rule).
    """

    scheme: str = "de"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 9

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise PreconditionError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise PreconditionError("max_subdivisions must be >= 1")

    def accept(self, diff: float, value: complex) -> bool:
        return diff <= max(self.abs_tol, self.rel_tol * abs(value))

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_subdivisions": self.max_subdivisions,
        }


@dataclass(frozen=True)
class SeriesSpec:
    """Stopping rules for power series.

    A series stops once the geometric bound on its tail falls below
    ``stop_threshold`` times the partial sum.  ``divergence_guard`` caps the
    magnitude any single term may reach.
    """

    max_terms: int = 20000
    stop_threshold: float = 1e-17
    divergence_guard: float = 1e250

    def __post_init__(self):
        if self.max_terms < 1:
            raise PreconditionError("max_terms must be >= 1")
        if not 0.0 < self.stop_threshold < 1.0:
            raise PreconditionError("stop_threshold must lie in (0, 1)")

    def as_dict(self) -> dict:
        return {
            "max_terms": self.max_terms,
            "stop_threshold": self.stop_threshold,
            "divergence_guard": self.divergence_guard,
        }


DEFAULT_QUAD = QuadratureSpec()
DEFAULT_SERIES = SeriesSpec()


def csum(values) -> complex | float:
    """Correctly rounded sum of real or complex values (order independent)."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.ravel()), math.fsum(arr.imag.ravel()))
    return math.fsum(arr.ravel())


def _evaluate(g, x):
    vals = g(x)
    vals = np.asarray(vals)
    if vals.shape != np.shape(x):
        vals = np.broadcast_to(vals, np.shape(x))
    return vals


def _trim_nonfinite_tails(v, vals, what: str):
    """Drop outermost nodes where the integrand overflowed (e.g. inf * 0 far out).

    Allowed only when the finite nodes form one block whose end values are
    already negligible, so the dropped range cannot carry mass.
    """
    finite = np.isfinite(vals)
    if finite.all():
        return v, vals
    good = np.nonzero(finite)[0]
    if good.size == 0:
        raise NumericFailure(f"{what}: non-finite integrand", float("inf"))
    i0, i1 = good[0], good[-1]
    mags = np.abs(vals[good])
    peak = mags.max()
    if (not finite[i0:i1 + 1].all() or abs(vals[i0]) > 1e-22 * peak or abs(vals[i1]) > 1e-22 * peak):
        raise NumericFailure(f"{what}: non-finite integrand", float("inf"))
    return v[i0:i1 + 1], vals[i0:i1 + 1]


def _de_rule(g, phi, v_lo, v_hi, spec: QuadratureSpec, what: str):
    """Trapezoid rule in a transformed variable with step halving.

    ``phi(v)`` returns (x, dx/dv).  Nodes whose level-0 contribution is
    negligible bound the range that later levels refine.
    """
    h = 0.5
    k = np.arange(math.ceil(v_lo / h), math.floor(v_hi / h) + 1)
    v = k * h
    x, dx = phi(v)
    with np.errstate(all="ignore"):
        vals = _evaluate(g, x) * dx
    v, vals = _trim_nonfinite_tails(v, vals, what)
    mags = np.abs(vals)
    peak = mags.max() if mags.size else 0.0
    if peak == 0.0:
        return 0.0 * vals.sum(), 0.0
    live = np.nonzero(mags > 1e-22 * peak)[0]
    lo = v[max(live[0] - 1, 0)]
    hi = v[min(live[-1] + 1, len(v) - 1)]
    total = h * vals.sum()
    diff = float("inf")
    for level in range(1, spec.max_subdivisions + 1):
        h *= 0.5
        kk = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1)
        kk = kk[kk % 2 == 1]
        v = kk * h
        x, dx = phi(v)
        new = _evaluate(g, x) * dx
        if not np.all(np.isfinite(new)):
            raise NumericFailure(f"{what}: non-finite integrand", float("inf"))
        refined = 0.5 * total + h * new.sum()
        diff = abs(refined - total)
        total = refined
        # one agreeing pair can be a coincidence on a coarse grid
        if (level >= 2 or level == spec.max_subdivisions) and spec.accept(diff, total):
            return total, diff
    raise NumericFailure(f"{what} did not converge", diff, total)


def exp_sinh(g: Callable, spec: QuadratureSpec = DEFAULT_QUAD, *, scale: float = 1.0,
             what: str = "exp-sinh quadrature", return_error: bool = False):
    """Integrate ``g(t)`` over ``t`` in (0, inf).

    Integrable singularities at 0 and algebraic or exponential decay at
    infinity are both handled.  ``scale`` moves the centre of the node
    cluster; pass the integrand's natural length scale when it is far from 1.
    ``g`` must accept numpy arrays.
    """

    def phi(v):
        q = _HALF_PI * np.sinh(v)
        t = scale * np.exp(q)
        return t, t * _HALF_PI * np.cosh(v)

    # |q| <= 700 keeps t representable
    vmax = math.asinh(700.0 / _HALF_PI)
    value, err = _de_rule(g, phi, -vmax, vmax, spec, what)
    return (value, err) if return_error else value


def tanh_sinh(g: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUAD, *,
              what: str = "tanh-sinh quadrature", return_error: bool = False):
    """Integrate ``g(x)`` over the finite interval (a, b).

    Endpoint singularities are allowed; nodes that round onto an endpoint
    are dropped.
    """
    if not b > a:
        raise PreconditionError("tanh_sinh needs b > a")
    c = 0.5 * (a + b)
    r = 0.5 * (b - a)

    def phi(v):
        q = _HALF_PI * np.sinh(v)
        with np.errstate(over="ignore"):
            # distance to the nearer endpoint, formed without cancellation
            e = np.exp(-2.0 * np.abs(q))
            near = 2.0 * r * e / (1.0 + e)
            x = np.where(q < 0, a + near, b - near)
            w = r * _HALF_PI * np.cosh(v) * 4.0 * e / (1.0 + e) ** 2
        inside = (x > a) & (x < b) & (near > 0)
        x = np.where(inside, x, c)
        return x, np.where(inside, w, 0.0)

    value, err = _de_rule(g, phi, -4.5, 4.5, spec, what)
    return (value, err) if return_error else value


def integrate(g: Callable, a: float, b: float = math.inf, spec: QuadratureSpec = DEFAULT_QUAD,
              **kwargs):
    """Dispatch to the right double-exponential rule for (a, b)."""
    if math.isinf(b):
        return exp_sinh(lambda t: g(a + t), spec, **kwargs)
    return tanh_sinh(g, a, b, spec, **kwargs)


def _jacobi01(npts: int, p: float, q: float):
    """Nodes/weights for x^p (1-x)^q on (0, 1)."""
    x, w = roots_jacobi(npts, q, p)
    return 0.5 * (1.0 + x), w * 2.0 ** (-(p + q + 1.0))


def simplex_integral(smooth: Callable, p: complex, q: complex, r: complex,
                     spec: QuadratureSpec = DEFAULT_QUAD, *, start: int = 24,
                     what: str = "simplex quadrature", return_error: bool = False):
    """Integrate u^p v^q (1-u-v)^r smooth(u, v) over the unit simplex.

    Uses u = xi, v = (1 - xi) eta, which turns the simplex weight into a
    product of Jacobi weights.  Real parts of the exponents go into the
    Gauss-Jacobi weights (they must exceed -1); any imaginary parts are
    folded into the smooth factor, which costs accuracy near the corners.
    The node count doubles until two estimates agree.  ``smooth`` may return
    extra trailing axes; each entry is then integrated and checked separately.
    """
    p, q, r = complex(p), complex(q), complex(r)
    pr, qr, rr = p.real, q.real, r.real
    if min(pr, qr, rr) <= -1.0:
        raise PreconditionError("simplex weight exponents need real part > -1")
    extra = any(z.imag != 0.0 for z in (p, q, r))

    def rule(npts):
        xi, wxi = _jacobi01(npts, pr, qr + rr + 1.0)
        eta, weta = _jacobi01(npts, qr, rr)
        XI, ETA = np.meshgrid(xi, eta, indexing="ij")
        U = XI
        V = (1.0 - XI) * ETA
        vals = np.asarray(smooth(U, V))
        if extra:
            W = (1.0 - XI) * (1.0 - ETA)
            vals = vals * np.exp(1j * (p.imag * np.log(U) + q.imag * np.log(V) + r.imag * np.log(W)))
        # trailing axes of ``vals`` are a batch of independent integrands
        return np.einsum("i,ij...,j->...", wxi, vals, weta)

    npts = start
    prev = rule(npts)
    diff = float("inf")
    for _ in range(spec.max_subdivisions):
        npts *= 2
        cur = rule(npts)
        gap = np.abs(cur - prev)
        diff = float(np.max(gap))
        if np.all(gap <= np.maximum(spec.abs_tol, spec.rel_tol * np.abs(cur))):
            if np.ndim(cur) == 0:
                cur = cur[()]
            return (cur, diff) if return_error else cur
        prev = cur
        if npts >= 1024:
            break
    raise NumericFailure(f"{what} did not converge", diff, prev)
