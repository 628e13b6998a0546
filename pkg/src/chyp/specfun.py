"""Special functions: K-Bessel, Gauss 2F1, Appell F3, Whittaker W and friends.

Every function here is evaluated from its defining integral or series.
Integrals on (0, inf) use the exp-sinh rule from :mod:`chyp.quadrature`;
series stop on a geometric tail bound controlled by :class:`SeriesSpec`.

Analytic continuation of 2F1
----------------------------
The series converges for |z| < 1.  For Re z < 1/2 (in particular the whole
negative real axis, where the radial kernels live) we use the Pfaff
transformation

    2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1)),

whose argument lies in the unit disk.  Powers use the principal branch; for
Re z < 1/2 the base 1 - z stays in the right half-plane, so no branch cut
is crossed.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import gammaln

from .errors import NumericFailure, PoleError, PreconditionError
from .quadrature import (
    DEFAULT_QUAD,
    DEFAULT_SERIES,
    QuadratureSpec,
    SeriesSpec,
    csum,
    exp_sinh,
    simplex_integral,
    tanh_sinh,
)

__all__ = [
    "bessel_k",
    "gauss_2f1",
    "appell_f3",
    "appell_f3_integral",
    "f3_kernel",
    "psi_confluent",
    "whittaker_w",
    "g_kernel",
    "g_kernel_scaled",
    "h_kernel",
    "weyl_fractional",
    "ramanujan_sum",
    "ramanujan_phi",
    "pochhammer",
]


def _is_nonpositive_integer(c) -> bool:
    c = complex(c)
    return c.imag == 0.0 and c.real <= 0 and c.real == math.floor(c.real)


def _real_if_possible(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def pochhammer(alpha, k: int):
    """Rising factorial alpha (alpha + 1) ... (alpha + k - 1)."""
    out = 1.0
    for i in range(k):
        out *= alpha + i
    return out


# ---------------------------------------------------------------------------
# K-Bessel
# ---------------------------------------------------------------------------

def _k_cutoff(nu_abs: float, zr: float) -> float:
    """Point beyond which exp(-z (cosh u - 1)) cosh(nu u) is below e^-50 of its peak."""

    def logmag(u):
        return -zr * 2.0 * math.sinh(0.5 * u) ** 2 + nu_abs * u

    u_peak = math.asinh(nu_abs / zr) if nu_abs > 0 else 0.0
    target = logmag(u_peak) - 50.0
    hi = max(u_peak, 1e-300) * 2.0 + math.sqrt(100.0 / zr)
    while logmag(hi) > target:
        hi *= 2.0
    lo = u_peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if logmag(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-3 * hi:
            break
    return hi


def _bessel_k_scalar(nu: complex, z: complex, scaled: bool, quad: QuadratureSpec):
    if not z.real > 0:
        raise PreconditionError(f"bessel_k needs Re(argument) > 0, got {z}")
    U = _k_cutoff(abs(nu.real), z.real)

    def f(u):
        return np.exp(-z * 2.0 * np.sinh(0.5 * u) ** 2) * np.cosh(nu * u)

    # trapezoid on [0, U] for an even integrand: spectrally accurate
    m = 16
    h = U / m
    total = h * (0.5 * f(np.array([0.0]))[0] + f(h * np.arange(1, m + 1)).sum())
    diff = math.inf
    for level in range(1, quad.max_subdivisions + 4):
        h *= 0.5
        m *= 2
        new = f(h * np.arange(1, m + 1, 2)).sum()
        refined = 0.5 * total + h * new
        diff = abs(refined - total)
        total = refined
        if level >= 2 and diff <= max(quad.abs_tol * 1e-3, quad.rel_tol * 1e-3 * abs(total)):
            break
    else:
        if not quad.accept(diff, total):
            raise NumericFailure("bessel_k quadrature did not converge", diff, total)
    if not scaled:
        total = total * cmath.exp(-z)
    return _real_if_possible(total)


def bessel_k(order, argument, quad: QuadratureSpec = DEFAULT_QUAD, *, scaled: bool = False):
    """Modified Bessel function K_order(argument) from its integral.

    Evaluates K_s(z) = 1/2 * int_0^inf exp(-z/2 (t + 1/t)) t^(s-1) dt after
    the substitution t = e^u, i.e. int_0^inf exp(-z cosh u) cosh(s u) du,
    with an adaptive trapezoid rule (the integrand is analytic in a strip, so
    the rule converges geometrically).  The integrand is even in ``order``,
    so K_s = K_{-s} holds bit for bit.

    ``scaled=True`` returns e^z K_s(z), which stays finite for huge z.
    Accepts numpy arrays for ``argument``.
    """
    nu = complex(order)
    if np.ndim(argument) == 0:
        return _bessel_k_scalar(nu, complex(argument), scaled, quad)
    arr = np.asarray(argument)
    out = [_bessel_k_scalar(nu, complex(z), scaled, quad) for z in arr.ravel()]
    dtype = complex if any(isinstance(v, complex) for v in out) else float
    return np.array(out, dtype=dtype).reshape(arr.shape)


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

def _hyp2f1_series(a, b, c, z, series: SeriesSpec):
    term = 1.0 + 0j
    total = 1.0 + 0j
    az = abs(z)
    for k in range(series.max_terms):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        mag = abs(term)
        if mag > series.divergence_guard:
            raise NumericFailure("2F1 series hit the divergence guard", mag)
        if term == 0:
            return total
        nxt = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)) * z)
        r = max(nxt, az)
        if r < 1.0 and mag * r / (1.0 - r) <= series.stop_threshold * abs(total):
            return total
    raise NumericFailure("2F1 series did not converge", abs(term), total)


_PFAFF_MAX = 0.9


def _hyp2f1_euler(a, b, c, z, quad: QuadratureSpec = DEFAULT_QUAD):
    """Euler integral Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^(b-1)(1-t)^(c-b-1)(1-zt)^(-a) dt.

    Used far out on the negative axis, where the Pfaff argument creeps up to 1.
    Needs Re c > Re b > 0 for b or a (the function is symmetric in them);
    returns None otherwise.
    """
    if not (c.real > b.real > 0):
        if c.real > a.real > 0:
            a, b = b, a
        else:
            return None
    p, q = b - 1.0, c - b - 1.0

    # Split at 1/2, reflect the right half, then substitute x = v^(1/e) with
    # e = Re(power) + 1 so the endpoint power turns into a bounded factor.
    def half(power, h):
        e = power.real + 1.0

        def g(v):
            x = np.exp(np.log(v) / e)
            return h(x) * np.exp(1j * power.imag / e * np.log(v)) / e

        return tanh_sinh(g, 0.0, 0.5 ** e, quad, what="2F1 Euler integral")

    total = half(p, lambda t: np.exp(q * np.log1p(-t) - a * np.log(1.0 - z * t))) \
        + half(q, lambda u: np.exp(p * np.log1p(-u) - a * np.log(1.0 - z * (1.0 - u))))
    return complex(total * _gamma(c) / (_gamma(b) * _gamma(c - b)))


def gauss_2f1(a, b, c, z, series: SeriesSpec = DEFAULT_SERIES):
    """Gauss hypergeometric function 2F1(a, b; c; z).

    Direct series for |z| <= 1/2; the Pfaff transformation (see module
    docstring) for other points with Re z < 1/2, switching to the Euler
    integral once the Pfaff argument exceeds 0.9 in modulus (when its
    parameter condition holds); the direct series for the rest of the unit disk.  Points with |z| >= 1 and Re z >= 1/2 are rejected.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpositive_integer(c):
        raise PoleError(f"2F1 parameter pole: c = {c}")
    if z == 0:
        return 1.0
    if abs(z) <= 0.5:
        val = _hyp2f1_series(a, b, c, z, series)
    elif z.real < 0.5:
        base = 1.0 - z
        assert base.real > 0, "principal branch of (1 - z) must not cross the cut"
        w = z / (z - 1.0)
        if abs(w) > _PFAFF_MAX:
            euler = _hyp2f1_euler(a, b, c, z)
            if euler is not None:
                return _real_if_possible(euler)
        val = base ** (-a) * _hyp2f1_series(a, c - b, c, w, series)
    elif abs(z) < 1.0:
        val = _hyp2f1_series(a, b, c, z, series)
    else:
        raise PreconditionError(f"2F1 argument {z} outside the supported region")
    return _real_if_possible(val)


# ---------------------------------------------------------------------------
# Appell F3
# ---------------------------------------------------------------------------

def appell_f3(alpha, alpha2, beta, beta2, gamma_, x, y, series: SeriesSpec = DEFAULT_SERIES):
    """Appell F3 from its double series (|x| < 1 and |y| < 1).

    Sums sum_{m,n} (alpha)_m (alpha2)_n (beta)_m (beta2)_n / ((gamma)_{m+n} m! n!)
    x^m y^n along anti-diagonals m + n = N.  For y = 0 only the n = 0 row is
    left and it is summed by the 2F1 series routine, so the reduction to
    :func:`gauss_2f1` holds term by term.
    """
    al, al2, be, be2, ga = (complex(v) for v in (alpha, alpha2, beta, beta2, gamma_))
    x, y = complex(x), complex(y)
    if _is_nonpositive_integer(ga):
        raise PoleError(f"F3 parameter pole: gamma = {ga}")
    if not (abs(x) < 1 and abs(y) < 1):
        raise PreconditionError("F3 double series needs |x| < 1 and |y| < 1")
    if y == 0:
        # only the n = 0 row survives, and it is the 2F1 series itself
        return _real_if_possible(_hyp2f1_series(al, be, ga, x, series))
    diag = np.array([1.0 + 0j])  # T[m, N - m], m = 0..N
    total = 1.0 + 0j
    rho = max(abs(x), abs(y))
    prev_mag = 1.0
    for N in range(series.max_terms):
        m = np.arange(N + 1)
        nn = N - m
        ystep = diag * (al2 + nn) * (be2 + nn) / ((ga + m + nn) * (nn + 1)) * y
        xlast = diag[-1] * (al + N) * (be + N) / ((ga + N) * (N + 1)) * x
        diag = np.append(ystep, xlast)
        total += diag.sum()
        mag = np.abs(diag).sum()
        if mag > series.divergence_guard:
            raise NumericFailure("F3 series hit the divergence guard", mag)
        if mag == 0:
            break
        r = max(mag / prev_mag if prev_mag > 0 else rho, rho)
        prev_mag = mag
        if N > 2 and r < 1 and mag * r / (1 - r) <= series.stop_threshold * abs(total):
            break
    else:
        raise NumericFailure("F3 series did not converge", mag, total)
    return _real_if_possible(total)


def appell_f3_integral(alpha, alpha2, beta, beta2, gamma_, x, y,
                       quad: QuadratureSpec = DEFAULT_QUAD):
    """Appell F3 from its integral over the unit simplex.

    F3 = Gamma(g) / (Gamma(b) Gamma(b') Gamma(g - b - b'))
         * iint u^(b-1) v^(b'-1) (1-u-v)^(g-b-b'-1) (1-ux)^(-a) (1-vy)^(-a') du dv

    Valid for Re b > 0, Re b' > 0, Re(g - b - b') > 0 and any x, y off the
    cuts [1, inf).
    """
    al, al2, be, be2, ga = (complex(v) for v in (alpha, alpha2, beta, beta2, gamma_))
    x, y = complex(x), complex(y)
    rest = ga - be - be2
    if not (be.real > 0 and be2.real > 0 and rest.real > 0):
        raise PreconditionError("F3 integral needs Re(beta), Re(beta2), Re(gamma-beta-beta2) > 0")
    for v, name in ((x, "x"), (y, "y")):
        if v.imag == 0 and v.real >= 1:
            raise PreconditionError(f"F3 integral: {name} = {v} lies on the cut [1, inf)")
    pref = _gamma(ga) / (_gamma(be) * _gamma(be2) * _gamma(rest))

    def smooth(u, v):
        return (1.0 - u * x) ** (-al) * (1.0 - v * y) ** (-al2)

    val = pref * simplex_integral(smooth, be - 1, be2 - 1, rest - 1, quad, what="F3 integral")
    return _real_if_possible(val)


def f3_kernel(x, y, a, b, n: int, quad: QuadratureSpec = DEFAULT_QUAD):
    """Radial kernel x^-a y^-b F3(a, b; a, b-n+1; 2s-n; -1/x, -1/y), s = a + b.

    Evaluated through its simplex representation

        Gamma(2s-n) / (Gamma(a) Gamma(b-n+1) Gamma(s-1))
        * iint u^(a-1) v^(b-n) (1-u-v)^(s-2) (x+u)^(-a) (y+v)^(-b) du dv,

    never the double series (-1/x, -1/y lie outside the unit bidisk for the
    arguments that matter).  ``x`` and ``y`` may be equal-shape arrays; the
    same nodes serve every entry.
    """
    a, b = complex(a), complex(b)
    s = a + b
    if not (a.real > 0 and (b - n + 1).real > 0 and s.real > 1):
        raise PreconditionError("kernel needs Re(a) > 0, Re(b) > n - 1, Re(s) > 1")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    xs, ys = np.broadcast_arrays(xs, ys)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise PreconditionError("kernel needs x > 0 and y > 0")
    pref = _gamma(2 * s - n) / (_gamma(a) * _gamma(b - n + 1) * _gamma(s - 1))

    def smooth(u, v):
        uu = u[..., None]
        vv = v[..., None]
        return (xs + uu) ** (-a) * (ys + vv) ** (-b)

    val = pref * simplex_integral(smooth, a - 1, b - n, s - 2, quad, what="F3 kernel")
    val = np.asarray(val)
    if np.all(val.imag == 0):
        val = val.real
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return val.reshape(-1)[0].item()
    return val.reshape(np.broadcast(np.asarray(x), np.asarray(y)).shape)


# ---------------------------------------------------------------------------
# Confluent Psi and Whittaker W
# ---------------------------------------------------------------------------

def psi_confluent(a, c, x, quad: QuadratureSpec = DEFAULT_QUAD):
    """Tricomi Psi(a, c; x) = 1/Gamma(a) int_0^inf e^(-xt) t^(a-1) (1+t)^(c-a-1) dt.

    Needs Re a > 0 and x > 0.
    """
    a, c = complex(a), complex(c)
    x = float(x)
    if not a.real > 0:
        raise PreconditionError(f"Psi integral needs Re(a) > 0, got a = {a}")
    if not x > 0:
        raise PreconditionError("Psi integral needs x > 0")

    def g(t):
        return np.exp(-x * t + (a - 1) * np.log(t) + (c - a - 1) * np.log1p(t))

    val = exp_sinh(g, quad, scale=1.0 / x if x > 1 else 1.0, what="Psi integral")
    return _real_if_possible(val / _gamma(a))


def whittaker_w(kappa, mu, x, quad: QuadratureSpec = DEFAULT_QUAD):
    """Whittaker W_{kappa,mu}(x) = e^(-x/2) x^(mu+1/2) Psi(1/2 - kappa + mu, 2mu + 1; x)."""
    kappa, mu = complex(kappa), complex(mu)
    a = 0.5 - kappa + mu
    if not a.real > 0:
        raise PreconditionError(f"Whittaker W via Psi needs Re(1/2 - kappa + mu) > 0, got {a}")
    val = math.exp(-0.5 * x) * complex(x) ** (mu + 0.5) * psi_confluent(a, 2 * mu + 1, x, quad)
    return _real_if_possible(val)


# ---------------------------------------------------------------------------
# Kernel series G and H
# ---------------------------------------------------------------------------

def g_kernel(z, series: SeriesSpec = DEFAULT_SERIES):
    """G(z) = sum_k binom(2k, k) z^k / (2^k k!), an entire function."""
    z = complex(z)
    term = 1.0 + 0j
    total = 1.0 + 0j
    for k in range(series.max_terms):
        ratio = (2 * k + 1) / (k + 1) ** 2 * z
        term = term * ratio
        total += term
        if term == 0:
            break
        r = abs((2 * k + 3) / (k + 2) ** 2 * z)
        if r < 1 and abs(term) * r / (1 - r) <= series.stop_threshold * abs(total):
            break
        if abs(term) > series.divergence_guard:
            raise NumericFailure("G series hit the divergence guard", abs(term))
    else:
        raise NumericFailure("G series did not converge", abs(term), total)
    return _real_if_possible(total)


_LOG_G_SWITCH = 40.0
# Gauss-Legendre rule for the large-argument integral below
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)
_GL_CUT = 8.5


def g_kernel_scaled(z, series: SeriesSpec = DEFAULT_SERIES):
    """e^(-2z) G(z) for real z >= 0, finite for arbitrarily large z.

    Up to z = 40 the series is summed with every term formed in log space.
    Beyond that the terms peak near k = 2z and summation gets expensive, so
    we use e^(-2z) G(z) = e^(-z) I_0(z), written as

        2 / (pi sqrt(z)) int_0^sqrt(2z) e^(-w^2) (2 - w^2 / z)^(-1/2) dw,

    cut at w = 8.5 (the rest is below e^-72) and done by 96-point
    Gauss-Legendre; the two branches are checked against each other in the
    test-suite.  Accepts arrays.
    """
    zs = np.asarray(z, dtype=float)
    if np.any(zs < 0):
        raise PreconditionError("g_kernel_scaled needs z >= 0")
    flat = zs.ravel()
    out = np.empty_like(flat)
    small = flat <= _LOG_G_SWITCH
    if np.any(small):
        zsm = flat[small]
        kmax = int(2 * zsm.max() + 40 * math.sqrt(zsm.max()) + 60)
        k = np.arange(kmax + 1)
        logc = gammaln(2 * k + 1) - 3 * gammaln(k + 1) - k * math.log(2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            logz = np.log(zsm)[:, None]
            logt = np.where(k[None, :] == 0, 0.0, logc[None, :] + k[None, :] * logz) - 2 * zsm[:, None]
        terms = np.exp(logt)
        out[small] = [math.fsum(row) for row in terms]
    big = ~small
    if np.any(big):
        zb = flat[big]
        w = 0.5 * _GL_CUT * (_GL_NODES + 1.0)
        vals = np.exp(-w * w)[None, :] / np.sqrt(2.0 - w[None, :] ** 2 / zb[:, None])
        integral = vals @ (0.5 * _GL_CUT * _GL_WEIGHTS)
        out[big] = 2.0 * integral / (math.pi * np.sqrt(zb))
    if zs.ndim == 0:
        return float(out[0])
    return out.reshape(zs.shape)


def h_kernel(z, n: int, series: SeriesSpec = DEFAULT_SERIES):
    """H(z) = sum_{k >= n-1} 2^k (1 - n/2)_k / (k! (k-n+1)!) z^k.

    For even n >= 2 every coefficient contains the factor (1 - n/2 + n/2 - 1)
    = 0, so H vanishes identically; it is returned as 0 without summing.
    """
    if n < 1:
        raise PreconditionError("h_kernel needs n >= 1")
    z = complex(z)
    alpha = 1.0 - n / 2.0
    k0 = n - 1
    first = 2.0 ** k0 * pochhammer(alpha, k0) / math.factorial(k0) * z ** k0
    if first == 0:
        return 0.0
    term = complex(first)
    total = term
    for k in range(k0, k0 + series.max_terms):
        ratio = 2.0 * (alpha + k) / ((k + 1) * (k - n + 2)) * z
        term = term * ratio
        total += term
        if term == 0:
            break
        r = abs(2.0 * (alpha + k + 1) / ((k + 2) * (k - n + 3)) * z)
        if r < 1 and abs(term) * r / (1 - r) <= series.stop_threshold * abs(total):
            break
        if abs(term) > series.divergence_guard:
            raise NumericFailure("H series hit the divergence guard", abs(term))
    else:
        raise NumericFailure("H series did not converge", abs(term), total)
    return _real_if_possible(total)


# ---------------------------------------------------------------------------
# Weyl fractional integral
# ---------------------------------------------------------------------------

def _vectorized(f: Callable) -> Callable:
    def call(x):
        try:
            out = np.asarray(f(x))
            if out.shape == np.shape(x):
                return out
        except (TypeError, ValueError):
            pass
        return np.array([f(v) for v in np.ravel(x)]).reshape(np.shape(x))

    return call


def weyl_fractional(f: Callable, y: float, mu, quad: QuadratureSpec = DEFAULT_QUAD, *,
                    scale: float = 1.0):
    """Right-sided fractional integral 1/Gamma(mu) int_y^inf f(x) (x - y)^(mu-1) dx.

    ``f`` should accept numpy arrays (scalar-only callables are looped).
    Needs Re mu > 0 and enough decay of f for convergence.
    """
    mu = complex(mu)
    if not mu.real > 0:
        raise PreconditionError("Weyl fractional integral needs Re(mu) > 0")
    y = float(y)
    fv = _vectorized(f)

    def g(t):
        fx = fv(y + t)
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.exp((mu - 1) * np.log(t))
            # far tail: f has underflowed to 0 while the power may overflow
            return np.where(fx == 0, 0.0, fx * w)

    val = exp_sinh(g, quad, scale=scale, what="Weyl fractional integral") / _gamma(mu)
    return _real_if_possible(val)


# ---------------------------------------------------------------------------
# Ramanujan sums and the Dirichlet series phi_m
# ---------------------------------------------------------------------------

@lru_cache(maxsize=65536)
def _ramanujan_sum_cached(c: int, m_mod_c: int) -> float:
    d = np.arange(c, dtype=np.int64)
    d = d[np.gcd(d, c) == 1]
    angles = 2.0 * math.pi * ((m_mod_c * d) % c) / c
    # real because d and c - d are both coprime residues
    return csum(np.cos(angles))


def ramanujan_sum(c: int, m: int) -> float:
    """Inner sum over residues d mod c coprime to c of e(m d / c), by enumeration."""
    if c < 1:
        raise PreconditionError("ramanujan_sum needs c >= 1")
    return _ramanujan_sum_cached(int(c), int(m) % int(c))


def ramanujan_phi(m: int, s, cutoff: int) -> complex:
    """Partial sum over 1 <= c <= cutoff of c^(-2s) times the Ramanujan sum c_c(m).

    The inner sums are enumerated directly (no closed form), so this can
    serve as an independent check of anything built on it.
    """
    if cutoff < 1:
        raise PreconditionError("cutoff must be >= 1")
    s = complex(s)
    terms = [ramanujan_sum(c, m) * cmath.exp(-2 * s * math.log(c)) for c in range(1, cutoff + 1)]
    return _real_if_possible(csum(terms))
