"""Seeded verification suites: named, ordered lists of identity checks.

Every suite is a pure function of :class:`SuiteConfig`; the same config
always produces the same reports in the same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fields
from .geometry import (
    GroupElement,
    SiegelPoint,
    act,
    automorphy,
    cayley_inverse,
    pair_invariants_uv,
    pair_invariants_xy,
    random_group_element,
    random_siegel_point,
    truncated_volume_integral,
)
from .lattice import Truncation
from .modular import (
    WeightIndex,
    check_local_boundedness,
    eisenstein_km_partial,
    j_invariant,
    slash,
    verify_degenerate_reduction,
    verify_inversion_identity,
    verify_translation_identity,
    verify_weight_additivity,
)
from .operator import (
    ScalarField,
    StencilSpec,
    apply_radial_operator,
    eigen_residual,
    harmonicity_check_cygan,
    pullback_check,
)
from .report import SpectralParam, VerificationReport
from .series import (
    boundary_eisenstein_partial,
    green_boundary_limit,
    poincare_partial,
    radial_kernel,
    scattering_partial,
    verify_a_chain,
    verify_fourier_slice,
    verify_h_kernel,
    verify_key_integral,
    verify_weyl_identity,
)

__all__ = ["SuiteConfig", "SUITES", "run_suite"]


@dataclass(frozen=True)
class SuiteConfig:
    n: int = 1
    seed: int = 0
    quick: bool = False
    stencil: StencilSpec = field(default_factory=StencilSpec)
    s: complex | None = None

    def rng(self, salt: int) -> np.random.Generator:
        # one stream per check keeps checks independent of each other's draws
        return np.random.default_rng([self.seed, salt])

    @property
    def fine_stencil(self) -> StencilSpec:
        """Order-4 stencil for composite kernels, whose higher derivatives are large."""
        return StencilSpec(h=self.stencil.h, order=4)

    @property
    def samples(self) -> int:
        return 4 if self.quick else 10

    def as_dict(self) -> dict:
        return {"n": self.n, "seed": self.seed, "quick": self.quick,
                "stencil": self.stencil.as_dict(), "s": self.s}


def _eigen(cfg: SuiteConfig, f, s: SpectralParam, chart: str, salt: int, check: str, ref: str,
           tolerance: float = 1e-4, zmin: float = 0.0) -> VerificationReport:
    rng = cfg.rng(salt)
    pts = [random_siegel_point(rng, cfg.n, zmin=zmin) for _ in range(cfg.samples)]
    return eigen_residual(ScalarField.from_point(f, chart), s, pts, cfg.stencil,
                          tolerance=tolerance, check=check, paper_ref=ref)


# ---------------------------------------------------------------------------

def suite_operators(cfg: SuiteConfig) -> list[VerificationReport]:
    n = cfg.n
    s = SpectralParam(cfg.s if cfg.s is not None else n / 2 + 2.0, n)
    out = []
    for i, chart in enumerate(("siegel", "horo", "beta-theta", "radial-tau-omega")):
        out.append(_eigen(cfg, fields.rho_power(s.s), s, chart, 10 + i, f"rho-power[{chart}]",
                          "rho^s is an eigenfunction"))
    if n >= 2:
        rng = cfg.rng(14)
        pts = [random_siegel_point(rng, n) for _ in range(cfg.samples)]
        f = ScalarField(lambda c: c[2] ** s.s * c[0] ** (1 - n), "aggregate")
        out.append(eigen_residual(f, s, pts, cfg.stencil, check="rho-beta-power[aggregate]",
                                  paper_ref="rho^s beta^(1-n) is an eigenfunction"))
    for m in (1, 2):
        # the K_0(2 pi |m| beta_j) factors are log-singular at z_j = 0
        out.append(_eigen(cfg, fields.normal_solution(s.s, n, m), s, "siegel", 20 + m,
                          f"normal-solution[m={m}]", "normal solutions with K-Bessel factors", zmin=0.2))
    for k, a in enumerate(([1.0] + [0.0] * (2 * n - 1), [1.0, 1.0] + [0.0] * (2 * n - 2))):
        label = f"{math.sqrt(sum(x * x for x in a)):.4f}"
        out.append(_eigen(cfg, fields.singular_solution(s.s, n, a), s, "siegel", 30 + k,
                          f"singular-solution[|a|={label}]", "singular solutions in (tau, omega)"))
    out.append(_eigen(cfg, fields.poisson_power(s.s, 0.3), s, "siegel", 40, "poisson-power",
                      "P(Z, zeta)^s is an eigenfunction"))
    rng = cfg.rng(41)
    ball_pts = [cayley_inverse(random_siegel_point(rng, n)) for _ in range(max(3, cfg.samples // 2))]
    out.append(eigen_residual(ScalarField.from_point(fields.poisson_power(s.s, 0.3), "ball"), s,
                              ball_pts, cfg.stencil, check="poisson-power[ball]",
                              paper_ref="ball Laplacian matches the Siegel Laplacian under the Cayley map"))
    rng = cfg.rng(50)
    Zp = random_siegel_point(rng, n)
    pts = [random_siegel_point(rng, n) for _ in range(cfg.samples)]
    out.append(harmonicity_check_cygan(Zp, pts, cfg.stencil))
    return out


def suite_fourier(cfg: SuiteConfig) -> list[VerificationReport]:
    n = cfg.n
    out = [verify_key_integral(u, s) for s, u in ((2.0, 1.0), (3.0, 2.0), (2.5, 0.5))]
    rng = cfg.rng(60)
    out.append(verify_a_chain(1, n / 2 + 1.5, n, float(rng.uniform(0.3, 2.0))))
    rng = cfg.rng(61)
    for _ in range(2 if cfg.quick else 5):
        nu, alpha, y, mu = rng.uniform(-0.4, 1.5), rng.uniform(0.5, 2.0), rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.5)
        out.append(verify_weyl_identity(float(nu), float(alpha), float(y), float(mu)))
    out.append(verify_h_kernel(n))
    rng = cfg.rng(62)
    Z = random_siegel_point(rng, n)
    tr = Truncation(N=50 if cfg.quick else 200)
    for m in (0, 1):
        out.append(verify_fourier_slice(Z, m, n / 2 + 2.0, tr))
    return out


def _radial_report(cfg: SuiteConfig, kind: str, salt: int) -> VerificationReport:
    n = cfg.n
    s = SpectralParam(n + 1.5, n)
    g = ScalarField(lambda c: radial_kernel(c[0], c[1], s, n, kind), "radial-xy")
    rng = cfg.rng(salt)
    pts = [tuple(float(v) for v in rng.uniform(0.3, 2.0, 2)) for _ in range(5)]
    # |M g| is absolute, and g reaches ~6 near x, y = 0.3, where order-2 error alone is ~2e-5
    res = [abs(apply_radial_operator(g, x, y, s, n, cfg.fine_stencil)) for x, y in pts]
    return VerificationReport(f"radial-kernel[{kind}]", "kernel solutions of the radial equation",
                              max(res), 1e-5, points=[list(p) for p in pts],
                              details={"s": s.s, "n": n, "split": s.kernel_split(), "per_point": res,
                                       "stencil": cfg.fine_stencil.as_dict()})


def _invariance_report(cfg: SuiteConfig) -> VerificationReport:
    n = cfg.n
    rng = cfg.rng(80)
    worst = 0.0
    for _ in range(30 if cfg.quick else 100):
        g = random_group_element(rng, n)
        Z, Zp = random_siegel_point(rng, n), random_siegel_point(rng, n)
        gZ, gZp = act(g, Z), act(g, Zp)
        for f in (pair_invariants_uv, pair_invariants_xy):
            a, b = np.array(f(Z, Zp)), np.array(f(gZ, gZp))
            worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
        j2 = abs(automorphy(g, Z)) ** 2
        worst = max(worst, abs(gZ.rho - Z.rho / j2) / gZ.rho, abs(gZ.beta - Z.beta / j2) / gZ.beta)
    return VerificationReport("group-invariance", "point-pair invariants and the rho, beta laws",
                              worst, 1e-12, details={"n": n})


def _sigma_report(cfg: SuiteConfig) -> VerificationReport:
    n = cfg.n
    rng = cfg.rng(81)
    Z, Zp = random_siegel_point(rng, n), random_siegel_point(rng, n)
    with_p = poincare_partial(Z, Zp, n + 1.5, Truncation(N=3, include_permutations=True), kind="g1")
    without = poincare_partial(Z, Zp, n + 1.5, Truncation(N=3), kind="g1")
    ratio = with_p / without
    return VerificationReport("sigma-factorization", "permutation block contributes n!",
                              abs(ratio - math.factorial(n)), 1e-12 * math.factorial(n),
                              points=[Z.to_json(), Zp.to_json()], details={"ratio": ratio})


def suite_kernels(cfg: SuiteConfig) -> list[VerificationReport]:
    n = cfg.n
    out = [_radial_report(cfg, kind, 70 + i) for i, kind in enumerate(("g1", "g2", "g3", "f3"))]
    rng = cfg.rng(75)
    Z, Zp = random_siegel_point(rng, n), random_siegel_point(rng, n)
    out.append(pullback_check(lambda u, v: u * u + u * v + math.exp(-v), Z, Zp, cfg.fine_stencil))
    out.append(_invariance_report(cfg))
    out.append(_sigma_report(cfg))
    s = SpectralParam(n + 1.5, n)
    rng = cfg.rng(82)
    Zp = random_siegel_point(rng, n)
    tr = Truncation(N=1 if cfg.quick else 2)
    f = lambda P: poincare_partial(P, Zp, s, tr, kind="g1")
    pts = [random_siegel_point(rng, n) for _ in range(3)]
    out.append(eigen_residual(ScalarField.from_point(f, "siegel"), s, pts, cfg.fine_stencil,
                              check="poincare-eigen", paper_ref="truncated Poincare series is an eigenfunction"))
    return out


def suite_boundary(cfg: SuiteConfig) -> list[VerificationReport]:
    n = cfg.n
    s = SpectralParam(n + 2.0, n)
    rng = cfg.rng(90)
    zeta = float(rng.uniform(-1, 1))
    tr = Truncation(N=1 if cfg.quick else 2)
    pts = [random_siegel_point(rng, n) for _ in range(3)]
    out = [eigen_residual(ScalarField.from_point(lambda P: boundary_eisenstein_partial(P, zeta, s, tr), "siegel"),
                          s, pts, cfg.fine_stencil, check="boundary-eisenstein-eigen",
                          paper_ref="boundary Eisenstein series is an eigenfunction")]
    rng = cfg.rng(91)
    trs = Truncation(N=6 if cfg.quick else 12)
    worst = 0.0
    for _ in range(3):
        a, b = (float(v) for v in rng.uniform(-1, 1, 2))
        x, y = scattering_partial(a, b, 2.0, trs, n), scattering_partial(b, a, 2.0, trs, n)
        worst = max(worst, abs(x - y) / abs(x))
    out.append(VerificationReport("scattering-symmetry", "scattering matrix is symmetric",
                                  worst, 1e-12, details={"N": trs.N}))
    rng = cfg.rng(92)
    green_pts = [random_siegel_point(rng, 1) for _ in range(5)]
    out.append(green_boundary_limit(green_pts, 0.3, 3.0))
    ratios = []
    for k in (1, 2, 3):
        r = truncated_volume_integral(1.0, 1e-4, k) / truncated_volume_integral(1.0, 2e-4, k)
        ratios.append(abs(r / 2 ** (k + 1) - 1))
    out.append(VerificationReport("covolume-divergence", "truncated volume grows like epsilon^-(n+1)",
                                  max(ratios), 0.02, details={"relative_gaps": ratios}))
    return out


def _box(cfg: SuiteConfig, N: int) -> Truncation:
    return Truncation(N=N)


def suite_modular(cfg: SuiteConfig) -> list[VerificationReport]:
    n = cfg.n
    rng = cfg.rng(100)
    out = []
    for k in (4, 6):
        Z = random_siegel_point(rng, n, rho_range=(1.0, 2.0))
        out.append(verify_inversion_identity(Z, WeightIndex(k, 1), _box(cfg, 50)))
    for k in (4, 6):
        Z = random_siegel_point(rng, n, rho_range=(1.0, 2.0))
        out.append(verify_translation_identity(Z, WeightIndex(k, 1), _box(cfg, 200)))
    out.append(verify_weight_additivity(random_siegel_point(rng, n), "3/2", _box(cfg, 50)))
    tr500 = _box(cfg, 500)
    rep = verify_degenerate_reduction(1j, 1, tr500, n=n, tolerance=1e-2)
    rep.check = "degenerate-j[i]"
    out.append(rep)
    out.append(verify_degenerate_reduction(2j, 1, tr500, n=n))
    Z0 = SiegelPoint(np.zeros(n), 0.1 + 1.3j)
    j1, j7 = j_invariant(Z0, 1, tr500), j_invariant(Z0, 7, tr500)
    out.append(VerificationReport("index-independence", "e^m(0) = 1 on the slice z = 0",
                                  abs(j1 - j7) / abs(j1), 1e-12, points=[Z0.to_json()],
                                  details={"j_1": j1, "j_7": j7}))
    wi6 = WeightIndex(6, 1)
    tr200 = _box(cfg, 200)
    E6 = lambda P: eisenstein_km_partial(P, wi6, tr200)
    worst = 0.0
    words = []
    for _ in range(4 if cfg.quick else 10):
        g = GroupElement.identity(n)
        for _ in range(int(rng.integers(1, 5))):
            step = GroupElement.inversion(n) if rng.random() < 0.5 else GroupElement.translation(n, int(rng.choice([-1, 1])))
            g = g @ step
        Z = random_siegel_point(rng, n, rho_range=(1.0, 2.0))
        worst = max(worst, abs(slash(E6, g, wi6, Z) - E6(Z)) / abs(E6(Z)))
        words.append(g.to_json())
    out.append(VerificationReport("word-cocycle", "slash invariance on words in the generators",
                                  worst, 1e-9, details={"weight_index": wi6.as_dict(), "words": words, "N": 200}))
    wi4 = WeightIndex(4, 1)
    tr50 = _box(cfg, 50)
    if n >= 2:
        Z = random_siegel_point(rng, n)
        base = eisenstein_km_partial(Z, wi4, tr50)
        dev = max(abs(eisenstein_km_partial(Z.permuted(tuple(rng.permutation(n).tolist())), wi4, tr50) - base)
                  for _ in range(5))
        out.append(VerificationReport("permutation-invariance", "E_{k,m} is symmetric in z_1..z_n",
                                      dev, 1e-300 + 1e-15 * abs(base), points=[Z.to_json()]))
    worst = 0.0
    for _ in range(5):
        Z = random_siegel_point(rng, n)
        Zc = SiegelPoint(-np.conj(Z.z), -np.conj(Z.zlast))
        a, b = eisenstein_km_partial(Z, wi4, tr50), eisenstein_km_partial(Zc, wi4, tr50)
        worst = max(worst, abs(b - np.conj(a)) / abs(a))
    out.append(VerificationReport("conjugation-symmetry", "E_{k,m}(-conj Z) = conj E_{k,m}(Z) for real m",
                                  worst, 1e-12))
    path = [SiegelPoint(np.zeros(n), complex(0.1, h)) for h in np.geomspace(1.0, 8.0, 8)]
    rep = check_local_boundedness(lambda P: eisenstein_km_partial(P, wi4, tr50), path)
    rep.check = "local-boundedness[E_4,1]"
    out.append(rep)
    return out


SUITES: dict[str, Callable[[SuiteConfig], list[VerificationReport]]] = {
    "operators": suite_operators,
    "fourier": suite_fourier,
    "kernels": suite_kernels,
    "boundary": suite_boundary,
    "modular": suite_modular,
}


def run_suite(name: str, cfg: SuiteConfig) -> list[VerificationReport]:
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](cfg)]
    return SUITES[name](cfg)
