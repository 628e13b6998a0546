import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chyp.errors import PreconditionError, StencilError
from chyp.fields import normal_solution, poisson_power, rho_power, singular_solution
from chyp.geometry import (
    BallPoint,
    SiegelPoint,
    cayley,
    pair_invariants_uv,
    random_ball_point,
    random_siegel_point,
)
from chyp.operator import (
    ScalarField,
    StencilSpec,
    apply_ball_laplacian,
    apply_pair_operator,
    apply_radial_operator,
    apply_siegel_laplacian,
    eigen_residual,
    harmonicity_check_cygan,
    pullback_check,
)
from chyp.report import SpectralParam
from chyp.series import radial_kernel

FINE = StencilSpec(h=1e-3, order=4)


def smooth_field(coef):
    """A smooth non-eigen test function of a Siegel point."""
    a, b, c, d = coef

    def f(Z):
        z1 = Z.z[0]
        return cmath.exp(1j * a * Z.t - b * Z.rho) * (1 + c * Z.beta + d * (z1.real * z1.imag)) \
            + (Z.z[-1] * np.conj(Z.z[0])).real * Z.t
    return f


def generic_point(rng, n):
    # away from the x_j = 0 / y_j = 0 lines so every real chart applies
    return random_siegel_point(rng, n, zmin=0.2)


class TestSiegelLaplacian:
    @pytest.mark.parametrize("chart", ["siegel", "horo", "beta-theta", "radial-tau-omega"])
    def test_rho_power_eigenvalue(self, chart):
        Z = SiegelPoint.from_chart([0.3 + 0.2j, -0.25 + 0.4j], 0.1, 1.0)
        val = apply_siegel_laplacian(ScalarField.from_point(rho_power(2), chart), Z)
        assert val == pytest.approx(-2.0, abs=1e-5)

    @pytest.mark.parametrize("chart", ["siegel", "horo", "beta-theta", "radial-tau-omega"])
    def test_constant(self, chart):
        Z = SiegelPoint.from_chart([0.3 + 0.2j], 0.4, 0.8)
        assert apply_siegel_laplacian(ScalarField.from_point(lambda P: 1.0, chart), Z) == 0

    def test_constant_aggregate(self):
        Z = SiegelPoint.from_chart([0.3 + 0.2j], 0.4, 0.8)
        assert apply_siegel_laplacian(ScalarField(lambda c: 1.0, "aggregate"), Z) == 0

    def test_cross_chart(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 3))
            Z = generic_point(rng, n)
            f = smooth_field(rng.uniform(0.2, 1.5, 4))
            vals = [apply_siegel_laplacian(ScalarField.from_point(f, ch), Z, st=FINE)
                    for ch in ("siegel", "horo", "beta-theta")]
            assert abs(vals[1] - vals[0]) <= 1e-6 * (1 + abs(vals[0]))
            assert abs(vals[2] - vals[0]) <= 1e-6 * (1 + abs(vals[0]))

    def test_aggregate_matches_siegel(self, rng):
        for _ in range(5):
            Z = generic_point(rng, 2)

            def g(beta, t, rho):
                return math.exp(-rho) * math.cos(t) * (1 + beta * beta)

            agg = apply_siegel_laplacian(ScalarField(lambda c: g(*c), "aggregate"), Z, st=FINE)
            full = apply_siegel_laplacian(ScalarField.from_point(lambda P: g(P.beta, P.t, P.rho), "siegel"),
                                          Z, st=FINE)
            assert agg == pytest.approx(full, rel=1e-6, abs=1e-8)

    def test_order_two_vs_four(self, rng):
        Z = generic_point(rng, 1)
        f = ScalarField.from_point(smooth_field((0.7, 0.9, 0.4, 1.1)), "horo")
        coarse = apply_siegel_laplacian(f, Z, st=StencilSpec(h=1e-3, order=2))
        fine = apply_siegel_laplacian(f, Z, st=FINE)
        assert abs(coarse - fine) <= 1e-5 * (1 + abs(fine))

    def test_linearity(self, rng):
        for _ in range(20):
            Z = generic_point(rng, 1)
            f = ScalarField.from_point(smooth_field(rng.uniform(0.2, 1.5, 4)), "siegel")
            g = ScalarField.from_point(rho_power(rng.uniform(1, 3)), "siegel")
            al, be = rng.normal(size=2)
            lhs = apply_siegel_laplacian(f.scaled(al) + g.scaled(be), Z)
            rhs = al * apply_siegel_laplacian(f, Z) + be * apply_siegel_laplacian(g, Z)
            assert abs(lhs - rhs) <= 1e-8 * (1 + abs(rhs))

    def test_near_boundary_rejected(self):
        Z = SiegelPoint.from_chart([0.1], 0.0, 5e-3)
        with pytest.raises(StencilError):
            apply_siegel_laplacian(ScalarField.from_point(rho_power(2), "siegel"), Z)

    def test_chart_mismatch(self):
        f = ScalarField.from_point(rho_power(2), "siegel")
        with pytest.raises(PreconditionError):
            apply_siegel_laplacian(f, SiegelPoint([0.1], 1j), "horo")

    def test_horo_needs_nonzero_coordinates(self):
        f = ScalarField.from_point(rho_power(2), "horo")
        with pytest.raises(PreconditionError):
            apply_siegel_laplacian(f, SiegelPoint([0.3], 1j))

    def test_unknown_chart(self):
        with pytest.raises(PreconditionError):
            ScalarField(lambda c: 0.0, "polar")

    def test_bad_stencil(self):
        with pytest.raises(PreconditionError):
            StencilSpec(order=3)


class TestBallLaplacian:
    def test_constant(self):
        assert apply_ball_laplacian(ScalarField(lambda w: 1.0, "ball"), BallPoint([0.1, 0.2j])) == 0

    def test_holomorphic_coordinate(self):
        val = apply_ball_laplacian(ScalarField(lambda w: w[0], "ball"), BallPoint([0, 0]))
        assert abs(val) < 1e-10

    def test_order_two_vs_four(self):
        f = ScalarField(lambda w: (w[0] * np.conj(w[1]) + abs(w[0]) ** 4 + w[1] ** 2).real, "ball")
        w = BallPoint([0.2 + 0.1j, -0.3j])
        coarse = apply_ball_laplacian(f, w, StencilSpec(h=1e-3, order=2))
        fine = apply_ball_laplacian(f, w, FINE)
        assert abs(coarse - fine) <= 1e-5

    def test_siegel_compatibility(self, rng):
        ratios = []
        for _ in range(20):
            n = int(rng.integers(1, 3))
            w = random_ball_point(rng, n, radius=0.6)
            g = smooth_field(rng.uniform(0.2, 1.5, 4))
            ball = apply_ball_laplacian(ScalarField.from_point(g, "ball"), w, FINE)
            siegel = apply_siegel_laplacian(ScalarField.from_point(g, "siegel"), cayley(w), st=FINE)
            if abs(siegel) > 1e-3:
                ratios.append(ball / siegel)
        assert len(ratios) >= 10
        np.testing.assert_allclose(ratios, 1.0, rtol=1e-4)

    def test_stencil_leaves_ball(self):
        with pytest.raises(StencilError):
            apply_ball_laplacian(ScalarField(lambda w: 1.0, "ball"), BallPoint([0.0, 0.99999]))


class TestEigenfunctions:
    def test_normal_solution(self, rng):
        s = SpectralParam(3.5, 2)
        pts = [random_siegel_point(rng, 2, zmin=0.2) for _ in range(5)]
        f = ScalarField.from_point(normal_solution(3.5, 2, 1), "siegel")
        assert eigen_residual(f, s, pts).max_residual < 1e-4

    def test_singular_solution(self, rng):
        s = SpectralParam(2.7, 1)
        pts = [random_siegel_point(rng, 1) for _ in range(5)]
        f = ScalarField.from_point(singular_solution(2.7, 1, [0.6, 0.8]), "radial-tau-omega")
        assert eigen_residual(f, s, pts).max_residual < 1e-4

    def test_poisson_power(self, rng):
        s = SpectralParam(2.3, 1)
        pts = [random_siegel_point(rng, 1) for _ in range(5)]
        f = ScalarField.from_point(poisson_power(2.3, 0.4), "siegel")
        assert eigen_residual(f, s, pts, FINE).max_residual < 1e-5

    def test_reflected_parameter(self, rng):
        s = SpectralParam(2.6, 2)
        pts = [random_siegel_point(rng, 2) for _ in range(3)]
        f = ScalarField.from_point(rho_power(2.6), "horo")
        a = eigen_residual(f, s, pts).max_residual
        b = eigen_residual(f, s.reflected(), pts).max_residual
        assert a == pytest.approx(b, rel=1e-8, abs=1e-14)

    def test_report_json(self, rng):
        rep = eigen_residual(ScalarField.from_point(rho_power(2), "siegel"), SpectralParam(2, 1),
                             [random_siegel_point(rng, 1)])
        out = rep.to_json()
        assert set(out) >= {"check", "paper_ref", "points", "max_residual", "tolerance", "pass"}


class TestCygan:
    def test_harmonic(self, rng):
        Zp = SiegelPoint([0], 1j)
        pts = [random_siegel_point(rng, 1) for _ in range(10)]
        assert harmonicity_check_cygan(Zp, pts).passed

    def test_far_point(self):
        Zp = SiegelPoint([0], 1j)
        assert harmonicity_check_cygan(Zp, [SiegelPoint.from_chart([0.3], 2.0, 50.0)]).passed

    def test_permutation(self, rng):
        Zp = random_siegel_point(rng, 3)
        Z = random_siegel_point(rng, 3)
        a = harmonicity_check_cygan(Zp, [Z]).max_residual
        # the same shift applied to both points leaves every Hermitian product alone
        b = harmonicity_check_cygan(Zp.permuted((2, 0, 1)), [Z.permuted((2, 0, 1))]).max_residual
        assert b == pytest.approx(a, abs=1e-9)
        assert b < 1e-4

    def test_coincident(self):
        Z = SiegelPoint([0], 1j)
        with pytest.raises(PreconditionError):
            harmonicity_check_cygan(Z, [Z])


class TestRadialOperator:
    def test_g1(self):
        s = SpectralParam(2.5, 1)
        f = ScalarField(lambda c: radial_kernel(c[0], c[1], s, 1, "g1"), "radial-xy")
        assert abs(apply_radial_operator(f, 1.2, 0.7, s, st=FINE)) < 1e-6

    def test_g3(self):
        s = SpectralParam(3.2, 2)
        f = ScalarField(lambda c: radial_kernel(c[0], c[1], s, 2, "g3"), "radial-xy")
        # order 2 leaves ~1.6e-6 of truncation error here
        assert abs(apply_radial_operator(f, 0.8, 0.5, s, st=FINE)) < 1e-6

    def test_f3_kernel(self):
        s = SpectralParam(3.2, 2)
        f = ScalarField(lambda c: radial_kernel(c[0], c[1], s, 2, "f3", split=(1.5, 1.7)), "radial-xy")
        assert abs(apply_radial_operator(f, 0.8, 0.5, s, st=FINE)) < 1e-5

    def test_g1_small_argument(self):
        # -1/x far down the negative axis
        s = SpectralParam(2.5, 1)
        f = ScalarField(lambda c: radial_kernel(c[0], c[1], s, 1, "g1"), "radial-xy")
        g = radial_kernel(0.01, 0.5, s, 1, "g1")
        assert abs(apply_radial_operator(f, 0.01, 0.5, s, st=FINE)) < 1e-5 * abs(g)

    def test_quadrant(self):
        s = SpectralParam(2.5, 1)
        f = ScalarField(lambda c: 1.0, "radial-xy")
        with pytest.raises(PreconditionError):
            apply_radial_operator(f, -1.0, 0.5, s)


class TestPullback:
    def test_linear(self, rng):
        Z, Zp = random_siegel_point(rng, 2), random_siegel_point(rng, 2)
        rep = pullback_check(lambda u, v: u, Z, Zp, FINE)
        u, _ = pair_invariants_uv(Z, Zp)
        lam = Zp.beta / Zp.rho
        assert rep.details["rhs"] == pytest.approx((2 + 2) * u + lam + 1, rel=1e-9)
        assert abs(rep.details["lhs"] - rep.details["rhs"]) < 1e-6

    def test_constant(self, rng):
        Z, Zp = random_siegel_point(rng, 1), random_siegel_point(rng, 1)
        rep = pullback_check(lambda u, v: 2.0, Z, Zp)
        assert rep.details["lhs"] == 0 and rep.details["rhs"] == 0

    def test_kernel_ties_to_eigenvalue(self, rng):
        n, s = 2, SpectralParam(3.2, 2)
        Z, Zp = random_siegel_point(rng, n, zmin=0.2), random_siegel_point(rng, n, zmin=0.2)
        lam = Zp.beta / Zp.rho

        def g(u, v):
            return radial_kernel(u / (lam + 1), v / lam, s, n, "g1")

        rep = pullback_check(g, Z, Zp, FINE)
        assert rep.max_residual < 1e-5
        u, v = pair_invariants_uv(Z, Zp)
        assert rep.details["rhs"] == pytest.approx(s.lam * g(u, v), rel=1e-5)

    @settings(max_examples=10)
    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_quadratic(self, seed):
        rng = np.random.default_rng(seed)
        Z, Zp = random_siegel_point(rng, 1, zmin=0.1), random_siegel_point(rng, 1, zmin=0.1)
        assert pullback_check(lambda u, v: u * u + u * v + v * v, Z, Zp, FINE).max_residual < 1e-6


def test_pair_operator_constant():
    assert apply_pair_operator(lambda u, v: 3.0, 0.4, 0.2, 0.5, 2) == 0
