# tests/test_inversion.py

import math

import numpy as np
import pytest

from src.models import Route, TransformParameters, TransformResult
from src.specfun.bessel import bessel_i_complex, bessel_k_imag
from src.specfun.gamma import gamma, rgamma
from src.transforms.auxiliary import (
    AuxiliaryPhi,
    AuxRoute,
    antiderivative_check,
    h_function,
    integrated_S,
    inversion_kernel_S,
    lebedev_form,
    lebedev_weight,
    legendre_square_identity,
    phi_aux,
    u_mu,
)
from src.transforms.forward import forward_F_contour
from src.transforms.functions import SampledFunction
from src.transforms.inversion import (
    bessel_identity,
    invert_F,
    invert_F_integrated,
    invert_G,
    log_grid,
    roundtrip_F,
    roundtrip_G,
    tau_grid,
    u_consistency,
)
from src.utils.errors import HypothesisWarning, ParameterError, StripError
from tests.conftest import relative_error


class TestAuxiliary:
    @pytest.mark.parametrize("x,mu", [(2.0, -0.5), (0.7, -1.25), (3.0, -0.75)])
    def test_h_routes(self, x, mu):
        p = TransformParameters(mu=mu)
        closed = h_function(x, p, AuxRoute.CLOSED_FORM)
        contour = h_function(x, p, AuxRoute.CONTOUR)
        assert abs(contour - closed) < 1e-8 * max(abs(closed), 1.0)

    @pytest.mark.parametrize("x", [0.3, 2.0, 10.0])
    def test_h_elementary_at_half(self, x, half):
        assert relative_error(h_function(x, half), -math.exp(-1.0 / x) / x) < 1e-12

    @pytest.mark.parametrize("mu", [-0.5, -1.25])
    def test_h_large_x(self, mu):
        x = 50.0
        first = 3.0 * gamma(-1.0 - mu).real / (8.0 * gamma(2.0 - mu).real) / x
        second = (math.sqrt(math.pi) * gamma(1.0 + mu) * rgamma(1.0 - mu) * rgamma(mu - 0.5)).real * (4.0 * x) ** mu
        value = h_function(x, TransformParameters(mu=mu))
        assert abs(value - first - second) <= 0.05 * (abs(first) + abs(second))

    def test_h_needs_negative_noninteger_order(self):
        with pytest.raises(ParameterError):
            h_function(1.0, TransformParameters(mu=0.2))
        with pytest.raises(ParameterError):
            h_function(1.0, TransformParameters(mu=-1.0))

    @pytest.mark.parametrize("y,mu", [(1.0, -0.5), (3.0, -1.25), (0.5, 0.3)])
    def test_u_routes(self, y, mu):
        p = TransformParameters(mu=mu)
        closed = u_mu(y, p, AuxRoute.CLOSED_FORM)
        assert abs(u_mu(y, p, AuxRoute.CONTOUR) - closed) < 1e-8 * max(abs(closed), 1.0)

    def test_u_elementary_at_half(self, half):
        assert relative_error(u_mu(2.0, half), -math.exp(-2.0)) < 1e-12

    @pytest.mark.parametrize("mu", [-0.5, -1.25, 0.3])
    def test_u_small_argument(self, mu):
        y = 1e-3
        first = 1.0 / (2.0 * mu)
        second = (math.sqrt(math.pi) * gamma(mu) * rgamma(mu - 0.5) * rgamma(1.0 - mu)).real * (0.25 * y) ** (-mu)
        value = u_mu(y, TransformParameters(mu=mu))
        assert abs(value - first - second) <= 0.01 * (abs(first) + abs(second))

    @pytest.mark.parametrize("x,tau,mu", [(2.0, 1.0, -0.5), (5.0, 0.5, -1.25)])
    def test_s_routes(self, x, tau, mu):
        p = TransformParameters(mu=mu)
        closed = inversion_kernel_S(x, tau, p, AuxRoute.CLOSED_FORM)
        contour = inversion_kernel_S(x, tau, p, AuxRoute.CONTOUR)
        assert abs(contour - closed) < 1e-6 * max(abs(closed), 1e-3)

    def test_s_even_in_tau(self, half):
        a = inversion_kernel_S(2.0, 1.0, half)
        assert abs(inversion_kernel_S(2.0, -1.0, half) - a) <= 1e-10 * abs(a)

    @pytest.mark.parametrize("x,tau", [(1.0, 1.0), (0.5, 2.0)])
    def test_integrated_s_routes(self, x, tau, half):
        closed = integrated_S(x, tau, half, AuxRoute.CLOSED_FORM)
        quad = integrated_S(x, tau, half, AuxRoute.QUADRATURE)
        assert abs(quad - closed) < 1e-5 * max(abs(closed), 1e-3)

    def test_integrated_s_vanishes_at_origin(self, half):
        assert abs(integrated_S(1e-8, 1.0, half)) < 1e-6 * abs(integrated_S(1.0, 1.0, half))

    @pytest.mark.parametrize("x,tau,mu", [(1.0, 1.0, -0.5), (2.0, 0.5, -1.25), (0.5, 2.0, -0.3)])
    def test_legendre_square_identity(self, x, tau, mu):
        lhs, rhs = legendre_square_identity(x, tau, TransformParameters(mu=mu))
        assert abs(lhs - rhs) < 1e-8 * max(abs(lhs), 1.0)

    def test_legendre_square_identity_domain(self, half):
        with pytest.raises(StripError):
            legendre_square_identity(1.0, 0.0, half)

    def test_lebedev_weight_switches_smoothly(self):
        tau, x = 1.0, 1700.0
        y = math.sqrt(x)
        exact = bessel_k_imag(tau, y) * 2.0 * bessel_i_complex(complex(0.0, tau), y).real
        assert relative_error(lebedev_weight(tau, x), exact) < 1e-6

    def test_phi_aux_matches_plan(self, centered, half):
        phi_fn = AuxiliaryPhi(centered, half)
        values = phi_fn(np.array([0.1, 1.0, 10.0]))
        assert np.all(np.isfinite(values))
        assert phi_aux(centered, half, None, 1.0) == pytest.approx(values[1], rel=1e-12)

    def test_phi_aux_needs_image(self, half):
        grid = np.linspace(0.0, 4.0, 9)
        with pytest.raises(StripError):
            AuxiliaryPhi(SampledFunction.tabulated(grid, np.exp(-grid)), half)

    @pytest.mark.slow
    @pytest.mark.parametrize("tau", [0.5, 1.0])
    def test_lebedev_form_reproduces_F(self, centered, half, tau):
        phi_fn = AuxiliaryPhi(centered, half)
        F = forward_F_contour(centered, half, [tau]).values[0]
        assert abs(lebedev_form(phi_fn, tau) - F) < 1e-5 * max(abs(F), 1e-3)

    @pytest.mark.slow
    def test_antiderivative_identity(self, centered, half):
        lhs, rhs = antiderivative_check(centered, half, 1.0)
        assert abs(lhs - rhs) < 1e-4 * max(abs(lhs), 1e-3)


class TestGrids:
    def test_tau_grid_is_odd_and_spans(self):
        for tau_max, step in [(4.0, 0.05), (1.0, 0.3), (2.5, 0.5)]:
            grid = tau_grid(tau_max, step)
            assert len(grid) % 2 == 1
            assert grid[0] == 0.0 and grid[-1] == pytest.approx(tau_max)
            assert np.all(np.diff(grid) <= step + 1e-12)

    def test_log_grid(self):
        grid = log_grid(1e-3, 1e3, 7)
        assert grid[0] == pytest.approx(1e-3) and grid[-1] == pytest.approx(1e3)
        with pytest.raises(StripError):
            log_grid(0.0, 1.0, 10)
        with pytest.raises(StripError):
            log_grid(1.0, 10.0, 3)


class TestInvertF:
    def _flat(self, p, value=0.0):
        taus = tau_grid(2.0, 0.25)
        return TransformResult(taus, np.full(taus.shape, value), np.zeros(taus.shape), p, Route.CONTOUR)

    def test_zero_samples(self, half):
        result = invert_F(self._flat(half), half, [0.5, 1.0])
        assert np.all(result.values == 0.0)
        assert result.route is Route.DIRECT

    def test_order_outside_verified_window_warns(self):
        p = TransformParameters(mu=-0.1)
        with pytest.warns(HypothesisWarning, match="outside the window"):
            invert_F(self._flat(p), p, [1.0])

    def test_heavy_tail_warns(self, half):
        with pytest.warns(HypothesisWarning, match="tau-tail"):
            result = invert_F(self._flat(half, 1.0), half, [1.0])
        assert result.meta["tail_ratio"] > 1e-8

    def test_rejects_positive_order(self, wedge_params):
        with pytest.raises(ParameterError):
            invert_F(self._flat(wedge_params), wedge_params, [1.0])

    def test_rejects_short_grid(self, half):
        taus = np.array([0.0, 1.0, 2.0])
        F = TransformResult(taus, np.zeros(3), np.zeros(3), half, Route.CONTOUR)
        with pytest.raises(StripError):
            invert_F(F, half, [1.0])

    def test_linearity(self, half):
        taus = tau_grid(3.0, 0.1)
        values = np.exp(-4.0 * taus)
        one = invert_F(TransformResult(taus, values, np.zeros(taus.shape), half, Route.CONTOUR), half, [1.0])
        two = invert_F(TransformResult(taus, 2.0 * values, np.zeros(taus.shape), half, Route.CONTOUR), half, [1.0])
        assert two.values[0] == pytest.approx(2.0 * one.values[0], rel=1e-12)

    @pytest.mark.slow
    @pytest.mark.parametrize("mu", [-0.5, -1.25])
    def test_round_trip(self, centered, mu):
        p = TransformParameters(mu=mu)
        xs = [0.5, 1.0, 2.0]
        recon, F = roundtrip_F(centered, p, xs)
        expected = centered(np.array(xs))
        assert np.all(np.abs(recon.values - expected) <= 1e-2 * np.abs(expected))
        assert recon.meta["tail_ratio"] <= 1e-8
        assert len(F) % 2 == 1

    @pytest.mark.slow
    def test_refining_the_tau_grid_does_not_hurt(self, centered, half):
        xs = [0.5, 1.0, 2.0]
        expected = centered(np.array(xs))
        errors = []
        for step in (0.2, 0.1, 0.05):
            F = forward_F_contour(centered, half, tau_grid(8.0, step))
            errors.append(float(np.max(np.abs(invert_F(F, half, xs).values - expected))))
        assert errors[1] <= errors[0] + 1e-10
        assert errors[2] <= errors[1] + 1e-10

    @pytest.mark.slow
    def test_integrated_route_agrees(self, centered, half):
        F = forward_F_contour(centered, half, tau_grid(6.0))
        direct = invert_F(F, half, [1.0]).values[0]
        integrated = invert_F_integrated(F, half, [1.0]).values[0]
        assert abs(direct - integrated) < 1e-3 * abs(direct)

    @pytest.mark.slow
    def test_round_trip_without_hypotheses_warns(self, exp_decay, half):
        with pytest.warns(HypothesisWarning):
            roundtrip_F(exp_decay, half, [1.0], tau_max=4.0)


class TestInvertG:
    def test_zero_samples(self, half):
        us = log_grid(1e-3, 1e3, 41)
        G = TransformResult(us, np.zeros(us.shape), np.zeros(us.shape), half, Route.CONTOUR)
        result = invert_G(G, half, [0.5, 1.0])
        assert np.all(result.values == 0.0)
        assert result.route is Route.LIMIT_FORM
        eps = invert_G(G, half, [1.0], epsilon=0.1)
        assert eps.route is Route.EPSILON and eps.meta["epsilon"] == 0.1

    def test_epsilon_range(self, half):
        us = log_grid(1e-3, 1e3, 41)
        G = TransformResult(us, np.zeros(us.shape), np.zeros(us.shape), half, Route.CONTOUR)
        with pytest.raises(ParameterError):
            invert_G(G, half, [1.0], epsilon=1.5)

    def test_rejects_nonpositive_grid(self, half):
        us = np.linspace(0.0, 1.0, 11)
        G = TransformResult(us, np.zeros(us.shape), np.zeros(us.shape), half, Route.CONTOUR)
        with pytest.raises(StripError):
            invert_G(G, half, [1.0])

    @pytest.mark.slow
    @pytest.mark.parametrize("a", [1.0, 2.0])
    @pytest.mark.parametrize("mu", [-0.5, 0.2])
    def test_round_trip(self, a, mu):
        g = SampledFunction.builtin("cosh_gauss_tau", a=a)
        taus = [0.5, 1.0, 1.5]
        recon, _ = roundtrip_G(g, TransformParameters(mu=mu), taus)
        expected = g(np.array(taus))
        assert np.all(np.abs(recon.values - expected) <= 5e-2 * np.abs(expected))

    @pytest.mark.slow
    def test_refining_the_u_grid_does_not_hurt(self, balanced, half):
        taus = [0.5, 1.0, 1.5]
        expected = balanced(np.array(taus))
        errors = []
        for count in (401, 801, 1601):
            recon, _ = roundtrip_G(balanced, half, taus, us=log_grid(1e-14, 1e6, count))
            errors.append(float(np.max(np.abs(recon.values - expected))))
        assert errors[1] <= errors[0] + 1e-10
        assert errors[2] <= errors[1] + 1e-10

    @pytest.mark.slow
    def test_epsilon_sweep_approaches_limit(self, balanced, half):
        limit, G = roundtrip_G(balanced, half, [1.0])
        gaps = [abs(invert_G(G, half, [1.0], epsilon=eps).values[0] - limit.values[0])
                for eps in (0.2, 0.1, 0.05)]
        assert gaps[0] > gaps[1] > gaps[2]

    @pytest.mark.slow
    def test_unbalanced_input_warns(self, gauss_even, half):
        with pytest.warns(HypothesisWarning, match="not balanced"):
            roundtrip_G(gauss_even, half, [1.0], us=log_grid(1e-6, 1e4, 201))


class TestBesselIdentity:
    def test_both_sides(self, gauss_even, half):
        lhs, rhs = bessel_identity(gauss_even, half, None, [1.0, 4.0])
        assert lhs.route is Route.CONTOUR and rhs.route is Route.QUADRATURE
        assert np.allclose(lhs.values, rhs.values, rtol=1e-5)

    def test_abscissa_outside_strip(self, gauss_even, wedge_params):
        from src.models import ContourSpec
        with pytest.raises(StripError):
            bessel_identity(gauss_even, wedge_params, ContourSpec.default(0.1), [1.0])

    @pytest.mark.slow
    def test_u_consistency(self, balanced, half):
        lhs, _ = bessel_identity(balanced, half, None, [1.0])
        assert relative_error(u_consistency(balanced, half, 1.0), lhs.values[0]) < 1e-4
