# tests/test_transforms.py

import math

import numpy as np
import pytest
from scipy import special

from src.models import ContourSpec, Route, TransformParameters, TransformResult
from src.transforms.forward import (
    TauImage,
    balance,
    bound_check_F,
    bound_check_G,
    forward_F,
    forward_F_contour,
    forward_G,
    forward_G_quadrature,
    mellin_half,
    mellin_image_identity,
    norm_constant,
    parseval_abscissa,
)
from src.transforms.functions import CATALOG, Interpolation, SampledFunction, Variable
from src.transforms.mellin import mellin_inverse, mellin_transform, norm_l, parseval_check
from src.utils.errors import ConfigError, HypothesisWarning, StripError
from tests.conftest import relative_error


class TestFunctions:
    def test_catalog_variables(self):
        assert CATALOG["exp_decay"].variable is Variable.X
        assert CATALOG["gauss_even_tau"].variable is Variable.TAU
        assert SampledFunction.builtin("centered_power_exp").satisfies("f*(1/2)=0")
        assert not SampledFunction.builtin("exp_decay").satisfies("f(0)=0")

    def test_builtin_values(self):
        f = SampledFunction.builtin("power_exp", a=2.0, b=0.5)
        assert f(1.0) == pytest.approx(math.exp(-2.0))
        assert np.allclose(f(np.array([1.0, 4.0])), [math.exp(-2.0), 2.0 * math.exp(-8.0)])

    def test_parse(self):
        f = SampledFunction.parse("power_exp(a=2, b=0.5)")
        assert f.params == {"a": 2.0, "b": 0.5}
        assert f.label == "power_exp(a=2, b=0.5)"
        assert SampledFunction.parse("gauss_tau").params == {"a": 1.0}

    @pytest.mark.parametrize("text", ["nope(a=1)", "exp_decay(a)", "exp_decay(a=x)", "exp_decay(c=1)",
                                      "exp_decay(a=-1)", "1bad"])
    def test_parse_rejects(self, text):
        with pytest.raises(ConfigError):
            SampledFunction.parse(text)

    def test_require_variable(self, exp_decay):
        with pytest.raises(ConfigError):
            exp_decay.require_variable(Variable.TAU)

    def test_scaled(self, exp_decay):
        assert exp_decay.scaled(3.0)(0.5) == pytest.approx(3.0 * math.exp(-0.5))
        assert complex(exp_decay.scaled(3.0).image(2.0)) == pytest.approx(3.0)

    def test_tabulated_interpolation(self):
        grid = np.linspace(0.0, 2.0, 21)
        f = SampledFunction.tabulated(grid, grid ** 2, Interpolation.LINEAR)
        assert f(0.55) == pytest.approx(0.5 * (0.25 + 0.36))
        cubic = SampledFunction.tabulated(grid, grid ** 2)
        assert cubic(0.55) == pytest.approx(0.3025, abs=1e-10)
        assert f.is_tabulated and not f.has_image

    def test_tabulated_zero_outside_grid(self):
        grid = np.linspace(1.0, 2.0, 5)
        f = SampledFunction.tabulated(grid, np.ones(5))
        with pytest.warns(HypothesisWarning):
            assert f(3.0) == 0.0

    @pytest.mark.parametrize("grid,values", [
        ([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]),
        ([0.0, 2.0, 1.0, 3.0], [1.0, 1.0, 1.0, 1.0]),
        ([0.0, 1.0, 2.0, 3.0], [1.0, math.nan, 1.0, 1.0]),
    ])
    def test_tabulated_rejects(self, grid, values):
        with pytest.raises(ConfigError):
            SampledFunction.tabulated(grid, values)

    def test_from_csv_with_header(self, tmp_path):
        path = tmp_path / "samples.csv"
        rows = "\n".join(f"{x},{math.exp(-x)}" for x in np.linspace(0.0, 4.0, 9))
        path.write_text("x,f\n" + rows + "\n")
        f = SampledFunction.from_csv(path)
        assert f.name == "samples"
        assert len(f.grid) == 9
        assert f(1.0) == pytest.approx(math.exp(-1.0))

    def test_from_csv_malformed_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n1,2\n2,oops\n3,4\n")
        with pytest.raises(ConfigError, match="malformed row"):
            SampledFunction.from_csv(path)

    def test_from_csv_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            SampledFunction.from_csv(tmp_path / "absent.csv")


class TestMellin:
    def test_analytic_images(self, exp_decay):
        assert mellin_transform(exp_decay, 2.0).value == pytest.approx(1.0)
        res = mellin_transform(exp_decay, 0.5 + 1j)
        assert res.route is Route.ANALYTIC
        assert abs(res.value - special.gamma(0.5 + 1j)) < 1e-14

    def test_quadrature_route(self, exp_decay):
        res = mellin_transform(exp_decay, 2.0 + 1j, force_quadrature=True)
        assert res.route is Route.QUADRATURE
        assert abs(res.value - special.gamma(2.0 + 1j)) < 1e-8

    @pytest.mark.parametrize("s", [0.5 + 1j, 1.0 - 2j, 3.0])
    def test_quadrature_route_samples_origin(self, exp_decay, s):
        res = mellin_transform(exp_decay, s, force_quadrature=True)
        assert np.isfinite(res.value)
        assert abs(res.value - special.gamma(s)) < 1e-7 * abs(special.gamma(s))

    def test_tabulated_route(self):
        grid = np.linspace(0.0, 40.0, 4001)
        f = SampledFunction.tabulated(grid, np.exp(-grid))
        assert mellin_transform(f, 2.0).value.real == pytest.approx(1.0, rel=1e-6)

    def test_strip_violation(self, exp_decay):
        with pytest.raises(StripError):
            mellin_transform(exp_decay, -0.5)

    def test_inverse(self, exp_decay):
        res = mellin_inverse(exp_decay.image, ContourSpec.default(0.5), 1.5)
        assert abs(res.value.real - math.exp(-1.5)) < 1e-8
        assert res.route is Route.CONTOUR
        with pytest.raises(StripError):
            mellin_inverse(exp_decay.image, ContourSpec.default(0.5), 0.0)

    def test_parseval(self, exp_decay):
        g = SampledFunction.builtin("power_exp", a=1.0, b=1.0)
        lhs, rhs = parseval_check(exp_decay, g)
        assert lhs == pytest.approx(0.25, rel=1e-12)
        assert abs(lhs - rhs) < 1e-9

    def test_norms(self, exp_decay):
        assert norm_l(exp_decay, 1.0) == pytest.approx(1.0, rel=1e-10)
        assert norm_l(exp_decay, 0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-9)
        assert norm_l(exp_decay, 1.0, p=2.0) == pytest.approx(0.5, rel=1e-10)
        with pytest.raises(StripError):
            norm_l(exp_decay, 1.0, p=0.5)


class TestForwardF:
    taus = [0.0, 0.5, 1.0, 2.0]

    def test_quadrature_matches_contour(self, exp_decay, half):
        quad = forward_F(exp_decay, half, self.taus)
        contour = forward_F_contour(exp_decay, half, self.taus)
        assert quad.route is Route.QUADRATURE and contour.route is Route.CONTOUR
        assert np.allclose(quad.values, contour.values, rtol=1e-7, atol=1e-12)

    @pytest.mark.slow
    @pytest.mark.parametrize("mu,name", [(-1.25, "exp_decay"), (0.2, "centered_power_exp")])
    def test_quadrature_matches_contour_other_orders(self, mu, name):
        f = SampledFunction.builtin(name)
        p = TransformParameters(mu=mu)
        quad = forward_F(f, p, [0.5, 1.5])
        contour = forward_F_contour(f, p, [0.5, 1.5])
        assert np.allclose(quad.values, contour.values, rtol=1e-7, atol=1e-12)

    def test_linearity(self, exp_decay, half):
        one = forward_F_contour(exp_decay, half, self.taus)
        three = forward_F_contour(exp_decay.scaled(3.0), half, self.taus)
        assert np.allclose(three.values, 3.0 * one.values, rtol=1e-12)

    def test_decay_in_tau(self, exp_decay, half):
        res = forward_F_contour(exp_decay, half, [0.0, 4.0])
        assert res.values[0] > 0.0
        assert abs(res.values[1]) < 1e-3 * res.values[0]

    def test_parseval_abscissa(self, exp_decay, half):
        assert parseval_abscissa(exp_decay, half) == pytest.approx(0.0)
        assert half.mu < parseval_abscissa(SampledFunction.builtin("centered_power_exp"), half) < 0.5

    def test_norm_constant(self, half):
        values = [norm_constant(half, nu) for nu in (0.25, 0.4, 0.45)]
        assert all(math.isfinite(v) and v > 0.0 for v in values)
        assert values[0] < values[1] < values[2]
        with pytest.raises(StripError):
            norm_constant(half, 0.5)

    def test_bound(self, exp_decay, half):
        F = forward_F_contour(exp_decay, half, np.linspace(0.0, 3.0, 7))
        check = bound_check_F(exp_decay, half, 0.25, F)
        assert check.holds
        assert 0.0 < check.margin < 1.0

    def test_empty_grid(self, exp_decay, half):
        with pytest.raises(StripError):
            forward_F(exp_decay, half, [])

    def test_result_frame(self, exp_decay, half):
        frame = forward_F_contour(exp_decay, half, [0.5, 1.0]).to_frame("tau", "F")
        assert list(frame.columns) == ["tau", "F", "err"]
        assert len(frame) == 2

    def test_result_lengths(self, half):
        with pytest.raises(ValueError):
            TransformResult([1.0, 2.0], [1.0], [0.0, 0.0], half, Route.DIRECT)


class TestForwardG:
    xs = [0.5, 1.0, 4.0]

    def test_image_matches_quadrature(self, gauss_even, half):
        image = forward_G(gauss_even, half, self.xs)
        quad = forward_G_quadrature(gauss_even, half, self.xs)
        assert np.allclose(image.values, quad.values, rtol=1e-7)
        assert np.all(image.per_point_err < 1e-8)

    def test_linearity(self, gauss_even, half):
        one = forward_G(gauss_even, half, self.xs)
        two = forward_G(gauss_even.scaled(2.0), half, self.xs)
        assert np.allclose(two.values, 2.0 * one.values, rtol=1e-10)

    def test_zero_input(self, half):
        zero = SampledFunction.builtin("gauss_even_tau").scaled(0.0)
        assert np.all(forward_G(zero, half, self.xs).values == 0.0)

    def test_bound(self, gauss_even, half):
        G = forward_G(gauss_even, half, self.xs)
        assert bound_check_G(gauss_even, half, 0.25, G).holds

    def test_shared_image_for_derivatives(self, gauss_even, half):
        image = TauImage(gauss_even, half)
        h = 1e-4
        values, _ = image.evaluate([1.0 - h, 1.0 + h])
        derivative, _ = image.evaluate(1.0, order=1)
        assert relative_error(derivative[0], (values[1] - values[0]) / (2 * h)) < 1e-6

    def test_requires_tau_function(self, exp_decay, half):
        with pytest.raises(ConfigError):
            forward_G(exp_decay, half, self.xs)

    def test_large_x_behavior(self, gauss_even, half):
        # G(x) sqrt(x) -> sqrt(pi) int g(tau) / cosh(pi tau) d tau
        x = 1e6
        value = forward_G(gauss_even, half, [x]).values[0]
        limit = math.sqrt(math.pi) * balance(gauss_even).measured
        assert relative_error(value * math.sqrt(x), limit) < 1e-2

    @pytest.mark.slow
    @pytest.mark.parametrize("s", [0.3, 0.7])
    def test_mellin_image_identity(self, gauss_even, half, s):
        lhs, rhs = mellin_image_identity(gauss_even, half, s)
        assert relative_error(lhs, rhs) < 1e-6

    def test_mellin_image_identity_range(self, gauss_even, half):
        with pytest.raises(StripError):
            mellin_image_identity(gauss_even, half, 0.5)


class TestHypotheses:
    def test_mellin_half(self, centered, exp_decay):
        assert mellin_half(centered).satisfied
        check = mellin_half(exp_decay)
        assert not check.satisfied
        assert check.measured == pytest.approx(math.sqrt(math.pi))

    def test_balance(self, balanced, gauss_even):
        assert balance(balanced).satisfied
        check = balance(gauss_even)
        assert not check.satisfied
        assert check.measured > 0.0
