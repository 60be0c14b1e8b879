# tests/test_wedge.py

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.models import TransformParameters
from src.transforms.forward import forward_G
from src.transforms.functions import SampledFunction
from src.utils.errors import DomainError, StripError
from src.wedge.solver import (
    WedgeProblem,
    boundary_traces,
    decay,
    monotonicity,
    pde_residual,
    pde_terms,
    sinh_ratio,
    solve_wedge,
)
from tests.conftest import relative_error


@pytest.fixture
def problem(wedge_params, gauss_even):
    return WedgeProblem(beta=math.pi, p=wedge_params, g=gauss_even)


class TestSinhRatio:
    def test_edges(self):
        taus = np.array([0.0, 1.0, 50.0])
        assert np.all(sinh_ratio(0.0, 2.0, taus) == 0.0)
        assert np.all(sinh_ratio(2.0, 2.0, taus) == 1.0)

    def test_zero_index_limit(self):
        assert sinh_ratio(1.0, 4.0, 0.0) == pytest.approx(0.25)

    @pytest.mark.parametrize("tau", [0.5, 3.0, 14.0, 20.0])
    def test_against_direct_quotient(self, tau):
        expected = math.sinh(1.0 * tau) / math.sinh(2.0 * tau)
        assert relative_error(sinh_ratio(1.0, 2.0, tau), expected) < 1e-12

    def test_log_space_without_overflow(self):
        value = sinh_ratio(1.0, 2.0, 500.0)
        assert math.isfinite(value)
        assert relative_error(value, math.exp(-500.0)) < 1e-12

    def test_even_in_tau(self):
        assert sinh_ratio(1.0, 3.0, -2.0) == sinh_ratio(1.0, 3.0, 2.0)


class TestProblem:
    def test_opening_range(self, wedge_params, gauss_even):
        with pytest.raises(ValidationError):
            WedgeProblem(beta=0.0, p=wedge_params, g=gauss_even)
        with pytest.raises(ValidationError):
            WedgeProblem(beta=7.0, p=wedge_params, g=gauss_even)

    def test_order_window(self, half, gauss_even):
        with pytest.raises(ValidationError):
            WedgeProblem(beta=math.pi, p=half, g=gauss_even)

    def test_boundary_data_variable(self, wedge_params, exp_decay):
        with pytest.raises(ValidationError):
            WedgeProblem(beta=math.pi, p=wedge_params, g=exp_decay)


class TestSolution:
    def test_lower_edge_vanishes(self, problem):
        grid = solve_wedge(problem, [0.5, 1.0, 3.0], [0.0])
        assert np.all(grid.values == 0.0)

    def test_upper_edge_is_the_G_transform(self, problem):
        rs = [0.5, 1.0, 3.0]
        grid = solve_wedge(problem, rs, [problem.beta])
        expected = forward_G(problem.g, problem.p, rs).values
        assert np.allclose(grid.values[:, 0], expected, rtol=1e-8)

    def test_traces(self, problem):
        traces = boundary_traces(problem, [0.5, 1.0, 3.0])
        assert np.all(traces.lower == 0.0)
        assert traces.upper_deviation <= 1e-8

    def test_interior_between_edges(self, problem):
        grid = solve_wedge(problem, [1.0], np.linspace(0.0, problem.beta, 5))
        row = grid.values[0]
        assert np.all(row[1:-1] > 0.0)
        assert np.all(row[1:-1] < row[-1])

    def test_linear_in_data(self, problem, wedge_params, gauss_even):
        doubled = WedgeProblem(beta=problem.beta, p=wedge_params, g=gauss_even.scaled(2.0))
        one = solve_wedge(problem, [1.0, 2.0], [1.0])
        two = solve_wedge(doubled, [1.0, 2.0], [1.0])
        assert np.allclose(two.values, 2.0 * one.values, rtol=1e-10)

    def test_monotone_in_angle(self, problem):
        check = monotonicity(problem, 1.0, np.linspace(0.0, problem.beta, 7))
        assert check.satisfied

    def test_decay_in_radius(self, problem):
        check = decay(problem, 0.5 * problem.beta)
        assert check.satisfied
        assert check.measured > 0.0

    @pytest.mark.parametrize("rs,thetas", [([0.0, 1.0], [1.0]), ([1.0], [-0.1]), ([1.0], [4.0]),
                                           ([], [1.0]), ([1.0], [])])
    def test_bad_grids(self, problem, rs, thetas):
        with pytest.raises(StripError):
            solve_wedge(problem, rs, thetas)

    def test_residual_only_inside(self, problem):
        with pytest.raises(DomainError):
            pde_terms(problem, 1.0, 0.0)
        with pytest.raises(DomainError):
            pde_terms(problem, 0.0, 1.0)


@pytest.mark.slow
@pytest.mark.parametrize("r,frac", [(1.0, 0.5), (0.5, 0.25), (3.0, 0.75)])
def test_equation_residual(problem, r, frac):
    terms = pde_terms(problem, r, frac * problem.beta)
    assert terms.relative <= 1e-5
    assert pde_residual(problem, r, frac * problem.beta) == pytest.approx(terms.residual)


@pytest.mark.slow
def test_residual_grid(problem):
    grid = solve_wedge(problem, [1.0], [0.0, 0.5 * problem.beta, problem.beta], with_residuals=True)
    assert grid.residuals[0, 0] == 0.0 and grid.residuals[0, 2] == 0.0
    assert grid.residuals[0, 1] <= 1e-5


@pytest.mark.slow
def test_other_order_and_opening():
    prob = WedgeProblem(beta=1.0, p=TransformParameters(mu=0.1), g=SampledFunction.builtin("gauss_even_tau"))
    assert pde_terms(prob, 1.0, 0.5).relative <= 1e-5
