# tests/test_kernel.py

import itertools
import math

import pytest
from pydantic import ValidationError

from src.kernel.ode import gamma_cosine_pair_check, ode_residual, ode_terms, phi_derivatives
from src.kernel.phi import (
    CosineReading,
    canonical_method,
    default_contour,
    kernel_bound,
    phi,
    phi_closed_form_half,
    phi_direct,
    phi_fourier_cosine,
    phi_mellin_barnes,
    phi_origin_limit,
)
from src.models import ContourSpec, KernelMethod, TransformParameters
from src.utils.errors import DomainError, ParameterError
from tests.conftest import mp_kernel, relative_error


def test_direct_against_mpmath():
    for x, tau, mu in [(1.0, 1.0, -0.5), (0.25, 2.0, 0.2), (4.0, 0.5, -1.5)]:
        value = phi_direct(x, tau, TransformParameters(mu=mu)).value
        assert relative_error(value, mp_kernel(x, tau, mu)) < 1e-10


def test_direct_and_contour_at_reference_point(half):
    a = phi_direct(1.0, 1.0, half)
    b = phi_mellin_barnes(1.0, 1.0, half)
    assert a.method is KernelMethod.DIRECT
    assert b.method is KernelMethod.MELLIN_BARNES
    assert relative_error(b.value, a.value) < 1e-8
    assert b.err_estimate < 1e-8 * a.value


def test_fourier_cosine_at_reference_point(half):
    a = phi_direct(1.0, 1.0, half).value
    assert relative_error(phi_fourier_cosine(1.0, 1.0, half).value, a) < 1e-6


def test_fourier_cosine_at_zero_index():
    p = TransformParameters(mu=-0.3)
    assert relative_error(phi_fourier_cosine(2.0, 0.0, p).value, phi_direct(2.0, 0.0, p).value) < 1e-6


@pytest.mark.slow
def test_triple_agreement():
    worst = 0.0
    for x, tau, mu in itertools.product([0.25, 1.0, 4.0], [0.5, 1.0, 2.0], [-1.5, -0.5, 0.2]):
        p = TransformParameters(mu=mu)
        values = [phi_direct(x, tau, p).value, phi_mellin_barnes(x, tau, p).value,
                  phi_fourier_cosine(x, tau, p).value]
        for a, b in itertools.combinations(values, 2):
            worst = max(worst, relative_error(a, b))
    assert worst <= 1e-6


@pytest.mark.parametrize("x", [0.25, 1.0, 4.0, 30.0])
@pytest.mark.parametrize("tau", [0.5, 2.0])
def test_closed_form_at_half(x, tau, half):
    assert relative_error(phi_closed_form_half(x, tau), phi_direct(x, tau, half).value) < 1e-10
    assert phi(x, tau, half, KernelMethod.CLOSED_FORM).value == pytest.approx(phi_closed_form_half(x, tau))


@pytest.mark.parametrize("x", [30.0, 1000.0, 1e5])
def test_direct_at_zero_index_far_out(x, half):
    # degree 0 sits on the degenerate case of the large-argument series
    expected = math.sqrt(math.pi) * (math.sqrt(1.0 + x) - 1.0) / math.sqrt(x * (1.0 + x))
    assert relative_error(phi_direct(x, 0.0, half).value, expected) < 1e-12
    assert relative_error(phi_closed_form_half(x, 0.0), expected) < 1e-12


def test_closed_form_needs_half():
    with pytest.raises(ParameterError):
        phi(1.0, 1.0, TransformParameters(mu=-0.3), KernelMethod.CLOSED_FORM)


def test_kernel_is_positive_and_even():
    p = TransformParameters(mu=0.2)
    for x in (0.25, 1.0, 4.0):
        direct = phi_direct(x, 1.3, p).value
        assert direct > 0.0
        assert phi_direct(x, -1.3, p).value == pytest.approx(direct, rel=1e-14)
        mb_plus = phi_mellin_barnes(x, 1.3, p).value
        mb_minus = phi_mellin_barnes(x, -1.3, p).value
        assert abs(mb_plus - mb_minus) <= 1e-10 * abs(mb_plus)


def test_contour_shift_invariance():
    p = TransformParameters(mu=-0.3)
    a = phi_mellin_barnes(2.0, 0.5, p, ContourSpec.default(0.1, extra_height=0.5)).value
    b = phi_mellin_barnes(2.0, 0.5, p, ContourSpec.default(0.3, extra_height=0.5)).value
    assert relative_error(a, b) < 1e-8


def test_contour_outside_strip():
    p = TransformParameters(mu=-0.3)
    with pytest.raises(ParameterError):
        phi_mellin_barnes(2.0, 0.5, p, ContourSpec.default(0.6))


def test_default_contour_inside_strip():
    for mu in (-1.5, -0.5, 0.2, 0.45):
        p = TransformParameters(mu=mu)
        for x in (0.1, 10.0):
            assert default_contour(p, x).inside(mu, 0.5)


def test_canonical_route():
    assert canonical_method(1.0) is KernelMethod.DIRECT
    assert canonical_method(100.0) is KernelMethod.MELLIN_BARNES
    p = TransformParameters(mu=-0.5)
    assert phi(1.0, 1.0, p).method is KernelMethod.DIRECT
    assert relative_error(phi(100.0, 1.0, p).value, phi_closed_form_half(100.0, 1.0)) < 1e-8


def test_invalid_order():
    with pytest.raises(ValidationError):
        TransformParameters(mu=0.6)


def test_nonpositive_x(half):
    with pytest.raises(DomainError):
        phi_direct(0.0, 1.0, half)
    with pytest.raises(DomainError):
        phi_derivatives(-1.0, 1.0, half, 1)


@pytest.mark.parametrize("tau", [0.0, 1.0, 2.5])
def test_origin_limit_at_half(tau, half):
    expected = math.sqrt(math.pi) * (0.5 + 2.0 * tau * tau) / math.cosh(math.pi * tau)
    assert relative_error(phi_origin_limit(tau, half), expected) < 1e-12


@pytest.mark.parametrize("mu", [-1.25, -0.5, 0.2])
@pytest.mark.parametrize("tau", [0.0, 1.0])
def test_origin_limit_is_the_small_x_behavior(mu, tau):
    p = TransformParameters(mu=mu)
    x = 1e-8
    scaled = phi_direct(x, tau, p).value * x ** mu
    assert relative_error(scaled, phi_origin_limit(tau, p)) < 1e-6


def test_printed_cosine_reading_is_not_the_kernel(half):
    reference = phi_direct(1.0, 1.0, half).value
    try:
        value = phi_fourier_cosine(1.0, 1.0, half, reading=CosineReading.PRINTED).value
    except DomainError:
        return
    assert relative_error(value, reference) > 1e-3


def test_bound_and_decay():
    p = TransformParameters(mu=-0.5)
    gamma = 0.25
    scaled = []
    for x in (10.0, 100.0, 1000.0):
        value = phi(x, 1.0, p).value
        bound = kernel_bound(x, 1.0, p, gamma)
        assert abs(value) <= bound * (1.0 + 1e-8)
        scaled.append(abs(value) * x ** gamma)
    assert max(scaled) <= kernel_bound(1.0, 1.0, p, gamma)


def test_bound_abscissa_outside_strip(half):
    with pytest.raises(ParameterError):
        kernel_bound(1.0, 1.0, half, -0.75)


def test_large_x_tail_at_half():
    # Phi ~ sqrt(pi) / (cosh(pi tau) sqrt(x)) for x -> infinity at mu = -1/2
    x, tau = 1e6, 1.0
    value = phi_mellin_barnes(x, tau, TransformParameters(mu=-0.5)).value
    leading = math.sqrt(math.pi) / (math.cosh(math.pi * tau) * math.sqrt(x))
    assert relative_error(value, leading) < 1e-2


class TestDerivatives:
    def test_first_order_against_finite_difference(self, half):
        step = 1e-4
        fd = (phi_direct(1.0 + step, 1.0, half).value - phi_direct(1.0 - step, 1.0, half).value) / (2 * step)
        assert relative_error(phi_derivatives(1.0, 1.0, half, 1), fd) < 1e-5

    def test_second_order_against_finite_difference(self):
        p = TransformParameters(mu=0.2)
        step = 1e-3
        f = [phi_direct(2.0 + k * step, 0.7, p).value for k in (-1, 0, 1)]
        fd = (f[0] - 2 * f[1] + f[2]) / step ** 2
        assert relative_error(phi_derivatives(2.0, 0.7, p, 2), fd) < 1e-4

    def test_order_zero_is_the_kernel(self, half):
        assert relative_error(phi_derivatives(1.0, 1.0, half, 0), phi_direct(1.0, 1.0, half).value) < 1e-8

    def test_order_range(self, half):
        with pytest.raises(ParameterError):
            phi_derivatives(1.0, 1.0, half, 4)

    @pytest.mark.parametrize("x,tau,mu", [(1.0, 1.0, -0.5), (0.5, 2.0, 0.2), (4.0, 0.5, -1.5)])
    def test_ode_residual(self, x, tau, mu):
        p = TransformParameters(mu=mu)
        terms = ode_terms(x, tau, p)
        assert terms.relative <= 1e-6
        assert ode_residual(x, tau, p) == pytest.approx(terms.residual)


@pytest.mark.parametrize("s_real,tau", [(0.0, 0.0), (0.3, 1.0), (-0.5, 2.0)])
def test_gamma_cosine_pair(s_real, tau):
    lhs, rhs = gamma_cosine_pair_check(s_real, tau)
    assert relative_error(rhs, lhs) < 1e-9


def test_gamma_cosine_pair_domain():
    with pytest.raises(ParameterError):
        gamma_cosine_pair_check(1.0, 1.0)
