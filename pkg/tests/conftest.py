# tests/conftest.py
"""Shared fixtures and arbitrary-precision oracles"""

import mpmath
import pytest

from src.models import TransformParameters
from src.transforms.functions import SampledFunction
from src.utils.settings import get_settings

mpmath.mp.dps = 30


def relative_error(actual, expected) -> float:
    scale = max(abs(expected), 1e-300)
    return abs(actual - expected) / scale


def mp_legendre(mu: float, nu: complex, z: float) -> complex:
    """P^mu_nu(z) on z > 1"""
    return complex(mpmath.legenp(mpmath.mpc(nu), mu, z, type=3))


def mp_kernel(x: float, tau: float, mu: float) -> float:
    """sqrt(pi/(1+x)) |Gamma(1-mu+i tau)|^2 |P^mu_{i tau}(sqrt(1+x))|^2"""
    z = mpmath.sqrt(1 + mpmath.mpf(x))
    p = mpmath.legenp(mpmath.mpc(0, tau), mu, z, type=3)
    g = mpmath.gamma(mpmath.mpc(1 - mu, tau))
    return float(mpmath.sqrt(mpmath.pi / (1 + mpmath.mpf(x))) * abs(g) ** 2 * abs(p) ** 2)


def mp_bessel_k(tau: float, y: float) -> float:
    return float(mpmath.re(mpmath.besselk(mpmath.mpc(0, tau), y)))


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def half():
    return TransformParameters(mu=-0.5)


@pytest.fixture
def wedge_params():
    return TransformParameters(mu=0.25)


@pytest.fixture
def exp_decay():
    return SampledFunction.builtin("exp_decay", a=1.0)


@pytest.fixture
def centered():
    return SampledFunction.builtin("centered_power_exp", a=1.0)


@pytest.fixture
def gauss_even():
    return SampledFunction.builtin("gauss_even_tau", a=1.0)


@pytest.fixture
def balanced():
    return SampledFunction.builtin("cosh_gauss_tau", a=1.0)
