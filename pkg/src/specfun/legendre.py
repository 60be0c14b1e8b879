# src/specfun/legendre.py
"""
Associated Legendre functions of the first kind P^mu_nu(z) on z > 1.

    P^mu_nu(z) = ((z+1)/(z-1))^(mu/2) / Gamma(1-mu) 2F1(-nu, nu+1; 1-mu; (1-z)/2)

Every routine takes z - 1 rather than z so that arguments close to 1 keep
their digits. Three paths, chosen by t = z - 1:

direct      t < 1, the series in (1-z)/2 converges quickly.
pfaff       1 <= t and u = (z-1)/(z+1) <= 0.9, the Pfaff-transformed series
            ((z+1)/2)^nu 2F1(-nu, -mu-nu; 1-mu; u).
reflected   u > 0.9, the Pfaff series continued to 1 - u = 2/(z+1). When
            1 + 2 nu is an integer the continuation degenerates and real
            degrees go through the Pfaff series in scipy's Gauss function.
"""

import logging
import math
from enum import Enum
from typing import Tuple

import numpy as np
from scipy import special

from src.specfun.gamma import rgamma
from src.specfun.hypergeometric import hyp2f1
from src.utils.errors import CapabilityError, DomainError, PoleError

logger = logging.getLogger(__name__)

DIRECT_LIMIT = 1.0
REFLECT_LIMIT = 0.9


class LegendrePath(str, Enum):
    DIRECT = "direct"
    PFAFF = "pfaff"
    REFLECTED = "reflected"


def choose_path(zm1: float) -> LegendrePath:
    """Evaluation path used for z = 1 + zm1"""
    if zm1 < DIRECT_LIMIT:
        return LegendrePath.DIRECT
    if zm1 / (zm1 + 2.0) <= REFLECT_LIMIT:
        return LegendrePath.PFAFF
    return LegendrePath.REFLECTED


def _check(mu: float, zm1: float) -> None:
    if not zm1 > 0.0 or not math.isfinite(zm1):
        raise DomainError(f"Legendre P needs z > 1, got z - 1 = {zm1}")
    if mu >= 1.0 and float(mu).is_integer():
        raise PoleError(f"Gamma(1 - mu) has a pole at mu = {mu:g}")


def _order_factor(mu: float, zm1: float) -> float:
    # ((z+1)/(z-1))^(mu/2)
    return math.exp(0.5 * mu * (math.log(zm1 + 2.0) - math.log(zm1)))


def _degenerate_degree(nu: complex) -> bool:
    # 1 + 2 nu an integer
    two_nu = 2.0 * nu
    return two_nu.imag == 0.0 and float(two_nu.real).is_integer()


def _reflected_series(mu: float, nu: complex, zm1: float) -> complex:
    """2F1(-nu, -mu-nu; 1-mu; u) / Gamma(1-mu) continued to w = 1 - u"""
    a, b, c = -nu, -mu - nu, 1.0 - mu
    two_nu = 2.0 * nu
    if _degenerate_degree(nu):
        raise CapabilityError(f"degree nu = {nu} with 1 + 2 nu an integer has no reflected path")
    w = 2.0 / (zm1 + 2.0)
    # Gamma(c) cancels against the 1/Gamma(1-mu) prefactor
    first = special.gamma(1.0 + two_nu) * rgamma(c - a) * rgamma(c - b)
    second = special.gamma(-1.0 - two_nu) * rgamma(a) * rgamma(b)
    f1 = hyp2f1(a, b, -two_nu, w).value
    f2 = hyp2f1(c - a, c - b, 2.0 + two_nu, w).value
    return complex(first * f1 + np.exp((1.0 + two_nu) * math.log(w)) * second * f2)


def legendre_from_zm1(mu: float, nu: complex, zm1: float) -> Tuple[complex, float, LegendrePath]:
    """P^mu_nu(1 + zm1) with its error estimate and the path taken"""
    _check(mu, zm1)
    nu = complex(nu)
    path = choose_path(zm1)
    prefactor = _order_factor(mu, zm1)
    if path is LegendrePath.DIRECT:
        res = hyp2f1(-nu, nu + 1.0, 1.0 - mu, -0.5 * zm1)
        value = prefactor * rgamma(1.0 - mu) * res.value
        return value, prefactor * abs(rgamma(1.0 - mu)) * res.err_estimate, path

    growth = complex(np.exp(nu * math.log(0.5 * zm1 + 1.0)))
    if path is LegendrePath.PFAFF:
        res = hyp2f1(-nu, -mu - nu, 1.0 - mu, zm1 / (zm1 + 2.0))
        scale = prefactor * growth * rgamma(1.0 - mu)
        return scale * res.value, abs(scale) * res.err_estimate, path

    if _degenerate_degree(nu):
        # P_nu = P_{-1-nu}; scipy's real Gauss function carries the logarithmic case
        # and the terminating one near u = 1
        degree = nu.real if nu.real >= -0.5 else -1.0 - nu.real
        value = complex(legendre_p_real(mu, degree, np.array([zm1]))[0])
        return value, 1e-14 * abs(value), LegendrePath.PFAFF

    value = prefactor * growth * _reflected_series(mu, nu, zm1)
    return value, 1e-14 * abs(value), path


def legendre_p(mu: float, nu: complex, z: float) -> complex:
    """P^mu_nu(z) for real order mu, complex degree nu and z > 1"""
    if not z > 1.0:
        raise DomainError(f"Legendre P needs z > 1, got {z}")
    value, _, path = legendre_from_zm1(mu, nu, z - 1.0)
    logger.debug(f"P^{mu}_{nu}({z}) via {path.value}")
    return value


def legendre_p_real(mu: float, nu: float, zm1: np.ndarray) -> np.ndarray:
    """P^mu_nu(1 + zm1) for real order and degree, vectorized over zm1

    Real parameters let scipy's Gauss function do the work; this is the inner
    factor of the Fourier-cosine kernel representation.
    """
    zm1 = np.asarray(zm1, dtype=float)
    if np.any(zm1 <= 0.0):
        raise DomainError("Legendre P needs z > 1")
    if mu >= 1.0 and float(mu).is_integer():
        raise PoleError(f"Gamma(1 - mu) has a pole at mu = {mu:g}")
    prefactor = np.exp(0.5 * mu * (np.log(zm1 + 2.0) - np.log(zm1))) * special.rgamma(1.0 - mu)
    near = zm1 < DIRECT_LIMIT
    out = np.empty_like(zm1)
    out[near] = special.hyp2f1(-nu, nu + 1.0, 1.0 - mu, -0.5 * zm1[near])
    far = ~near
    u = zm1[far] / (zm1[far] + 2.0)
    out[far] = (0.5 * zm1[far] + 1.0) ** nu * special.hyp2f1(-nu, -mu - nu, 1.0 - mu, u)
    return prefactor * out


def legendre_pair_product(mu: float, tau: float, zm1: float) -> Tuple[float, float]:
    """P^mu_{i tau} P^mu_{-i tau} = |P^mu_{i tau}|^2 at z = 1 + zm1, with error"""
    value, err, _ = legendre_from_zm1(mu, complex(0.0, tau), zm1)
    return abs(value) ** 2, 2.0 * abs(value) * err


