# src/specfun/gamma.py
"""
Gamma-function layer.

All routines accept Python/numpy complex arguments. Scalars return Python
numbers; arrays return arrays. scipy.special.loggamma gives the principal
branch of log Gamma, continuous off the negative real axis, which is the
branch the Stirling envelope |Gamma(a+it)| ~ sqrt(2 pi)|t|^(a-1/2) e^(-pi|t|/2)
refers to.
"""

import logging
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import special

from src.utils.errors import PoleError

logger = logging.getLogger(__name__)

Number = Union[float, complex]


def _is_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and float(z.real).is_integer()


def log_gamma(z: Number) -> complex:
    """Principal branch of log Gamma(z)"""
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"log_gamma has a pole at z = {z.real:g}")
    return complex(special.loggamma(z))


def gamma(z: Number) -> complex:
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"gamma has a pole at z = {z.real:g}")
    return complex(special.gamma(z))


def rgamma(z: Number) -> complex:
    """1/Gamma(z); exactly zero at the poles of Gamma"""
    return complex(special.rgamma(complex(z)))


def gamma_pair(a: float, tau: float) -> float:
    """Gamma(a + i tau) Gamma(a - i tau) = |Gamma(a + i tau)|^2"""
    z = complex(a, tau)
    if _is_pole(z):
        raise PoleError(f"gamma_pair has a pole at a = {a:g}, tau = 0")
    return float(np.exp(2.0 * special.loggamma(z).real))


def log_gamma_quotient(numer: Iterable[np.ndarray], denom: Sequence[np.ndarray] = ()) -> np.ndarray:
    """sum log Gamma(numer) - sum log Gamma(denom), elementwise on arrays

    Used for Mellin-Barnes integrands sampled along a vertical line where no
    argument sits on a pole.
    """
    total = None
    for arg in numer:
        term = special.loggamma(np.asarray(arg, dtype=complex))
        total = term if total is None else total + term
    for arg in denom:
        term = special.loggamma(np.asarray(arg, dtype=complex))
        total = -term if total is None else total - term
    return total
