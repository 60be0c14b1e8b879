# src/kernel/phi.py
"""
The kernel Phi(x, tau) = sqrt(pi/(1+x)) |Gamma(1 - mu + i tau)|^2 |P^mu_{i tau}(sqrt(1+x))|^2
by independent routes.

direct          the Legendre product itself.
mellin_barnes   (1/2 pi i) int M(s) x^(-s) ds on mu < Re s < 1/2 with
                M(s) = Gamma(1-s+i tau) Gamma(1-s-i tau) Gamma(1/2-s) Gamma(s-mu)
                       / (Gamma(1-s) Gamma(1-s-mu)).
fourier_cosine  Gamma(3/2-mu) int_0^inf cos(tau u) c^(-1/2) (x+c^2)^(-3/4)
                P^mu_{1/2}((x+2c^2) / (2c sqrt(x+c^2))) du,  c = cosh(u/2).
closed_form     mu = -1/2 only:
                sqrt(pi)(sqrt(1+x) - cos(2 tau arsinh sqrt x)) / (cosh(pi tau) sqrt(x(1+x))).

The cosine representation is used without a phase factor and with cosh(u/2)
in the denominator of the Legendre argument; this is the reading that agrees
with the other routes. Two other readings are kept selectable for comparison:
PRINTED puts cosh(u) in the denominator (the argument then falls below 1 for
moderate u) and PROOF puts 2 cosh^2(u) in the numerator; both carry a factor
e^(i pi mu), whose imaginary part is reported through err_estimate.
"""

import cmath
import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special

from src.models import ContourSpec, KernelEvaluation, KernelMethod, QuadControl, TransformParameters
from src.quadrature.contour import MellinBarnesPlan
from src.quadrature.oscillatory import integrate_cosine
from src.specfun.gamma import gamma_pair, log_gamma_quotient
from src.specfun.legendre import legendre_p_real, legendre_pair_product
from src.utils.errors import DomainError, ParameterError

logger = logging.getLogger(__name__)

# canonical route: Legendre series while |(1 - sqrt(1+x))/2| stays below this
DIRECT_RADIUS = 0.9
# distance kept between the contour and the nearest pole
POLE_MARGIN = 0.25


class CosineReading(str, Enum):
    REDUCED = "reduced"
    PRINTED = "printed"
    PROOF = "proof"


def _check_x(x: float) -> None:
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"the kernel needs x > 0, got {x}")


def sqrt1p_minus_one(x: float) -> float:
    """sqrt(1 + x) - 1 without cancellation"""
    return x / (math.sqrt(1.0 + x) + 1.0)


def phi_direct(x: float, tau: float, p: TransformParameters) -> KernelEvaluation:
    """Legendre-product route"""
    _check_x(x)
    mu = p.mu
    pair, pair_err = legendre_pair_product(mu, tau, sqrt1p_minus_one(x))
    weight = math.sqrt(math.pi / (1.0 + x)) * gamma_pair(1.0 - mu, tau)
    value = weight * pair
    err = weight * pair_err + 4 * np.finfo(float).eps * abs(value)
    return KernelEvaluation(x=x, tau=tau, value=value, method=KernelMethod.DIRECT, err_estimate=err)


def default_contour(p: TransformParameters, x: float = 1.0, tau: float = 0.0) -> ContourSpec:
    """Line inside (mu, 1/2): near the left end for x < 1, near the right end otherwise"""
    width = 0.5 - p.mu
    margin = min(POLE_MARGIN, 0.5 * width)
    abscissa = p.mu + margin if x < 1.0 else 0.5 - margin
    return ContourSpec.default(abscissa, extra_height=abs(tau))


def kernel_image(s: np.ndarray, mu: float, tau: float) -> np.ndarray:
    """M(s) of the Mellin-Barnes representation"""
    return np.exp(log_gamma_quotient(
        [1.0 - s + 1j * tau, 1.0 - s - 1j * tau, 0.5 - s, s - mu],
        [1.0 - s, 1.0 - s - mu],
    ))


@lru_cache(maxsize=512)
def kernel_plan(mu: float, tau: float, spec: ContourSpec) -> MellinBarnesPlan:
    """Sampled M(s) on the line of spec, shared by value and derivative evaluations"""
    spec.require_inside(mu, 0.5, "kernel contour")
    return MellinBarnesPlan(lambda s: kernel_image(s, mu, tau), spec)


def phi_mellin_barnes(x: float, tau: float, p: TransformParameters,
                      spec: Optional[ContourSpec] = None) -> KernelEvaluation:
    """Mellin-Barnes route; the imaginary residue is folded into err_estimate"""
    _check_x(x)
    spec = spec or default_contour(p, x, tau)
    plan = kernel_plan(p.mu, abs(tau), spec)
    values, errs = plan.evaluate(x)
    value = complex(values[0])
    return KernelEvaluation(x=x, tau=tau, value=value.real, method=KernelMethod.MELLIN_BARNES,
                            err_estimate=float(errs[0]) + abs(value.imag))


def phi_mellin_barnes_grid(xs: np.ndarray, tau: float, p: TransformParameters,
                           spec: Optional[ContourSpec] = None, order: int = 0) -> np.ndarray:
    """Real parts of the (differentiated) Mellin-Barnes route over an x array"""
    xs = np.asarray(xs, dtype=float)
    spec = spec or default_contour(p, 1.0, tau)
    values, _ = kernel_plan(p.mu, abs(tau), spec).evaluate(xs, order=order)
    return values.real


def _reduced_argument(x: float, u: float) -> float:
    # z - 1 for z = (X + 2) / (2 sqrt(1 + X)), X = x / cosh^2(u/2)
    c = math.cosh(0.5 * u)
    big = x / (c * c)
    root = math.sqrt(1.0 + big)
    return (big / (root + 1.0)) ** 2 / (2.0 * root)


def _cosine_factor(x: float, u: float, mu: float, reading: CosineReading) -> float:
    c = math.cosh(0.5 * u)
    base = c ** -0.5 * (x + c * c) ** -0.75
    if reading is CosineReading.REDUCED:
        zm1 = _reduced_argument(x, u)
    elif reading is CosineReading.PRINTED:
        zm1 = (x + 2.0 * c * c) / (2.0 * math.cosh(u) * math.sqrt(x + c * c)) - 1.0
    else:
        ch = math.cosh(u)
        zm1 = (x + 2.0 * ch * ch) / (2.0 * c * math.sqrt(x + c * c)) - 1.0
    if zm1 == 0.0 and reading is CosineReading.REDUCED:
        # underflow far in the tail where the factor is negligible
        return 0.0
    if not zm1 > 0.0:
        raise DomainError(f"{reading.value} reading: Legendre argument {1.0 + zm1:.6g} is not above 1 at u = {u:.4g}")
    return base * float(legendre_p_real(mu, 0.5, np.array([zm1]))[0])


def phi_fourier_cosine(x: float, tau: float, p: TransformParameters,
                       reading: CosineReading = CosineReading.REDUCED,
                       ctl: Optional[QuadControl] = None) -> KernelEvaluation:
    """Fourier-cosine route"""
    _check_x(x)
    mu = p.mu
    ctl = ctl or QuadControl(epsabs=1e-15, epsrel=1e-12)
    res = integrate_cosine(lambda u: _cosine_factor(x, u, mu, reading), tau, decay_rate=1.0 - mu, ctl=ctl)
    scale = float(special.gamma(1.5 - mu))
    value = scale * res.value.real
    err = scale * res.err_estimate
    if reading is not CosineReading.REDUCED:
        phased = cmath.exp(1j * math.pi * mu) * value
        value, err = phased.real, err + abs(phased.imag)
    return KernelEvaluation(x=x, tau=tau, value=value, method=KernelMethod.FOURIER_COSINE, err_estimate=err)


def phi_closed_form_half(x: float, tau: float) -> float:
    """Elementary form of the kernel at mu = -1/2"""
    _check_x(x)
    xi = math.asinh(math.sqrt(x))
    numerator = sqrt1p_minus_one(x) + 2.0 * math.sin(tau * xi) ** 2
    return math.sqrt(math.pi) * numerator / (math.cosh(math.pi * tau) * math.sqrt(x * (1.0 + x)))


def phi_origin_limit(tau: float, p: TransformParameters) -> float:
    """lim_{x -> 0+} x^mu Phi(x, tau), the residue of M(s) at s = mu

    Equal to sqrt(pi) 4^mu |Gamma(1 - mu + i tau)|^2 / Gamma(1 - mu)^2.
    """
    mu = p.mu
    log_scale = 0.5 * math.log(math.pi) + 2.0 * mu * math.log(2.0) - 2.0 * special.gammaln(1.0 - mu)
    return math.exp(log_scale) * gamma_pair(1.0 - mu, tau)


def canonical_method(x: float) -> KernelMethod:
    """Direct route while the Legendre series argument is small, contour route beyond"""
    return KernelMethod.DIRECT if 0.5 * sqrt1p_minus_one(x) < DIRECT_RADIUS else KernelMethod.MELLIN_BARNES


def phi(x: float, tau: float, p: TransformParameters, method: Optional[KernelMethod] = None) -> KernelEvaluation:
    """Phi(x, tau) by the requested route, or the canonical one"""
    method = KernelMethod(method) if method is not None else canonical_method(x)
    if method is KernelMethod.DIRECT:
        return phi_direct(x, tau, p)
    if method is KernelMethod.MELLIN_BARNES:
        return phi_mellin_barnes(x, tau, p)
    if method is KernelMethod.FOURIER_COSINE:
        return phi_fourier_cosine(x, tau, p)
    if not math.isclose(p.mu, -0.5, abs_tol=1e-14):
        raise ParameterError(f"the closed form exists only for mu = -1/2, got {p.mu}")
    value = phi_closed_form_half(x, tau)
    return KernelEvaluation(x=x, tau=tau, value=value, method=KernelMethod.CLOSED_FORM,
                            err_estimate=8 * np.finfo(float).eps * abs(value))


def kernel_bound(x: float, tau: float, p: TransformParameters, gamma: float) -> float:
    """Majorant C x^(-gamma) of |Phi(x, tau)| with C = (1/2 pi) int |M(gamma + it)| dt"""
    _check_x(x)
    spec = ContourSpec.default(gamma, extra_height=abs(tau))
    spec.require_inside(p.mu, 0.5, "kernel bound abscissa")
    return kernel_plan(p.mu, abs(tau), spec).abs_mass * x ** (-gamma)
