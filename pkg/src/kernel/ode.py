# src/kernel/ode.py
"""
x-derivatives of the kernel, the third-order equation it satisfies

    2x^2(1+x) Phi''' + x(11x+6) Phi'' + (2(1-mu^2) + x(11+2 tau^2)) Phi' + (1+tau^2) Phi = 0,

and the gamma-pair cosine transform behind the Fourier-cosine route.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from scipy import special

from src.kernel.phi import default_contour, kernel_plan
from src.models import ContourSpec, TransformParameters
from src.quadrature.oscillatory import integrate_cosine
from src.specfun.gamma import gamma_pair
from src.utils.errors import DomainError, ParameterError

logger = logging.getLogger(__name__)


def phi_derivatives(x: float, tau: float, p: TransformParameters, order: int,
                    spec: Optional[ContourSpec] = None) -> float:
    """d^k Phi / dx^k by differentiating the Mellin-Barnes integrand, k = 0..3"""
    if order not in (0, 1, 2, 3):
        raise ParameterError(f"derivative order must be 0..3, got {order}")
    if not x > 0.0:
        raise DomainError(f"the kernel needs x > 0, got {x}")
    spec = spec or default_contour(p, x, tau)
    values, _ = kernel_plan(p.mu, abs(tau), spec).evaluate(x, order=order)
    return float(values[0].real)


@dataclass(frozen=True)
class OdeTerms:
    third: float
    second: float
    first: float
    zeroth: float

    @property
    def residual(self) -> float:
        return self.third + self.second + self.first + self.zeroth

    @property
    def scale(self) -> float:
        return max(abs(self.third), abs(self.second), abs(self.first), abs(self.zeroth))

    @property
    def relative(self) -> float:
        return abs(self.residual) / self.scale if self.scale > 0.0 else 0.0


def ode_terms(x: float, tau: float, p: TransformParameters, spec: Optional[ContourSpec] = None) -> OdeTerms:
    """The four terms of the equation, derivatives from one shared contour plan"""
    mu = p.mu
    spec = spec or default_contour(p, x, tau)
    d = [phi_derivatives(x, tau, p, k, spec) for k in range(4)]
    return OdeTerms(
        third=2.0 * x * x * (1.0 + x) * d[3],
        second=x * (11.0 * x + 6.0) * d[2],
        first=(2.0 * (1.0 - mu * mu) + x * (11.0 + 2.0 * tau * tau)) * d[1],
        zeroth=(1.0 + tau * tau) * d[0],
    )


def ode_residual(x: float, tau: float, p: TransformParameters, spec: Optional[ContourSpec] = None) -> float:
    terms = ode_terms(x, tau, p, spec)
    logger.debug(f"ode residual at x={x:g}, tau={tau:g}: {terms.residual:.3e} (scale {terms.scale:.3e})")
    return terms.residual


def gamma_cosine_pair_check(s_real: float, tau: float) -> Tuple[float, float]:
    """Gamma(1-s+i tau)Gamma(1-s-i tau) and its cosine-transform representation

    rhs = Gamma(2(1-s)) 2^(2s-1) int_0^inf cos(tau y) cosh^(-2(1-s))(y/2) dy
    """
    if not s_real < 1.0:
        raise ParameterError(f"the gamma cosine pair needs s < 1, got {s_real}")
    power = 2.0 * (1.0 - s_real)
    lhs = gamma_pair(1.0 - s_real, tau)
    res = integrate_cosine(lambda y: math.cosh(0.5 * y) ** -power, tau, decay_rate=1.0 - s_real)
    rhs = float(special.gamma(power)) * 2.0 ** (2.0 * s_real - 1.0) * res.value.real
    return lhs, rhs
