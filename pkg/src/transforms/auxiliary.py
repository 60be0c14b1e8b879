# src/transforms/auxiliary.py
"""
Auxiliary functions of the inversion theory, each available by a contour
route and, where one exists, by a closed form in generalized hypergeometric
functions:

    phi(x)     (1/2 pi i) int Gamma(s-mu)Gamma(s)Gamma(1/2-s) / (Gamma(s-1/2)Gamma(1-s)Gamma(1-s-mu)) f*(1-s) x^(-s) ds
    h(x)       (1/2 pi i) int Gamma(s+1/2)Gamma(1-s)Gamma(-s-mu) / (Gamma(s+1-mu)Gamma(-1/2-s)) x^(-s) ds
    U_mu(y)    (1/2 pi i) int Gamma(s)Gamma(s-mu)Gamma(1/2-s) / (Gamma(s-1/2)Gamma(1-s-mu)) y^(-s) ds
    S(x, tau)  (1/2 pi i) int Gamma(s+i tau)Gamma(s-i tau)Gamma(1-s)Gamma(-s-mu) / (Gamma(s+1-mu)Gamma(-1/2-s)) x^(-s) ds

plus the Lebedev form of F through the product K_{i tau}(sqrt x)[I_{i tau} + I_{-i tau}](sqrt x),
the antiderivative identity for phi and the Legendre-square form of the 3F2
appearing in the F inversion.

Closed forms come from summing residues. Terms whose coefficient carries
1/Gamma at a pole vanish identically and are skipped (mu = -1/2 removes the
second series everywhere).
"""

import logging
import math
import warnings
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from src.models import ContourSpec, QuadControl, TransformParameters
from src.quadrature.contour import MellinBarnesPlan
from src.specfun.bessel import bessel_i_complex, bessel_k_imag
from src.specfun.gamma import gamma, gamma_pair, log_gamma_quotient, rgamma
from src.specfun.hypergeometric import hyp_pfq
from src.specfun.legendre import legendre_p
from src.transforms.forward import forward_F_contour
from src.transforms.functions import SampledFunction, Variable
from src.utils.errors import HypothesisWarning, ParameterError, QuadratureError, StripError

logger = logging.getLogger(__name__)

# beyond sqrt(x) = LEBEDEV_ASYMPTOTIC the Bessel product is replaced by its expansion
LEBEDEV_ASYMPTOTIC = 40.0
# lower end of the log-variable integration for the Lebedev form
LOG_FLOOR = -40.0
# extra contour height for images whose only decay comes from f*
AUX_HEIGHT = 26.0


class AuxRoute(str, Enum):
    CONTOUR = "contour"
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


def _real(z: complex, what: str, tol: float = 1e-8) -> float:
    z = complex(z)
    if abs(z.imag) > tol * max(abs(z.real), 1e-300) and abs(z.imag) > 1e-14:
        logger.debug(f"{what}: discarding imaginary part {z.imag:.3e} of {z.real:.6g}")
    return z.real


def _inverse(image: Callable[[np.ndarray], np.ndarray], abscissa: float, x, extra_height: float = 0.0):
    plan = MellinBarnesPlan(image, ContourSpec.default(abscissa, extra_height=extra_height))
    values, errs = plan.evaluate(x)
    return values, errs


# --- phi and the Lebedev form -------------------------------------------------

class AuxiliaryPhi:
    """phi(x) of a function with a Mellin image, sampled once on a contour"""

    def __init__(self, f: SampledFunction, p: TransformParameters, spec: Optional[ContourSpec] = None):
        f.require_variable(Variable.X)
        if not f.has_image:
            raise StripError(f"phi needs an analytic Mellin image; {f.label} has none")
        lo, _ = f.strip()
        lower, upper = max(0.0, p.mu), min(0.5, 1.0 - lo)
        if not lower < upper:
            raise StripError(f"no admissible phi contour for mu={p.mu:g} and {f.label}")
        spec = spec or ContourSpec.default(0.5 * (lower + upper), extra_height=AUX_HEIGHT)
        spec.require_inside(lower, upper, "phi contour")
        self.f = f
        self.p = p

        def image(s):
            ratio = np.exp(log_gamma_quotient([s - p.mu, s, 0.5 - s], [s - 0.5, 1.0 - s, 1.0 - s - p.mu]))
            return ratio * f.image(1.0 - s)

        self.plan = MellinBarnesPlan(image, spec)

    def __call__(self, x):
        values, _ = self.plan.evaluate(x)
        out = values.real
        return float(out[0]) if np.ndim(x) == 0 else out


def phi_aux(f: SampledFunction, p: TransformParameters, spec: Optional[ContourSpec], x: float) -> float:
    return AuxiliaryPhi(f, p, spec)(x)


def lebedev_weight(tau: float, x: float) -> float:
    """K_{i tau}(sqrt x) [I_{i tau}(sqrt x) + I_{-i tau}(sqrt x)]"""
    y = math.sqrt(x)
    if y > LEBEDEV_ASYMPTOTIC:
        m = 4.0 * tau * tau
        y2 = y * y
        return (1.0 + (m + 1.0) / (8.0 * y2) + 3.0 * (m + 1.0) * (m + 9.0) / (128.0 * y2 * y2)) / y
    k = bessel_k_imag(tau, y)
    i_sum = 2.0 * bessel_i_complex(complex(0.0, tau), y).real
    return k * i_sum


def lebedev_form(phi_fn: Callable[[float], float], tau: float, ctl: Optional[QuadControl] = None) -> float:
    """sqrt(pi)/cosh(pi tau) int_0^inf K_{i tau}(sqrt x)[I_{i tau} + I_{-i tau}](sqrt x) phi(x) dx

    The range below x = 1600 is integrated in v = log x (the Bessel product
    oscillates in log x near 0), the rest with the asymptotic product.
    """
    ctl = ctl or QuadControl(epsabs=1e-13, epsrel=1e-10)
    split = LEBEDEV_ASYMPTOTIC ** 2

    def in_log(v: float) -> float:
        x = math.exp(v)
        return lebedev_weight(tau, x) * phi_fn(x) * x

    head, head_err = integrate.quad(in_log, LOG_FLOOR, math.log(split), limit=ctl.limit,
                                    epsabs=ctl.epsabs, epsrel=ctl.epsrel)
    tail, tail_err = integrate.quad(lambda x: lebedev_weight(tau, x) * phi_fn(x), split, math.inf,
                                    limit=ctl.limit, epsabs=ctl.epsabs, epsrel=ctl.epsrel)
    if not (math.isfinite(head) and math.isfinite(tail)):
        raise QuadratureError(f"Lebedev form at tau={tau} is not finite")
    logger.debug(f"Lebedev form tau={tau:g}: head {head:.6e} (+/- {head_err:.1e}), tail {tail:.3e}")
    return math.sqrt(math.pi) / math.cosh(math.pi * tau) * (head + tail)


def antiderivative_check(f: SampledFunction, p: TransformParameters, x: float,
                         tau_cap: float = 10.0, phi_fn: Optional[AuxiliaryPhi] = None) -> Tuple[float, float]:
    """Both sides of

        int_x^inf phi(y) dy = 2/(pi^2 sqrt(pi)) int_0^inf tau sinh(2 pi tau) K_{i tau}(sqrt x)^2 (F f)(tau) d tau
    """
    if not x > 0.0:
        raise StripError(f"the antiderivative identity needs x > 0, got {x}")
    phi_fn = phi_fn or AuxiliaryPhi(f, p)
    lhs, _ = integrate.quad(phi_fn, x, math.inf, limit=200, epsabs=1e-14, epsrel=1e-11)
    y = math.sqrt(x)

    def integrand(tau: float) -> float:
        F = forward_F_contour(f, p, [tau]).values[0]
        return tau * math.sinh(2.0 * math.pi * tau) * bessel_k_imag(tau, y) ** 2 * F

    rhs, _ = integrate.quad(integrand, 0.0, tau_cap, limit=200, epsabs=1e-14, epsrel=1e-10)
    edge = abs(integrand(tau_cap))
    if edge > 1e-8 * max(abs(rhs), 1e-300):
        msg = f"antiderivative identity: integrand at tau={tau_cap:g} is {edge:.2e}, not negligible"
        logger.warning(msg)
        warnings.warn(msg, HypothesisWarning, stacklevel=2)
    rhs *= 2.0 / (math.pi ** 2 * math.sqrt(math.pi))
    return float(lhs), float(rhs)


# --- h -------------------------------------------------------------------------

def _require_inversion_order(p: TransformParameters) -> None:
    p.require_negative()


def h_contour_abscissa(p: TransformParameters) -> float:
    upper = min(-p.mu, 1.0)
    if not upper > 0.25:
        raise ParameterError(f"the h contour needs min(-mu, 1) > 1/4, got mu = {p.mu:g}")
    return 0.5 * (0.25 + upper)


def _h_image(mu: float):
    def image(s):
        return np.exp(log_gamma_quotient([s + 0.5, 1.0 - s, -s - mu], [s + 1.0 - mu, -0.5 - s]))
    return image


def h_closed_form(x, mu: float):
    """Two-series form of h; vectorized over x"""
    xs = np.asarray(x, dtype=float)
    first = 3.0 * gamma(-1.0 - mu) / (8.0 * gamma(2.0 - mu)) / xs
    out = first * hyp_pfq([1.5, 2.5], [2.0 + mu, 2.0 - mu], -1.0 / xs).value
    coeff = math.sqrt(math.pi) * gamma(1.0 + mu) * rgamma(1.0 - mu) * rgamma(mu - 0.5)
    if coeff != 0.0:
        series = hyp_pfq([0.5 - mu, 1.5 - mu], [-mu, 1.0 - 2.0 * mu], -1.0 / xs).value
        out = out + coeff * (4.0 * xs) ** mu * series
    return np.real(out)


def h_function(x: float, p: TransformParameters, route: AuxRoute = AuxRoute.CLOSED_FORM) -> float:
    _require_inversion_order(p)
    if not x > 0.0:
        raise StripError(f"h needs x > 0, got {x}")
    route = AuxRoute(route)
    if route is AuxRoute.CONTOUR:
        values, _ = _inverse(_h_image(p.mu), h_contour_abscissa(p), x)
        return _real(values[0], "h")
    return float(h_closed_form(x, p.mu))


# --- U_mu ------------------------------------------------------------------------

def _u_image(mu: float):
    def image(s):
        return np.exp(log_gamma_quotient([s, s - mu, 0.5 - s], [s - 0.5, 1.0 - s - mu]))
    return image


def u_mu_closed_form(y, mu: float):
    """Two 2F2 series; vectorized over y"""
    ys = np.asarray(y, dtype=float)
    out = hyp_pfq([0.5, 1.5], [1.0 + mu, 1.0 - mu], -ys).value / (2.0 * mu)
    coeff = math.sqrt(math.pi) * gamma(mu) * rgamma(mu - 0.5) * rgamma(1.0 - mu)
    if coeff != 0.0:
        series = hyp_pfq([0.5 - mu, 1.5 - mu], [1.0 - mu, 1.0 - 2.0 * mu], -ys).value
        out = out + coeff * (0.25 * ys) ** (-mu) * series
    return np.real(out)


def u_mu(y: float, p: TransformParameters, route: AuxRoute = AuxRoute.CLOSED_FORM) -> float:
    p.require_noninteger()
    if not y > 0.0:
        raise StripError(f"U_mu needs y > 0, got {y}")
    route = AuxRoute(route)
    if route is AuxRoute.CONTOUR:
        abscissa = 0.5 * (max(0.0, p.mu) + 0.5)
        values, _ = _inverse(_u_image(p.mu), abscissa, y)
        return _real(values[0], "U_mu")
    return float(u_mu_closed_form(y, p.mu))


# --- S and its integral ------------------------------------------------------------

def _tau_over_sinh(tau: float) -> float:
    # tau / sinh(pi tau), 1/pi at 0
    return 1.0 / math.pi if tau == 0.0 else tau / math.sinh(math.pi * tau)


def _second_coefficient(mu: float, tau: float) -> float:
    # sqrt(pi) |Gamma(-mu + i tau)|^2 / (Gamma(1-mu) Gamma(mu-1/2) Gamma(1/2-mu)), without Gamma(1+mu) or Gamma(mu)
    return (math.sqrt(math.pi) * gamma_pair(-mu, tau)
            * (rgamma(1.0 - mu) * rgamma(mu - 0.5) * rgamma(0.5 - mu)).real)


@lru_cache(maxsize=128)
def _s_plan(mu: float, tau: float) -> MellinBarnesPlan:
    abscissa = 0.5 * min(-mu, 1.0)

    def image(s):
        return np.exp(log_gamma_quotient([s + 1j * tau, s - 1j * tau, 1.0 - s, -s - mu],
                                         [s + 1.0 - mu, -0.5 - s]))
    return MellinBarnesPlan(image, ContourSpec.default(abscissa, extra_height=abs(tau)))


def s_closed_form(x, tau: float, mu: float):
    xs = np.asarray(x, dtype=float)
    first = 3.0 * math.sqrt(math.pi) * gamma(-1.0 - mu) / (4.0 * gamma(2.0 - mu)) * _tau_over_sinh(tau)
    out = first / xs * hyp_pfq([1.0 + 1j * tau, 1.0 - 1j * tau, 2.5], [2.0 + mu, 2.0 - mu], -1.0 / xs).value
    coeff = gamma(1.0 + mu) * _second_coefficient(mu, tau)
    if coeff != 0.0:
        series = hyp_pfq([-mu - 1j * tau, -mu + 1j * tau, 1.5 - mu], [-mu, 1.0 - 2.0 * mu], -1.0 / xs).value
        out = out + coeff * (4.0 * xs) ** mu * series
    return np.real(out)


def inversion_kernel_S(x: float, tau: float, p: TransformParameters,
                       route: AuxRoute = AuxRoute.CLOSED_FORM) -> float:
    """S(x, tau), even in tau"""
    _require_inversion_order(p)
    if not x > 0.0:
        raise StripError(f"S needs x > 0, got {x}")
    route = AuxRoute(route)
    if route is AuxRoute.CONTOUR:
        values, _ = _s_plan(p.mu, float(tau)).evaluate(x)
        return _real(values[0], "S")
    return float(s_closed_form(x, tau, p.mu))


def integrated_s_closed_form(x, tau: float, mu: float):
    """int_{1/x}^inf S(y, tau) dy / y by termwise integration of the two series"""
    xs = np.asarray(x, dtype=float)
    first = 3.0 * math.sqrt(math.pi) * gamma(-1.0 - mu) / (4.0 * gamma(2.0 - mu)) * _tau_over_sinh(tau)
    out = first * xs * hyp_pfq([1.0 + 1j * tau, 1.0 - 1j * tau, 2.5, 1.0], [2.0 + mu, 2.0 - mu, 2.0], -xs).value
    coeff = gamma(mu) * _second_coefficient(mu, tau)
    if coeff != 0.0:
        series = hyp_pfq([-mu - 1j * tau, -mu + 1j * tau, 1.5 - mu], [1.0 - mu, 1.0 - 2.0 * mu], -xs).value
        out = out - coeff * (0.25 * xs) ** (-mu) * series
    return np.real(out)


def integrated_S(x: float, tau: float, p: TransformParameters,
                 route: AuxRoute = AuxRoute.CLOSED_FORM) -> float:
    """int_{1/x}^inf S(y, tau) dy / y, closed form or quadrature of the contour S"""
    _require_inversion_order(p)
    if not x > 0.0:
        raise StripError(f"the integrated S needs x > 0, got {x}")
    route = AuxRoute(route)
    if route is AuxRoute.CLOSED_FORM:
        return float(integrated_s_closed_form(x, tau, p.mu))
    plan = _s_plan(p.mu, float(abs(tau)))

    # y = 1/t turns the range into (0, x)
    def integrand(t: float) -> float:
        return float(plan.evaluate(1.0 / t)[0][0].real) / t

    value, _ = integrate.quad(integrand, 0.0, x, limit=200, epsabs=1e-14, epsrel=1e-11)
    if not math.isfinite(value):
        raise QuadratureError(f"quadrature of S at x={x}, tau={tau} is not finite")
    return value


# --- Legendre-square identity ------------------------------------------------------

def legendre_square_identity(x: float, tau: float, p: TransformParameters) -> Tuple[float, float]:
    """Both sides of

        3F2(-mu-i tau, -mu+i tau, 1/2-mu; 1-mu, 1-2mu; -x)
            = (x/4)^mu Gamma(1-mu)^2 / (2 i tau) [(i tau + mu) P^mu_{-i tau}(z)^2 + (i tau - mu) P^mu_{i tau}(z)^2],

    z = sqrt(1+x); the right side is (x/4)^mu Gamma(1-mu)^2 [Re P^2 - mu Im P^2 / tau].
    """
    p.require_noninteger()
    if not (x > 0.0 and tau != 0.0):
        raise StripError("the Legendre-square identity needs x > 0 and tau != 0")
    lhs = hyp_pfq([-p.mu - 1j * tau, -p.mu + 1j * tau, 0.5 - p.mu], [1.0 - p.mu, 1.0 - 2.0 * p.mu], -x).value
    square = legendre_p(p.mu, complex(0.0, tau), math.sqrt(1.0 + x)) ** 2
    scale = (0.25 * x) ** p.mu * (gamma(1.0 - p.mu).real ** 2)
    rhs = scale * (square.real - p.mu * square.imag / tau)
    return _real(lhs, "3F2"), float(rhs)
