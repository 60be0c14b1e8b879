# src/transforms/mellin.py
"""
Mellin transform pair, the Parseval equality and the weighted L1 norms the
boundedness estimates are stated in.

    f*(s) = int_0^inf f(x) x^(s-1) dx
    f(x)  = (1/2 pi i) int_{c - i inf}^{c + i inf} f*(s) x^(-s) ds
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np

from src.models import ContourSpec, MellinValue, QuadControl, Route, Singularity
from src.quadrature.contour import Envelope, integrate_contour
from src.quadrature.halfline import integrate_halfline, integrate_interval
from src.transforms.functions import SampledFunction, Variable
from src.utils.errors import StripError

logger = logging.getLogger(__name__)


def require_in_strip(f: SampledFunction, s_real: float) -> None:
    lo, hi = f.strip()
    if not lo < s_real < hi:
        raise StripError(f"Re s = {s_real:g} is outside the strip ({lo:g}, {hi:g}) of {f.label}")


def mellin_transform(f: SampledFunction, s: complex, ctl: Optional[QuadControl] = None,
                     force_quadrature: bool = False) -> MellinValue:
    """f*(s), analytically when the function carries an image, by quadrature otherwise"""
    f.require_variable(Variable.X)
    s = complex(s)
    require_in_strip(f, s.real)
    if f.has_image and not force_quadrature:
        value = complex(np.asarray(f.image(s)))
        return MellinValue(value=value, err_estimate=4 * np.finfo(float).eps * abs(value), route=Route.ANALYTIC)

    ctl = ctl or QuadControl(epsabs=1e-13, epsrel=1e-11)
    if f.is_tabulated:
        a, b = f.support()
        re = integrate_interval(lambda x: f(x) * (x ** (s - 1.0)).real, a, b, ctl)
        im = integrate_interval(lambda x: f(x) * (x ** (s - 1.0)).imag, a, b, ctl)
        value = complex(re.value.real, im.value.real)
        err = math.hypot(re.err_estimate, im.err_estimate)
    else:
        # x^(Re s - 1) goes into the endpoint weight, x^(i Im s) stays in the integrand
        def regular(x: float) -> complex:
            if x == 0.0:
                # the weighted rule samples the endpoint; |x^(i Im s)| = 1
                return complex(f(0.0))
            return f(x) * np.exp(1j * s.imag * math.log(x))

        res = integrate_halfline(regular, decay_hint=f.decay_rate(), ctl=ctl,
                                 singularity=Singularity.ALGEBRAIC, alpha=s.real - 1.0,
                                 complex_valued=True)
        value, err = res.value, res.err_estimate
    logger.debug(f"mellin quadrature of {f.label} at s={s}: {value} (+/- {err:.2e})")
    return MellinValue(value=value, err_estimate=float(err), route=Route.QUADRATURE)


def mellin_inverse(image: Callable[[np.ndarray], np.ndarray], spec: ContourSpec, x: float,
                   envelope: Optional[Envelope] = None) -> MellinValue:
    """(1/2 pi i) int image(s) x^(-s) ds on spec's line; the imaginary residue is added to the error"""
    if not x > 0.0:
        raise StripError(f"the inverse Mellin transform needs x > 0, got {x}")
    res = integrate_contour(lambda s: image(s) * np.exp(-s * math.log(x)), spec, envelope)
    return MellinValue(value=complex(res.value.real), err_estimate=res.err_estimate + abs(res.value.imag),
                       route=Route.CONTOUR)


def parseval_check(f: SampledFunction, g: SampledFunction, spec: Optional[ContourSpec] = None,
                   ctl: Optional[QuadControl] = None) -> Tuple[float, float]:
    """Both sides of int f g dx = (1/2 pi i) int f*(s) g*(1-s) ds"""
    f_lo, f_hi = f.strip()
    g_lo, g_hi = g.strip()
    lower, upper = max(f_lo, 1.0 - g_hi), min(f_hi, 1.0 - g_lo)
    if not lower < upper:
        raise StripError(f"{f.label} and {g.label} have no common Parseval strip")
    if spec is None:
        abscissa = 0.5 * (lower + upper) if math.isfinite(upper - lower) else (lower + 0.5 if math.isfinite(lower) else upper - 0.5)
        spec = ContourSpec.default(abscissa)
    spec.require_inside(lower, upper, "Parseval contour")

    ctl = ctl or QuadControl(epsabs=1e-15, epsrel=1e-13)
    lhs = integrate_halfline(lambda x: f(x) * g(x), decay_hint=f.decay_rate() + g.decay_rate(), ctl=ctl)
    rhs = integrate_contour(lambda s: f.image(s) * g.image(1.0 - s), spec)
    logger.info(f"Parseval {f.label} x {g.label}: {lhs.value.real:.15g} vs {rhs.value.real:.15g}")
    return float(lhs.value.real), float(rhs.value.real)


def norm_l(f: SampledFunction, nu: float, p: float = 1.0, ctl: Optional[QuadControl] = None) -> float:
    """||f||_{nu,p} = (int |f(x)|^p x^(nu p - 1) dx)^(1/p)"""
    if p < 1.0:
        raise StripError(f"norm exponent p must be >= 1, got {p}")
    ctl = ctl or QuadControl(epsabs=1e-14, epsrel=1e-10)
    alpha = nu * p - 1.0
    if f.is_tabulated:
        a, b = f.support()
        res = integrate_interval(lambda x: abs(f(x)) ** p * x ** alpha, a, b, ctl)
    else:
        res = integrate_halfline(lambda x: abs(f(x)) ** p, decay_hint=p * f.decay_rate(), ctl=ctl,
                                 singularity=Singularity.ALGEBRAIC, alpha=alpha)
    return float(res.value.real) ** (1.0 / p)
