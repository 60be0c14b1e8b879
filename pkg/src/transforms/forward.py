# src/transforms/forward.py
"""
Forward index transforms with the kernel Phi(x, tau):

    (F f)(tau) = int_0^inf Phi(x, tau) f(x) dx
    (G g)(x)   = int_0^inf Phi(x, tau) g(tau) d tau

F is computed either by x-quadrature against the canonical kernel or, for
functions with a Mellin image, through the Parseval form
(1/2 pi i) int M(s; tau) f*(1-s) ds.

G goes through its tau-image: swapping the tau-integral under the kernel's
Mellin-Barnes integral gives

    G(x) = (1/2 pi i) int W(s) x^(-s) ds,
    W(s) = R(s) int_0^inf w(tau) g(tau) Gamma(1-s+i tau) Gamma(1-s-i tau) d tau,
    R(s) = Gamma(1/2-s) Gamma(s-mu) / (Gamma(1-s) Gamma(1-s-mu)),

so that one vector-valued tau-integral per contour node serves every x and
every x-derivative. The optional weight w(tau) is how the wedge problem reuses
the same machinery.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from src.kernel.phi import default_contour, kernel_image, phi, phi_origin_limit
from src.models import (ContourSpec, HypothesisCheck, QuadControl, Route, Singularity,
                        TransformParameters, TransformResult)
from src.quadrature.contour import Envelope, MellinBarnesPlan, integrate_contour
from src.quadrature.halfline import integrate_halfline, integrate_interval
from src.specfun.gamma import gamma_pair, log_gamma_quotient
from src.transforms.functions import SampledFunction, Variable
from src.transforms.mellin import mellin_transform, norm_l
from src.utils.errors import HypothesisWarning, QuadratureError, StripError

logger = logging.getLogger(__name__)

# e^(-TAU_CUTOFF) is the relative size at which a tau-integrand is dropped
TAU_CUTOFF = 50.0
TAIL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class BoundCheck:
    """lhs <= rhs of a norm inequality, with the measured margin"""
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def margin(self) -> float:
        return (self.rhs - self.lhs) / self.rhs if self.rhs > 0.0 else -math.inf


def _as_array(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise StripError(f"{what} grid is empty")
    return arr


# --- F ---------------------------------------------------------------------

def _phi_times(f: SampledFunction, tau: float, p: TransformParameters) -> Callable[[float], float]:
    # regular factor of x^(-mu) Phi(x) f(x): the kernel behaves like x^(-mu) at 0
    at_origin = phi_origin_limit(tau, p)

    def integrand(x: float) -> float:
        if x == 0.0:
            return at_origin * f(0.0)
        return phi(x, tau, p).value * x ** p.mu * f(x)
    return integrand


def forward_F(f: SampledFunction, p: TransformParameters, taus: Sequence[float],
              ctl: Optional[QuadControl] = None) -> TransformResult:
    """(F f)(tau) by x-quadrature against the canonical kernel"""
    f.require_variable(Variable.X)
    taus = _as_array(taus, "tau")
    ctl = ctl or QuadControl(epsabs=1e-13, epsrel=1e-10)
    values = np.empty(taus.shape)
    errs = np.empty(taus.shape)
    for i, tau in enumerate(taus):
        # F decays like e^(-pi tau); keep the absolute tolerance relative to that scale
        local = ctl.scaled(math.exp(-math.pi * abs(tau)))
        regular = _phi_times(f, tau, p)
        if f.is_tabulated:
            a, b = f.support()
            res = integrate_interval(lambda x: regular(x) * x ** (-p.mu), a, b, local)
        else:
            res = integrate_halfline(regular, decay_hint=f.decay_rate(), ctl=local,
                                     singularity=Singularity.ALGEBRAIC, alpha=-p.mu)
        values[i] = res.value.real
        errs[i] = res.err_estimate
    logger.info(f"forward F of {f.label} at {len(taus)} tau points by quadrature (mu={p.mu:g})")
    return TransformResult(taus, values, errs, p, Route.QUADRATURE, {"function": f.label})


def parseval_abscissa(f: SampledFunction, p: TransformParameters) -> float:
    """Midpoint of the strip where both M(s) and f*(1-s) are defined"""
    lo, _ = f.strip()
    upper = min(0.5, 1.0 - lo)
    if not p.mu < upper:
        raise StripError(f"no common strip for the kernel (mu={p.mu:g}) and {f.label}")
    return 0.5 * (p.mu + upper)


def forward_F_contour(f: SampledFunction, p: TransformParameters, taus: Sequence[float],
                      spec: Optional[ContourSpec] = None) -> TransformResult:
    """(F f)(tau) = (1/2 pi i) int M(s; tau) f*(1-s) ds"""
    f.require_variable(Variable.X)
    taus = _as_array(taus, "tau")
    abscissa = spec.abscissa if spec is not None else parseval_abscissa(f, p)
    lo, _ = f.strip()
    envelope = Envelope(rate=math.pi)
    values = np.empty(taus.shape)
    errs = np.empty(taus.shape)
    for i, tau in enumerate(taus):
        line = spec or ContourSpec.default(abscissa, extra_height=abs(tau))
        line.require_inside(p.mu, min(0.5, 1.0 - lo), "Parseval contour")
        res = integrate_contour(lambda s: kernel_image(s, p.mu, abs(tau)) * f.image(1.0 - s), line, envelope)
        values[i] = res.value.real
        errs[i] = res.err_estimate + abs(res.value.imag)
    return TransformResult(taus, values, errs, p, Route.CONTOUR, {"function": f.label})


def norm_constant(p: TransformParameters, nu: float) -> float:
    """C_{mu,nu} of the estimates sup|F f| <= C ||f||_{1-nu,1} and |x^nu G g| <= C ||g||_1

    C = 2^(-2 nu) / (pi sqrt(pi)) B(1-nu, 1-nu)
        int |Gamma(3/2-s) Gamma(1/2-s) Gamma(s-mu) / Gamma(1-s-mu)| dt,   s = nu + it
    """
    if not p.mu < nu < 0.5:
        raise StripError(f"nu must lie in (mu, 1/2) = ({p.mu:g}, 0.5), got {nu}")

    def modulus(t: float) -> float:
        s = complex(nu, t)
        return float(np.exp(log_gamma_quotient([1.5 - s, 0.5 - s, s - p.mu], [1.0 - s - p.mu]).real))

    # integrand is even in t and decays like e^(-pi|t|)
    line = integrate_halfline(modulus, decay_hint=math.pi, ctl=QuadControl(epsabs=1e-14, epsrel=1e-11))
    beta = float(special.beta(1.0 - nu, 1.0 - nu))
    return 2.0 ** (-2.0 * nu) / (math.pi * math.sqrt(math.pi)) * beta * 2.0 * line.value.real


def bound_check_F(f: SampledFunction, p: TransformParameters, nu: float, F: TransformResult) -> BoundCheck:
    """sup_tau |F f| against C_{mu,nu} ||f||_{1-nu,1}"""
    rhs = norm_constant(p, nu) * norm_l(f, 1.0 - nu)
    return BoundCheck(lhs=float(np.max(np.abs(F.values))), rhs=rhs)


# --- G ---------------------------------------------------------------------

def tau_support(g: SampledFunction) -> float:
    """Upper end of the tau-range carrying g"""
    if g.is_tabulated:
        return float(g.support()[1])
    return math.sqrt(TAU_CUTOFF / g.decay_rate())


class TauImage:
    """W(s) on one contour line, reused for all x and x-derivatives

    weight(tau) multiplies g under the tau-integral (vectorized over tau).
    """

    def __init__(self, g: SampledFunction, p: TransformParameters,
                 weight: Optional[Callable[[float], float]] = None,
                 abscissa: Optional[float] = None, ctl: Optional[QuadControl] = None):
        g.require_variable(Variable.TAU)
        self.g = g
        self.p = p
        self.weight = weight
        self.ctl = ctl or QuadControl(epsabs=1e-15, epsrel=1e-12)
        self.tau_max = tau_support(g)
        if abscissa is None:
            abscissa = default_contour(p).abscissa
        spec = ContourSpec.default(abscissa, extra_height=self.tau_max)
        if not p.mu < abscissa < 1.0 or abscissa == 0.5:
            raise StripError(f"tau-image abscissa {abscissa} must lie in ({p.mu:g}, 1) away from 1/2")
        self.plan = MellinBarnesPlan(self.image, spec)
        self._check_tail()

    def _weighted(self, tau):
        out = self.g(tau)
        if self.weight is not None:
            out = out * self.weight(tau)
        return out

    def _moment(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        n = s.size

        def stacked(tau: float) -> np.ndarray:
            pair = np.exp(log_gamma_quotient([1.0 - s + 1j * tau, 1.0 - s - 1j * tau]))
            vals = self._weighted(tau) * pair
            return np.concatenate([vals.real, vals.imag])

        if self.g.is_tabulated:
            lo = float(self.g.support()[0])
        else:
            lo = 0.0
        res, err = integrate.quad_vec(stacked, lo, self.tau_max, epsabs=self.ctl.epsabs,
                                      epsrel=self.ctl.epsrel, norm="max", limit=self.ctl.limit)
        if not np.all(np.isfinite(res)):
            raise QuadratureError("non-finite tau-moment of the kernel image")
        return res[:n] + 1j * res[n:]

    def image(self, s: np.ndarray) -> np.ndarray:
        """W(s) at an array of nodes"""
        s = np.asarray(s, dtype=complex)
        ratio = np.exp(log_gamma_quotient([0.5 - s, s - self.p.mu], [1.0 - s, 1.0 - s - self.p.mu]))
        return ratio * self._moment(s)

    def _check_tail(self) -> None:
        if self.g.is_tabulated:
            return
        # size of the dropped range relative to the kept one, at x = 1 scale
        head = abs(integrate.quad(lambda t: abs(self._weighted(t)) * gamma_pair(1.0, t),
                                  0.0, self.tau_max, limit=200)[0])
        tail = abs(integrate.quad(lambda t: abs(self._weighted(t)) * gamma_pair(1.0, t),
                                  self.tau_max, 2.0 * self.tau_max, limit=200)[0])
        if head > 0.0 and tail > TAIL_TOLERANCE * head:
            msg = f"tau-tail of {self.g.label} beyond {self.tau_max:.3g} is {tail / head:.2e} of the total"
            logger.warning(msg)
            warnings.warn(msg, HypothesisWarning, stacklevel=3)

    def evaluate(self, xs, order: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Real values and errors of d^k/dx^k G at xs"""
        values, errs = self.plan.evaluate(xs, order=order)
        return values.real, errs + np.abs(values.imag)


def forward_G(g: SampledFunction, p: TransformParameters, xs: Sequence[float],
              image: Optional[TauImage] = None) -> TransformResult:
    """(G g)(x) through the tau-image"""
    xs = _as_array(xs, "x")
    image = image or TauImage(g, p)
    values, errs = image.evaluate(xs)
    logger.info(f"forward G of {g.label} at {len(xs)} x points (mu={p.mu:g})")
    return TransformResult(xs, values, errs, p, Route.CONTOUR, {"function": g.label})


def forward_G_quadrature(g: SampledFunction, p: TransformParameters, xs: Sequence[float],
                         ctl: Optional[QuadControl] = None) -> TransformResult:
    """(G g)(x) by tau-quadrature against the canonical kernel, one x at a time"""
    g.require_variable(Variable.TAU)
    xs = _as_array(xs, "x")
    ctl = ctl or QuadControl(epsabs=1e-13, epsrel=1e-10)
    tau_max = tau_support(g)
    values = np.empty(xs.shape)
    errs = np.empty(xs.shape)
    for i, x in enumerate(xs):
        res = integrate_interval(lambda t: phi(x, t, p).value * g(t), 0.0, tau_max, ctl)
        values[i] = res.value.real
        errs[i] = res.err_estimate
    return TransformResult(xs, values, errs, p, Route.QUADRATURE, {"function": g.label})


def bound_check_G(g: SampledFunction, p: TransformParameters, nu: float, G: TransformResult) -> BoundCheck:
    """max_x |x^nu G g(x)| on the sampled grid against C_{mu,nu} ||g||_1"""
    rhs = norm_constant(p, nu) * norm_l(g, 1.0)
    lhs = float(np.max(np.abs(G.abscissas ** nu * G.values)))
    return BoundCheck(lhs=lhs, rhs=rhs)


def mellin_image_identity(g: SampledFunction, p: TransformParameters, s: float,
                          image: Optional[TauImage] = None,
                          ctl: Optional[QuadControl] = None) -> Tuple[float, float]:
    """Both sides of

        Gamma(s) Gamma(s-mu) / (Gamma(s-1/2) Gamma(1-s-mu)) (G g)*(1-s)
            = int_0^inf Gamma(s+i tau) Gamma(s-i tau) g(tau) d tau,   0 < s < 1-mu, s != 1/2.

    (G g)*(1-s) comes from x-quadrature of G: since G(x) - c x^(-1/2) = O(1/x) with
    c = sqrt(pi) int g(tau)/cosh(pi tau) d tau,

        (G g)*(1-s) = int_0^1 G x^(-s) dx + int_1^inf (G - c x^(-1/2)) x^(-s) dx + c/(s - 1/2),

    which is the convergent Mellin integral for 1/2 < s and its continuation below.
    """
    if not 0.0 < s < 1.0 - p.mu or s == 0.5:
        raise StripError(f"s must lie in (0, 1 - mu) away from 1/2, got {s}")
    ctl = ctl or QuadControl(epsabs=1e-13, epsrel=1e-10)
    left = image or TauImage(g, p)
    # to the right of the pole at 1/2 the inverse transform is G - c x^(-1/2)
    right = TauImage(g, p, weight=left.weight, abscissa=0.75)

    c = math.sqrt(math.pi) * balance(g).measured
    head = integrate_interval(lambda x: float(left.evaluate(x)[0][0]) * x ** (-s), 0.0, 1.0, ctl)
    tail = _tail_integral(lambda x: float(right.evaluate(x)[0][0]) * x ** (-s), ctl)
    g_star = head.value.real + tail + c / (s - 0.5)

    factor = special.gamma(s) * special.gamma(s - p.mu) / (special.gamma(s - 0.5) * special.gamma(1.0 - s - p.mu))
    lhs = float(factor) * g_star

    rhs = integrate_halfline(lambda t: gamma_pair(s, t) * g(t), decay_hint=1.0,
                             ctl=QuadControl(epsabs=1e-15, epsrel=1e-12)).value.real
    logger.info(f"Mellin image identity at s={s:g}: {lhs:.12g} vs {rhs:.12g}")
    return lhs, float(rhs)


def _tail_integral(f: Callable[[float], float], ctl: QuadControl) -> float:
    value, _ = integrate.quad(f, 1.0, math.inf, limit=ctl.limit, epsabs=ctl.epsabs, epsrel=ctl.epsrel)
    if not math.isfinite(value):
        raise QuadratureError("non-finite Mellin tail integral")
    return value


# --- hypothesis monitors -----------------------------------------------------

def sech(t: float) -> float:
    """1/cosh(pi t) without overflow"""
    return 2.0 * math.exp(-math.pi * abs(t)) / (1.0 + math.exp(-2.0 * math.pi * abs(t)))


def mellin_half(f: SampledFunction, tol: float = 1e-10) -> HypothesisCheck:
    """f*(1/2) = 0, the condition under which the Lebedev form and the F inversion converge"""
    value = mellin_transform(f, 0.5).value.real
    scale = norm_l(f, 0.5)
    satisfied = abs(value) <= tol * max(scale, 1e-300)
    return HypothesisCheck(name="f*(1/2)=0", satisfied=satisfied, measured=value,
                           detail=f"|f*(1/2)| / ||f||_(1/2,1) = {abs(value) / max(scale, 1e-300):.2e}")


def balance(g: SampledFunction, tol: float = 1e-10) -> HypothesisCheck:
    """int g(tau)/cosh(pi tau) d tau = 0, the condition under which the G inversion converges"""
    g.require_variable(Variable.TAU)
    if g.is_tabulated:
        a, b = g.support()
        value = integrate_interval(lambda t: g(t) * sech(t), a, b).value.real
        scale = integrate_interval(lambda t: abs(g(t)) * sech(t), a, b).value.real
    else:
        ctl = QuadControl(epsabs=1e-15, epsrel=1e-12)
        value = integrate_interval(lambda t: g(t) * sech(t), 0.0, tau_support(g), ctl).value.real
        scale = integrate_interval(lambda t: abs(g(t)) * sech(t), 0.0, tau_support(g), ctl).value.real
    satisfied = abs(value) <= tol * max(scale, 1e-300)
    return HypothesisCheck(name="balanced", satisfied=satisfied, measured=value,
                           detail=f"relative imbalance {abs(value) / max(scale, 1e-300):.2e}")
