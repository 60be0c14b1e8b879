# src/transforms/inversion.py
"""
Inversion formulas for both index transforms and the identities they rest on.

F inversion (mu < 0, mu not an integer):

    f(x) = 1/(pi sqrt(pi)) int_0^inf [ (x/4)^(-mu) Gamma(mu) |Gamma(-mu+i tau)|^2 sinh(2 pi tau)
                                        / (Gamma(1-mu) Gamma(mu-1/2) Gamma(1/2-mu))
                                        3F2(-mu-i tau, -mu+i tau, 3/2-mu; 1-mu, 1-2mu; -x)
                                      - 3 x tau cosh(pi tau) Gamma(-1-mu) / (2 Gamma(2-mu))
                                        4F3(1+i tau, 1-i tau, 5/2, 1; 2+mu, 2-mu, 2; -x) ] (F f)(tau) tau d tau

G inversion, limit form (mu < 1/2, mu not an integer):

    g(tau) = 1/(pi sqrt(pi) mu) int_0^inf [ cosh(pi tau) 3F2(3/2, -i tau, i tau; 1+mu, 1-mu; -u)
               + 4^mu Gamma(1+mu) |Gamma(-mu+i tau)|^2 tau sinh(2 pi tau) / (Gamma(1/2-mu) Gamma(mu-1/2) Gamma(1-mu))
                 u^(-mu) 3F2(3/2-mu, -mu-i tau, -mu+i tau; 1-mu, 1-2mu; -u) ] (G g)(u) du

and its regularization at fixed eps in (0, 1), which tends to the limit form
as eps -> 0. Both integrals are truncated to the sampled grids; tail monitors
report when the truncation is not negligible.
"""

import logging
import math
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.models import ContourSpec, HypothesisCheck, Route, TransformParameters, TransformResult
from src.quadrature.contour import MellinBarnesPlan
from src.specfun.bessel import bessel_k_imag
from src.specfun.gamma import gamma, gamma_pair, log_gamma_quotient, rgamma
from src.specfun.hypergeometric import hyp_pfq
from src.transforms.auxiliary import AuxRoute, integrated_S, integrated_s_closed_form, u_mu_closed_form
from src.transforms.forward import TauImage, balance, forward_F, forward_F_contour, sech, tau_support
from src.transforms.functions import SampledFunction, Variable
from src.utils.errors import HypothesisWarning, ParameterError, StripError

logger = logging.getLogger(__name__)

TAIL_RATIO = 1e-8
TAU_STEP = 0.05
FIRST_TAU_MAX = 4.0
TAU_GROWTH = 2.0
LAST_TAU_MAX = 14.0


def _warn(msg: str) -> None:
    logger.warning(msg)
    warnings.warn(msg, HypothesisWarning, stacklevel=3)


def tau_grid(tau_max: float, step: float = TAU_STEP) -> np.ndarray:
    """Uniform grid on [0, tau_max] with an odd number of points"""
    count = int(math.ceil(tau_max / step))
    count += count % 2
    return np.linspace(0.0, tau_max, count + 1)


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if not 0.0 < lo < hi or count < 5:
        raise StripError(f"log grid needs 0 < lo < hi and at least 5 points, got ({lo}, {hi}, {count})")
    return np.geomspace(lo, hi, count)


def _tail_check(integrand: np.ndarray, name: str, ends: str = "right") -> HypothesisCheck:
    scale = float(np.max(np.abs(integrand))) if integrand.size else 0.0
    edge = abs(integrand[-1]) if ends == "right" else max(abs(integrand[0]), abs(integrand[-1]))
    ratio = edge / scale if scale > 0.0 else 0.0
    return HypothesisCheck(name=name, satisfied=ratio <= TAIL_RATIO, measured=ratio,
                           detail=f"edge/peak of the integrand = {ratio:.2e}")


def _simpson(y: np.ndarray, x: np.ndarray) -> Tuple[float, float]:
    """Simpson value with the Simpson-trapezoid difference as error"""
    value = integrate.simpson(y, x=x)
    trap = integrate.trapezoid(y, x=x)
    return float(value), float(abs(value - trap))


# --- F ---------------------------------------------------------------------

def f_inversion_kernel(xs: np.ndarray, tau: float, mu: float) -> np.ndarray:
    """Bracket of the F inversion at one tau, vectorized over x"""
    xs = np.asarray(xs, dtype=float)
    out = -3.0 * xs * tau * math.cosh(math.pi * tau) * gamma(-1.0 - mu).real / (2.0 * gamma(2.0 - mu).real) \
        * hyp_pfq([1.0 + 1j * tau, 1.0 - 1j * tau, 2.5, 1.0], [2.0 + mu, 2.0 - mu, 2.0], -xs).value.real
    coeff = (gamma(mu) * rgamma(1.0 - mu) * rgamma(mu - 0.5) * rgamma(0.5 - mu)).real
    if coeff != 0.0:
        series = hyp_pfq([-mu - 1j * tau, -mu + 1j * tau, 1.5 - mu], [1.0 - mu, 1.0 - 2.0 * mu], -xs).value.real
        out = out + coeff * gamma_pair(-mu, tau) * math.sinh(2.0 * math.pi * tau) * (0.25 * xs) ** (-mu) * series
    return out


def _check_inversion_order(p: TransformParameters) -> None:
    p.require_negative()
    if not p.validity.verified_inversion:
        _warn(f"mu = {p.mu:g} lies in (-1/4, 0), outside the window where min(-mu, 1) > 1/4")


def _check_tau_grid(F: TransformResult) -> np.ndarray:
    taus = F.abscissas
    if len(taus) < 5 or np.any(np.diff(taus) <= 0.0) or taus[0] < 0.0:
        raise StripError("inversion needs an ascending tau grid on [0, inf) with at least 5 points")
    return taus


def invert_F(F: TransformResult, p: TransformParameters, xs: Sequence[float]) -> TransformResult:
    """f(x) from samples of (F f)(tau) on a grid starting at 0"""
    _check_inversion_order(p)
    taus = _check_tau_grid(F)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size == 0 or np.any(xs <= 0.0):
        raise StripError("inversion points must be positive and nonempty")

    # one row per tau, vectorized over x
    kernel = np.stack([f_inversion_kernel(xs, tau, p.mu) * tau for tau in taus])
    integrand = kernel * np.asarray(F.values, dtype=float)[:, None]
    values = np.empty(xs.shape)
    errs = np.empty(xs.shape)
    checks = []
    for j in range(len(xs)):
        value, quad_err = _simpson(integrand[:, j], taus)
        values[j] = value / (math.pi * math.sqrt(math.pi))
        errs[j] = (quad_err + float(np.sum(np.abs(kernel[:, j]) * F.per_point_err)) * (taus[1] - taus[0])) \
            / (math.pi * math.sqrt(math.pi))
        checks.append(_tail_check(integrand[:, j], "tau-tail"))
    worst = max(checks, key=lambda c: c.measured)
    if not worst.satisfied:
        _warn(f"F inversion: tau-tail not negligible at tau = {taus[-1]:g} ({worst.detail})")
    logger.info(f"inverted F on {len(taus)} tau samples at {len(xs)} points (mu={p.mu:g})")
    meta = dict(F.meta, tail_ratio=worst.measured, tau_max=float(taus[-1]))
    return TransformResult(xs, values, errs, p, Route.DIRECT, meta)


def invert_F_integrated(F: TransformResult, p: TransformParameters, xs: Sequence[float],
                        route: AuxRoute = AuxRoute.CLOSED_FORM) -> TransformResult:
    """f(x) = -(1/pi^2) int_0^inf tau sinh(2 pi tau) IS(x, tau) (F f)(tau) d tau, IS the integrated S"""
    _check_inversion_order(p)
    taus = _check_tau_grid(F)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    values = np.empty(xs.shape)
    errs = np.empty(xs.shape)
    route = AuxRoute(route)
    for j, x in enumerate(xs):
        if route is AuxRoute.CLOSED_FORM:
            inner = np.array([integrated_s_closed_form(x, tau, p.mu) for tau in taus], dtype=float)
        else:
            inner = np.array([integrated_S(x, tau, p, AuxRoute.QUADRATURE) for tau in taus])
        integrand = taus * np.sinh(2.0 * math.pi * taus) * inner * F.values
        value, err = _simpson(integrand, taus)
        values[j] = -value / math.pi ** 2
        errs[j] = err / math.pi ** 2
    return TransformResult(xs, values, errs, p, Route.QUADRATURE, dict(F.meta))


def roundtrip_F(f: SampledFunction, p: TransformParameters, xs: Sequence[float],
                tau_max: Optional[float] = None, use_contour: Optional[bool] = None) -> Tuple[TransformResult, TransformResult]:
    """invert_F(forward F f) at xs, growing the tau range until the tail is negligible

    Returns (reconstruction, F samples). The contour route is used for F when
    the function has a Mellin image.
    """
    f.require_variable(Variable.X)
    use_contour = f.has_image if use_contour is None else use_contour
    if f.has_image or not f.is_tabulated:
        if not f.satisfies("f(0)=0") or not f.satisfies("f*(1/2)=0"):
            _warn(f"{f.label} does not satisfy f(0)=0 and f*(1/2)=0; the F inversion may not converge")
    current = tau_max or FIRST_TAU_MAX
    while True:
        taus = tau_grid(current)
        F = forward_F_contour(f, p, taus) if use_contour else forward_F(f, p, taus)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", HypothesisWarning)
            result = invert_F(F, p, xs)
        tail_ok = result.meta["tail_ratio"] <= TAIL_RATIO
        if tail_ok or tau_max is not None or current >= LAST_TAU_MAX:
            for w in caught:
                warnings.warn(w.message, w.category, stacklevel=2)
            return result, F
        logger.info(f"tau-tail ratio {result.meta['tail_ratio']:.2e} at tau_max={current:g}; extending")
        current += TAU_GROWTH


# --- G ---------------------------------------------------------------------

def g_inversion_kernel(us: np.ndarray, tau: float, mu: float, epsilon: Optional[float] = None) -> np.ndarray:
    """Bracket of the G inversion times its prefactor, vectorized over u"""
    us = np.asarray(us, dtype=float)
    if epsilon is None:
        first = math.cosh(math.pi * tau) * hyp_pfq([1.5, -1j * tau, 1j * tau], [1.0 + mu, 1.0 - mu], -us).value.real
        coeff = (4.0 ** mu * gamma(1.0 + mu) * rgamma(0.5 - mu) * rgamma(mu - 0.5) * rgamma(1.0 - mu)).real
        out = first
        if coeff != 0.0:
            series = hyp_pfq([1.5 - mu, -mu - 1j * tau, -mu + 1j * tau], [1.0 - mu, 1.0 - 2.0 * mu], -us).value.real
            out = out + coeff * gamma_pair(-mu, tau) * tau * math.sinh(2.0 * math.pi * tau) * us ** (-mu) * series
        return out / (math.pi * math.sqrt(math.pi) * mu)

    eps = float(epsilon)
    a_eps = math.sqrt(math.pi) * gamma_pair(eps, tau) * rgamma(0.5 + eps).real / (2.0 * mu)
    out = a_eps * hyp_pfq([0.5, 1.5, eps - 1j * tau, eps + 1j * tau], [1.0 + mu, 1.0 - mu, 0.5 + eps],
                          -us).value.real
    b_eps = (math.pi * 4.0 ** mu * gamma(mu) * rgamma(0.5 + eps - mu) * rgamma(mu - 0.5) * rgamma(1.0 - mu)).real
    if b_eps != 0.0:
        series = hyp_pfq([0.5 - mu, 1.5 - mu, eps - mu - 1j * tau, eps - mu + 1j * tau],
                         [1.0 - mu, 1.0 - 2.0 * mu, 0.5 + eps - mu], -us).value.real
        out = out + b_eps * gamma_pair(eps - mu, tau) * us ** (-mu) * series
    return tau * math.sinh(2.0 * math.pi * tau) / math.pi ** 2.5 * out


def invert_G(G: TransformResult, p: TransformParameters, taus: Sequence[float],
             epsilon: Optional[float] = None) -> TransformResult:
    """g(tau) from samples of (G g)(u) on an ascending positive grid (log-spaced recommended)

    epsilon=None is the limit form; a value in (0, 1) gives the regularized form.
    """
    p.require_noninteger()
    if epsilon is not None and not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    us = G.abscissas
    if len(us) < 5 or np.any(us <= 0.0) or np.any(np.diff(us) <= 0.0):
        raise StripError("G inversion needs an ascending positive u grid with at least 5 points")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    logu = np.log(us)
    values = np.empty(taus.shape)
    errs = np.empty(taus.shape)
    worst = 0.0
    for i, tau in enumerate(taus):
        kernel = g_inversion_kernel(us, tau, p.mu, epsilon)
        # du = u d(log u)
        integrand = kernel * G.values * us
        values[i], quad_err = _simpson(integrand, logu)
        errs[i] = quad_err + float(integrate.trapezoid(np.abs(kernel) * G.per_point_err * us, x=logu))
        worst = max(worst, _tail_check(integrand, "u-tail", ends="both").measured)
    if worst > TAIL_RATIO:
        _warn(f"G inversion: integrand not negligible at the ends of the u grid (edge/peak {worst:.2e})")
    route = Route.LIMIT_FORM if epsilon is None else Route.EPSILON
    meta = dict(G.meta, tail_ratio=worst)
    if epsilon is not None:
        meta["epsilon"] = epsilon
    return TransformResult(taus, values, errs, p, route, meta)


def roundtrip_G(g: SampledFunction, p: TransformParameters, taus: Sequence[float],
                us: Optional[np.ndarray] = None, epsilon: Optional[float] = None) -> Tuple[TransformResult, TransformResult]:
    """invert_G(forward G g) at taus; returns (reconstruction, G samples)"""
    g.require_variable(Variable.TAU)
    if abs(g(0.0)) > 0.0:
        _warn(f"{g.label} violates g(0) = 0")
    check = balance(g)
    if not check.satisfied:
        _warn(f"{g.label} is not balanced: int g/cosh(pi tau) = {check.measured:.3e}; "
              f"G decays like x^(-1/2) and the inversion integral does not converge")
    us = us if us is not None else log_grid(1e-14, 1e6, 1601)
    image = TauImage(g, p)
    values, errs = image.evaluate(us)
    G = TransformResult(us, values, errs, p, Route.CONTOUR, {"function": g.label})
    return invert_G(G, p, taus, epsilon), G


# --- identity behind the G inversion ------------------------------------------------

def _lhs_plan(g: SampledFunction, p: TransformParameters, nu: float, image: TauImage) -> MellinBarnesPlan:
    def integrand(s):
        ratio = np.exp(log_gamma_quotient([s, s - p.mu, 0.5 - s], [s - 0.5, 1.0 - s - p.mu]))
        return ratio * image.image(1.0 - s)
    return MellinBarnesPlan(integrand, ContourSpec.default(nu, extra_height=image.tau_max))


def bessel_identity(g: SampledFunction, p: TransformParameters, spec: Optional[ContourSpec],
                    ys: Sequence[float]) -> Tuple[TransformResult, TransformResult]:
    """Both sides of

        (1/2 pi i) int Gamma(s)Gamma(s-mu)Gamma(1/2-s) / (Gamma(s-1/2)Gamma(1-s-mu)) (G g)*(1-s) y^(-s) ds
            = sqrt(pi) e^(y/2) int_0^inf K_{i tau}(y/2) g(tau) / cosh(pi tau) d tau
    """
    g.require_variable(Variable.TAU)
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    lower = max(p.mu, 0.0)
    nu = spec.abscissa if spec is not None else 0.5 * (lower + 0.5)
    if not lower < nu < 0.5:
        raise StripError(f"contour abscissa must lie in ({lower:g}, 1/2), got {nu}")
    image = TauImage(g, p)
    plan = _lhs_plan(g, p, nu, image)
    lhs_values, lhs_errs = plan.evaluate(ys)

    tau_max = tau_support(g)
    rhs_values = np.empty(ys.shape)
    rhs_errs = np.empty(ys.shape)
    for i, y in enumerate(ys):
        value, err = integrate.quad(lambda t: bessel_k_imag(t, 0.5 * y) * g(t) * sech(t), 0.0, tau_max,
                                    limit=200, epsabs=1e-15, epsrel=1e-12)
        scale = math.sqrt(math.pi) * math.exp(0.5 * y)
        rhs_values[i], rhs_errs[i] = scale * value, scale * err
    lhs = TransformResult(ys, lhs_values.real, lhs_errs + np.abs(lhs_values.imag), p, Route.CONTOUR,
                          {"function": g.label})
    rhs = TransformResult(ys, rhs_values, rhs_errs, p, Route.QUADRATURE, {"function": g.label})
    return lhs, rhs


def u_consistency(g: SampledFunction, p: TransformParameters, y: float,
                  us: Optional[np.ndarray] = None) -> float:
    """int_0^inf U_mu(y u) (G g)(u) du, Simpson in log u over the sampled range"""
    us = us if us is not None else log_grid(1e-12, 1e8, 2001)
    G, _ = TauImage(g, p).evaluate(us)
    integrand = u_mu_closed_form(y * us, p.mu) * G * us
    value, _ = _simpson(integrand, np.log(us))
    return value
