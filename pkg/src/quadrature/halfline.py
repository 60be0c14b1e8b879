# src/quadrature/halfline.py
"""
Adaptive quadrature on (0, inf) for integrands that decay at least
exponentially.

The half-line is covered by geometrically growing panels
[0, L], [L, 2L], [2L, 4L], ... with L = 1/decay_hint, each handed to
QUADPACK. Panels are added until two consecutive contributions fall below the
absolute tolerance (relative to the running total); the last contribution is
kept in the error estimate as the tail.

An endpoint singularity at 0 is declared, never detected:

    Singularity.NONE          integrand(x)
    Singularity.ALGEBRAIC     x^alpha integrand(x)
    Singularity.LOGARITHMIC   x^alpha log(x) integrand(x)

For the singular classes the callable is the regular factor; the first panel
uses QUADPACK's algebraic-logarithmic weights.
"""

import logging
import math
import warnings
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from src.models import QuadControl, QuadResult, Singularity
from src.utils.errors import QuadratureError

logger = logging.getLogger(__name__)

_WEIGHTS = {Singularity.ALGEBRAIC: "alg", Singularity.LOGARITHMIC: "alg-loga"}


def _finite(f: Callable[[float], float]) -> Callable[[float], float]:
    def guarded(x: float) -> float:
        value = f(x)
        if not np.isfinite(value):
            raise QuadratureError(f"integrand returned {value} at x = {x}")
        return value
    return guarded


def _panel(f, a: float, b: float, ctl: QuadControl, weight: Optional[str] = None, wvar=None):
    """One QUADPACK call; returns (value, err, evaluations)"""
    kwargs = dict(limit=ctl.limit, epsabs=ctl.epsabs, epsrel=ctl.epsrel, full_output=1)
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, **kwargs)
    value, err, info = out[0], out[1], out[2]
    if len(out) > 3 or caught:
        logger.debug(f"QUADPACK flagged [{a:g}, {b:g}]: {out[3] if len(out) > 3 else caught[0].message}")
        err = max(err, ctl.epsrel * abs(value))
    neval = int(info.get("neval", 1)) if isinstance(info, dict) else 1
    return value, err, max(neval, 1)


def _integrate_real(f, decay_hint: float, ctl: QuadControl, singularity: Singularity, alpha: float):
    length = 1.0 / decay_hint
    guarded = _finite(f)
    if singularity is Singularity.NONE:
        total, err, evals = _panel(guarded, 0.0, length, ctl)
    else:
        if alpha <= -1.0:
            raise QuadratureError(f"endpoint exponent {alpha} is not integrable")
        total, err, evals = _panel(guarded, 0.0, length, ctl, weight=_WEIGHTS[singularity], wvar=(alpha, 0.0))

        regular = guarded

        def full(x):
            base = x ** alpha * regular(x)
            return base * math.log(x) if singularity is Singularity.LOGARITHMIC else base
        guarded = full

    a, quiet = length, 0
    for _ in range(ctl.max_panels):
        b = 2.0 * a
        value, panel_err, n = _panel(guarded, a, b, ctl)
        total += value
        err += panel_err
        evals += n
        if abs(value) <= ctl.epsabs + ctl.epsrel * abs(total):
            quiet += 1
            if quiet == 2:
                return total, err + abs(value), evals
        else:
            quiet = 0
        a = b
    raise QuadratureError(f"half-line integral not settled after {ctl.max_panels} panels (last panel {value:.3e})")


def integrate_halfline(f: Callable[[float], complex], decay_hint: float = 1.0,
                       ctl: Optional[QuadControl] = None,
                       singularity: Singularity = Singularity.NONE, alpha: float = 0.0,
                       complex_valued: bool = False) -> QuadResult:
    """int_0^inf f(x) dx (times the declared endpoint weight)

    Args:
        f: integrand, or its regular factor when a singularity is declared
        decay_hint: rate a of the e^(-a x) decay; sets the first panel length
        ctl: tolerances and panel limits
        singularity: declared behavior at x = 0
        alpha: exponent of the algebraic/logarithmic endpoint weight
        complex_valued: integrate real and imaginary parts separately

    Returns:
        QuadResult with the value, error estimate and evaluation count
    """
    if not decay_hint > 0.0:
        raise QuadratureError(f"decay_hint must be positive, got {decay_hint}")
    ctl = ctl or QuadControl()
    if not complex_valued:
        value, err, evals = _integrate_real(lambda x: float(np.real(f(x))), decay_hint, ctl, singularity, alpha)
        return QuadResult(value=complex(value), err_estimate=float(err), evaluations=evals)
    re, re_err, n_re = _integrate_real(lambda x: float(np.real(f(x))), decay_hint, ctl, singularity, alpha)
    im, im_err, n_im = _integrate_real(lambda x: float(np.imag(f(x))), decay_hint, ctl, singularity, alpha)
    return QuadResult(value=complex(re, im), err_estimate=float(math.hypot(re_err, im_err)),
                      evaluations=n_re + n_im)


def integrate_interval(f: Callable[[float], float], a: float, b: float,
                       ctl: Optional[QuadControl] = None) -> QuadResult:
    """Finite-interval QUADPACK call with the same error conventions"""
    ctl = ctl or QuadControl()
    value, err, evals = _panel(_finite(f), a, b, ctl)
    return QuadResult(value=complex(value), err_estimate=float(err), evaluations=evals)

