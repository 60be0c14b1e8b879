# src/quadrature/oscillatory.py
"""
Cosine transforms int_0^inf cos(tau u) f(u) du of exponentially decaying f.

f is negligible beyond the effective support L = CUTOFF / decay_rate. When
tau L is small the product is smooth enough for the plain half-line engine;
otherwise QUADPACK's Fourier-weighted rule integrates [0, L] with the
cosine as a weight (modified Clenshaw-Curtis on each subinterval), and the
neglected tail is bounded by |f(L)| / decay_rate.
"""

import logging
import math
from typing import Callable, Optional

from scipy import integrate

from src.models import QuadControl, QuadResult
from src.quadrature.halfline import integrate_halfline
from src.utils.errors import CapabilityError, QuadratureError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

CUTOFF = 40.0
# tau times support below which no cosine weight is needed
PLAIN_LIMIT = 20.0


def integrate_cosine(f: Callable[[float], float], tau: float, decay_rate: float = 1.0,
                     ctl: Optional[QuadControl] = None) -> QuadResult:
    """int_0^inf cos(tau u) f(u) du for real f decaying like e^(-decay_rate u)"""
    ctl = ctl or QuadControl()
    tau = abs(float(tau))
    cap = get_settings().tau_cap
    if tau > cap:
        raise CapabilityError(f"cosine transforms are supported up to tau = {cap:g}, got {tau:g}")
    if not decay_rate > 0.0:
        raise QuadratureError(f"decay_rate must be positive, got {decay_rate}")
    support = CUTOFF / decay_rate
    if tau * support < PLAIN_LIMIT:
        return integrate_halfline(lambda u: f(u) * math.cos(tau * u), decay_hint=decay_rate, ctl=ctl)

    value, err, info = integrate.quad(f, 0.0, support, weight="cos", wvar=tau, limit=ctl.limit,
                                      epsabs=ctl.epsabs, epsrel=ctl.epsrel, full_output=1)[:3]
    if not math.isfinite(value):
        raise QuadratureError(f"cosine transform at tau = {tau} is not finite")
    tail = abs(f(support)) / decay_rate
    logger.debug(f"cosine-weighted rule at tau={tau:g}: L={support:g}, tail bound {tail:.2e}")
    return QuadResult(value=complex(value), err_estimate=float(err + tail),
                      evaluations=max(int(info.get("neval", 1)), 1))
