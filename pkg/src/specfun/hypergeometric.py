# src/specfun/hypergeometric.py
"""
Generalized hypergeometric function pFq(a; b; x) with complex parameters and
real argument.

Routes
------
series
    Direct power series, summed in blocks of terms. Used for every x when
    p <= q and |x| is moderate, and for |x| < 0.9 when p = q + 1.
mellin_barnes
    For negative arguments x = -X, X > 0:

        pFq(a; b; -X) = [prod Gamma(b) / prod Gamma(a)]
            (1/2 pi i) int Gamma(s) prod Gamma(a - s) / prod Gamma(b - s) X^(-s) ds

    on 0 < Re s < min Re a. When some Re a is too close to zero the first m
    terms are split off, F = sum_{k<m} t_k + t_m F(a + m, 1; b + m, m + 1; x),
    which moves every upper parameter to the right of the line.

Equal upper and lower parameters cancel before a route is chosen.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from src.models import ContourSpec, SeriesControl
from src.quadrature.contour import MellinBarnesPlan
from src.specfun.gamma import log_gamma_quotient
from src.utils.errors import DomainError, ParameterError, PoleError, SeriesNonConvergenceError

logger = logging.getLogger(__name__)

SERIES_RADIUS = 0.9
# p <= q: beyond this |x| the alternating series loses too many digits
ENTIRE_SERIES_RADIUS = 2.0
BLOCK = 64
MIN_UPPER_REAL = 0.25


@dataclass(frozen=True)
class HypResult:
    value: complex
    err_estimate: float
    terms: int
    route: str


def _wrap(values: np.ndarray, errs: np.ndarray, terms: int, route: str, scalar: bool) -> "HypResult":
    if scalar:
        return HypResult(complex(values[0]), float(errs[0]), terms, route)
    return HypResult(values, errs, terms, route)


def _as_params(values: Sequence) -> Tuple[complex, ...]:
    return tuple(complex(v) for v in values)


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and float(z.real).is_integer()


def cancel_parameters(a: Sequence[complex], b: Sequence[complex], tol: float = 1e-15) -> Tuple[tuple, tuple]:
    """Remove pairs a_i == b_j"""
    upper = list(_as_params(a))
    lower = list(_as_params(b))
    for value in list(upper):
        for j, other in enumerate(lower):
            if abs(value - other) <= tol * max(1.0, abs(value)):
                upper.remove(value)
                del lower[j]
                break
    return tuple(upper), tuple(lower)


def _series(a: tuple, b: tuple, xs: np.ndarray, ctl: SeriesControl) -> Tuple[np.ndarray, np.ndarray, int]:
    """Vectorized partial sums of sum_k t_k, t_{k+1}/t_k = x prod(a + k) / (prod(b + k)(k + 1))

    Terms are built by cumulative products of the ratios so that no power of
    x or factorial is formed on its own.
    """
    xs = np.asarray(xs, dtype=float)
    a_arr = np.array(a, dtype=complex)
    b_arr = np.array(b, dtype=complex)
    n = xs.size
    total = np.zeros(n, dtype=complex)
    abs_total = np.zeros(n)
    term = np.ones(n, dtype=complex)
    done = np.zeros(n, dtype=bool)
    last_small = np.zeros(n, dtype=bool)
    tail = np.zeros(n)
    k0 = 0
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        while k0 < ctl.max_terms:
            ks = np.arange(k0, k0 + BLOCK, dtype=float)
            num = np.prod(a_arr[None, :] + ks[:, None], axis=1) if a_arr.size else np.ones(BLOCK)
            den = np.prod(b_arr[None, :] + ks[:, None], axis=1) if b_arr.size else np.ones(BLOCK)
            ratios = num / (den * (ks + 1.0))
            steps = np.cumprod(ratios[None, :] * xs[:, None], axis=1)
            terms = term[:, None] * np.concatenate((np.ones((n, 1)), steps[:, :-1]), axis=1)
            term = term * steps[:, -1]
            terms[done] = 0.0
            total += terms.sum(axis=1)
            abs_total += np.abs(terms).sum(axis=1)
            last = np.abs(terms[:, -1])
            scale = np.maximum(np.abs(total), ctl.abs_floor)
            small = last <= ctl.rel_tol * scale
            ratio_next = np.abs(ratios[-1] * xs)
            converged = small & last_small & (ratio_next < 1.0)
            fresh = converged & ~done
            if fresh.any():
                r = np.minimum(ratio_next, 0.999)
                tail = np.where(fresh, last * r / (1.0 - r), tail)
            done |= converged | (term == 0.0)
            k0 += BLOCK
            if done.all():
                break
            last_small = small
    if not done.all() or not np.all(np.isfinite(total)):
        idx = int(np.argmax(~done | ~np.isfinite(total)))
        raise SeriesNonConvergenceError(
            f"pFq series did not converge in {ctl.max_terms} terms at x = {xs[idx]:g}",
            partial_sum=total[idx], terms=k0)
    err = tail + 8 * np.finfo(float).eps * abs_total
    return total, err, k0


def _mb_height(a: tuple, b: tuple) -> float:
    net = len(a) - len(b) + 1
    shift = sum(abs(v.imag) for v in a) + sum(abs(v.imag) for v in b)
    return 4.0 + shift + 2.0 * 39.2 / (math.pi * net)


@lru_cache(maxsize=256)
def _mb_plan(a: tuple, b: tuple) -> Tuple[MellinBarnesPlan, complex]:
    abscissa = 0.5 * min(v.real for v in a)
    height = _mb_height(a, b)
    nodes = int(math.ceil(2048 * height / 14.0 / 32.0)) * 32
    spec = ContourSpec(abscissa=abscissa, half_height=height, nodes=nodes)

    def image(s):
        return np.exp(log_gamma_quotient([s] + [ai - s for ai in a], [bj - s for bj in b]))

    # prod Gamma(b) / prod Gamma(a)
    log_coeff = sum(special.loggamma(bj) for bj in b) - sum(special.loggamma(ai) for ai in a)
    logger.debug(f"building pFq Mellin-Barnes plan p={len(a)} q={len(b)} T={height:.1f}")
    return MellinBarnesPlan(image, spec), complex(np.exp(log_coeff))


def _mellin_barnes(a: tuple, b: tuple, xs: np.ndarray, ctl: SeriesControl) -> Tuple[np.ndarray, np.ndarray]:
    """pFq at xs < 0 via the Mellin-Barnes integral, splitting off terms if needed"""
    min_re = min(v.real for v in a)
    m = max(0, int(math.ceil(MIN_UPPER_REAL - min_re)))
    if m == 0:
        plan, coeff = _mb_plan(a, b)
        vals, err = plan.evaluate(-xs)
        return coeff * vals, abs(coeff) * err

    # split off the first m terms
    head = np.zeros(xs.shape, dtype=complex)
    coeff_k = 1.0 + 0.0j
    for k in range(m):
        head += coeff_k * xs ** k
        coeff_k *= np.prod([ai + k for ai in a]) / (np.prod([bj + k for bj in b]) * (k + 1))
    # c_m x^m F(a + m, 1; b + m, m + 1; x)
    shifted_a = tuple(ai + m for ai in a) + (1.0 + 0.0j,)
    shifted_b = tuple(bj + m for bj in b) + (complex(m + 1),)
    shifted_a, shifted_b = cancel_parameters(shifted_a, shifted_b)
    rest, rest_err = _mellin_barnes(shifted_a, shifted_b, xs, ctl)
    lead = coeff_k * xs ** m
    return head + lead * rest, np.abs(lead) * rest_err + 8 * np.finfo(float).eps * np.abs(head)


def hyp_pfq(a: Sequence, b: Sequence, x, ctl: Optional[SeriesControl] = None, method: str = "auto") -> HypResult:
    """pFq(a; b; x) for real x (scalar or array)

    method is "auto", "series" or "mellin_barnes". Scalar x returns Python
    complex values in the result; array x returns arrays.
    """
    ctl = ctl or SeriesControl.default()
    a, b = _as_params(a), _as_params(b)
    for bj in b:
        if _is_nonpositive_integer(bj):
            raise PoleError(f"lower parameter {bj.real:g} is a non-positive integer")
    a, b = cancel_parameters(a, b)
    p, q = len(a), len(b)

    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xs)):
        raise DomainError("pFq argument must be finite")

    terminating = any(_is_nonpositive_integer(ai) for ai in a)
    if p > q + 1 and not terminating:
        raise ParameterError(f"{p}F{q} with p > q + 1 diverges for x != 0")
    if p == q + 1 and not terminating and np.any(xs >= 1.0):
        raise DomainError("p = q + 1 series needs x < 1 on the real line")

    if not terminating and p == 0 and q == 0:
        return _wrap(np.exp(xs) + 0j, 4 * np.finfo(float).eps * np.exp(xs), 0, "elementary", scalar)
    if not terminating and p == 1 and q == 0:
        # binomial series (1 - x)^(-a)
        values = np.exp(-a[0] * np.log1p(-xs))
        return _wrap(values, 8 * np.finfo(float).eps * np.abs(values), 0, "elementary", scalar)

    if terminating or p < q:
        # no decaying Mellin-Barnes integrand when p < q
        use_series = np.ones(xs.shape, dtype=bool)
    elif method == "series":
        use_series = np.ones(xs.shape, dtype=bool)
    elif method == "mellin_barnes":
        use_series = np.zeros(xs.shape, dtype=bool)
    else:
        radius = SERIES_RADIUS if p == q + 1 else ENTIRE_SERIES_RADIUS
        use_series = (np.abs(xs) < radius) | (xs > 0.0)
    if not p:
        use_series[:] = True

    values = np.zeros(xs.shape, dtype=complex)
    errs = np.zeros(xs.shape)
    terms = 0
    if use_series.any():
        v, e, terms = _series(a, b, xs[use_series], ctl)
        values[use_series] = v
        errs[use_series] = e
    if (~use_series).any():
        if np.any(xs[~use_series] >= 0.0):
            raise DomainError("Mellin-Barnes continuation needs x < 0")
        v, e = _mellin_barnes(a, b, xs[~use_series], ctl)
        values[~use_series] = v
        errs[~use_series] = e
    route = "series" if use_series.all() else ("mellin_barnes" if not use_series.any() else "mixed")
    if not np.all(np.isfinite(values)):
        raise SeriesNonConvergenceError(f"non-finite {p}F{q} value")
    return _wrap(values, errs, terms, route, scalar)


def hyp2f1(a: complex, b: complex, c: complex, x: float, ctl: Optional[SeriesControl] = None) -> HypResult:
    """Gauss 2F1 with complex parameters for real x < 1

    |x| < 0.9 sums the series; x <= -0.9 uses the Pfaff transformation
    2F1(a, b; c; x) = (1 - x)^(-a) 2F1(a, c - b; c; x / (x - 1)), whose
    argument lies in [0.47, 1).
    """
    ctl = ctl or SeriesControl.default()
    if x >= 1.0:
        raise DomainError(f"hyp2f1 needs x < 1, got {x}")
    if x > -SERIES_RADIUS:
        return hyp_pfq([a, b], [c], x, ctl, method="series")
    w = x / (x - 1.0)
    inner = hyp_pfq([a, complex(c) - complex(b)], [c], w, ctl, method="series")
    factor = complex(np.exp(-complex(a) * math.log(1.0 - x)))
    return HypResult(factor * inner.value, abs(factor) * inner.err_estimate, inner.terms, "pfaff")
