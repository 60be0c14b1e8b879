# src/quadrature/contour.py
"""
Vertical-line quadrature for Mellin-Barnes integrals.

    (1/2 pi i) int_{c - i inf}^{c + i inf} F(s) x^(-s) ds
        = (1/2 pi) int_{-T}^{T} F(c + it) x^(-c - it) dt  + tail

The segment [-T, T] is covered by equal panels carrying 16-point
Gauss-Legendre rules. A second, 8-point rule on the same panels supplies the
discretisation estimate, and the sampled magnitude at |t| = T against the
declared envelope C e^(-a|t|)|t|^p supplies the tail estimate. Gamma
quotients decay like e^(-pi|t|/2) per net gamma factor (Stirling), so the
default T = 14 leaves the truncated part below double precision for the
kernel integrands; callers with shifted imaginary parameters (Gamma(1-s+i tau))
add those shifts to T.

MellinBarnesPlan samples F once and evaluates the integral for whole arrays
of x, optionally with the factor (-s)(-s-1)...(-s-k+1) x^(-s-k) that
differentiates k times under the integral sign.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from src.models import ContourSpec, QuadResult
from src.utils.errors import ContourError

logger = logging.getLogger(__name__)

FINE_ORDER = 16
COARSE_ORDER = 8
# relative size of the edge samples that triggers enlarging the segment
EDGE_RATIO = 1e-15
MAX_ENLARGEMENTS = 3


@dataclass(frozen=True)
class Envelope:
    """Declared decay C e^(-rate |t|) |t|^power of an integrand on the line

    A missing constant is fitted from the samples in T/2 <= |t| <= T.
    """
    rate: float = 0.5 * math.pi
    power: float = 0.0
    constant: Optional[float] = None

    def shape(self, t: np.ndarray) -> np.ndarray:
        at = np.maximum(np.abs(t), 1.0)
        return np.exp(-self.rate * at) * at ** self.power

    def tail(self, constant: float, height: float) -> float:
        """Approximate int_{|t| > T} C e^(-a|t|)|t|^p dt"""
        return 2.0 * constant * math.exp(-self.rate * height) * max(height, 1.0) ** self.power / self.rate


@lru_cache(maxsize=64)
def _rule(half_height: float, nodes: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    panels = max(nodes // FINE_ORDER, 1)
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-half_height, half_height, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    t.setflags(write=False)
    weights.setflags(write=False)
    return t, weights


def line_nodes(spec: ContourSpec, coarse: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes s = c + it and dt-weights of the composite rule for spec"""
    t, w = _rule(float(spec.half_height), int(spec.nodes), COARSE_ORDER if coarse else FINE_ORDER)
    return spec.abscissa + 1j * t, w


def _edge_and_peak(t: np.ndarray, mags: np.ndarray, height: float) -> Tuple[float, float]:
    edge_mask = np.abs(t) >= 0.95 * height
    edge = float(mags[edge_mask].max()) if edge_mask.any() else 0.0
    return edge, float(mags.max())


def _fitted_constant(t: np.ndarray, mags: np.ndarray, envelope: Envelope, height: float) -> Tuple[float, float]:
    """Envelope constants fitted on the inner and outer halves of [T/2, T]"""
    shape = envelope.shape(t)
    inner = (np.abs(t) >= 0.5 * height) & (np.abs(t) < 0.75 * height)
    outer = np.abs(t) >= 0.75 * height
    c_inner = float((mags[inner] / shape[inner]).max()) if inner.any() else 0.0
    c_outer = float((mags[outer] / shape[outer]).max()) if outer.any() else 0.0
    return c_inner, c_outer


def integrate_contour(integrand: Callable[[np.ndarray], np.ndarray], spec: ContourSpec,
                      envelope: Optional[Envelope] = None, refine: bool = True) -> QuadResult:
    """(1/2 pi i) times the integral of integrand(s) ds along Re s = spec.abscissa

    integrand must be vectorized over numpy arrays of s. The segment is
    enlarged while the edge samples are not negligible; a sampled integrand
    growing faster than the declared envelope is a ContourError.
    """
    envelope = envelope or Envelope()
    current = spec
    for attempt in range(MAX_ENLARGEMENTS + 1):
        s, w = line_nodes(current)
        sc, wc = line_nodes(current, coarse=True)
        values = np.asarray(integrand(s), dtype=complex)
        coarse_values = np.asarray(integrand(sc), dtype=complex)
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(coarse_values))):
            raise ContourError(f"non-finite integrand on Re s = {current.abscissa}")

        t = s.imag
        mags = np.abs(values)
        fine = np.sum(w * values) / (2.0 * math.pi)
        coarse = np.sum(wc * coarse_values) / (2.0 * math.pi)

        c_inner, c_outer = _fitted_constant(t, mags, envelope, current.half_height)
        if envelope.constant is not None:
            if c_outer > 10.0 * envelope.constant:
                raise ContourError(
                    f"integrand exceeds declared envelope by factor {c_outer / envelope.constant:.3g}"
                )
            constant = envelope.constant
        else:
            if c_inner > 0.0 and c_outer > 1e3 * c_inner and c_outer * envelope.shape(np.array([current.half_height]))[0] > 1e-300:
                raise ContourError("integrand decays slower than the declared envelope")
            constant = max(c_inner, c_outer)
        tail = envelope.tail(constant, current.half_height) / (2.0 * math.pi)

        edge, peak = _edge_and_peak(t, mags, current.half_height)
        if refine and peak > 0.0 and edge > EDGE_RATIO * peak and attempt < MAX_ENLARGEMENTS:
            logger.debug(f"enlarging contour: edge/peak = {edge / peak:.2e} at T = {current.half_height:g}")
            current = current.enlarged()
            continue
        err = float(abs(fine - coarse) + tail + 64 * np.finfo(float).eps * np.sum(w * mags) / (2.0 * math.pi))
        return QuadResult(value=complex(fine), err_estimate=err, evaluations=len(s) + len(sc))
    raise ContourError("contour refinement loop exhausted")  # pragma: no cover


class MellinBarnesPlan:
    """Samples of an image F(s) on a line, reused for many x

    evaluate(x, order=k) returns (1/2 pi i) int F(s) D_k(s) x^(-s-k) ds with
    D_k(s) = (-s)(-s-1)...(-s-k+1), the k-th x-derivative of the inverse
    Mellin transform of F.
    """

    def __init__(self, image: Callable[[np.ndarray], np.ndarray], spec: ContourSpec, refine: bool = True):
        current = spec
        for attempt in range(MAX_ENLARGEMENTS + 1):
            s, w = line_nodes(current)
            sc, wc = line_nodes(current, coarse=True)
            values = np.asarray(image(s), dtype=complex)
            coarse_values = np.asarray(image(sc), dtype=complex)
            if not (np.all(np.isfinite(values)) and np.all(np.isfinite(coarse_values))):
                raise ContourError(f"non-finite image on Re s = {current.abscissa}")
            mags = np.abs(values)
            edge, peak = _edge_and_peak(s.imag, mags, current.half_height)
            if refine and peak > 0.0 and edge > EDGE_RATIO * peak and attempt < MAX_ENLARGEMENTS:
                current = current.enlarged()
                continue
            break
        self.spec = current
        self.s = s
        self.sc = sc
        self._weighted = w * values / (2.0 * math.pi)
        self._weighted_coarse = wc * coarse_values / (2.0 * math.pi)
        self._abs_mass = float(np.sum(w * mags) / (2.0 * math.pi))
        self._edge = edge

    @property
    def abs_mass(self) -> float:
        """(1/2 pi) int |F(c + it)| dt, the majorant constant of |f(x)| x^c"""
        return self._abs_mass

    @staticmethod
    def _falling(s: np.ndarray, order: int) -> np.ndarray:
        out = np.ones_like(s)
        for j in range(order):
            out = out * (-s - j)
        return out

    def _sum(self, s: np.ndarray, weighted: np.ndarray, logx: np.ndarray, order: int) -> np.ndarray:
        factor = weighted * self._falling(s, order)
        out = np.empty(logx.shape, dtype=complex)
        for start in range(0, logx.size, 256):
            chunk = logx[start:start + 256]
            phase = np.exp(-np.outer(chunk, s + order))
            out[start:start + 256] = phase @ factor
        return out

    def evaluate(self, x, order: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Complex values and error estimates at x (scalar or array)"""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xs <= 0.0):
            raise ContourError("Mellin-Barnes evaluation needs x > 0")
        logx = np.log(xs)
        fine = self._sum(self.s, self._weighted, logx, order)
        coarse = self._sum(self.sc, self._weighted_coarse, logx, order)
        if not np.all(np.isfinite(fine)):
            raise ContourError("non-finite Mellin-Barnes sum")
        c = self.spec.abscissa
        scale = self._abs_mass * xs ** (-c - order) * max(1.0, (abs(c) + self.spec.half_height + order)) ** order
        err = np.abs(fine - coarse) + 64 * np.finfo(float).eps * scale
        return fine, err
