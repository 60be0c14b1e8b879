# src/wedge/solver.py
"""
Spectral solution of the third-order boundary value problem on the wedge
{r > 0, 0 <= theta < beta}:

    2r^2(1+r) u_rrr + 2r u_rthth + r(11r+6) u_rr + u_thth + (2(1-mu^2) + 11r) u_r + u = 0,
    u(r, 0) = 0,  u(r, beta) = (G g)(r),

    u(r, theta) = int_0^inf Phi(r, tau) sinh(theta tau)/sinh(beta tau) g(tau) d tau,   0 < mu < 1/2.

Each theta is the G transform of g times the sinh ratio, so one tau-image per
theta serves every r and every r-derivative. theta-derivatives put tau^2
under the integral.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.models import HypothesisCheck, TransformParameters
from src.transforms.forward import TauImage, forward_G
from src.transforms.functions import SampledFunction, Variable
from src.utils.errors import DomainError, QuadratureError, StripError

logger = logging.getLogger(__name__)

LOG_SPACE_AT = 30.0


class WedgeProblem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    beta: float
    p: TransformParameters
    g: SampledFunction

    @field_validator("beta")
    @classmethod
    def _check_beta(cls, v: float) -> float:
        if not 0.0 < v < 2.0 * math.pi:
            raise ValueError(f"wedge opening beta must lie in (0, 2 pi), got {v}")
        return v

    @model_validator(mode="after")
    def _check_window(self) -> "WedgeProblem":
        if not self.p.validity.wedge:
            raise ValueError(f"the wedge problem needs 0 < mu < 1/2, got mu = {self.p.mu}")
        if self.g.variable is not Variable.TAU:
            raise ValueError(f"boundary data {self.g.label} must be a function of tau")
        return self


@dataclass
class WedgeSolutionGrid:
    """u on rs x thetas; values[i, j] = u(rs[i], thetas[j])"""
    rs: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    residuals: Optional[np.ndarray] = None

    def __post_init__(self):
        shape = (len(self.rs), len(self.thetas))
        if self.values.shape != shape or self.errors.shape != shape:
            raise ValueError(f"solution grid must have shape {shape}")
        if self.residuals is not None and self.residuals.shape != shape:
            raise ValueError(f"residual grid must have shape {shape}")
        if not np.all(np.isfinite(self.values)):
            raise QuadratureError("non-finite values in the wedge solution")


def sinh_ratio(theta: float, beta: float, tau):
    """sinh(theta tau)/sinh(beta tau), overflow-free; theta/beta at tau = 0"""
    tau = np.abs(np.asarray(tau, dtype=float))
    if theta == beta:
        return np.ones_like(tau)
    if theta == 0.0:
        return np.zeros_like(tau)
    out = np.full(tau.shape, theta / beta)
    small = (tau > 0.0) & (tau * beta <= LOG_SPACE_AT)
    large = tau * beta > LOG_SPACE_AT
    t = tau[small]
    out[small] = np.sinh(theta * t) / np.sinh(beta * t)
    t = tau[large]
    out[large] = np.exp((theta - beta) * t) * np.expm1(-2.0 * theta * t) / np.expm1(-2.0 * beta * t)
    return out if out.ndim else float(out)


def _ordered(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise StripError(f"{what} grid is empty")
    return arr


def theta_image(prob: WedgeProblem, theta: float, power: int = 0) -> Optional[TauImage]:
    """tau-image of tau^power sinh ratio g; None on the theta = 0 edge"""
    if theta == 0.0:
        return None
    if theta == prob.beta and power == 0:
        return TauImage(prob.g, prob.p)
    return TauImage(prob.g, prob.p, weight=lambda t: np.asarray(t) ** power * sinh_ratio(theta, prob.beta, t))


def solve_wedge(prob: WedgeProblem, rs: Sequence[float], thetas: Sequence[float],
                with_residuals: bool = False) -> WedgeSolutionGrid:
    rs = _ordered(rs, "r")
    thetas = _ordered(thetas, "theta")
    if np.any(rs <= 0.0):
        raise StripError("wedge radii must be positive")
    if np.any(thetas < 0.0) or np.any(thetas > prob.beta):
        raise StripError(f"angles must lie in [0, {prob.beta:g}]")

    values = np.zeros((len(rs), len(thetas)))
    errors = np.zeros_like(values)
    residuals = np.zeros_like(values) if with_residuals else None
    for j, theta in enumerate(thetas):
        image = theta_image(prob, theta)
        if image is None:
            continue
        values[:, j], errors[:, j] = image.evaluate(rs)
        if with_residuals and 0.0 < theta < prob.beta:
            residuals[:, j] = [pde_terms(prob, r, theta, image).relative for r in rs]
    logger.info(f"wedge solution on {len(rs)} x {len(thetas)} points (beta={prob.beta:g}, mu={prob.p.mu:g})")
    return WedgeSolutionGrid(rs, thetas, values, errors, residuals)


@dataclass(frozen=True)
class WedgeTerms:
    third: float
    mixed: float
    second: float
    angular: float
    first: float
    zeroth: float

    def as_tuple(self) -> tuple:
        return (self.third, self.mixed, self.second, self.angular, self.first, self.zeroth)

    @property
    def residual(self) -> float:
        return sum(self.as_tuple())

    @property
    def scale(self) -> float:
        return max(abs(t) for t in self.as_tuple())

    @property
    def relative(self) -> float:
        return abs(self.residual) / self.scale if self.scale > 0.0 else 0.0


def pde_terms(prob: WedgeProblem, r: float, theta: float, image: Optional[TauImage] = None) -> WedgeTerms:
    """The six terms of the polar equation at an interior point"""
    if not r > 0.0 or not 0.0 < theta < prob.beta:
        raise DomainError(f"({r}, {theta}) is not an interior point of the wedge")
    mu = prob.p.mu
    image = image or theta_image(prob, theta)
    angular = theta_image(prob, theta, power=2)
    d = [float(image.evaluate([r], order=k)[0][0]) for k in range(4)]
    a0 = float(angular.evaluate([r])[0][0])
    a1 = float(angular.evaluate([r], order=1)[0][0])
    return WedgeTerms(
        third=2.0 * r * r * (1.0 + r) * d[3],
        mixed=2.0 * r * a1,
        second=r * (11.0 * r + 6.0) * d[2],
        angular=a0,
        first=(2.0 * (1.0 - mu * mu) + 11.0 * r) * d[1],
        zeroth=d[0],
    )


def pde_residual(prob: WedgeProblem, r: float, theta: float) -> float:
    terms = pde_terms(prob, r, theta)
    logger.debug(f"wedge residual at r={r:g}, theta={theta:g}: {terms.residual:.3e} (scale {terms.scale:.3e})")
    return terms.residual


@dataclass(frozen=True)
class BoundaryTraces:
    rs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    reference: np.ndarray

    @property
    def upper_deviation(self) -> float:
        """max relative distance of u(r, beta) from (G g)(r)"""
        scale = np.maximum(np.abs(self.reference), np.finfo(float).tiny)
        return float(np.max(np.abs(self.upper - self.reference) / scale))


def boundary_traces(prob: WedgeProblem, rs: Sequence[float]) -> BoundaryTraces:
    """u(r, 0), u(r, beta) and the G transform of the boundary data"""
    grid = solve_wedge(prob, rs, [0.0, prob.beta])
    reference = forward_G(prob.g, prob.p, grid.rs).values
    return BoundaryTraces(grid.rs, grid.values[:, 0], grid.values[:, 1], reference)


def monotonicity(prob: WedgeProblem, r: float, thetas: Sequence[float]) -> HypothesisCheck:
    """u(r, .) nondecreasing in theta, expected when g >= 0 and the kernel is positive"""
    thetas = np.sort(_ordered(thetas, "theta"))
    grid = solve_wedge(prob, [r], thetas)
    row = grid.values[0]
    drops = np.diff(row)
    tol = np.max(grid.errors[0]) + 1e-12 * np.max(np.abs(row))
    worst = float(-np.min(drops)) if drops.size else 0.0
    return HypothesisCheck(name="theta-monotone", satisfied=worst <= tol, measured=max(worst, 0.0),
                           detail=f"largest decrease along theta at r={r:g}: {worst:.3e}")


def decay(prob: WedgeProblem, theta: float, rs: Sequence[float] = (10.0, 100.0, 1000.0)) -> HypothesisCheck:
    """|u(r, theta)| decreasing along the given radii"""
    grid = solve_wedge(prob, sorted(rs), [theta])
    mags = np.abs(grid.values[:, 0])
    ok = bool(np.all(np.diff(mags) < 0.0))
    return HypothesisCheck(name="decay-in-r", satisfied=ok, measured=float(mags[-1]),
                           detail=", ".join(f"|u({r:g})|={m:.3e}" for r, m in zip(grid.rs, mags)))
