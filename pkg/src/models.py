# src/models.py
# shared records for the special-function, quadrature and transform layers

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

from src.utils.errors import ParameterError
from src.utils.settings import get_settings


class ComplexScalar(BaseModel):
    model_config = ConfigDict(frozen=True)

    re: float
    im: float = 0.0

    @field_validator("re", "im")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("complex components must be finite")
        return v

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexScalar":
        """Build from a Python complex"""
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class SeriesControl(BaseModel):
    """Truncation control shared by every series evaluation"""
    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(5000, ge=10)
    rel_tol: float = Field(1e-13, gt=0.0, lt=1.0)
    abs_floor: float = Field(1e-300, gt=0.0)

    @classmethod
    def default(cls) -> "SeriesControl":
        s = get_settings()
        return cls(max_terms=s.series_max_terms, rel_tol=s.series_rel_tol, abs_floor=s.series_abs_floor)


class QuadControl(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsabs: float = Field(1e-14, ge=0.0)
    epsrel: float = Field(1e-12, gt=0.0, lt=1.0)
    limit: int = Field(200, ge=10)
    max_panels: int = Field(80, ge=4)

    def scaled(self, factor: float) -> "QuadControl":
        """Same control with epsabs multiplied by factor"""
        return self.model_copy(update={"epsabs": self.epsabs * factor})


class ContourSpec(BaseModel):
    """Vertical line Re s = abscissa truncated to |Im s| <= half_height"""
    model_config = ConfigDict(frozen=True)

    abscissa: float
    half_height: float = Field(14.0, gt=0.0)
    nodes: int = Field(2048, ge=64)

    @classmethod
    def default(cls, abscissa: float, extra_height: float = 0.0) -> "ContourSpec":
        s = get_settings()
        height = s.contour_half_height + abs(extra_height)
        nodes = int(math.ceil(s.contour_nodes * height / s.contour_half_height / 32.0)) * 32
        return cls(abscissa=abscissa, half_height=height, nodes=nodes)

    def inside(self, lower: float, upper: float) -> bool:
        return lower < self.abscissa < upper

    def require_inside(self, lower: float, upper: float, what: str = "contour") -> None:
        if not self.inside(lower, upper):
            raise ParameterError(
                f"{what} abscissa {self.abscissa} must lie strictly inside ({lower}, {upper})"
            )

    def enlarged(self, factor: float = 1.5) -> "ContourSpec":
        nodes = int(math.ceil(self.nodes * factor / 32.0)) * 32
        return ContourSpec(abscissa=self.abscissa, half_height=self.half_height * factor, nodes=nodes)


class Singularity(str, Enum):
    NONE = "none"
    ALGEBRAIC = "algebraic"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class QuadResult:
    value: complex
    err_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.evaluations <= 0:
            raise ValueError("evaluations must be positive")


class KernelMethod(str, Enum):
    DIRECT = "direct"
    MELLIN_BARNES = "mellin_barnes"
    FOURIER_COSINE = "fourier_cosine"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class KernelEvaluation:
    x: float
    tau: float
    value: float
    method: KernelMethod
    err_estimate: float


def is_integer(v: float, tol: float = 1e-12) -> bool:
    return abs(v - round(v)) < tol


class Validity(BaseModel):
    """Which operations admit a given order"""
    model_config = ConfigDict(frozen=True)

    forward: bool
    invert_f: bool
    invert_g: bool
    wedge: bool
    # F inversion with 1/4 < min(-mu, 1)
    verified_inversion: bool


class TransformParameters(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float

    @field_validator("mu")
    @classmethod
    def _check_mu(cls, v: float) -> float:
        if not math.isfinite(v) or v >= 0.5:
            raise ValueError(f"mu must be finite and < 1/2, got {v}")
        return v

    @computed_field
    @property
    def validity(self) -> Validity:
        integral = is_integer(self.mu)
        return Validity(
            forward=self.mu < 0.5,
            invert_f=self.mu < 0.0 and not integral,
            invert_g=self.mu < 0.5 and not integral,
            wedge=0.0 < self.mu < 0.5,
            verified_inversion=self.mu < -0.25 and not integral,
        )

    def require_noninteger(self) -> None:
        if is_integer(self.mu):
            raise ParameterError(f"mu = {self.mu} is an integer; inversion paths need mu not in Z")

    def require_negative(self) -> None:
        self.require_noninteger()
        if self.mu >= 0.0:
            raise ParameterError(f"inversion of F needs mu < 0, got {self.mu}")

    def require_wedge(self) -> None:
        if not self.validity.wedge:
            raise ParameterError(f"wedge problem needs 0 < mu < 1/2, got {self.mu}")

    @property
    def kernel_strip(self) -> tuple:
        """Pole-free strip (mu, 1/2) of the kernel's Mellin-Barnes integrand"""
        return (self.mu, 0.5)


class Route(str, Enum):
    DIRECT = "direct"
    CONTOUR = "contour"
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    ANALYTIC = "analytic"
    LIMIT_FORM = "limit_form"
    EPSILON = "epsilon"


@dataclass
class TransformResult:
    abscissas: np.ndarray
    values: np.ndarray
    per_point_err: np.ndarray
    params: TransformParameters
    route: Route
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissas = np.asarray(self.abscissas, dtype=float)
        self.values = np.asarray(self.values)
        self.per_point_err = np.asarray(self.per_point_err, dtype=float)
        if not (len(self.abscissas) == len(self.values) == len(self.per_point_err)):
            raise ValueError("abscissas, values and per_point_err must have equal lengths")
        if not np.all(np.isfinite(self.per_point_err)):
            raise ValueError("per_point_err must be finite")

    def __len__(self) -> int:
        return len(self.abscissas)

    def scaled(self, factor: float) -> "TransformResult":
        return TransformResult(self.abscissas, self.values * factor, self.per_point_err * abs(factor),
                               self.params, self.route, dict(self.meta))

    def to_frame(self, abscissa_name: str = "abscissa", value_name: str = "value") -> pd.DataFrame:
        frame = pd.DataFrame({abscissa_name: self.abscissas})
        if np.iscomplexobj(self.values):
            frame[f"{value_name}_re"] = self.values.real
            frame[f"{value_name}_im"] = self.values.imag
        else:
            frame[value_name] = self.values
        frame["err"] = self.per_point_err
        return frame


@dataclass(frozen=True)
class MellinValue:
    value: complex
    err_estimate: float
    route: Route


class HypothesisCheck(BaseModel):
    """Outcome of a tail/hypothesis monitor attached to a transform or inversion"""
    name: str
    satisfied: bool
    measured: float
    detail: Optional[str] = None
