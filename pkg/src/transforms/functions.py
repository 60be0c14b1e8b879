# src/transforms/functions.py
"""
Input functions for the transforms: a registered catalog of analytic test
functions (with Mellin images where one exists) and tabulated functions read
from two-column CSV files.

Catalog entries record which convergence hypotheses they satisfy:

    f(0)=0          vanishing at the origin (inversion of F)
    f*(1/2)=0       vanishing Mellin image at 1/2 (Lebedev form, antiderivative
                    identity and inversion of F converge)
    g(0)=0          vanishing at tau = 0 (inversion of G)
    balanced        int g(tau)/cosh(pi tau) d tau = 0 (inversion of G converges)
"""

import logging
import math
import re
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import special
from scipy.interpolate import CubicSpline

from src.utils.errors import ConfigError, HypothesisWarning

logger = logging.getLogger(__name__)

MIN_POINTS = 4


class Variable(str, Enum):
    X = "x"
    TAU = "tau"


class Interpolation(str, Enum):
    LINEAR = "linear"
    CUBIC = "cubic"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    variable: Variable
    formula: str
    func: Callable[..., np.ndarray]
    defaults: Dict[str, float]
    decay: Callable[..., float]
    image: Optional[Callable[..., np.ndarray]] = None
    strip: Optional[Callable[..., Tuple[float, float]]] = None
    hypotheses: Tuple[str, ...] = ()


def _gamma_image(shift: float, a: float, s):
    # Gamma(s + shift) a^(-s - shift)
    s = np.asarray(s, dtype=complex)
    return np.exp(special.loggamma(s + shift) - (s + shift) * math.log(a))


CATALOG: Dict[str, CatalogEntry] = {
    "exp_decay": CatalogEntry(
        name="exp_decay", variable=Variable.X, formula="exp(-a x)",
        func=lambda x, a: np.exp(-a * x),
        defaults={"a": 1.0},
        decay=lambda a: a,
        image=lambda s, a: _gamma_image(0.0, a, s),
        strip=lambda a: (0.0, math.inf),
    ),
    "power_exp": CatalogEntry(
        name="power_exp", variable=Variable.X, formula="x^b exp(-a x)",
        func=lambda x, a, b: np.power(x, b) * np.exp(-a * x),
        defaults={"a": 1.0, "b": 1.0},
        decay=lambda a, b: a,
        image=lambda s, a, b: _gamma_image(b, a, s),
        strip=lambda a, b: (-b, math.inf),
        hypotheses=("f(0)=0",),
    ),
    "centered_power_exp": CatalogEntry(
        name="centered_power_exp", variable=Variable.X, formula="x (x - 3/(2a)) exp(-a x)",
        func=lambda x, a: x * (x - 1.5 / a) * np.exp(-a * x),
        defaults={"a": 1.0},
        decay=lambda a: 0.5 * a,
        # Gamma(s+1)(s - 1/2) a^(-s-2)
        image=lambda s, a: _gamma_image(1.0, a, s) * (np.asarray(s) - 0.5) / a,
        strip=lambda a: (-1.0, math.inf),
        hypotheses=("f(0)=0", "f*(1/2)=0"),
    ),
    "gauss_even_tau": CatalogEntry(
        name="gauss_even_tau", variable=Variable.TAU, formula="tau^2 exp(-a tau^2)",
        func=lambda t, a: t * t * np.exp(-a * t * t),
        defaults={"a": 1.0},
        decay=lambda a: a,
        hypotheses=("g(0)=0",),
    ),
    "cosh_gauss_tau": CatalogEntry(
        name="cosh_gauss_tau", variable=Variable.TAU,
        formula="cosh(pi tau) tau^2 (1 - 2a tau^2/3) exp(-a tau^2)",
        func=lambda t, a: np.cosh(math.pi * t) * t * t * (1.0 - 2.0 * a * t * t / 3.0) * np.exp(-a * t * t),
        defaults={"a": 1.0},
        decay=lambda a: a,
        hypotheses=("g(0)=0", "balanced"),
    ),
    "gauss_tau": CatalogEntry(
        name="gauss_tau", variable=Variable.TAU, formula="exp(-a tau^2)",
        func=lambda t, a: np.exp(-a * t * t),
        defaults={"a": 1.0},
        decay=lambda a: a,
    ),
}


class SampledFunction:
    """A catalog function or a tabulated grid, callable on arrays

    Builtins evaluate exactly and may carry a Mellin image; tabulated
    functions interpolate inside their grid and are zero outside it.
    """

    def __init__(self, name: str, variable: Variable, evaluate: Callable[[np.ndarray], np.ndarray],
                 params: Optional[Dict[str, float]] = None, entry: Optional[CatalogEntry] = None,
                 grid: Optional[np.ndarray] = None, values: Optional[np.ndarray] = None,
                 interpolation: Optional[Interpolation] = None, factor: float = 1.0):
        self.name = name
        self.variable = variable
        self.params = dict(params or {})
        self.entry = entry
        self.grid = grid
        self.values = values
        self.interpolation = interpolation
        self.factor = factor
        self._evaluate = evaluate

    @classmethod
    def builtin(cls, name: str, **params) -> "SampledFunction":
        """Catalog function with parameters overriding its defaults"""
        if name not in CATALOG:
            raise ConfigError(f"unknown builtin function '{name}'; known: {', '.join(sorted(CATALOG))}")
        entry = CATALOG[name]
        unknown = set(params) - set(entry.defaults)
        if unknown:
            raise ConfigError(f"{name} takes parameters {sorted(entry.defaults)}, got {sorted(unknown)}")
        merged = {**entry.defaults, **{k: float(v) for k, v in params.items()}}
        if merged.get("a", 1.0) <= 0.0:
            raise ConfigError(f"{name} needs a > 0, got {merged['a']}")
        return cls(name, entry.variable, lambda t: entry.func(np.asarray(t, dtype=float), **merged),
                   params=merged, entry=entry)

    @classmethod
    def tabulated(cls, grid, values, interpolation: Interpolation = Interpolation.CUBIC,
                  variable: Variable = Variable.X, name: str = "tabulated") -> "SampledFunction":
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ConfigError("tabulated grid and values must be one-dimensional and of equal length")
        if len(grid) < MIN_POINTS:
            raise ConfigError(f"tabulated functions need at least {MIN_POINTS} points, got {len(grid)}")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ConfigError("tabulated grid and values must be finite")
        if np.any(np.diff(grid) <= 0.0):
            raise ConfigError("tabulated grid must be strictly ascending")
        interpolation = Interpolation(interpolation)
        if interpolation is Interpolation.CUBIC:
            spline = CubicSpline(grid, values)
            inner = spline
        else:
            def inner(t):
                return np.interp(t, grid, values)

        def evaluate(t):
            t = np.asarray(t, dtype=float)
            outside = (t < grid[0]) | (t > grid[-1])
            if np.any(outside):
                warnings.warn(f"{name}: {int(np.count_nonzero(outside))} point(s) outside "
                              f"[{grid[0]:g}, {grid[-1]:g}] extrapolated as zero", HypothesisWarning, stacklevel=3)
            return np.where(outside, 0.0, inner(np.clip(t, grid[0], grid[-1])))

        return cls(name, Variable(variable), evaluate, grid=grid, values=values, interpolation=interpolation)

    @classmethod
    def from_csv(cls, path, interpolation: Interpolation = Interpolation.CUBIC,
                 variable: Variable = Variable.X) -> "SampledFunction":
        """Two-column (abscissa, value) file; any malformed row rejects the file"""
        path = Path(path)
        try:
            frame = pd.read_csv(path, header=None, comment="#", skip_blank_lines=True, dtype=str)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ConfigError(f"cannot read tabulated function {path}: {e}") from e
        if frame.shape[1] != 2:
            raise ConfigError(f"{path}: expected 2 columns, found {frame.shape[1]}")
        # a non-numeric first row is a header
        first = pd.to_numeric(frame.iloc[0], errors="coerce")
        if first.isna().all():
            frame = frame.iloc[1:]
        numeric = frame.apply(pd.to_numeric, errors="coerce")
        bad = numeric.isna().any(axis=1)
        if bad.any():
            row = int(np.argmax(bad.to_numpy()))
            raise ConfigError(f"{path}: malformed row {row + 1}: {list(frame.iloc[row])}")
        logger.info(f"loaded {len(numeric)} samples from {path}")
        return cls.tabulated(numeric.iloc[:, 0].to_numpy(), numeric.iloc[:, 1].to_numpy(),
                             interpolation, variable, name=path.stem)

    @classmethod
    def parse(cls, text: str) -> "SampledFunction":
        """'name' or 'name(a=1, b=2)'"""
        match = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*", text)
        if not match:
            raise ConfigError(f"cannot parse function spec '{text}'")
        name, body = match.group(1), match.group(2)
        params = {}
        if body and body.strip():
            for item in body.split(","):
                key, sep, value = item.partition("=")
                if not sep:
                    raise ConfigError(f"parameter '{item.strip()}' in '{text}' is not key=value")
                try:
                    params[key.strip()] = float(value)
                except ValueError as e:
                    raise ConfigError(f"parameter {key.strip()} in '{text}' is not a number") from e
        return cls.builtin(name, **params)

    def __call__(self, t):
        out = self.factor * self._evaluate(t)
        return float(out) if np.ndim(out) == 0 else out

    def __repr__(self) -> str:
        if self.entry is None:
            return f"SampledFunction(tabulated '{self.name}', {len(self.grid)} points, {self.interpolation.value})"
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"SampledFunction({self.name}({args}))"

    def scaled(self, factor: float) -> "SampledFunction":
        return SampledFunction(self.name, self.variable, self._evaluate, self.params, self.entry,
                               self.grid, self.values, self.interpolation, self.factor * factor)

    @property
    def label(self) -> str:
        if self.entry is None:
            return self.name
        return f"{self.name}({', '.join(f'{k}={v:g}' for k, v in self.params.items())})"

    @property
    def is_tabulated(self) -> bool:
        return self.entry is None

    @property
    def has_image(self) -> bool:
        return self.entry is not None and self.entry.image is not None

    def image(self, s):
        """Analytic Mellin image f*(s)"""
        if not self.has_image:
            raise ConfigError(f"{self.label} has no analytic Mellin image")
        return self.factor * self.entry.image(s, **self.params)

    def strip(self) -> Tuple[float, float]:
        """Open strip of Re s where the Mellin integral converges"""
        if self.entry is not None and self.entry.strip is not None:
            return self.entry.strip(**self.params)
        if self.is_tabulated:
            # finite support: only the behavior at the left end matters
            return (-math.inf, math.inf) if self.grid[0] > 0.0 else (0.0, math.inf)
        return (-math.inf, math.inf)

    def support(self) -> Tuple[float, float]:
        if self.is_tabulated:
            return float(self.grid[0]), float(self.grid[-1])
        return 0.0, math.inf

    def decay_rate(self) -> float:
        if self.entry is None:
            return 1.0 / max(self.grid[-1] - self.grid[0], 1e-3)
        return float(self.entry.decay(**self.params))

    def satisfies(self, hypothesis: str) -> bool:
        return self.entry is not None and hypothesis in self.entry.hypotheses

    def require_variable(self, variable: Variable) -> None:
        if self.variable is not variable:
            raise ConfigError(f"{self.label} is a function of {self.variable.value}, expected {variable.value}")
