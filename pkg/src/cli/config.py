# src/cli/config.py
"""
Run configuration: command-line flags over a YAML file over environment
settings over per-command defaults.
"""

import logging
import math
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models import TransformParameters
from src.transforms.functions import SampledFunction, Variable
from src.utils.errors import ConfigError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)


class Spacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class Direction(str, Enum):
    F = "F"
    G = "G"


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    min: float
    max: float
    count: int = Field(ge=1)
    spacing: Spacing = Spacing.LINEAR

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """'min:max:count' or 'min:max:count:log'"""
        parts = [p.strip() for p in str(text).split(":")]
        if len(parts) not in (3, 4):
            raise ConfigError(f"grid '{text}' is not min:max:count[:log]")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise ConfigError(f"grid '{text}' has a non-numeric field") from e
        try:
            spacing = Spacing(parts[3]) if len(parts) == 4 else Spacing.LINEAR
        except ValueError as e:
            raise ConfigError(f"grid '{text}' spacing must be linear or log") from e
        if count < 1:
            raise ConfigError(f"grid '{text}' is empty")
        if hi < lo:
            raise ConfigError(f"grid '{text}' has max < min")
        if spacing is Spacing.LOG and lo <= 0.0:
            raise ConfigError(f"log grid '{text}' needs a positive minimum")
        return cls(min=lo, max=hi, count=count, spacing=spacing)

    def points(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    def __str__(self) -> str:
        tail = ":log" if self.spacing is Spacing.LOG else ""
        return f"{self.min:g}:{self.max:g}:{self.count}{tail}"


class RunConfig(BaseModel):
    """Parameters of one command invocation; field names mirror the flags"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    mu: float = -0.5
    nu: Optional[float] = None
    beta: float = math.pi
    epsilon: Optional[float] = None
    direction: Direction = Direction.F
    suite: Optional[str] = None
    grid_x: GridSpec = GridSpec(min=0.5, max=3.0, count=3)
    grid_tau: GridSpec = GridSpec(min=0.5, max=2.0, count=3)
    grid_theta: Optional[GridSpec] = None
    fn: Optional[str] = None
    fn_file: Optional[Path] = None
    samples: Optional[Path] = None
    residuals: bool = True
    tol: float = Field(1e-6, gt=0.0)
    contour_height: Optional[float] = Field(None, gt=0.0)
    contour_nodes: Optional[int] = Field(None, ge=64)
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV

    @field_validator("grid_x", "grid_tau", "grid_theta", mode="before")
    @classmethod
    def _grid(cls, v: Any) -> Any:
        return GridSpec.parse(v) if isinstance(v, str) else v

    @property
    def params(self) -> TransformParameters:
        return TransformParameters(mu=self.mu)

    def function(self, variable: Variable) -> SampledFunction:
        """--fn or --fn-file; exactly one must be given"""
        if self.fn and self.fn_file:
            raise ConfigError("give either --fn or --fn-file, not both")
        if self.fn_file:
            return SampledFunction.from_csv(self.fn_file, variable=variable)
        if not self.fn:
            raise ConfigError("a function is required (--fn name(params) or --fn-file path.csv)")
        f = SampledFunction.parse(self.fn)
        f.require_variable(variable)
        return f

    def thetas(self) -> np.ndarray:
        if self.grid_theta is not None:
            return self.grid_theta.points()
        return np.linspace(0.0, self.beta, 5)

    def output_path(self) -> Path:
        if self.out is not None:
            return self.out
        return get_settings().output_dir / f"{self.command}.{self.format.value}"

    def public(self) -> Dict[str, Any]:
        """Parameters as recorded in output metadata"""
        out = {}
        for key, value in self.model_dump(exclude={"out"}, exclude_none=True).items():
            if isinstance(value, dict) and "count" in value:
                value = str(getattr(self, key))
            elif isinstance(value, Enum):
                value = value.value
            elif isinstance(value, Path):
                value = str(value)
            out[key] = value
        return out


# per-command defaults, lowest precedence
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "kernel": {"grid_x": "0.5:3:3", "grid_tau": "0.5:2:3", "tol": 1e-6},
    "forward": {"grid_x": "0.5:20:8", "grid_tau": "0:4:9", "tol": 1e-6},
    "invert": {"grid_x": "0.5:2:3", "grid_tau": "0.5:2:3", "tol": 1e-2},
    "roundtrip": {"grid_x": "0.5:2:3", "grid_tau": "0.5:2:3",
                  "tol": 1e-2, "format": "json"},
    "verify": {"suite": "ode", "tol": 1e-6},
    "verify:wedge": {"mu": 0.25, "fn": "gauss_even_tau(a=1)", "tol": 1e-5},
    "verify:bounds": {"nu": 0.25},
    "wedge": {"mu": 0.25, "fn": "gauss_even_tau(a=1)", "grid_x": "0.5:3:3", "tol": 1e-5},
}


def load_yaml(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping of flag names to values")
    # accept both --grid-x and grid_x spellings
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def build_config(command: str, config_file: Optional[Path] = None, **flags: Any) -> RunConfig:
    """Merge defaults < file < flags (flags left as None do not override)"""
    from_file = load_yaml(config_file)
    merged: Dict[str, Any] = dict(DEFAULTS.get(command, {}))
    suite = flags.get("suite") or from_file.get("suite") or merged.get("suite")
    if suite:
        merged.update(DEFAULTS.get(f"{command}:{suite}", {}))
    merged.update(from_file)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = command
    cfg = RunConfig(**merged)
    logger.debug(f"{command} config: {cfg.public()}")
    return cfg


def apply_contour_overrides(cfg: RunConfig) -> None:
    """Route --contour-height/--contour-nodes through the settings every contour reads"""
    changed = False
    if cfg.contour_height is not None:
        os.environ["INDEX_TRANSFORMS_CONTOUR_HALF_HEIGHT"] = repr(cfg.contour_height)
        changed = True
    if cfg.contour_nodes is not None:
        os.environ["INDEX_TRANSFORMS_CONTOUR_NODES"] = str(cfg.contour_nodes)
        changed = True
    if changed:
        get_settings.cache_clear()
