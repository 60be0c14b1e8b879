# src/cli/output.py

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from src.cli.config import OutputFormat
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

VERSION = "0.1.0"


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _float_text(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, ".17g")
    # keep floats recognizable as floats on the way back in
    return text if any(c in text for c in ".e") else text + ".0"


def dumps(value: Any, depth: int = 0) -> str:
    """json.dumps(value, sort_keys=True, indent=2) with floats at 17 significant digits"""
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(value, float):
        return _float_text(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = sorted(((str(k), v) for k, v in value.items()), key=lambda kv: kv[0])
        body = ",\n".join(f"{inner}{json.dumps(k)}: {dumps(v, depth + 1)}" for k, v in items)
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(inner + dumps(v, depth + 1) for v in value) + "\n" + pad + "]"
    return json.dumps(value)


def write_table(frame: pd.DataFrame, path: Path, fmt: OutputFormat, command: str,
                parameters: Dict[str, Any], extra: Optional[Dict[str, Any]] = None) -> Path:
    """CSV with one header row, or JSON {meta, data}; floats at 17 significant digits"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt is OutputFormat.CSV:
            frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        else:
            meta = {"command": command, "parameters": parameters, "version": VERSION}
            if extra:
                meta.update(extra)
            document = {"meta": _plain(meta), "data": _plain(frame.to_dict(orient="records"))}
            path.write_text(dumps(document) + "\n", encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write output {path}: {e}") from e
    logger.info(f"wrote {len(frame)} rows to {path}")
    return path


def write_report(report: Dict[str, Any], path: Path, command: str, parameters: Dict[str, Any]) -> Path:
    """JSON report for commands whose result is not a single table"""
    path = Path(path)
    document = {"meta": {"command": command, "parameters": parameters, "version": VERSION},
                "data": _plain(report)}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(document) + "\n", encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write report {path}: {e}") from e
    logger.info(f"wrote report to {path}")
    return path
