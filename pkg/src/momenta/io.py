"""Deterministic JSON and CSV output.

Floats are always written with 17 significant digits so that output is
byte-identical across runs and round-trips to the same doubles.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping
from importlib.resources import files

import numpy as np

from .errors import NumericalError

__all__ = ["format_float", "dumps", "csv_lines", "load_json", "schema_path"]


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise NumericalError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        return "0.0"  # normalizes -0.0
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, Iterable):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (Mapping, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialize ``obj`` as JSON with fixed 17-digit floats; keys keep insertion order."""
    return _encode(obj, indent, 0) + "\n"


def csv_lines(rows, header: Iterable[str] | None = None) -> str:
    out = []
    if header is not None:
        out.append(",".join(header))
    for row in rows:
        out.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(out) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def schema_path(command: str):
    """Location of the JSON schema shipped for a CLI subcommand's output."""
    return files("momenta") / "schemas" / f"{command}.json"
