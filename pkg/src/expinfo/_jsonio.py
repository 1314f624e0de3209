"""Deterministic JSON serialization.

Floats are written with 17 significant digits so that artifacts round-trip
exactly and are byte-identical across runs. Non-finite floats are written as
the strings ``"Infinity"``, ``"-Infinity"`` and ``"NaN"``; :func:`as_float`
and :func:`as_floats` turn them back into floats.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

_NONFINITE = {"Infinity": math.inf, "-Infinity": -math.inf, "NaN": math.nan}


def _scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return '"NaN"'
        if math.isinf(x):
            return '"Infinity"' if x > 0 else '"-Infinity"'
        return format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj: Any, indent: int = 0) -> str:
    """Serialize dicts, lists, tuples, arrays and scalars to JSON text."""
    pad = "  " * (indent + 1)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if any(isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            items = [pad + dumps(v, indent + 1) for v in obj]
            return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
        return "[" + ", ".join(_scalar(v) for v in obj) + "]"
    return _scalar(obj)


def write_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def as_float(v: Any) -> float:
    if isinstance(v, str):
        try:
            return _NONFINITE[v]
        except KeyError:
            raise ValueError(f"not a number: {v!r}") from None
    if v is None or isinstance(v, bool):
        raise ValueError(f"not a number: {v!r}")
    return float(v)


def as_floats(values: Any) -> list[float]:
    if not isinstance(values, list):
        raise ValueError("expected a JSON array of numbers")
    return [as_float(v) for v in values]
