"""Deterministic JSON/CSV emitters for reports.

Identical payloads serialize to identical bytes: keys are sorted, floats are
rendered at 17 significant digits (enough to round-trip binary64 exactly),
and no locale- or hash-order-dependent formatting is used anywhere.
"""

from __future__ import annotations

import csv
import io
import json
import math
from enum import Enum
from typing import Any

import numpy as np

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot appear in a report")
    return format(float(x), ".17g")


def _serialize(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        keys = sorted(obj)
        items = [
            f"{pad}{json.dumps(str(k))}: {_serialize(obj[k], indent, level + 1)}"
            for k in keys
        ]
        return "{\n" + ",\n".join(items) + "\n" + closing_pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}{_serialize(v, indent, level + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + closing_pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, Enum):
        return json.dumps(str(obj.value))
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialize {type(obj).__name__} deterministically")


def dumps(payload: dict, indent: int = 2) -> str:
    """Canonical JSON text for a report payload (trailing newline included)."""
    return _serialize(payload, indent, 0) + "\n"


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as handle:
        handle.write(dumps(payload))


def csv_text(header: list[str], rows: list[list]) -> str:
    """CSV with one header row; floats at 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([
            format_float(v) if isinstance(v, (float, np.floating)) else v
            for v in row
        ])
    return buf.getvalue()


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(csv_text(header, rows))
