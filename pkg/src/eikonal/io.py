"""Deterministic CSV/JSON writers.

Floats are written as ``%.12e``; files are written to a temporary sibling and
renamed into place so readers never see partial output.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.12e"
SCHEMA = "1"


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FORMAT % x


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header, columns) -> str:
    """Header row plus one row per index; complex columns must be split by the caller."""
    cols = [np.asarray(c).reshape(-1) for c in columns]
    if len(header) != len(cols):
        raise ValueError("header and column counts differ")
    if len({c.size for c in cols}) > 1:
        raise ValueError("columns have different lengths")
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_float(v)


def write_csv(path, header, columns) -> Path:
    return atomic_write(path, csv_text(header, columns))


def read_csv(path) -> dict:
    """Columns of a file written by :func:`write_csv`, as float arrays."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        return {h: np.empty(0) for h in header}
    return {h: data[:, i] for i, h in enumerate(header)}


def _json_value(obj) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format_float(x) if math.isfinite(x) else json.dumps(str(format_float(x)))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_text(obj) -> str:
    """Single-line JSON with floats in ``%.12e``; key order is preserved."""
    return _json_value(obj)


def write_json(path, obj) -> Path:
    return atomic_write(path, json_text(obj) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
