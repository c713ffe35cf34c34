"""Deterministic JSON and CSV writers (floats with 17 significant digits)."""

from __future__ import annotations

import csv
import io
import math
import numbers

import numpy as np


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def _json_float(x: float) -> str:
    if not math.isfinite(x):
        return '"' + fmt_float(x) + '"'
    s = fmt_float(x)
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def plain(obj):
    """Convert numpy scalars/arrays, tuples and dataclass-like objects to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "as_dict"):
        return plain(obj.as_dict())
    return str(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with sorted keys and 17-digit floats."""
    out = io.StringIO()
    _write(plain(obj), out, indent, 0)
    out.write("\n")
    return out.getvalue()


def _write(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = sorted(obj.items())
        for n, (k, v) in enumerate(items):
            out.write(pad + _string(k) + ": ")
            _write(v, out, indent, level + 1)
            out.write(",\n" if n < len(items) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for n, v in enumerate(obj):
            out.write(pad)
            _write(v, out, indent, level + 1)
            out.write(",\n" if n < len(obj) - 1 else "\n")
        out.write(end + "]")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif obj is None:
        out.write("null")
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(_json_float(obj))
    else:
        out.write(_string(str(obj)))


def _string(s: str) -> str:
    import json
    return json.dumps(s, ensure_ascii=False)


def csv_cell(v) -> str:
    v = plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([csv_cell(r.get(c)) for c in columns])


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
