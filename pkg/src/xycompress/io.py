"""Deterministic CSV / JSON writers with an embedded provenance block.

CSV files start with ``# key: value`` comment lines, then a header row; numbers
carry 12 significant digits and lines end with LF.  JSON documents keep keys in
insertion order with ``provenance`` first.  Nothing time- or host-dependent is
written, so identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from pathlib import Path

import numpy as np
import scipy

from . import __version__

__all__ = ["provenance", "format_value", "csv_text", "write_csv", "json_text", "write_json", "to_plain"]


def provenance(parameters: dict, tolerances: dict | None = None) -> dict:
    return {
        "package": "xycompress",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "parameters": to_plain(parameters),
        "tolerances": to_plain(tolerances or {}),
    }


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if x == 0:
            return "0"  # folds -0.0
        return f"{x:.12g}"
    return str(x)


def to_plain(obj):
    """numpy scalars / arrays / enums -> JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else float(f"{x:.12g}")
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def csv_text(header, rows, prov: dict | None = None) -> str:
    buf = io.StringIO()
    if prov is not None:
        for key, value in prov.items():
            buf.write(f"# {key}: {json.dumps(to_plain(value), separators=(',', ':'))}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, prov: dict | None = None) -> Path:
    path = Path(path)
    path.write_bytes(csv_text(header, rows, prov).encode())
    return path


def json_text(payload: dict, prov: dict | None = None) -> str:
    doc = {"provenance": prov} if prov is not None else {}
    doc.update(payload)
    return json.dumps(to_plain(doc), indent=2) + "\n"


def write_json(path, payload: dict, prov: dict | None = None) -> Path:
    path = Path(path)
    path.write_bytes(json_text(payload, prov).encode())
    return path
