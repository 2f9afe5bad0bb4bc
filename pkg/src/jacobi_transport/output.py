"""CSV tables and JSON envelopes with deterministic bytes."""

from __future__ import annotations

import csv
import io
import json
import os

import numpy as np


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def envelope(kind: str, data, metadata=None, warnings=()) -> str:
    """JSON document ``{kind, data, metadata, warnings}`` with sorted keys."""
    env = {"kind": kind, "data": _plain(data), "metadata": _plain(metadata or {}), "warnings": list(warnings)}
    return json.dumps(env, sort_keys=True, indent=2) + "\n"


def probe_csv(rows) -> str:
    """Grid/probe table with columns ``E, value, verdict``."""
    return csv_text(["E", "value", "verdict"], rows)


def write_text(path, text: str) -> str:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path
