"""Deterministic CSV/JSON report writing.

Floats are written with 12 significant digits, non-finite floats as the
strings ``"inf"``, ``"-inf"`` and ``"nan"``, complex numbers as ``[re, im]``
pairs; JSON keys are sorted.  Identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import InputError, ReportIOError

FLOAT_FORMAT = "{:.12g}"


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FORMAT.format(x)


def normalize(obj: Any) -> Any:
    """Turn ``obj`` into plain JSON data with 12-digit floats."""
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    elif is_dataclass(obj) and not isinstance(obj, type):
        obj = asdict(obj)
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format_float(x)) if math.isfinite(x) else format_float(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize(obj.real), normalize(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise InputError(f"cannot serialise {type(obj).__name__}")


def _cell(v: Any) -> str:
    v = normalize(v)
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, list):
        return " ".join(_cell(x) for x in v)
    return "" if v is None else str(v)


def render_csv(records: Sequence[Any], header: Sequence[str] | None = None) -> str:
    rows = [normalize(r) for r in records]
    if header is None:
        header = list(rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        missing = [k for k in header if k not in row]
        if missing:
            raise InputError(f"record lacks columns {missing}")
        w.writerow([_cell(row[k]) for k in header])
    return buf.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(normalize(payload), sort_keys=True, indent=2) + "\n"


def write_report(records: Any, path: str | Path | None, fmt: str | None = None,
                 header: Sequence[str] | None = None) -> str:
    """Write ``records`` as CSV (a nonempty list of flat records) or JSON; returns the text.

    ``fmt`` defaults to the file suffix; ``path=None`` only renders.
    """
    if records is None or (isinstance(records, (list, tuple, dict)) and len(records) == 0):
        raise InputError("refusing to write an empty report")
    if fmt is None:
        fmt = "csv" if path is not None and str(path).lower().endswith(".csv") else "json"
    if fmt == "csv":
        if not isinstance(records, (list, tuple)):
            raise InputError("CSV reports need a list of records")
        text = render_csv(records, header)
    elif fmt == "json":
        text = render_json(records)
    else:
        raise InputError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ReportIOError(f"cannot write {path}: {exc}") from exc
    return text


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
