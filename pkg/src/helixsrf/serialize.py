"""CSV and JSON writers with round-trip-safe float text.

Floats are written with ``repr``: the shortest decimal string that parses back
to the same double (never more than 17 significant digits). NaN and infinities
are refused rather than written.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

from .helix import HelixParams

# bulky diagnostics kept out of serialized reports
_SKIP_FIELDS = {"steiner_positions", "history"}


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"refusing to serialize non-finite value {x!r}")
    return repr(x)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], stream=None) -> str | None:
    """Write a header and rows as UTF-8 CSV with LF line ends.

    Returns the text when ``stream`` is None.
    """
    out = io.StringIO() if stream is None else stream
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return out.getvalue() if stream is None else None


def to_jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if isinstance(obj, HelixParams):
            return {"omega": obj.omega, "alpha": obj.alpha}
        out = {}
        for f in dataclasses.fields(obj):
            if f.name in _SKIP_FIELDS:
                continue
            value = getattr(obj, f.name)
            if isinstance(value, HelixParams):
                out["omega"], out["alpha"] = value.omega, value.alpha
            else:
                out[f.name] = to_jsonable(value)
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"refusing to serialize non-finite value {x!r}")
        return x
    return obj


def write_report(report: Any) -> str:
    """One JSON object per report, keys in field order, numbers unquoted."""
    return json.dumps(to_jsonable(report), allow_nan=False, separators=(",", ":")) + "\n"
