"""Recurrence files, versioned JSON reports and CSV output.

Recurrence file, explicit form::

    {"schema": "cortho.recurrence/1",
     "rows": [{"n": 0, "first": 0, "coeffs": [[re, im], ...]}, ...]}

Row ``n`` lists ``d[first, n], ..., d[n+1, n]``; a coefficient may also be a
bare real number. Family form::

    {"family": "rotated-hermite", "params": {"a_arg": 0.785398, "b": [1, 2]},
     "rows": 40}

Reports are written with keys in a fixed order, floats at 17 significant
digits, complex numbers as ``[re, im]`` and non-finite floats as ``null``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from . import families
from .core import RecurrenceTable, TableError

RECURRENCE_SCHEMA = "cortho.recurrence/1"
REPORT_SCHEMA_VERSION = 1


def parse_complex(value) -> complex:
    """Accept ``[re, im]``, a number, or a string such as ``"1+2i"``."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have 2 entries, got {len(value)}")
        re, im = value
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            raise ValueError(f"complex pair entries must be numbers: {value!r}")
        return complex(float(re), float(im))
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        try:
            return complex(text)
        except ValueError:
            raise ValueError(f"cannot parse complex number {value!r}") from None
    raise ValueError(f"not a complex number: {value!r}")


def table_from_dict(doc: dict) -> RecurrenceTable:
    if not isinstance(doc, dict):
        raise TableError("recurrence document must be a JSON object")
    if "family" in doc:
        params = dict(doc.get("params") or {})
        rows = doc.get("rows")
        if not isinstance(rows, int) or isinstance(rows, bool):
            raise TableError("family documents need an integer 'rows'")
        for key in ("a", "b"):
            if key in params:
                params[key] = parse_complex(params[key])
        try:
            return families.make(doc["family"], rows, **params)
        except TypeError as exc:
            raise TableError(f"bad parameters for family {doc['family']!r}: {exc}") from None
    rows = doc.get("rows")
    if not isinstance(rows, list) or not rows:
        raise TableError("'rows' must be a non-empty list")
    parsed = []
    for idx, row in enumerate(rows):
        if not isinstance(row, dict):
            raise TableError("row entry must be an object", idx)
        n = row.get("n", idx)
        if n != idx:
            raise TableError(f"rows must be listed in order; found n = {n!r}", idx)
        first = row.get("first")
        if not isinstance(first, int) or isinstance(first, bool):
            raise TableError("'first' must be an integer", idx)
        coeffs = row.get("coeffs")
        if not isinstance(coeffs, list):
            raise TableError("'coeffs' must be a list", idx)
        try:
            values = [parse_complex(c) for c in coeffs]
        except ValueError as exc:
            raise TableError(str(exc), idx) from None
        parsed.append((first, values))
    return RecurrenceTable.from_rows(parsed)


def table_to_dict(table: RecurrenceTable) -> dict:
    return {"schema": RECURRENCE_SCHEMA,
            "rows": [{"n": n, "first": r, "coeffs": list(row)}
                     for n, (r, row) in enumerate(zip(table.firsts, table.coeffs))]}


def load_table(source: str | Path | TextIO) -> RecurrenceTable:
    """Read a recurrence file; ``"-"`` reads standard input."""
    if hasattr(source, "read"):
        text = source.read()
    elif str(source) == "-":
        import sys
        text = sys.stdin.read()
    else:
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableError(f"invalid JSON: {exc}") from None
    return table_from_dict(doc)


def _plain(obj: Any) -> Any:
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = ",\n".join(pad + _encode(v, indent, level + 1) for v in obj)
        return "[\n" + items + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}"
                           for k, v in obj.items())
        return "{\n" + items + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text (fixed key order, 17 significant digits)."""
    return _encode(_plain(obj), indent, 0) + "\n"


def report(kind: str, payload: dict) -> dict:
    """Wrap a payload in the versioned report envelope."""
    return {"schema": f"cortho.{kind}/{REPORT_SCHEMA_VERSION}", **payload}


def analysis_to_dict(rep) -> dict:
    return report("analysis", {
        "irreducible": rep.irreducible,
        "first_reducible_index": rep.first_reducible_index,
        "is_rr": rep.is_rr,
        "band": rep.band,
        "formally_normal": rep.formally_normal,
        "normality": rep.normality,
        "decomposable": rep.decomposable,
        "three_term": rep.three_term,
        "relations": rep.relations,
        "rejection_reason": rep.rejection_reason,
    })


def measure_csv(mu, out: TextIO | None = None) -> str:
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node_re", "node_im", "weight"])
    for x, wt in zip(mu.nodes, mu.weights):
        w.writerow([_format_float(x.real), _format_float(x.imag), _format_float(wt)])
    return buf.getvalue() if out is None else ""


def determinacy_csv(rep, out: TextIO | None = None) -> str:
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "S_N", "log_S_N"])
    for n, s, lg in zip(rep.schedule, rep.partial_sums, rep.log_partial_sums):
        w.writerow([n, _format_float(s) if math.isfinite(s) else "inf", _format_float(lg)])
    return buf.getvalue() if out is None else ""


def read_measure_csv(text: str):
    rows = list(csv.DictReader(io.StringIO(text)))
    nodes = [complex(float(r["node_re"]), float(r["node_im"])) for r in rows]
    weights = [float(r["weight"]) for r in rows]
    return nodes, weights
