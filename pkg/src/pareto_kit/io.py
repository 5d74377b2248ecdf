"""CSV serialization of fronts, sweeps and selection scores.

Floats are written with ``repr`` (shortest round-tripping form, 17
significant digits at most), so reading a file back reproduces the values
exactly and repeated runs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import Front, Solution
from .errors import ParseError


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _header(n: int, M: int) -> list[str]:
    return ["id", *(f"x_{k}" for k in range(1, n + 1)), *(f"f_{k}" for k in range(1, M + 1)), "feasible"]


def _shape(front) -> tuple[int, int]:
    first = front[0]
    return len(first.x), len(first.f)


def write_front(path, front, sweep: bool | None = None) -> None:
    """Write solutions as ``id,x_1..x_n,f_1..f_M,feasible``.

    Sweep fronts (those carrying ``meta``) get ``method,param_json`` in front
    of those columns unless ``sweep=False``.
    """
    entries = list(front)
    meta = getattr(front, "meta", []) or []
    with_meta = bool(meta) if sweep is None else sweep
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if not entries:
            w.writerow((["method", "param_json"] if with_meta else []) + ["id", "feasible"])
            return
        n, M = _shape(entries)
        w.writerow((["method", "param_json"] if with_meta else []) + _header(n, M))
        for k, s in enumerate(entries):
            row = [k, *(_fmt(v) for v in s.x), *(_fmt(v) for v in s.f), _fmt(bool(s.feasible))]
            if with_meta:
                m = meta[k] if k < len(meta) else {}
                row = [m.get("method", ""), json.dumps(m.get("param", {}), sort_keys=True)] + row
            w.writerow(row)


def read_front(path) -> Front:
    """Parse a front CSV (with or without sweep columns)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty front file", 1)
    header = [h.strip() for h in rows[0]]
    offset = 2 if header[:2] == ["method", "param_json"] else 0
    cols = header[offset:]
    if not cols or cols[0] != "id" or cols[-1] != "feasible":
        raise ParseError("header must be id,x_1..x_n,f_1..f_M,feasible", 1)
    xs = [c for c in cols if c.startswith("x_")]
    fs = [c for c in cols if c.startswith("f_")]
    if not fs or len(xs) + len(fs) + 2 != len(cols):
        raise ParseError("header must be id,x_1..x_n,f_1..f_M,feasible", 1)
    n, M = len(xs), len(fs)
    entries, meta = [], []
    for row_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row_no)
        vals = row[offset:]
        try:
            x = tuple(float(v) for v in vals[1:1 + n])
            f = tuple(float(v) for v in vals[1 + n:1 + n + M])
            feasible = vals[-1].strip().lower() in ("1", "true")
        except ValueError as exc:
            raise ParseError(str(exc), row_no) from None
        if not all(math.isfinite(v) for v in f):
            raise ParseError("non-finite objective value", row_no)
        entries.append(Solution(x, f, feasible))
        if offset:
            try:
                meta.append({"method": row[0], "param": json.loads(row[1])})
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad param_json: {exc}", row_no) from None
    return Front(entries, nondominated=False, meta=meta)


def write_scores(path, scores, selected: int, header: str = "score") -> None:
    """Per-candidate ``id,<header>,selected`` rows."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", header, "selected"])
        for k, s in enumerate(np.asarray(scores, dtype=float)):
            w.writerow([k, _fmt(s), int(k == selected)])
