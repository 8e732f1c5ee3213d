"""CSV / JSON emission shared by the CLI subcommands."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import IO, Any, List, Mapping, Optional, Sequence

SCHEMA_LINE = "# addfn-lab v1"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        # repr is the shortest string that round-trips, so CSV and JSON agree
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def to_csv(rows: Sequence[Mapping[str, Any]], columns: Optional[List[str]] = None) -> str:
    columns = columns or (list(rows[0].keys()) if rows else [])
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render(rows: Sequence[Mapping[str, Any]], fmt: str, columns: Optional[List[str]] = None) -> str:
    if fmt == "csv":
        return to_csv(rows, columns)
    if fmt == "json":
        if columns:
            rows = [{c: r.get(c) for c in columns} for r in rows]
        return to_json(list(rows))
    raise ValueError(f"unknown format {fmt!r}")


def read_csv(text: str) -> List[dict]:
    """Parse CSV written by :func:`to_csv` back into typed rows."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        row = {}
        for k, v in rec.items():
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


def write_text(text: str, path: Optional[str], stdout: IO[str]) -> None:
    if path in (None, "-"):
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

