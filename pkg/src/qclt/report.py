"""CSV and JSON serialisation of experiment tables.

Both formats are deterministic: floats are written with ``repr`` and dict
keys keep insertion order, so identical configurations give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .experiments import Table

__all__ = ["to_csv", "to_json", "render"]


def _plain(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _cell(value) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# table: {table.name}\n")
    for key, value in table.meta.items():
        buf.write(f"# {key}: {json.dumps(_plain(value), sort_keys=False)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def to_json(table: Table) -> str:
    meta = {"table": table.name, **_plain(table.meta)}
    rows = [dict(zip(table.columns, _plain(list(r)))) for r in table.rows]
    return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown output format {fmt!r}")
