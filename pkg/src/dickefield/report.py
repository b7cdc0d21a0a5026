"""JSON and CSV encodings of run records.

JSON: one document per invocation. A single run is the record object; a
sweep is {"scenario", "version", "sweep", "records": [...]}. Complex numbers
are [re, im] pairs, NaN becomes null, keys are snake_case.

CSV: header plus one row per sweep point, scalar columns only. Complex
scalars split into <name>_re and <name>_im.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math

import numpy as np

from . import __version__
from .config import ConfigError, Sweep
from .scenarios import RunRecord


def to_jsonable(value):
    if isinstance(value, RunRecord):
        return to_jsonable(value.to_dict())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(dataclasses.asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def _document(records: list[RunRecord], sweep: Sweep | None) -> dict:
    if sweep is None and len(records) == 1:
        return to_jsonable(records[0])
    return to_jsonable(
        {
            "scenario": records[0].scenario if records else None,
            "version": __version__,
            "sweep": sweep,
            "records": records,
        }
    )


def _csv_bytes(records: list[RunRecord], sweep: Sweep | None) -> bytes:
    if any(r.states is not None for r in records):
        raise ConfigError("CSV output carries scalar columns only; drop --dump-state or use --format json")
    rows = []
    for rec in records:
        row = {}
        if sweep is not None:
            row[sweep.name] = rec.config.get(sweep.name)
        for name, scalar in rec.scalars.items():
            value = scalar.value
            if isinstance(value, (complex, np.complexfloating)):
                row[f"{name}_re"] = float(value.real)
                row[f"{name}_im"] = float(value.imag)
            else:
                row[name] = to_jsonable(value)
        rows.append(row)
    columns: list[str] = []
    for row in rows:
        columns += [c for c in row if c not in columns]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue().encode()


def serialize(records: list[RunRecord] | RunRecord, fmt: str = "json", sweep: Sweep | None = None) -> bytes:
    if isinstance(records, RunRecord):
        records = [records]
    if fmt == "json":
        return (json.dumps(_document(records, sweep), indent=2) + "\n").encode()
    if fmt == "csv":
        return _csv_bytes(records, sweep)
    raise ConfigError(f"unknown format {fmt!r}; use json or csv")


def load_json(data: bytes | str) -> dict:
    return json.loads(data)


def reserialize(data: bytes | str) -> bytes:
    """Parse a JSON document and write it back in the canonical layout."""
    return (json.dumps(load_json(data), indent=2) + "\n").encode()
