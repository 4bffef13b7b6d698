"""Deterministic JSON/CSV report emission.

Reports are plain dicts with a fixed schema: task id, echoed inputs, results,
and provenance (grid, tolerance, seed, timings).  JSON is emitted with sorted
keys and repr-roundtrip floats, so identical computations produce identical
bytes; timings are the only nondeterministic entry and can be stripped.
CSV rows use repr floats as well: full precision and locale-independent.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "pyify",
    "build_report",
    "strip_timings",
    "report_json",
    "write_json",
    "emit_csv",
]

SCHEMA_VERSION = 1


def pyify(obj):
    """Recursively convert numpy scalars/arrays and dataclasses to JSON types."""
    if isinstance(obj, dict):
        return {str(k): pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [pyify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [pyify(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        if not np.isfinite(val):
            raise ValueError(f"non-finite value {val!r} in report")
        return val
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return pyify(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def build_report(
    task: str,
    inputs: dict,
    results: dict,
    provenance: dict,
    scene_sha256: str | None = None,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "scene_sha256": scene_sha256,
        "inputs": pyify(inputs),
        "results": pyify(results),
        "provenance": pyify(provenance),
    }


def strip_timings(report: dict) -> dict:
    """Copy of the report with the provenance timing block removed."""
    out = dict(report)
    prov = dict(out.get("provenance", {}))
    prov.pop("timings", None)
    out["provenance"] = prov
    return out


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(report: dict, path: str | Path) -> None:
    Path(path).write_text(report_json(report), encoding="utf-8")


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def emit_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    """Header plus one row per record; repr floats, newline-terminated lines."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("CSV row width does not match the header")
        lines.append(",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
