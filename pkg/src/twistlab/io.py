"""Serialization helpers shared by the experiment harness.

Outputs are written deterministically: JSON with sorted keys and ``repr``
floats, CSV with a fixed column order and ``repr`` floats, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import lie

__all__ = [
    "element_to_json",
    "element_from_json",
    "to_jsonable",
    "dumps_json",
    "write_csv",
    "csv_text",
    "content_hash",
]


def element_to_json(g: lie.GroupElement) -> dict:
    """Spec descriptor plus entries as ``[re, im]`` pairs, row-major.

    Torus factors store their angles directly.
    """
    spec = g.spec
    if spec.family is lie.Family.PRODUCT:
        return {"spec": spec.name, "factors": [element_to_json(c) for c in g.value]}
    if spec.family is lie.Family.TORUS:
        return {"spec": spec.name, "angles": [float(a) for a in g.value]}
    m = np.asarray(g.value)
    return {
        "spec": spec.name,
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def element_from_json(data: dict) -> lie.GroupElement:
    spec = lie.parse_spec(data["spec"])
    if "factors" in data:
        return lie.element(spec, [element_from_json(f) for f in data["factors"]])
    if "angles" in data:
        return lie.element(spec, data["angles"])
    z = np.array([complex(re, im) for re, im in data["entries"]]).reshape(spec.n, spec.n)
    return lie.element(spec, z)


def to_jsonable(obj):
    """Convert numpy scalars/arrays, dataclass-like records and elements."""
    if isinstance(obj, lie.GroupElement):
        return element_to_json(obj)
    if isinstance(obj, lie.ClassCoordinate):
        return {"spec": obj.spec.name, "angles": [float(a) for a in obj.angles]}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=1) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_text(rows: Iterable[dict], columns: Sequence[str], header_lines: Sequence[str] = ()) -> str:
    """CSV with optional ``#``-prefixed metadata lines before the header."""
    buf = _io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv(path, rows, columns, header_lines=()) -> None:
    Path(path).write_text(csv_text(rows, columns, header_lines))


def content_hash(*parts) -> str:
    """SHA-256 over the JSON encoding of ``parts``."""
    h = hashlib.sha256()
    for p in parts:
        h.update(json.dumps(to_jsonable(p), sort_keys=True).encode())
    return h.hexdigest()
