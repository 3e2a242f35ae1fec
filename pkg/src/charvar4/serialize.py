"""JSON and CSV readers/writers for matrices, pairs and coordinate vectors.

Complex numbers are written as ``[re, im]``.  Pair files hold
``{"A": <element>, "B": <element>}`` where each element is
``{"rows": [[[re, im] x 4] x 4], "flavor": "SL4" | "SU31"}``.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .coordinates import RealCoordinateVector, TraceVector, get_catalog
from .errors import InputError
from .matrices import Flavor, GroupElement, MEMBERSHIP_TOL, as_matrix, is_su31


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise InputError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {"rows": [[complex_to_json(z) for z in row] for row in m]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows = obj["rows"]
        m = np.array([[complex_from_json(z) for z in row] for row in rows], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix: {exc}") from exc
    if m.shape != (4, 4):
        raise InputError(f"expected 4x4 rows, got shape {m.shape}")
    return m


def element_to_json(g) -> dict:
    out = matrix_to_json(g)
    if isinstance(g, GroupElement):
        flavor = g.flavor
    else:
        flavor = Flavor.SU31 if is_su31(g) else Flavor.SL4
    out["flavor"] = flavor.value
    det = np.linalg.det(as_matrix(g))
    out["residuals"] = {"det": float(abs(det - 1))}
    if flavor is Flavor.SU31:
        out["residuals"]["form"] = is_su31(g).form_residual
    return out


def element_from_json(obj, tol: float = MEMBERSHIP_TOL) -> GroupElement:
    """Load and validate; raises NotUnimodular / FlavorMismatch with residuals."""
    m = matrix_from_json(obj)
    try:
        flavor = Flavor(obj.get("flavor", "SL4"))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    scale = max(1.0, float(np.max(np.abs(m)))) ** 2
    return GroupElement(m, flavor, tol * scale)


def pair_to_json(A, B, **extra) -> dict:
    out = {"A": element_to_json(A), "B": element_to_json(B)}
    out.update(extra)
    return out


def pair_from_json(obj, tol: float = MEMBERSHIP_TOL) -> tuple[GroupElement, GroupElement]:
    try:
        return element_from_json(obj["A"], tol), element_from_json(obj["B"], tol)
    except (KeyError, TypeError) as exc:
        raise InputError(f"pair file needs 'A' and 'B' entries: {exc}") from exc


def trace_vector_to_json(vec: TraceVector) -> dict:
    return {"catalog": vec.catalog, "values": [complex_to_json(z) for z in vec.values]}


def trace_vector_from_json(obj) -> TraceVector:
    try:
        cat = get_catalog(obj["catalog"])
        vals = [complex_from_json(z) for z in obj["values"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed trace vector: {exc}") from exc
    return TraceVector(cat.name, vals)


def real_vector_to_json(rcv: RealCoordinateVector) -> dict:
    return {"slots": list(rcv.slots), "values": [float(v) for v in rcv.values]}


def real_vector_from_json(obj) -> RealCoordinateVector:
    try:
        return RealCoordinateVector(tuple(obj["slots"]), obj["values"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed real coordinate vector: {exc}") from exc


def real_vector_to_csv(rcv: RealCoordinateVector) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["slot", "value"])
    for slot, v in zip(rcv.slots, rcv.values):
        writer.writerow([slot, repr(float(v))])
    return buf.getvalue()


def read_json(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))

