"""JSON (de)serialization for matrices and grid elements, plus the CSV sweep
table. Matrix files carry separate real/imaginary parts row-major:

    {"rows": m, "cols": n, "re": [[...]], "im": [[...]]}

Grid element files:

    {"domain": {...}, "shape": [d, d], "points": [matrix, ...]}
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InputParse
from .gridalg import GridDomain, GridElement


def matrix_to_dict(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        re = np.asarray(d["re"], dtype=np.float64)
        im = np.asarray(d["im"], dtype=np.float64)
        rows, cols = int(d["rows"]), int(d["cols"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputParse(f"bad matrix JSON: {exc}") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise InputParse(f"matrix JSON shape mismatch: {re.shape} vs ({rows}, {cols})")
    return re + 1j * im


def domain_to_dict(dom: GridDomain) -> dict:
    if dom.kind == "interval-1d":
        return {"kind": dom.kind, "n_points": dom.n_points}
    return {"kind": dom.kind, "n_radial": dom.n_radial, "n_angular": dom.n_angular}


def domain_from_dict(d: dict) -> GridDomain:
    try:
        if d["kind"] == "interval-1d":
            return GridDomain(kind="interval-1d", n_points=int(d["n_points"]))
        return GridDomain(kind=d["kind"], n_radial=int(d["n_radial"]),
                          n_angular=int(d["n_angular"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputParse(f"bad domain JSON: {exc}") from exc


def grid_element_to_dict(ge: GridElement) -> dict:
    d = ge.dim
    return {
        "domain": domain_to_dict(ge.domain),
        "shape": [d, d],
        "points": [matrix_to_dict(m) for m in ge.values],
    }


def grid_element_from_dict(d: dict) -> GridElement:
    dom = domain_from_dict(d.get("domain", {}))
    try:
        points = [matrix_from_dict(p) for p in d["points"]]
    except (KeyError, TypeError) as exc:
        raise InputParse(f"bad grid element JSON: {exc}") from exc
    return GridElement(domain=dom, values=np.stack(points))


def dump_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputParse(f"cannot read {path}: {exc}") from exc


def sweep_csv_lines(rows) -> list[str]:
    """Per-delta sweep table: delta, cond2, cond3, cond4, residual."""
    out = ["delta,cond2,cond3,cond4,residual"]
    for r in rows:
        out.append(f"{r['delta']},{int(r['cond2'])},{int(r['cond3'])},"
                   f"{int(r['cond4'])},{r['residual']}")
    return out
