"""JSON documents for matrices, decompositions and verification reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import CartanForgeError, RingError, SchemaError
from .matlin import Matrix
from .rings import Ring, parse_ring_spec
from .sln import Decomposition, SlnAlgebra, Subalgebra


def matrix_to_json(M: Matrix) -> dict[str, Any]:
    return {
        "ring": M.ring.to_dsl(),
        "rows": M.rows,
        "cols": M.cols,
        "entries": [[M.ring.to_json_value(int(x)) for x in row] for row in M.codes],
    }


def _require(cond: bool, message: str):
    if not cond:
        raise SchemaError(message)


def _ring_from(doc: dict, expected: Ring | None) -> Ring:
    _require(isinstance(doc.get("ring"), str), "missing ring description")
    try:
        ring = parse_ring_spec(doc["ring"])
    except RingError as exc:
        raise SchemaError(str(exc)) from None
    if expected is not None and ring != expected:
        raise SchemaError(f"ring {ring.to_dsl()} does not match {expected.to_dsl()}")
    return ring


def matrix_from_json(doc: Any, ring: Ring | None = None) -> Matrix:
    _require(isinstance(doc, dict), "a matrix must be a JSON object")
    ring = _ring_from(doc, ring)
    rows, cols, entries = doc.get("rows"), doc.get("cols"), doc.get("entries")
    _require(isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0, "rows/cols must be positive integers")
    _require(
        isinstance(entries, list) and len(entries) == rows and all(isinstance(r, list) and len(r) == cols for r in entries),
        f"entries must be a {rows} x {cols} nested list",
    )
    try:
        codes = np.array([[ring.from_json_value(x) for x in row] for row in entries], dtype=ring.dtype)
    except RingError as exc:
        raise SchemaError(f"bad entry: {exc}") from None
    return Matrix(ring, codes)


def decomposition_to_json(D: Decomposition) -> dict[str, Any]:
    return {
        "ring": D.algebra.ring.to_dsl(),
        "n": D.algebra.n,
        "components": [
            {"name": name, "basis": [matrix_to_json(M) for M in H.basis_matrices]}
            for name, H in zip(D.names, D.components)
        ],
        "provenance": D.provenance,
    }


def decomposition_from_json(doc: Any, ring: Ring | None = None) -> Decomposition:
    """Rebuild a Decomposition, rejecting malformed or non-traceless input with SchemaError."""
    _require(isinstance(doc, dict), "a decomposition must be a JSON object")
    ring = _ring_from(doc, ring)
    n = doc.get("n")
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 2, "n must be an integer >= 2")
    comps = doc.get("components")
    _require(isinstance(comps, list) and comps, "components must be a non-empty list")
    alg = SlnAlgebra(ring, n)
    built = []
    for i, comp in enumerate(comps):
        _require(isinstance(comp, dict) and isinstance(comp.get("basis"), list), f"component {i} needs a basis list")
        name = comp.get("name", f"component_{i}")
        _require(isinstance(name, str), f"component {i} name must be a string")
        basis = [matrix_from_json(m, ring) for m in comp["basis"]]
        for j, M in enumerate(basis):
            _require(M.shape == (n, n), f"{name} basis matrix {j} is not {n} x {n}")
            _require(alg.is_traceless(M), f"{name} basis matrix {j} is not trace zero")
        try:
            built.append(Subalgebra(alg, basis, name))
        except CartanForgeError as exc:
            raise SchemaError(f"{name}: {exc}") from None
    provenance = doc.get("provenance", {})
    _require(isinstance(provenance, dict), "provenance must be an object")
    return Decomposition(alg, built, provenance)


def dump_json(obj: Any, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
