"""axdecomp.document

The single JSON document the CLI reads and writes, and the JSON encodings of factors and
decompositions.

Document shape
- `dim` (integer >= 1, required)
- `gram` (n x n array, optional): the metric; identity when absent. Validated through `Space`.
- payloads, at least one required:
  - `matrix` (n x n array): an operator in standard coordinates, rows first.
  - `basis` (n x n array): rows are the basis vectors.
  - `decomposition`: either a bare factor list or an object
    `{"convention": "apply-left-to-right", "factors": [...], "residual": r}` (the `decompose`
    output can be pasted in unchanged).
- any other top-level key is kept in `Document.extra` and written back on save.

Factor encodings (`factor_to_dict` / `factor_from_dict`)
- `{"kind": "rotational", "plane_u": [...], "plane_v": [...], "theta": r}`
- `{"kind": "reflectional", "negated": [...]}`
- `{"kind": "scalar", "c": r}`
- `{"kind": "diagonal_in_basis", "basis": [[...]], "entries": [...]}`
- `{"kind": "shear", "basis": [[...]], "delta": r}` (k x n basis, 1 <= k <= n: a k-shear)
- `{"kind": "general_axonal", "matrix": [[...]], "witness_in": [[...]], "witness_out": [[...]]}`

Parsing is strict about kinds, required fields and shapes (`DocumentError`), and does not check
the geometric invariants of a factor; that is `operators.validate_factor`'s job.

Serialization
- `json.dumps` with `indent=2` and a trailing newline. Floats use Python's shortest round-trip
  repr, so every emitted number re-parses to the identical double.
- `"-"` as a path means stdin (load) or stdout (save).
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .decompose import CONVENTION, Decomposition
from .operators import (
    DiagonalInBasis,
    Factor,
    FactorKind,
    GeneralAxonal,
    Reflectional,
    Rotational,
    Scalar,
    Shear,
)
from .space import Basis, Space


class DocumentError(ValueError):
    pass


def _numeric(raw: Any, what: str) -> np.ndarray:
    try:
        return np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{what} is not a numeric array: {exc}") from exc


def _finite(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise DocumentError(f"{what} has non-finite entries")
    return a


def _array(raw: Any, shape: tuple[int, ...], what: str) -> np.ndarray:
    a = _numeric(raw, what)
    if a.shape != shape:
        raise DocumentError(f"{what} must have shape {shape}, got {a.shape}")
    return _finite(a, what)


def _rows(raw: Any, dim: int, what: str) -> np.ndarray:
    """Between 1 and `dim` vectors of length `dim`, one per row."""
    a = _numeric(raw, what)
    if a.ndim != 2 or a.shape[1] != dim or not 1 <= a.shape[0] <= dim:
        raise DocumentError(f"{what} must have shape (k, {dim}) with 1 <= k <= {dim}, got {a.shape}")
    return _finite(a, what)


def _real(raw: Any, what: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise DocumentError(f"{what} must be a number, got {raw!r}")
    value = float(raw)
    if not math.isfinite(value):
        raise DocumentError(f"{what} must be finite")
    return value


def _field(d: Mapping[str, Any], key: str, kind: str) -> Any:
    if key not in d:
        raise DocumentError(f"{kind} factor is missing field: {key}")
    return d[key]


def factor_to_dict(f: Factor) -> dict[str, Any]:
    if isinstance(f, Rotational):
        return {"kind": f.kind.value, "plane_u": np.asarray(f.plane_u).tolist(), "plane_v": np.asarray(f.plane_v).tolist(), "theta": float(f.theta)}
    if isinstance(f, Reflectional):
        return {"kind": f.kind.value, "negated": np.asarray(f.negated).tolist()}
    if isinstance(f, Scalar):
        return {"kind": f.kind.value, "c": float(f.c)}
    if isinstance(f, DiagonalInBasis):
        return {"kind": f.kind.value, "basis": f.basis.vectors.tolist(), "entries": np.asarray(f.entries).tolist()}
    if isinstance(f, Shear):
        return {"kind": f.kind.value, "basis": f.basis.vectors.tolist(), "delta": float(f.delta)}
    if isinstance(f, GeneralAxonal):
        return {
            "kind": f.kind.value,
            "matrix": np.asarray(f.matrix).tolist(),
            "witness_in": f.witness_in.vectors.tolist(),
            "witness_out": f.witness_out.vectors.tolist(),
        }
    raise DocumentError(f"Cannot encode {type(f).__name__}")


def factor_from_dict(d: Mapping[str, Any], dim: int) -> Factor:
    if not isinstance(d, Mapping):
        raise DocumentError(f"Factor must be a JSON object, got {type(d).__name__}")
    try:
        kind = FactorKind(str(d.get("kind")))
    except ValueError as exc:
        raise DocumentError(f"Unknown factor kind: {d.get('kind')!r}") from exc

    vec = (dim,)
    mat = (dim, dim)
    k = kind.value
    if kind == FactorKind.ROTATIONAL:
        return Rotational(
            plane_u=_array(_field(d, "plane_u", k), vec, "plane_u"),
            plane_v=_array(_field(d, "plane_v", k), vec, "plane_v"),
            theta=_real(_field(d, "theta", k), "theta"),
        )
    if kind == FactorKind.REFLECTIONAL:
        return Reflectional(negated=_array(_field(d, "negated", k), vec, "negated"))
    if kind == FactorKind.SCALAR:
        return Scalar(c=_real(_field(d, "c", k), "c"))
    if kind == FactorKind.DIAGONAL_IN_BASIS:
        return DiagonalInBasis(
            basis=Basis(_array(_field(d, "basis", k), mat, "basis")),
            entries=_array(_field(d, "entries", k), vec, "entries"),
        )
    if kind == FactorKind.SHEAR:
        return Shear(basis=Basis(_rows(_field(d, "basis", k), dim, "basis")), delta=_real(_field(d, "delta", k), "delta"))
    return GeneralAxonal(
        matrix=_array(_field(d, "matrix", k), mat, "matrix"),
        witness_in=Basis(_array(_field(d, "witness_in", k), mat, "witness_in")),
        witness_out=Basis(_array(_field(d, "witness_out", k), mat, "witness_out")),
    )


def decomposition_to_dict(d: Decomposition) -> dict[str, Any]:
    return {"convention": d.convention, "factors": [factor_to_dict(f) for f in d.factors], "residual": float(d.residual)}


def decomposition_from_dict(raw: Any, dim: int) -> Decomposition:
    if isinstance(raw, list):
        return Decomposition(factors=[factor_from_dict(f, dim) for f in raw])
    if not isinstance(raw, Mapping):
        raise DocumentError("decomposition must be a factor list or an object with 'factors'")
    convention = raw.get("convention", CONVENTION)
    if convention != CONVENTION:
        raise DocumentError(f"Unsupported composition convention: {convention!r}")
    factors = raw.get("factors")
    if not isinstance(factors, list):
        raise DocumentError("decomposition.factors must be a list")
    residual = _real(raw["residual"], "residual") if "residual" in raw else 0.0
    return Decomposition(factors=[factor_from_dict(f, dim) for f in factors], residual=residual)


@dataclass
class Document:
    dim: int
    gram: np.ndarray | None = None
    matrix: np.ndarray | None = None
    basis: Basis | None = None
    decomposition: Decomposition | None = None
    extra: dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def space(self) -> Space:
        return Space.euclidean(self.dim) if self.gram is None else Space(dim=self.dim, gram=self.gram)

    @staticmethod
    def from_dict(raw: Any) -> "Document":
        if not isinstance(raw, Mapping):
            raise DocumentError(f"Document must be a JSON object, got {type(raw).__name__}")

        known: dict[str, Any] = {}
        extra: dict[str, Any] = {}
        for k, v in raw.items():
            if k in {"dim", "gram", "matrix", "basis", "decomposition"}:
                known[k] = v
            else:
                extra[k] = v

        dim = known.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise DocumentError(f"Document field 'dim' must be an integer >= 1, got {dim!r}")
        if not any(k in known for k in ("matrix", "basis", "decomposition")):
            raise DocumentError("Document needs at least one of: matrix, basis, decomposition")

        mat = (dim, dim)
        doc = Document(dim=dim, extra=extra)
        if known.get("gram") is not None:
            doc.gram = _array(known["gram"], mat, "gram")
            try:
                doc.space
            except ValueError as exc:
                raise DocumentError(f"Invalid gram: {exc}") from exc
        if "matrix" in known:
            doc.matrix = _array(known["matrix"], mat, "matrix")
        if "basis" in known:
            doc.basis = Basis(_array(known["basis"], mat, "basis"))
        if "decomposition" in known:
            doc.decomposition = decomposition_from_dict(known["decomposition"], dim)
        return doc

    @staticmethod
    def load(path: Path | str) -> "Document":
        try:
            text = sys.stdin.read() if str(path) == "-" else Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise DocumentError(f"Cannot read {path}: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"Invalid JSON in {path}: {exc}") from exc
        return Document.from_dict(raw)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"dim": self.dim}
        if self.gram is not None:
            d["gram"] = np.asarray(self.gram).tolist()
        if self.matrix is not None:
            d["matrix"] = np.asarray(self.matrix).tolist()
        if self.basis is not None:
            d["basis"] = self.basis.vectors.tolist()
        if self.decomposition is not None:
            d["decomposition"] = decomposition_to_dict(self.decomposition)
        d.update(self.extra)
        return d

    def save(self, path: Path | str) -> None:
        write_json(self.to_dict(), path)


def dumps(d: Mapping[str, Any]) -> str:
    return json.dumps(d, indent=2, ensure_ascii=True) + "\n"


def write_json(d: Mapping[str, Any], path: Path | str) -> None:
    if str(path) == "-":
        sys.stdout.write(dumps(d))
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(d), encoding="utf-8")
