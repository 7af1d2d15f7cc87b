from __future__ import annotations

import io
import json
import sys
from pathlib import Path

import numpy as np
import pytest

from axdecomp.decompose import CONVENTION, Decomposition, compose, decompose_invertible, decompose_orthogonal
from axdecomp.document import (
    Document,
    DocumentError,
    decomposition_from_dict,
    decomposition_to_dict,
    dumps,
    factor_from_dict,
    factor_to_dict,
)
from axdecomp.operators import FactorKind, Reflectional, Scalar, Shear
from axdecomp.space import Basis, Space


def _write(tmp_path: Path, payload: object, name: str = "doc.json") -> Path:
    p = tmp_path / name
    p.write_text(json.dumps(payload), encoding="utf-8")
    return p


def test_load_minimal_matrix_document(tmp_path: Path) -> None:
    doc = Document.load(_write(tmp_path, {"dim": 2, "matrix": [[1, 2], [3, 4]]}))

    assert doc.dim == 2
    assert doc.gram is None
    assert doc.space.is_euclidean
    np.testing.assert_array_equal(doc.matrix, [[1.0, 2.0], [3.0, 4.0]])
    assert doc.basis is None and doc.decomposition is None


def test_load_keeps_unknown_keys_and_saves_them_back(tmp_path: Path) -> None:
    src = _write(tmp_path, {"dim": 1, "basis": [[2.0]], "note": "hello", "meta": {"seed": 3}})
    doc = Document.load(src)
    assert doc.extra == {"note": "hello", "meta": {"seed": 3}}

    out = tmp_path / "nested" / "out.json"
    doc.save(out)
    raw = json.loads(out.read_text(encoding="utf-8"))
    assert raw == {"dim": 1, "basis": [[2.0]], "note": "hello", "meta": {"seed": 3}}
    assert out.read_text(encoding="utf-8").endswith("\n")


def test_load_general_metric(tmp_path: Path) -> None:
    doc = Document.load(_write(tmp_path, {"dim": 2, "gram": [[2.0, 0.5], [0.5, 1.0]], "basis": [[1, 0], [0, 1]]}))

    assert not doc.space.is_euclidean
    np.testing.assert_array_equal(doc.space.gram, [[2.0, 0.5], [0.5, 1.0]])
    assert isinstance(doc.basis, Basis)


def test_load_from_stdin(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(sys, "stdin", io.StringIO('{"dim": 1, "matrix": [[5]]}'))
    doc = Document.load("-")
    assert doc.matrix.tolist() == [[5.0]]


@pytest.mark.parametrize(
    ("payload", "message"),
    [
        ([1, 2], "JSON object"),
        ({"matrix": [[1]]}, "dim"),
        ({"dim": 0, "matrix": [[1]]}, "dim"),
        ({"dim": True, "matrix": [[1]]}, "dim"),
        ({"dim": 2}, "at least one"),
        ({"dim": 2, "matrix": [[1, 0]]}, "shape"),
        ({"dim": 1, "matrix": [["x"]]}, "numeric"),
        ({"dim": 2, "gram": [[1, 2], [2, 1]], "matrix": [[1, 0], [0, 1]]}, "Invalid gram"),
        ({"dim": 1, "decomposition": {"factors": "nope"}}, "must be a list"),
        ({"dim": 1, "decomposition": {"convention": "right-to-left", "factors": []}}, "convention"),
        ({"dim": 1, "decomposition": 7}, "factor list"),
    ],
)
def test_load_rejects_malformed_documents(tmp_path: Path, payload: object, message: str) -> None:
    with pytest.raises(DocumentError, match=message):
        Document.load(_write(tmp_path, payload))


def test_load_rejects_bad_json_and_missing_file(tmp_path: Path) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(DocumentError, match="Invalid JSON"):
        Document.load(bad)
    with pytest.raises(DocumentError, match="Cannot read"):
        Document.load(tmp_path / "missing.json")


def test_load_rejects_undecodable_bytes(tmp_path: Path) -> None:
    binary = tmp_path / "binary.json"
    binary.write_bytes(b"\xff\xfe{\"dim\": 1}")
    with pytest.raises(DocumentError, match="Cannot read"):
        Document.load(binary)


def test_nan_is_rejected() -> None:
    with pytest.raises(DocumentError, match="non-finite"):
        Document.from_dict({"dim": 1, "matrix": [[float("nan")]]})


@pytest.mark.parametrize(
    ("raw", "message"),
    [
        ({"kind": "spiral"}, "Unknown factor kind"),
        ({"kind": "scalar"}, "missing field: c"),
        ({"kind": "scalar", "c": "2"}, "number"),
        ({"kind": "scalar", "c": True}, "number"),
        ({"kind": "reflectional", "negated": [1.0]}, "shape"),
        ({"kind": "rotational", "plane_u": [1, 0], "plane_v": [0, 1]}, "missing field: theta"),
        ({"kind": "shear", "basis": [[1, 0], [0, 1], [1, 1]], "delta": 0.1}, r"shape \(k, 2\)"),
        ({"kind": "shear", "basis": [1, 0], "delta": 0.1}, r"shape \(k, 2\)"),
        ("scalar", "JSON object"),
    ],
)
def test_factor_from_dict_rejects(raw: object, message: str) -> None:
    with pytest.raises(DocumentError, match=message):
        factor_from_dict(raw, 2)


def test_factor_encoding_shapes() -> None:
    assert factor_to_dict(Scalar(c=2.5)) == {"kind": "scalar", "c": 2.5}
    assert factor_to_dict(Reflectional(negated=np.array([0.0, 1.0]))) == {"kind": "reflectional", "negated": [0.0, 1.0]}
    shear = factor_to_dict(Shear(basis=Basis(np.eye(2)), delta=0.25))
    assert shear == {"kind": "shear", "basis": [[1.0, 0.0], [0.0, 1.0]], "delta": 0.25}


def test_shear_of_a_subspace_is_parsed() -> None:
    f = factor_from_dict({"kind": "shear", "basis": [[1, 0, 0], [0, 1, 0]], "delta": 0.1}, 3)

    assert isinstance(f, Shear)
    assert (f.basis.dim, f.basis.ambient_dim) == (2, 3)
    assert factor_to_dict(f)["basis"] == [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]


def test_decomposition_survives_json_exactly() -> None:
    space = Space.euclidean(3)
    t = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 3.0], [1.0, 0.0, 1.0]])
    d = decompose_invertible(space, t)
    text = dumps(decomposition_to_dict(d))
    back = decomposition_from_dict(json.loads(text), 3)

    assert [f.kind for f in back.factors] == [FactorKind.ROTATIONAL, FactorKind.GENERAL_AXONAL, FactorKind.DIAGONAL_IN_BASIS]
    assert back.residual == d.residual
    np.testing.assert_array_equal(compose(space, back.factors), compose(space, d.factors))


def test_decomposition_accepts_bare_factor_list() -> None:
    d = decomposition_from_dict([{"kind": "scalar", "c": -1}, {"kind": "reflectional", "negated": [1, 0]}], 2)
    assert d.convention == CONVENTION
    assert [f.kind for f in d.factors] == [FactorKind.SCALAR, FactorKind.REFLECTIONAL]
    assert d.residual == 0.0


def test_document_with_decomposition_round_trips(tmp_path: Path) -> None:
    space = Space.euclidean(3)
    t = -np.eye(3)
    doc = Document(dim=3, matrix=t, decomposition=decompose_orthogonal(space, t))
    path = tmp_path / "doc.json"
    doc.save(path)
    back = Document.load(path)

    assert isinstance(back.decomposition, Decomposition)
    assert len(back.decomposition.factors) == len(doc.decomposition.factors)
    assert json.loads(path.read_text(encoding="utf-8"))["decomposition"]["convention"] == "apply-left-to-right"


def test_dumps_is_ascii_and_indented() -> None:
    text = dumps({"note": "é", "x": 0.1})
    assert text == '{\n  "note": "\\u00e9",\n  "x": 0.1\n}\n'
