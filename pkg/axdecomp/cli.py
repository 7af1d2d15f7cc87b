"""axdecomp.cli

Command-line entrypoint: single JSON document in, single JSON document out.

Entry points
- `axdecomp.cli:main` (console script `axdecomp`)
- `python3 -m axdecomp ...` (delegates to this module)

Subcommands
- `axis INPUT`: axial vector, vertex angle and unit axis direction of the document's `basis`.
- `decompose INPUT --mode {invertible,conformal,orthogonal}`: factor the document's `matrix`;
  emits `{"convention", "factors", "residual"}`.
- `verify INPUT --claim {invertible,conformal,orthogonal}`: check the document's `decomposition`
  against its `matrix`; emits the report (`passed`, `residual`, `violations`).
- `generate --kind K --dim N --seed S [--gram-file F]`: emit a generated document.
- `classify INPUT`: every operator predicate for the document's `matrix` (`lambda` when conformal).
- `shear INPUT`: split the axonal witness (`matrix`, `basis`) as `A' o S`.

`INPUT` defaults to `-` (stdin); `--output` defaults to `-` (stdout).

Tolerance
`--tolerance R` builds `Tolerance.from_rel(R)`; without the flag the `AXDECOMP_TOLERANCE`
environment variable is used when set, else the library defaults.

Exit codes
- 0: success (and, for `verify`, the report passed)
- 1: `verify` found violations
- 2: usage or document errors (argparse exits with 2 itself)
- 3: degenerate input (dependent basis, singular system, numerical breakdown)
- 4: the operation's precondition failed; a JSON diagnostic
  `{"error": <exception class>, "message": <text>}` goes to stderr

Results go to stdout as JSON only; `[axdecomp]` progress lines go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .basis_axis import associated_cone, axial_vector
from .decompose import (
    CONVENTION,
    Decomposition,
    compose,
    decompose_conformal,
    decompose_invertible,
    decompose_orthogonal,
    factor_axonal_shear,
)
from .document import Document, DocumentError, decomposition_to_dict, factor_to_dict, write_json
from .operators import (
    axonal_kind,
    is_angle_preserving,
    is_conformal,
    is_orthogonal,
    is_reflectional,
    is_rotational,
)
from .space import (
    DEFAULT_TOLERANCE,
    NumericalBreakdownError,
    PreconditionError,
    SingularMatrixError,
    Space,
    Tolerance,
    as_matrix,
    det,
    rank,
    relative_residual,
)
from .verify import Claim, InstanceKind, check_decomposition, generate

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_PRECONDITION = 4

_DECOMPOSERS: dict[str, Callable[[Space, np.ndarray, Tolerance], Decomposition]] = {
    "invertible": decompose_invertible,
    "conformal": decompose_conformal,
    "orthogonal": decompose_orthogonal,
}


class _UsageError(Exception):
    pass


def _log(msg: str) -> None:
    print(f"[axdecomp] {msg}", file=sys.stderr)


def _diagnose(exc: Exception) -> None:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)


def _int_at_least(raw: str, minimum: int) -> int:
    try:
        value = int(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {raw!r}") from exc
    if value < minimum:
        raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
    return value


def _positive_int(raw: str) -> int:
    return _int_at_least(raw, 1)


def _non_negative_int(raw: str) -> int:
    # numpy.random.default_rng rejects negative seeds.
    return _int_at_least(raw, 0)


def _tolerance(args: argparse.Namespace) -> Tolerance:
    raw = args.tolerance if args.tolerance is not None else os.environ.get("AXDECOMP_TOLERANCE")
    if raw is None or raw == "":
        return DEFAULT_TOLERANCE
    try:
        return Tolerance.from_rel(float(raw))
    except ValueError as exc:
        raise _UsageError(f"Invalid tolerance {raw!r}: {exc}") from exc


def _require(doc: Document, *fields: str) -> None:
    missing = [f for f in fields if getattr(doc, f) is None]
    if missing:
        raise _UsageError(f"Document is missing: {', '.join(missing)}")


def _cmd_axis(args: argparse.Namespace, tol: Tolerance) -> int:
    doc = Document.load(args.input)
    _require(doc, "basis")
    space = doc.space
    try:
        cert = axial_vector(space, doc.basis, tol)
        cone = associated_cone(space, doc.basis, tol)
    except (SingularMatrixError, NumericalBreakdownError) as exc:
        _log(f"axis: degenerate basis ({exc})")
        return EXIT_DEGENERATE
    write_json(
        {"axial": cert.axial.tolist(), "vertex_angle": cert.vertex_angle, "axis_dir": cone.axis_dir.tolist()},
        args.output,
    )
    _log(f"axis dim={space.dim} vertex_angle={cert.vertex_angle:.6g}")
    return EXIT_OK


def _cmd_decompose(args: argparse.Namespace, tol: Tolerance) -> int:
    doc = Document.load(args.input)
    _require(doc, "matrix")
    space = doc.space
    try:
        d = _DECOMPOSERS[args.mode](space, doc.matrix, tol)
    except (PreconditionError, SingularMatrixError) as exc:
        _diagnose(exc)
        return EXIT_PRECONDITION
    except NumericalBreakdownError as exc:
        _log(f"decompose: numerical breakdown ({exc})")
        return EXIT_DEGENERATE
    write_json(decomposition_to_dict(d), args.output)
    _log(f"decompose mode={args.mode} dim={space.dim} factors={len(d.factors)} residual={d.residual:.3e}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, tol: Tolerance) -> int:
    doc = Document.load(args.input)
    _require(doc, "matrix", "decomposition")
    report = check_decomposition(doc.space, doc.matrix, doc.decomposition, args.claim, tol)
    write_json(report.to_dict(), args.output)
    _log(f"verify claim={args.claim} passed={report.passed} violations={len(report.violations)}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _load_gram(path: str, dim: int) -> np.ndarray:
    try:
        raw: Any = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentError(f"Cannot read gram file {path}: {exc}") from exc
    if isinstance(raw, dict):
        raw = raw.get("gram")
    try:
        gram = np.asarray(raw, dtype=float) if raw is not None else None
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"Gram file is not a numeric array: {exc}") from exc
    if gram is None or gram.shape != (dim, dim):
        raise DocumentError(f"Gram file must hold a {dim}x{dim} array (bare or under 'gram')")
    return gram


def _cmd_generate(args: argparse.Namespace, tol: Tolerance) -> int:
    gram = _load_gram(args.gram_file, args.dim) if args.gram_file else None
    try:
        space = Space.euclidean(args.dim) if gram is None else Space(dim=args.dim, gram=gram)
    except ValueError as exc:
        raise DocumentError(f"Invalid gram: {exc}") from exc
    inst = generate(space, args.kind, args.seed, tol)
    extra: dict[str, Any] = {"kind": inst.kind.value, "seed": args.seed}
    if inst.scale is not None:
        extra["scale"] = inst.scale
    doc = Document(dim=args.dim, gram=gram, matrix=inst.matrix, basis=inst.basis, extra=extra)
    doc.save(args.output)
    _log(f"generate kind={inst.kind.value} dim={args.dim} seed={args.seed}")
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace, tol: Tolerance) -> int:
    doc = Document.load(args.input)
    _require(doc, "matrix")
    space = doc.space
    m = as_matrix(space, doc.matrix)
    cert = is_conformal(space, m, tol)
    d = det(space, m)
    result = {
        "invertible": rank(space, m, tol) == space.dim,
        "orthogonal": is_orthogonal(space, m, tol),
        "rotational": is_rotational(space, m, tol),
        "reflectional": is_reflectional(space, m, tol),
        "conformal": {"lambda": cert.lambda_} if cert is not None else False,
        "angle_preserving": is_angle_preserving(space, m, tol),
        "det": d,
    }
    write_json(result, args.output)
    _log(f"classify dim={space.dim} orthogonal={result['orthogonal']} conformal={cert is not None}")
    return EXIT_OK


def _cmd_shear(args: argparse.Namespace, tol: Tolerance) -> int:
    doc = Document.load(args.input)
    _require(doc, "matrix", "basis")
    space = doc.space
    try:
        rest, shear = factor_axonal_shear(space, doc.matrix, doc.basis, tol)
        kind = axonal_kind(space, doc.matrix, doc.basis, tol)
    except (PreconditionError, SingularMatrixError) as exc:
        _diagnose(exc)
        return EXIT_PRECONDITION
    except NumericalBreakdownError as exc:
        _log(f"shear: numerical breakdown ({exc})")
        return EXIT_DEGENERATE
    residual = relative_residual(as_matrix(space, doc.matrix), compose(space, [shear, rest], tol))
    write_json(
        {
            "convention": CONVENTION,
            "factors": [factor_to_dict(shear), factor_to_dict(rest)],
            "residual": residual,
            "kind": kind,
        },
        args.output,
    )
    _log(f"shear dim={space.dim} delta={shear.delta:.6g} kind={kind}")
    return EXIT_OK


_COMMANDS: dict[str, Callable[[argparse.Namespace, Tolerance], int]] = {
    "axis": _cmd_axis,
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "generate": _cmd_generate,
    "classify": _cmd_classify,
    "shear": _cmd_shear,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="axdecomp",
        description="Axial vectors, axonal operators and planar-rotation factorizations.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, *, with_input: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        if with_input:
            sp.add_argument("input", nargs="?", default="-", help="Input JSON document ('-' for stdin, the default).")
        sp.add_argument("-o", "--output", default="-", help="Output path ('-' for stdout, the default).")
        sp.add_argument(
            "--tolerance",
            default=None,
            help="Relative tolerance; scales every threshold proportionally (default: $AXDECOMP_TOLERANCE or 1e-9).",
        )
        return sp

    add("axis", "Axial vector, vertex angle and axis direction of the document's basis.")
    dp = add("decompose", "Factor the document's matrix.")
    dp.add_argument("--mode", choices=sorted(_DECOMPOSERS), default="invertible", help="Which factorization to run.")
    vp = add("verify", "Check the document's decomposition against its matrix.")
    vp.add_argument("--claim", choices=[c.value for c in Claim], required=True, help="Claimed factorization type.")
    gp = add("generate", "Emit a seeded random instance as a document.", with_input=False)
    gp.add_argument("--kind", choices=[k.value for k in InstanceKind], required=True)
    gp.add_argument("--dim", type=_positive_int, required=True)
    gp.add_argument("--seed", type=_non_negative_int, default=0)
    gp.add_argument("--gram-file", default=None, help="JSON file holding the metric (bare array or under 'gram').")
    add("classify", "Run every operator predicate on the document's matrix.")
    add("shear", "Split the axonal witness (matrix, basis) into general axonal and shear factors.")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    try:
        tol = _tolerance(args)
        return _COMMANDS[args.command](args, tol)
    except (DocumentError, _UsageError) as exc:
        _log(f"{args.command}: {exc}")
        return EXIT_USAGE
