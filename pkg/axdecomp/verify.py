"""axdecomp.verify

Certificate checking, seeded instance generators and a closed-form oracle for dimensions 2 and 3.

`check_decomposition` never raises: every failure becomes a `Violation(name, measured,
threshold)` in the returned `CheckReport`. Checks, in order:
- each factor materializes and passes its own classifier (`factor[i].<kind>`)
- recomposition residual against `tol.accept` (`residual`)
- determinant bookkeeping: product of factor determinants vs `det T` (`determinant`)
- claim structure (`structure.*`):
  - invertible: exactly `[rotational, general_axonal, diagonal_in_basis]`, positive entries
  - conformal: planar factors then exactly one trailing scalar
  - orthogonal: planar factors only
  - conformal and orthogonal: at most `max(n - 1, 1)` planar factors, at most one reflection,
    and an odd reflection count exactly when `det T` and the scalar part differ in sign

Generators draw from `numpy.random.default_rng(seed)` (PCG64, a splittable 64-bit generator), so
a seed reproduces the same instance on any platform with the same numpy. Kinds:
- `invertible`: standard normal entries, redrawn until the 2-norm condition number is below 1e6.
- `orthogonal`: QR of a standard normal matrix in G-orthonormal coordinates, pulled back to the
  standard coordinates; with probability 1/2 one column is negated so both determinant signs occur.
- `conformal`: `c Q` with `c` uniform in [0.2, 5].
- `equimodular_basis`: normal rows (condition below 1e6) rescaled to one common G-norm.
- `axonal_witness`: an equimodular `B`, rotated toward its axis to a random admissible angle
  (kept 0.2 away from 0, pi/2 and pi), optionally times a random non-zero scalar; the matrix maps
  `B` onto that image. In dimension 1 it is a random non-zero scalar.

`oracle_small_dim` works in G-orthonormal coordinates `Q~ = B^T G T B`:
- n = 2, det +1: rotation by `atan2(Q~[1,0], Q~[0,0])`; det -1: a reflection with negated line
  `(-sin h, cos h)`, `h = atan2(Q~[1,0], Q~[0,0]) / 2`.
- n = 3: axis-angle of the det +1 part `P` (`P = Q~` or `-Q~`). The angle is
  `atan2(|s|, (tr P - 1) / 2)` with `s` the axis vector of the skew part; the axis is `s / |s|`
  for angles up to pi/2 and the dominant column of the symmetric part otherwise. For det -1,
  `Q~ = H_k o Rot(theta + pi)` about the same axis `k`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .basis_axis import is_equimodular
from .decompose import Decomposition, compose
from .operators import (
    PLANAR_KINDS,
    DiagonalInBasis,
    Factor,
    FactorKind,
    Reflectional,
    Rotational,
    Scalar,
    factor_det,
    is_axonal_witness,
    is_conformal,
    is_orthogonal,
    is_reflectional,
    is_rotational,
    materialize,
    rotate_basis_toward_axis,
    validate_factor,
)
from .space import (
    DEFAULT_TOLERANCE,
    Basis,
    DimensionMismatchError,
    NumericalBreakdownError,
    PreconditionError,
    SingularMatrixError,
    Space,
    Tolerance,
    as_matrix,
    det,
    norm,
    orthonormal_basis,
    relative_residual,
)

MAX_CONDITION = 1e6
ANGLE_MARGIN = 0.2


class Claim(str, Enum):
    INVERTIBLE = "invertible"
    CONFORMAL = "conformal"
    ORTHOGONAL = "orthogonal"


class InstanceKind(str, Enum):
    INVERTIBLE = "invertible"
    ORTHOGONAL = "orthogonal"
    CONFORMAL = "conformal"
    EQUIMODULAR_BASIS = "equimodular_basis"
    AXONAL_WITNESS = "axonal_witness"


@dataclass(frozen=True)
class Violation:
    name: str
    measured: float
    threshold: float


@dataclass
class CheckReport:
    residual: float
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, object]:
        return {
            "passed": self.passed,
            "residual": self.residual,
            "violations": [{"name": v.name, "measured": v.measured, "threshold": v.threshold} for v in self.violations],
        }


@dataclass(frozen=True, eq=False)
class Instance:
    kind: InstanceKind
    matrix: np.ndarray | None = None
    basis: Basis | None = None
    scale: float | None = None


def recompose(space: Space, d: Decomposition, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    return compose(space, d.factors, tol)


def _classifier_ok(space: Space, f: Factor, m: np.ndarray, tol: Tolerance) -> bool:
    if isinstance(f, Rotational):
        return is_rotational(space, m, tol)
    if isinstance(f, Reflectional):
        return is_reflectional(space, m, tol)
    return True


def _check_structure(space: Space, target: np.ndarray, factors: list[Factor], claim: Claim) -> list[Violation]:
    kinds = [f.kind for f in factors]
    out: list[Violation] = []
    if claim == Claim.INVERTIBLE:
        expected = [FactorKind.ROTATIONAL, FactorKind.GENERAL_AXONAL, FactorKind.DIAGONAL_IN_BASIS]
        if kinds != expected:
            out.append(Violation("structure.factor_sequence", float(len(kinds)), float(len(expected))))
        for f in factors:
            if isinstance(f, DiagonalInBasis) and float(np.min(f.entries)) <= 0.0:
                out.append(Violation("structure.diagonal_positive", float(np.min(f.entries)), 0.0))
        return out

    planar = [f for f in factors if f.kind in PLANAR_KINDS]
    body = factors
    if claim == Claim.CONFORMAL:
        scalars = sum(1 for k in kinds if k == FactorKind.SCALAR)
        if scalars != 1 or not kinds or kinds[-1] != FactorKind.SCALAR:
            out.append(Violation("structure.scalar_count", float(scalars), 1.0))
        body = factors[:-1] if kinds and kinds[-1] == FactorKind.SCALAR else factors
    stray = sum(1 for f in body if f.kind not in PLANAR_KINDS)
    if stray:
        out.append(Violation("structure.non_planar_factor", float(stray), 0.0))

    bound = max(space.dim - 1, 1)
    if len(planar) > bound:
        out.append(Violation("structure.planar_count", float(len(planar)), float(bound)))
    reflections = sum(1 for k in kinds if k == FactorKind.REFLECTIONAL)
    if reflections > 1:
        out.append(Violation("structure.reflection_count", float(reflections), 1.0))
    # A negative scalar carries the sign of det in odd dimension (dimension 1 conformal output).
    scalar_sign = math.prod(math.copysign(1.0, f.c) ** space.dim for f in factors if isinstance(f, Scalar))
    negative = det(space, target) * scalar_sign < 0.0
    if (reflections % 2 == 1) != negative:
        out.append(Violation("structure.reflection_parity", float(reflections), float(negative)))
    return out


def check_decomposition(
    space: Space,
    t: np.ndarray,
    d: Decomposition,
    claim: Claim | str,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    claim = Claim(claim)
    try:
        target = as_matrix(space, t)
    except DimensionMismatchError:
        return CheckReport(residual=math.inf, violations=[Violation("matrix.shape", math.nan, float(space.dim))])

    violations: list[Violation] = []
    product = np.eye(space.dim)
    malformed = False
    for i, f in enumerate(d.factors):
        try:
            validate_factor(space, f, tol)
            m = materialize(space, f, tol)
        except (PreconditionError, DimensionMismatchError, SingularMatrixError, NumericalBreakdownError):
            violations.append(Violation(f"factor[{i}].{f.kind.value}", 1.0, 0.0))
            malformed = True
            continue
        if not _classifier_ok(space, f, m, tol):
            violations.append(Violation(f"factor[{i}].{f.kind.value}", 1.0, 0.0))
        product = m @ product

    residual = math.inf if malformed else relative_residual(target, product)
    if residual > tol.accept:
        violations.append(Violation("residual", residual, tol.accept))

    if not malformed:
        expected = det(space, target)
        got = float(np.prod([factor_det(space, f, tol) for f in d.factors])) if d.factors else 1.0
        if abs(got - expected) > tol.accept * abs(expected) + tol.abs:
            violations.append(Violation("determinant", got, expected))

    violations.extend(_check_structure(space, target, list(d.factors), claim))
    return CheckReport(residual=residual, violations=violations)


def _random_basis(space: Space, rng: np.random.Generator) -> np.ndarray:
    while True:
        m = rng.standard_normal((space.dim, space.dim))
        if np.linalg.cond(m) < MAX_CONDITION:
            return m


def _random_orthogonal(space: Space, rng: np.random.Generator) -> np.ndarray:
    b = orthonormal_basis(space).columns
    q, r = np.linalg.qr(rng.standard_normal((space.dim, space.dim)))
    q = q * np.where(np.diag(r) < 0.0, -1.0, 1.0)
    if rng.random() < 0.5:
        q[:, 0] = -q[:, 0]
    # B Q B^{-1} is G-orthogonal because B^T G B = I.
    return b @ q @ np.linalg.inv(b)


def _random_equimodular(space: Space, rng: np.random.Generator) -> Basis:
    rows = _random_basis(space, rng)
    length = float(rng.uniform(0.5, 3.0))
    norms = np.array([norm(space, v) for v in rows])
    return Basis(vectors=rows * (length / norms)[:, None])


def _admissible_angle(rng: np.random.Generator) -> float:
    lo, hi = ANGLE_MARGIN, math.pi / 2 - ANGLE_MARGIN
    phi = float(rng.uniform(lo, hi))
    return phi if rng.random() < 0.5 else math.pi - phi


def generate(space: Space, kind: InstanceKind | str, seed: int, tol: Tolerance = DEFAULT_TOLERANCE) -> Instance:
    kind = InstanceKind(kind)
    rng = np.random.default_rng(seed)
    if kind == InstanceKind.INVERTIBLE:
        return Instance(kind=kind, matrix=_random_basis(space, rng))
    if kind == InstanceKind.ORTHOGONAL:
        return Instance(kind=kind, matrix=_random_orthogonal(space, rng))
    if kind == InstanceKind.CONFORMAL:
        c = float(rng.uniform(0.2, 5.0))
        return Instance(kind=kind, matrix=c * _random_orthogonal(space, rng), scale=c)
    if kind == InstanceKind.EQUIMODULAR_BASIS:
        return Instance(kind=kind, basis=_random_equimodular(space, rng))

    basis = _random_equimodular(space, rng)
    if space.dim == 1:
        c = float(rng.uniform(0.5, 2.0)) * (1.0 if rng.random() < 0.5 else -1.0)
        return Instance(kind=kind, matrix=np.array([[c]]), basis=basis, scale=c)
    target = rotate_basis_toward_axis(space, basis, _admissible_angle(rng), tol)
    s = 1.0
    if rng.random() < 0.5:
        s = float(rng.uniform(0.5, 2.0)) * (1.0 if rng.random() < 0.5 else -1.0)
    matrix = (s * target.columns) @ np.linalg.inv(basis.columns)
    return Instance(kind=kind, matrix=matrix, basis=basis, scale=s)


def _oracle_two(coords: np.ndarray) -> list[tuple[str, np.ndarray, np.ndarray | None, float]]:
    h = math.atan2(coords[1, 0], coords[0, 0])
    if np.linalg.det(coords) > 0.0:
        return [("rot", np.array([1.0, 0.0]), np.array([0.0, 1.0]), h)]
    return [("refl", np.array([-math.sin(h / 2.0), math.cos(h / 2.0)]), None, 0.0)]


def _axis_angle(p: np.ndarray) -> tuple[np.ndarray, float]:
    s = 0.5 * np.array([p[2, 1] - p[1, 2], p[0, 2] - p[2, 0], p[1, 0] - p[0, 1]])
    cos = (float(np.trace(p)) - 1.0) / 2.0
    sin = float(np.linalg.norm(s))
    theta = math.atan2(sin, cos)
    if cos >= 0.0:
        if sin == 0.0:
            return np.array([0.0, 0.0, 1.0]), 0.0
        return s / sin, theta
    # kk^T = (sym(P) - cos I) / (1 - cos), well conditioned away from theta = 0.
    outer = (0.5 * (p + p.T) - cos * np.eye(3)) / (1.0 - cos)
    j = int(np.argmax(np.diag(outer)))
    k = outer[:, j] / math.sqrt(outer[j, j])
    if float(k @ s) < 0.0:
        k = -k
    return k / np.linalg.norm(k), theta


def _oracle_three(coords: np.ndarray) -> list[tuple[str, np.ndarray, np.ndarray | None, float]]:
    negative = np.linalg.det(coords) < 0.0
    k, theta = _axis_angle(-coords if negative else coords)
    a = np.eye(3)[int(np.argmin(np.abs(k)))]
    p = a - (a @ k) * k
    p = p / np.linalg.norm(p)
    q = np.cross(k, p)
    out: list[tuple[str, np.ndarray, np.ndarray | None, float]] = []
    if negative:
        out.append(("rot", p, q, theta + math.pi))
        out.append(("refl", k, None, 0.0))
    elif theta != 0.0:
        out.append(("rot", p, q, theta))
    return out


def oracle_small_dim(space: Space, t: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> Decomposition:
    target = as_matrix(space, t)
    if space.dim not in (2, 3):
        raise DimensionMismatchError(f"The closed-form oracle covers dimensions 2 and 3, got {space.dim}")
    if not is_orthogonal(space, target, tol):
        raise PreconditionError("Operator is not orthogonal")

    b = orthonormal_basis(space).columns
    coords = b.T @ space.gram @ target @ b
    raw = _oracle_two(coords) if space.dim == 2 else _oracle_three(coords)
    factors: list[Factor] = []
    for tag, u, v, theta in raw:
        if tag == "rot":
            factors.append(Rotational(plane_u=b @ u, plane_v=b @ v, theta=theta))
        else:
            factors.append(Reflectional(negated=b @ u))
    residual = relative_residual(target, compose(space, factors, tol))
    return Decomposition(factors=factors, residual=residual)


def is_instance_sound(space: Space, inst: Instance, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether a generated instance satisfies the predicate its kind claims."""
    if inst.kind == InstanceKind.INVERTIBLE:
        return bool(np.linalg.cond(inst.matrix) < MAX_CONDITION)
    if inst.kind == InstanceKind.ORTHOGONAL:
        return is_orthogonal(space, inst.matrix, tol)
    if inst.kind == InstanceKind.CONFORMAL:
        cert = is_conformal(space, inst.matrix, tol)
        return cert is not None and abs(cert.lambda_ - inst.scale**2) <= tol.accept * inst.scale**2
    if inst.kind == InstanceKind.EQUIMODULAR_BASIS:
        return bool(is_equimodular(space, inst.basis, tol))
    return is_axonal_witness(space, inst.matrix, inst.basis, tol)
