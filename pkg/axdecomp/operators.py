"""axdecomp.operators

The operator taxonomy: factor values, their matrices, and the classifiers that recognize them.

Factor kinds (`FactorKind`, the `kind` string used in JSON)
- `Rotational(plane_u, plane_v, theta)`: rotation by `theta` inside the plane spanned by the
  G-orthonormal pair `(u, v)` (`u -> cos(theta) u + sin(theta) v`), identity on the orthogonal
  complement. `theta = 0` is the identity; in dimension 1 that is the only rotational operator and
  it is stored with `plane_v = 0`.
- `Reflectional(negated)`: -1 on the line of the unit vector `negated`, +1 on its complement.
  Any plane through that line gives the same operator, so only the line is stored.
- `Scalar(c)`: `c I`, `c != 0`.
- `DiagonalInBasis(basis, entries)`: scales `basis[i]` by `entries[i]`.
- `Shear(basis, delta)`: the k-shear that rotates every vector of the equimodular `basis` by the
  common angle `delta` toward the basis axis (inside the plane each vector spans with the axis),
  so the common vertex angle goes from `theta0` to `theta0 - delta`. The basis holds
  2 <= k <= n vectors spanning a subspace W; the shear is the identity on the G-orthogonal
  complement of W.
- `GeneralAxonal(matrix, witness_in, witness_out)`: an explicit matrix together with the pair of
  equimodular bases with a common axis that certifies it is axonal.

Matrices
`materialize` turns any factor into the n x n matrix acting on standard coordinates. With
`P_x = x x^T G` (the G-orthogonal projector onto span{x}):
- rotational:   `I + (cos t - 1)(P_u + P_v) + sin t (v u^T G - u v^T G)`
- reflectional: `I - 2 n n^T G`
- diagonal:     `B diag(entries) B^{-1}` with the basis vectors as the columns of `B`
- shear:        `[V | C] [B | C]^{-1}` with `V` the rotated basis (`rotate_basis_toward_axis`)
                and `C` a G-orthonormal basis of the complement of W (empty when k = n)
`materialize` checks the cheap structural invariants (shapes, unit/orthonormal payload vectors,
non-zero scalars) and raises `PreconditionError` for a malformed factor. `validate_factor` adds
the geometric ones (the axonal witness of a `GeneralAxonal`, equimodularity of a `Shear` basis).

Classifiers (never raise for well-shaped input)
- `is_orthogonal`:   `||M^T G M - G||_inf <= rel ||G||_inf`.
- `is_conformal`:    returns `ConformalityCertificate(lambda_)` when `M^T G M = lambda G`, else None.
- `is_rotational`:   orthogonal, `rank(M - I) <= 2`, `det M = 1` (identity included).
- `is_reflectional`: orthogonal, `rank(M - I) = 1`, `det M = -1`.
- `is_axonal_witness(M, B)`: B and M B equimodular with equal axes.
`rank(M - I)` is thresholded relative to `max|M|` rather than `max|M - I|`: a tiny rotation's
`M - I` is dominated by cancellation noise at its own scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Union

import numpy as np

from .basis_axis import (
    associated_cone,
    axial_vector,
    axis_of,
    cones_equal,
    is_equimodular,
    lines_equal,
    require_basis,
    require_independent,
)
from .space import (
    DEFAULT_TOLERANCE,
    Basis,
    DegenerateBasisError,
    NumericalBreakdownError,
    PreconditionError,
    SingularMatrixError,
    Space,
    Tolerance,
    ZeroVectorError,
    angle,
    as_matrix,
    as_vector,
    det,
    inner,
    inverse,
    norm,
    orthonormal_basis,
    rank,
)


class FactorKind(str, Enum):
    ROTATIONAL = "rotational"
    REFLECTIONAL = "reflectional"
    SCALAR = "scalar"
    DIAGONAL_IN_BASIS = "diagonal_in_basis"
    SHEAR = "shear"
    GENERAL_AXONAL = "general_axonal"


@dataclass(frozen=True, eq=False)
class Rotational:
    kind: ClassVar[FactorKind] = FactorKind.ROTATIONAL
    plane_u: np.ndarray
    plane_v: np.ndarray
    theta: float

    @property
    def is_identity(self) -> bool:
        return self.theta == 0.0


@dataclass(frozen=True, eq=False)
class Reflectional:
    kind: ClassVar[FactorKind] = FactorKind.REFLECTIONAL
    negated: np.ndarray


@dataclass(frozen=True)
class Scalar:
    kind: ClassVar[FactorKind] = FactorKind.SCALAR
    c: float


@dataclass(frozen=True, eq=False)
class DiagonalInBasis:
    kind: ClassVar[FactorKind] = FactorKind.DIAGONAL_IN_BASIS
    basis: Basis
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class Shear:
    kind: ClassVar[FactorKind] = FactorKind.SHEAR
    basis: Basis
    delta: float


@dataclass(frozen=True, eq=False)
class GeneralAxonal:
    kind: ClassVar[FactorKind] = FactorKind.GENERAL_AXONAL
    matrix: np.ndarray
    witness_in: Basis
    witness_out: Basis


Factor = Union[Rotational, Reflectional, Scalar, DiagonalInBasis, Shear, GeneralAxonal]
PLANAR_KINDS = (FactorKind.ROTATIONAL, FactorKind.REFLECTIONAL)


@dataclass(frozen=True)
class ConformalityCertificate:
    lambda_: float


def identity_rotation(space: Space) -> Rotational:
    b = orthonormal_basis(space).vectors
    if space.dim == 1:
        return Rotational(plane_u=b[0], plane_v=np.zeros(1), theta=0.0)
    return Rotational(plane_u=b[0], plane_v=b[1], theta=0.0)


def _projector(space: Space, x: np.ndarray) -> np.ndarray:
    return np.outer(x, space.gram @ x)


def _check_rotational(space: Space, f: Rotational, tol: Tolerance) -> tuple[np.ndarray, np.ndarray]:
    u = as_vector(space, f.plane_u)
    v = as_vector(space, f.plane_v)
    if not math.isfinite(f.theta):
        raise PreconditionError("Rotational angle must be finite")
    if space.dim == 1:
        if f.theta != 0.0:
            raise PreconditionError("In dimension 1 only the identity (theta = 0) is rotational")
        return u, v
    if (
        abs(inner(space, u, u) - 1.0) > tol.rel
        or abs(inner(space, v, v) - 1.0) > tol.rel
        or abs(inner(space, u, v)) > tol.rel
    ):
        raise PreconditionError("Rotational plane vectors are not G-orthonormal")
    return u, v


def _check_reflectional(space: Space, f: Reflectional, tol: Tolerance) -> np.ndarray:
    n = as_vector(space, f.negated)
    if abs(norm(space, n) - 1.0) > tol.rel:
        raise PreconditionError("Reflectional negated vector is not a unit vector")
    return n


def materialize(space: Space, f: Factor, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    eye = np.eye(space.dim)
    if isinstance(f, Rotational):
        u, v = _check_rotational(space, f, tol)
        if f.theta == 0.0:
            return eye
        g = space.gram
        c, s = math.cos(f.theta), math.sin(f.theta)
        return eye + (c - 1.0) * (_projector(space, u) + _projector(space, v)) + s * (
            np.outer(v, g @ u) - np.outer(u, g @ v)
        )
    if isinstance(f, Reflectional):
        n = _check_reflectional(space, f, tol)
        return eye - 2.0 * _projector(space, n)
    if isinstance(f, Scalar):
        if f.c == 0.0 or not math.isfinite(f.c):
            raise PreconditionError("Scalar factor must be a non-zero finite real")
        return f.c * eye
    if isinstance(f, DiagonalInBasis):
        entries = as_vector(space, f.entries)
        if np.any(entries == 0.0):
            raise PreconditionError("DiagonalInBasis entries must be non-zero")
        if not f.basis.is_spanning:
            raise PreconditionError("DiagonalInBasis needs a basis of the whole space")
        b = f.basis.columns
        try:
            return b @ np.diag(entries) @ inverse(space, b, tol)
        except SingularMatrixError as exc:
            raise PreconditionError(f"DiagonalInBasis basis is singular: {exc}") from exc
    if isinstance(f, Shear):
        if f.delta == 0.0:
            return eye
        rotated = rotate_basis_toward_axis(space, f.basis, _shear_target_angle(space, f.basis, f.delta, tol), tol)
        return _map_fixing_complement(space, f.basis, rotated, tol)
    if isinstance(f, GeneralAxonal):
        return as_matrix(space, f.matrix).copy()
    raise PreconditionError(f"Unknown factor type: {type(f).__name__}")


def _map_fixing_complement(space: Space, basis: Basis, image: Basis, tol: Tolerance) -> np.ndarray:
    """Matrix sending `basis[i]` to `image[i]` and fixing the G-orthogonal complement of the span."""
    if basis.is_spanning:
        return image.columns @ inverse(space, basis.columns, tol)
    frame = orthonormal_basis(space).columns
    coords = frame.T @ space.gram @ basis.columns
    q, _ = np.linalg.qr(coords, mode="complete")
    complement = frame @ q[:, basis.dim :]
    source = np.column_stack([basis.columns, complement])
    return np.column_stack([image.columns, complement]) @ inverse(space, source, tol)


def validate_factor(space: Space, f: Factor, tol: Tolerance = DEFAULT_TOLERANCE) -> None:
    """Raise `PreconditionError` unless `f` satisfies its kind's invariants."""
    materialize(space, f, tol)
    if isinstance(f, DiagonalInBasis):
        try:
            require_basis(space, f.basis, tol)
        except DegenerateBasisError as exc:
            raise PreconditionError(f"DiagonalInBasis basis is degenerate: {exc}") from exc
    elif isinstance(f, Shear):
        if not is_equimodular(space, f.basis, tol):
            raise PreconditionError("Shear basis is not equimodular")
        try:
            require_independent(space, f.basis, tol)
        except DegenerateBasisError as exc:
            raise PreconditionError(f"Shear basis is degenerate: {exc}") from exc
    elif isinstance(f, GeneralAxonal):
        image = f.witness_in.image(as_matrix(space, f.matrix))
        scale = max(1.0, float(np.max(np.abs(f.witness_out.vectors))))
        if float(np.max(np.abs(image.vectors - f.witness_out.vectors))) > tol.accept * scale:
            raise PreconditionError("GeneralAxonal matrix does not map witness_in onto witness_out")
        if not is_axonal_witness(space, f.matrix, f.witness_in, tol):
            raise PreconditionError("GeneralAxonal witness bases are not equimodular with a common axis")


def _inf_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, ord=np.inf))


def is_orthogonal(space: Space, m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    mat = as_matrix(space, m)
    g = space.gram
    return _inf_norm(mat.T @ g @ mat - g) <= tol.rel * _inf_norm(g)


def is_conformal(space: Space, m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> ConformalityCertificate | None:
    mat = as_matrix(space, m)
    b1 = orthonormal_basis(space)[0]
    image = mat @ b1
    lam = inner(space, image, image)
    if not (lam > tol.abs) or not math.isfinite(lam):
        return None
    g = space.gram
    if _inf_norm(mat.T @ g @ mat - lam * g) <= tol.rel * lam * _inf_norm(g):
        return ConformalityCertificate(lambda_=lam)
    return None


def _rank_from_identity(space: Space, m: np.ndarray, tol: Tolerance) -> int:
    return rank(space, m - np.eye(space.dim), tol, scale=max(1.0, float(np.max(np.abs(m)))))


def is_rotational(space: Space, m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    mat = as_matrix(space, m)
    if space.dim == 1:
        return abs(float(mat[0, 0]) - 1.0) <= tol.rel
    if not is_orthogonal(space, mat, tol):
        return False
    return _rank_from_identity(space, mat, tol) <= 2 and abs(det(space, mat) - 1.0) <= tol.rel


def is_reflectional(space: Space, m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    mat = as_matrix(space, m)
    if not is_orthogonal(space, mat, tol):
        return False
    return _rank_from_identity(space, mat, tol) == 1 and abs(det(space, mat) + 1.0) <= tol.rel


def is_angle_preserving(space: Space, m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Conformality checked through angles instead of the metric identity.

    Preserving the angles between all orthonormal pairs and between every pair of diagonals
    `b_i + b_j`, `b_i - b_j` pins down `M^T G M` up to a positive scalar.
    """
    mat = as_matrix(space, m)
    basis = orthonormal_basis(space).vectors
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    for i in range(space.dim):
        for j in range(i + 1, space.dim):
            pairs.append((basis[i], basis[j]))
            pairs.append((basis[i] + basis[j], basis[i] - basis[j]))
    bound = math.sqrt(tol.rel)
    try:
        if space.dim == 1:
            return norm(space, mat @ basis[0]) > tol.abs
        for x, y in pairs:
            if abs(angle(space, mat @ x, mat @ y, tol) - angle(space, x, y, tol)) > bound:
                return False
    except ZeroVectorError:
        return False
    return True


def is_axonal_witness(space: Space, m: np.ndarray, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    mat = as_matrix(space, m)
    image = basis.image(mat)
    try:
        if not is_equimodular(space, basis, tol) or not is_equimodular(space, image, tol):
            return False
        return lines_equal(space, axis_of(space, basis, tol), axis_of(space, image, tol), tol)
    except (DegenerateBasisError, NumericalBreakdownError):
        return False


def axonal_kind(space: Space, m: np.ndarray, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> str | None:
    """"same_cone" or "distinct_cone" for an axonal witness pair, None otherwise."""
    if not is_axonal_witness(space, m, basis, tol):
        return None
    image = basis.image(as_matrix(space, m))
    same = cones_equal(space, associated_cone(space, basis, tol), associated_cone(space, image, tol), tol)
    return "same_cone" if same else "distinct_cone"


def check_admissible_angle(phi: float, tol: Tolerance = DEFAULT_TOLERANCE) -> None:
    if not math.isfinite(phi) or phi <= tol.rel or phi >= math.pi - tol.rel or abs(phi - math.pi / 2) <= tol.rel:
        raise PreconditionError(f"Angle {phi!r} is not in (0, pi) minus {{pi/2}}; the rotated vectors would be dependent")


def rotate_basis_toward_axis(space: Space, basis: Basis, phi: float, tol: Tolerance = DEFAULT_TOLERANCE) -> Basis:
    if basis.dim < 2:
        raise PreconditionError("Rotating toward the axis needs at least two vectors")
    if not is_equimodular(space, basis, tol):
        raise PreconditionError("Basis must be equimodular")
    check_admissible_angle(phi, tol)

    alpha = axial_vector(space, basis, tol).axial
    axis = alpha / norm(space, alpha)
    c, s = math.cos(phi), math.sin(phi)
    rotated = []
    for i, b in enumerate(basis.vectors):
        length = norm(space, b)
        w = b - inner(space, b, axis) * axis
        nw = norm(space, w)
        if nw <= tol.rel * length:
            raise NumericalBreakdownError(f"Basis vector {i} is parallel to its axis; no rotation plane")
        rotated.append(length * (c * axis + s * (w / nw)))
    return Basis(vectors=np.array(rotated))


def _shear_target_angle(space: Space, basis: Basis, delta: float, tol: Tolerance) -> float:
    if basis.dim < 2:
        raise PreconditionError("A shear needs at least two vectors")
    if not math.isfinite(delta):
        raise PreconditionError("Shear angle must be finite")
    target = axial_vector(space, basis, tol).vertex_angle - delta
    check_admissible_angle(target, tol)
    return target


def shear_of_basis(space: Space, basis: Basis, delta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> Shear:
    if not is_equimodular(space, basis, tol):
        raise PreconditionError("Shear basis must be equimodular")
    _shear_target_angle(space, basis, delta, tol)
    return Shear(basis=basis, delta=float(delta))


def factor_det(space: Space, f: Factor, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    if isinstance(f, Rotational):
        return 1.0
    if isinstance(f, Reflectional):
        return -1.0
    if isinstance(f, Scalar):
        return f.c**space.dim
    if isinstance(f, DiagonalInBasis):
        return float(np.prod(f.entries))
    return det(space, materialize(space, f, tol))
