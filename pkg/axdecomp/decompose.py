"""axdecomp.decompose

Constructive factorizations of operators into the factor kinds of `axdecomp.operators`.

Composition convention
A `Decomposition` stores factors in application order: `[F1, ..., Fk]` represents
`T = Fk o ... o F1` (F1 is applied first). `residual` is the relative Frobenius distance between
the recomposed product and the input, computed when the decomposition is built.

Invertible operators: T = D o A o R  (`decompose_invertible`)
1. Take the orthonormal basis `{u_i}` of the space and its images `v_i = T u_i`,
   `w_i = v_i / ||v_i||`.
2. `L1` = axis of `{u_i}`, `L2` = axis of `{w_i}`; `R` is the planar rotation carrying `L1` onto `L2`
   (`rotation_between_lines`).
3. `A` maps `R u_i -> w_i` and is stored with that witness pair; `D` scales `w_i` by `||v_i||`.
Output: `[R, A, D]`.

Conformal operators: T = D o Rf o R_{n-2} o ... o R_1  (`decompose_conformal`)
- n = 1: `[Scalar(T[0][0])]`.
- n = 2: with `c = sqrt(lambda)` and `Q = T / c`, a single rotation or reflection, then `Scalar(c)`.
- n >= 3, `Q` itself a single rotation or reflection (`rank(Q - I) <= 2`): that one factor, with
  the plane or line read off the right singular vectors of `Q - I`.
- n >= 3 otherwise: one level of the invertible construction on `Q = T / c` gives `R_1` and an orthogonal
  `A_1 = Q o R_1^{-1}` that maps the axial vector `gamma` of `{R_1 u_i}` to `+gamma` or `-gamma`.
  For `-gamma` a reflection `F` along `gamma` is recorded and `A_1` becomes `A_1 o F`, which fixes
  `gamma`. The restriction of `A_1` to the orthogonal complement of `gamma` is orthogonal of
  dimension n - 1; it is decomposed recursively (`decompose_orthogonal`) in an explicit
  orthonormal frame and every factor is lifted back (identity on `gamma`).
- The list `[R_1, F?, lifted..., Scalar(c)]` is put in normal form by `canonicalize` and padded
  with identity rotations (prepended) so that exactly n - 1 planar factors precede the scalar.

Orthogonal operators (`decompose_orthogonal`)
The conformal decomposition with the trailing scalar removed: a scalar within `rel` of 1 is
dropped; one within `rel` of -1 is rewritten as planar factors by `canonicalize`.

Normal form (`canonicalize`)
Input factors must be rotational, reflectional or scalar.
- Scalars are pulled out and multiplied; a negative product contributes the planar expansion of
  `-I` (pairs of pi-rotations, plus one reflection in odd dimension).
- A reflection right after a non-identity rotation whose plane contains its line fuses with it.
- Reflections move toward the end by conjugation: `H_u` followed by `R` equals `R` followed by
  `H_{R u}`.
- Consecutive reflections merge pairwise into the rotation by twice their angle in the plane of
  their lines (a pi-rotation for orthogonal lines).
Output: rotations, then at most one reflection, then the scalar if any. The product is unchanged.

Shear factorization (`factor_axonal_shear`)
For an axonal witness `(A, B)`: `S` is the shear of `B` that moves its vertex angle onto the cone of
`A B` (`delta = phi - psi`, where `psi` is the image's vertex angle measured against `B`'s own
oriented axis) and `A' = A o S^{-1}` maps `S B` onto `A B`; the two bases share a cone.

Diagnostics
With `AXDECOMP_TRACE` set, each recursion level logs a `[axdecomp]` line to stderr.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .basis_axis import Line, associated_cone, axial_vector, axis_of, cones_equal
from .operators import (
    PLANAR_KINDS,
    Factor,
    GeneralAxonal,
    DiagonalInBasis,
    Reflectional,
    Rotational,
    Scalar,
    Shear,
    identity_rotation,
    is_axonal_witness,
    is_conformal,
    is_orthogonal,
    is_reflectional,
    is_rotational,
    materialize,
    shear_of_basis,
)
from .space import (
    DEFAULT_TOLERANCE,
    Basis,
    NumericalBreakdownError,
    PreconditionError,
    Space,
    Tolerance,
    as_matrix,
    det,
    inner,
    inverse,
    norm,
    orthonormal_basis,
    rank,
    relative_residual,
)

CONVENTION = "apply-left-to-right"
IDENTITY_SNAP_ANGLE = 1e-12


def _trace(msg: str) -> None:
    if os.environ.get("AXDECOMP_TRACE"):
        print(f"[axdecomp] {msg}", file=sys.stderr)


@dataclass(frozen=True, eq=False)
class Decomposition:
    factors: list[Factor] = field(default_factory=list)
    residual: float = 0.0
    convention: str = CONVENTION


def compose(space: Space, factors: list[Factor], tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    product = np.eye(space.dim)
    for f in factors:
        product = materialize(space, f, tol) @ product
    return product


def _finish(space: Space, target: np.ndarray, factors: list[Factor], tol: Tolerance) -> Decomposition:
    residual = relative_residual(target, compose(space, factors, tol))
    if residual > tol.accept:
        raise NumericalBreakdownError(f"Recomposition residual {residual:.3e} exceeds {tol.accept:.1e}")
    return Decomposition(factors=list(factors), residual=residual)


def _unit(space: Space, x: np.ndarray) -> np.ndarray:
    return x / norm(space, x)


def _orthonormalize_against(space: Space, x: np.ndarray, unit: np.ndarray) -> np.ndarray:
    # Two passes; one is not enough when x is nearly parallel to unit.
    for _ in range(2):
        x = x - inner(space, x, unit) * unit
    return x


def _plane_partner(space: Space, d: np.ndarray) -> np.ndarray:
    """A unit vector G-orthogonal to the unit vector `d` (dimension >= 2)."""
    basis = orthonormal_basis(space).vectors
    least_aligned = min(basis, key=lambda b: abs(inner(space, b, d)))
    return _unit(space, _orthonormalize_against(space, least_aligned, d))


def rotation_between_lines(space: Space, first: Line, second: Line, tol: Tolerance = DEFAULT_TOLERANCE) -> Rotational:
    d1 = _unit(space, np.asarray(first.direction, dtype=float))
    d2 = _unit(space, np.asarray(second.direction, dtype=float))
    if space.dim == 1:
        return identity_rotation(space)
    cos = inner(space, d1, d2)
    if cos < 0.0:
        d2, cos = -d2, -cos
    raw = d2 - cos * d1
    theta = math.atan2(norm(space, raw), cos)
    if theta < IDENTITY_SNAP_ANGLE:
        return Rotational(plane_u=d1, plane_v=_plane_partner(space, d1), theta=0.0)
    q = _unit(space, _orthonormalize_against(space, raw, d1))
    return Rotational(plane_u=d1, plane_v=q, theta=theta)


def decompose_invertible(space: Space, t: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> Decomposition:
    target = as_matrix(space, t)
    inverse(space, target, tol)

    u = orthonormal_basis(space)
    images = target @ u.columns
    lengths = np.array([norm(space, images[:, i]) for i in range(space.dim)])
    w = Basis.from_columns(images / lengths)

    r = rotation_between_lines(space, axis_of(space, u, tol), axis_of(space, w, tol), tol)
    rotated = u.image(materialize(space, r, tol))
    a = GeneralAxonal(
        matrix=w.columns @ inverse(space, rotated.columns, tol),
        witness_in=rotated,
        witness_out=w,
    )
    if not is_axonal_witness(space, a.matrix, rotated, tol):
        raise NumericalBreakdownError("Middle factor failed the axonal witness check")
    d = DiagonalInBasis(basis=w, entries=lengths)
    _trace(f"invertible dim={space.dim} rotation={r.theta:.6g}")
    return _finish(space, target, [r, a, d], tol)


def _two_dim_factor(space: Space, q: np.ndarray) -> Factor:
    b = orthonormal_basis(space)
    coords = b.columns.T @ space.gram @ q @ b.columns
    if det(space, q) > 0.0:
        theta = math.atan2(coords[1, 0], coords[0, 0])
        if abs(theta) < IDENTITY_SNAP_ANGLE:
            theta = 0.0
        return Rotational(plane_u=b[0], plane_v=b[1], theta=theta)
    # -1 eigendirection: right singular vector of Q + I for its smallest singular value.
    _, _, vt = np.linalg.svd(coords + np.eye(2))
    return Reflectional(negated=b.columns @ vt[-1])


def _single_planar_factor(space: Space, q: np.ndarray, tol: Tolerance) -> Factor | None:
    """The one rotation or reflection equal to the orthogonal `q`, or None if it takes more."""
    if is_reflectional(space, q, tol):
        rotating = False
    elif is_rotational(space, q, tol):
        rotating = True
    else:
        return None
    b = orthonormal_basis(space).columns
    coords = b.T @ space.gram @ q @ b
    moved = coords - np.eye(space.dim)
    if rotating and rank(space, moved, tol, scale=max(1.0, float(np.max(np.abs(coords))))) == 0:
        return identity_rotation(space)
    # Right singular vectors of Q - I with non-zero singular values span the moved subspace.
    _, _, vt = np.linalg.svd(moved)
    if not rotating:
        return Reflectional(negated=b @ vt[0])
    p, s = vt[0], vt[1]
    theta = math.atan2(float(s @ coords @ p), float(p @ coords @ p))
    if theta < 0.0:
        s, theta = -s, -theta
    return Rotational(plane_u=b @ p, plane_v=b @ s, theta=theta)


def _complement_frame(space: Space, unit: np.ndarray) -> np.ndarray:
    """Columns: a G-orthonormal basis of the orthogonal complement of the unit vector."""
    b = orthonormal_basis(space).columns
    coords = b.T @ space.gram @ unit
    drop = int(np.argmax(np.abs(coords)))
    keep = [i for i in range(space.dim) if i != drop]
    q, _ = np.linalg.qr(np.column_stack([coords, np.eye(space.dim)[:, keep]]))
    return b @ q[:, 1:]


def _lift(f: Factor, frame: np.ndarray) -> Factor:
    if isinstance(f, Rotational):
        return Rotational(plane_u=frame @ f.plane_u, plane_v=frame @ f.plane_v, theta=f.theta)
    if isinstance(f, Reflectional):
        return Reflectional(negated=frame @ f.negated)
    raise NumericalBreakdownError(f"Unexpected {f.kind.value} factor in an orthogonal sub-decomposition")


def _conformal_planar_factors(space: Space, t: np.ndarray, c: float, tol: Tolerance) -> list[Factor]:
    q = t / c
    if space.dim == 2:
        return [_two_dim_factor(space, q)]
    single = _single_planar_factor(space, q, tol)
    if single is not None:
        _trace(f"conformal single {single.kind.value} dim={space.dim}")
        return [single]

    u = orthonormal_basis(space)
    images = t @ u.columns
    w = Basis.from_columns(images / np.array([norm(space, images[:, i]) for i in range(space.dim)]))
    r1 = rotation_between_lines(space, axis_of(space, u, tol), axis_of(space, w, tol), tol)
    r1_mat = materialize(space, r1, tol)
    a1 = q @ inverse(space, r1_mat, tol)
    if not is_orthogonal(space, a1, tol):
        raise NumericalBreakdownError("A_1 = (T / c) o R_1^{-1} is not orthogonal")

    gamma = _unit(space, axial_vector(space, u.image(r1_mat), tol).axial)
    image = a1 @ gamma
    factors: list[Factor] = [] if r1.is_identity else [r1]
    if norm(space, image - gamma) <= tol.accept:
        sign = 1
    elif norm(space, image + gamma) <= tol.accept:
        sign = -1
        flip = Reflectional(negated=gamma)
        factors.append(flip)
        a1 = a1 @ materialize(space, flip, tol)
    else:
        raise NumericalBreakdownError("A_1 does not map the axial vector to +/- itself")
    _trace(f"conformal level dim={space.dim} rotation={r1.theta:.6g} axis_sign={sign:+d}")

    frame = _complement_frame(space, gamma)
    restricted = frame.T @ space.gram @ a1 @ frame
    sub = decompose_orthogonal(Space.euclidean(space.dim - 1), restricted, tol)
    factors.extend(_lift(f, frame) for f in sub.factors)
    return factors


def decompose_conformal(space: Space, t: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> Decomposition:
    target = as_matrix(space, t)
    cert = is_conformal(space, target, tol)
    if cert is None:
        raise PreconditionError("Operator is not conformal")
    if space.dim == 1:
        return _finish(space, target, [Scalar(c=float(target[0, 0]))], tol)

    c = math.sqrt(cert.lambda_)
    factors = _conformal_planar_factors(space, target, c, tol) + [Scalar(c=c)]
    factors = canonicalize(space, Decomposition(factors=factors), tol).factors
    planar = sum(1 for f in factors if f.kind in PLANAR_KINDS)
    padding: list[Factor] = [identity_rotation(space) for _ in range(space.dim - 1 - planar)]
    return _finish(space, target, padding + factors, tol)


def decompose_orthogonal(space: Space, t: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> Decomposition:
    target = as_matrix(space, t)
    if not is_orthogonal(space, target, tol):
        raise PreconditionError("Operator is not orthogonal")
    factors = list(decompose_conformal(space, target, tol).factors)
    scalar = factors.pop()
    if not isinstance(scalar, Scalar):
        raise NumericalBreakdownError("Conformal decomposition did not end with a scalar")
    if abs(scalar.c + 1.0) <= tol.rel:
        factors = canonicalize(space, Decomposition(factors=factors + [Scalar(c=-1.0)]), tol).factors
    elif abs(scalar.c - 1.0) > tol.rel:
        raise PreconditionError(f"Orthogonal operator produced scalar factor {scalar.c!r}")
    return _finish(space, target, factors, tol)


def _minus_identity(space: Space) -> list[Factor]:
    b = orthonormal_basis(space).vectors
    out: list[Factor] = [Rotational(plane_u=b[i], plane_v=b[i + 1], theta=math.pi) for i in range(0, space.dim - 1, 2)]
    if space.dim % 2:
        out.append(Reflectional(negated=b[-1]))
    return out


def _line_in_plane(space: Space, line: np.ndarray, r: Rotational, tol: Tolerance) -> bool:
    off_plane = line - inner(space, line, r.plane_u) * r.plane_u - inner(space, line, r.plane_v) * r.plane_v
    return norm(space, off_plane) <= tol.rel


def _fuse(space: Space, r: Rotational, h: Reflectional, tol: Tolerance) -> Reflectional:
    # H_n o R(theta) = H_x with x = R(-theta/2) n, both in R's plane.
    half_back = Rotational(plane_u=r.plane_u, plane_v=r.plane_v, theta=-r.theta / 2.0)
    return Reflectional(negated=_unit(space, materialize(space, half_back, tol) @ h.negated))


def _fuse_pass(space: Space, planar: list[Factor], tol: Tolerance) -> list[Factor]:
    out: list[Factor] = []
    for f in planar:
        while (
            isinstance(f, Reflectional)
            and out
            and isinstance(out[-1], Rotational)
            and not out[-1].is_identity
            and _line_in_plane(space, f.negated, out[-1], tol)
        ):
            f = _fuse(space, out.pop(), f, tol)
        out.append(f)
    return out


def _merge_reflections(space: Space, first: Reflectional, second: Reflectional) -> Rotational | None:
    """`second o first` as a rotation, or None when the two lines coincide."""
    p = first.negated
    w = second.negated
    cos = inner(space, p, w)
    if cos < 0.0:
        w, cos = -w, -cos
    raw = w - cos * p
    half = math.atan2(norm(space, raw), cos)
    if half < IDENTITY_SNAP_ANGLE:
        return None
    q = _unit(space, _orthonormalize_against(space, raw, p))
    return Rotational(plane_u=p, plane_v=q, theta=2.0 * half)


def canonicalize(space: Space, d: Decomposition, tol: Tolerance = DEFAULT_TOLERANCE) -> Decomposition:
    planar: list[Factor] = []
    scalars: list[float] = []
    for i, f in enumerate(d.factors):
        if isinstance(f, Scalar):
            scalars.append(f.c)
        elif isinstance(f, (Rotational, Reflectional)):
            planar.append(f)
        else:
            raise PreconditionError(f"canonicalize accepts planar and scalar factors only; factor {i} is {f.kind.value}")

    c = float(np.prod(scalars)) if scalars else 1.0
    keep_scalar = bool(scalars)
    if c < 0.0:
        planar.extend(_minus_identity(space))
        c = -c
        keep_scalar = keep_scalar and c != 1.0

    planar = _fuse_pass(space, planar, tol)

    rotations: list[Factor] = []
    pending: list[Reflectional] = []
    for f in planar:
        if isinstance(f, Reflectional):
            pending.append(f)
            continue
        if pending and not f.is_identity:
            m = materialize(space, f, tol)
            pending = [Reflectional(negated=_unit(space, m @ h.negated)) for h in pending]
        rotations.append(f)

    while len(pending) > 1:
        merged = _merge_reflections(space, pending[0], pending[1])
        pending = pending[2:]
        if merged is not None:
            rotations.append(merged)

    out = _fuse_pass(space, rotations + pending, tol)
    if keep_scalar:
        out.append(Scalar(c=c))
    return Decomposition(factors=out, residual=d.residual, convention=d.convention)


def factor_axonal_shear(
    space: Space,
    a: np.ndarray,
    basis: Basis,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[GeneralAxonal, Shear]:
    """Split an axonal witness `(A, B)` as `A = A' o S`; returns `(A', S)`."""
    target = as_matrix(space, a)
    if space.dim < 2:
        raise PreconditionError("The shear factorization needs dimension at least 2")
    if not basis.is_spanning:
        raise PreconditionError("The shear factorization needs a basis of the whole space")
    if not is_axonal_witness(space, target, basis, tol):
        raise PreconditionError("(A, B) is not an axonal witness pair")

    image = basis.image(target)
    cone_in = associated_cone(space, basis, tol)
    cone_out = associated_cone(space, image, tol)
    if inner(space, cone_in.axis_dir, cone_out.axis_dir) > 0.0:
        psi = cone_out.vertex_angle
    else:
        psi = math.pi - cone_out.vertex_angle
    shear = shear_of_basis(space, basis, cone_in.vertex_angle - psi, tol)

    sheared = basis.image(materialize(space, shear, tol))
    loose = Tolerance(rel=max(tol.rel, tol.accept), abs=tol.abs, rank_tol=tol.rank_tol, accept=tol.accept)
    if not cones_equal(space, associated_cone(space, sheared, tol), cone_out, loose):
        raise NumericalBreakdownError("Sheared basis does not land on the cone of A B")

    rest = GeneralAxonal(
        matrix=image.columns @ inverse(space, sheared.columns, tol),
        witness_in=sheared,
        witness_out=image,
    )
    residual = relative_residual(target, compose(space, [shear, rest], tol))
    if residual > tol.accept:
        raise NumericalBreakdownError(f"A' o S misses A by {residual:.3e}")
    _trace(f"shear dim={space.dim} delta={shear.delta:.6g}")
    return rest, shear
