"""axdecomp.basis_axis

Axial vectors, axes and cones of a basis.

Definitions (all relative to one `Space`)
- A basis `{v_i}` is equimodular when every vector has the same norm `delta`; unimodular when
  `delta = 1`.
- A non-zero `alpha` is an axial vector of `{v_i}` when
  `<v_i, alpha> ||v_j|| = <v_j, alpha> ||v_i||` for all i, j, i.e. `alpha` makes one common angle
  with every basis vector.
- The axis of a basis is the line spanned by any of its axial vectors (they are all parallel).
- The cone around `alpha` of vertex angle `theta` is `{x : <x, alpha> = ||x|| ||alpha|| cos theta}`;
  the associated cone of a basis uses its axis and the common angle.

Construction of the axial vector
1. Normalize: `u_i = v_i / ||v_i||`.
2. Form the Gram matrix `A[i][j] = <u_i, u_j>` (symmetric positive definite for a basis).
3. Solve `A X = Omega` with `Omega = (omega, ..., omega)`; `omega = 1` unless the caller asks
   otherwise.
4. `alpha = sum_i X_i u_i`; then `<u_i, alpha> = omega` for every i.

With `omega = +1` the axis gets a canonical orientation (`<u_i, alpha> > 0`), so for n >= 2 the
vertex angle always lands in `(0, pi/2)`; in dimension 1 it is 0. Every function that reports an
oriented direction (`associated_cone`, the CLI `axis` subcommand) uses this orientation.

Equality
- Two `Line`s are equal when their unit directions agree up to sign.
- Two `Cone`s are equal as sets: same-oriented axes need equal vertex angles, opposite axes need
  angles summing to pi (the cone around `-alpha` of angle `theta` is the cone around `alpha` of
  angle `pi - theta`).

Failure modes
- Dependent vectors (rank below their count under `rank_tol`) raise `DegenerateBasisError`, as
  does a singular Gram system.

Subspaces
The axial vector, axis, cone and equimodularity tests also accept k < n vectors: the Gram system
is k x k and `alpha` lies in their span. `require_basis` insists on k = n.
- A solved `alpha` whose inner products disagree with `omega` by more than `tol.accept` times
  `|omega| + ||A||_inf ||X||_inf` (the backward error of the solve) raises
  `NumericalBreakdownError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .space import (
    DEFAULT_TOLERANCE,
    Basis,
    DegenerateBasisError,
    DimensionMismatchError,
    NumericalBreakdownError,
    PreconditionError,
    SingularMatrixError,
    Space,
    Tolerance,
    ZeroVectorError,
    angle,
    as_vector,
    inner,
    norm,
    rank,
    solve,
)

__all__ = [
    "AxialCertificate",
    "Basis",
    "Cone",
    "Equimodularity",
    "Line",
    "associated_cone",
    "axial_vector",
    "axis_of",
    "cone_contains",
    "cone_member",
    "cones_equal",
    "is_axial_vector",
    "is_equimodular",
    "is_unimodular",
    "lines_equal",
    "require_basis",
    "require_independent",
]


@dataclass(frozen=True, eq=False)
class AxialCertificate:
    axial: np.ndarray
    omega: float
    vertex_angle: float


@dataclass(frozen=True, eq=False)
class Line:
    direction: np.ndarray


@dataclass(frozen=True, eq=False)
class Cone:
    axis_dir: np.ndarray
    vertex_angle: float


@dataclass(frozen=True)
class Equimodularity:
    equimodular: bool
    delta: float | None = None

    def __bool__(self) -> bool:
        return self.equimodular


def _check_dim(space: Space, basis: Basis, *, spanning: bool = False) -> None:
    if basis.ambient_dim != space.dim:
        raise DimensionMismatchError(f"Basis vectors have length {basis.ambient_dim}, space has dimension {space.dim}")
    if spanning and basis.dim != space.dim:
        raise DimensionMismatchError(f"Basis has {basis.dim} vectors, space has dimension {space.dim}")


def require_basis(space: Space, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> Basis:
    _check_dim(space, basis, spanning=True)
    return require_independent(space, basis, tol)


def require_independent(space: Space, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> Basis:
    """Accept k <= n linearly independent vectors, a basis of their span."""
    _check_dim(space, basis)
    norms = _norms(space, basis)
    if float(np.min(norms)) <= tol.abs:
        raise DegenerateBasisError("Basis contains a zero vector")
    # Rank of the normalized vectors, so per-vector scaling cannot hide a dependency.
    r = rank(space, basis.columns / norms, tol)
    if r < basis.dim:
        raise DegenerateBasisError(f"Vectors are linearly dependent (rank {r} < {basis.dim})")
    return basis


def _norms(space: Space, basis: Basis) -> np.ndarray:
    return np.array([norm(space, v) for v in basis.vectors])


def is_equimodular(space: Space, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> Equimodularity:
    _check_dim(space, basis)
    norms = _norms(space, basis)
    top = float(np.max(norms))
    if top <= tol.abs:
        return Equimodularity(False)
    if top - float(np.min(norms)) <= tol.rel * top:
        return Equimodularity(True, float(np.mean(norms)))
    return Equimodularity(False)


def is_unimodular(space: Space, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    eq = is_equimodular(space, basis, tol)
    return bool(eq) and abs(float(eq.delta) - 1.0) <= tol.rel


def axial_vector(
    space: Space,
    basis: Basis,
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    omega: float = 1.0,
) -> AxialCertificate:
    if omega == 0.0 or not math.isfinite(omega):
        raise PreconditionError("omega must be a non-zero finite real")
    require_independent(space, basis, tol)

    units = basis.columns / _norms(space, basis)
    gram_system = units.T @ space.gram @ units
    try:
        coeffs = solve(Space.euclidean(basis.dim), gram_system, np.full(basis.dim, float(omega)), tol)
    except SingularMatrixError as exc:
        raise DegenerateBasisError(f"Gram system of the normalized basis is singular: {exc}") from exc
    alpha = units @ coeffs

    products = units.T @ space.gram @ alpha
    worst = float(np.max(np.abs(products - omega)))
    # Backward error: an ill-conditioned but well-solved system is not a breakdown.
    scale = abs(omega) + float(np.linalg.norm(gram_system, ord=np.inf) * np.max(np.abs(coeffs)))
    if worst > tol.accept * scale:
        raise NumericalBreakdownError(f"Axial vector misses the common inner product by {worst:.3e}")

    return AxialCertificate(axial=alpha, omega=float(omega), vertex_angle=angle(space, units[:, 0], alpha, tol))


def is_axial_vector(space: Space, basis: Basis, alpha: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    _check_dim(space, basis)
    a = as_vector(space, alpha)
    if norm(space, a) <= tol.abs:
        return False
    norms = _norms(space, basis)
    cosines = np.array([inner(space, v, a) for v in basis.vectors]) / (norms * norm(space, a))
    return float(np.max(cosines) - np.min(cosines)) <= tol.rel * max(1.0, float(np.max(np.abs(cosines))))


def axis_of(space: Space, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> Line:
    alpha = axial_vector(space, basis, tol).axial
    return Line(direction=alpha / norm(space, alpha))


def lines_equal(space: Space, first: Line, second: Line, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return abs(inner(space, first.direction, second.direction)) >= 1.0 - tol.rel


def cone_contains(space: Space, cone: Cone, x: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    nx = norm(space, x)
    if nx <= tol.abs:
        raise ZeroVectorError("cone membership is undefined for the zero vector")
    return abs(inner(space, x, cone.axis_dir) - nx * math.cos(cone.vertex_angle)) <= tol.rel * nx + tol.abs


def associated_cone(space: Space, basis: Basis, tol: Tolerance = DEFAULT_TOLERANCE) -> Cone:
    cert = axial_vector(space, basis, tol)
    cone = Cone(axis_dir=cert.axial / norm(space, cert.axial), vertex_angle=cert.vertex_angle)
    loose = replace(tol, rel=max(tol.rel, tol.accept))
    for i, v in enumerate(basis.vectors):
        if not cone_contains(space, cone, v / norm(space, v), loose):
            raise NumericalBreakdownError(f"Basis vector {i} is off the associated cone")
    return cone


def cones_equal(space: Space, first: Cone, second: Cone, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    first_line = Line(first.axis_dir)
    second_line = Line(second.axis_dir)
    if not lines_equal(space, first_line, second_line, tol):
        return False
    if inner(space, first.axis_dir, second.axis_dir) > 0.0:
        return abs(first.vertex_angle - second.vertex_angle) <= tol.rel
    return abs(first.vertex_angle - (math.pi - second.vertex_angle)) <= tol.rel


def cone_member(space: Space, cone: Cone, seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Return a non-zero vector on `cone`, deterministic in `seed`."""
    axis = np.asarray(cone.axis_dir, dtype=float) / norm(space, cone.axis_dir)
    theta = float(cone.vertex_angle)
    if space.dim == 1:
        if abs(theta) <= tol.rel or abs(theta - math.pi) <= tol.rel:
            return math.cos(theta) * axis
        raise PreconditionError("In dimension 1 a cone with vertex angle other than 0 or pi is empty")

    rng = np.random.default_rng(seed)
    for _ in range(100):
        w = rng.standard_normal(space.dim)
        w = w - inner(space, w, axis) * axis
        nw = norm(space, w)
        if nw > 1e-6:
            return math.cos(theta) * axis + math.sin(theta) * (w / nw)
    raise NumericalBreakdownError("Could not draw a direction orthogonal to the cone axis")
