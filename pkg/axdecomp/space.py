"""axdecomp.space

The ambient real inner-product space and the dense kernels every other module builds on.

Coordinates and metric
- A `Space` fixes coordinates on R^n and carries the metric as an explicit symmetric
  positive-definite Gram matrix `G`, so that `<x, y> = x^T G y`. The Euclidean space is the
  special case `G = I` (`Space.euclidean(n)`).
- Vectors are 1-D `numpy` arrays of length n; operators are n x n arrays acting on standard
  coordinates (column convention: `M @ x`).
- A `Basis` stores its vectors as the rows of a k x n array (the JSON layout), k <= n. With
  k = n it is a basis of the space; with k < n it is a basis of the k-dimensional subspace it
  spans, which is what a k-shear acts on. `columns` gives the matrix whose columns are the
  basis vectors (`B @ coeffs` is a combination of basis vectors).

Validation rules
- `Space.__post_init__` rejects a non-square, asymmetric or non-positive-definite Gram matrix.
  Symmetry is checked entrywise against `SYMMETRY_TOL * max|G|`; positive definiteness by a
  Cholesky factorization whose pivots `L_ii^2` must exceed `PD_PIVOT_TOL * max|G|`.
- `as_vector` / `as_matrix` coerce array-likes to float arrays and raise
  `DimensionMismatchError` when the shape disagrees with the space.

Kernels
- `solve` and `det` go through one LU factorization with partial pivoting
  (`scipy.linalg.lu_factor`). `solve` refuses a matrix with a pivot smaller than
  `rank_tol * max|A|`; `det` never refuses and simply returns the pivot product.
- `rank` counts the pivots of an LU factorization with complete pivoting
  (`scipy.linalg.lapack.dgetc2`) above `rank_tol * scale` (scale defaults to `max|A|`), the same
  threshold `solve` refuses on. It also accepts an n x k array of column vectors.
- `orthonormal_basis` returns the Gram-Schmidt orthonormalization of the standard coordinate
  vectors under `G`, computed as the columns of `L^{-T}` where `G = L L^T`.

Tolerances
`Tolerance` is the single configuration object for numeric thresholds. It is a frozen value,
passed explicitly (never global), with `DEFAULT_TOLERANCE` used when callers omit it.
`Tolerance.from_rel(r)` rescales all fields proportionally from `rel` (the CLI's one knob).

Errors
The exception classes used across the package are defined here, all deriving from builtin
`ValueError` / `RuntimeError` so plain `except ValueError` keeps working for callers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg
import scipy.linalg.lapack

SYMMETRY_TOL = 1e-10
PD_PIVOT_TOL = 1e-12


class DimensionMismatchError(ValueError):
    pass


class ZeroVectorError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class DegenerateBasisError(SingularMatrixError):
    pass


class PreconditionError(ValueError):
    pass


class NumericalBreakdownError(RuntimeError):
    """An internal consistency assertion failed; the input is numerically too hard."""


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-9
    abs: float = 1e-12
    rank_tol: float = 1e-10
    accept: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("rel", "abs", "rank_tol", "accept"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"Tolerance.{name} must be positive and finite, got {value!r}")

    @staticmethod
    def from_rel(rel: float) -> "Tolerance":
        d = DEFAULT_TOLERANCE
        scale = rel / d.rel
        return Tolerance(rel=rel, abs=d.abs * scale, rank_tol=d.rank_tol * scale, accept=d.accept * scale)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True, eq=False)
class Space:
    dim: int
    gram: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ValueError(f"Space dimension must be a positive integer, got {self.dim!r}")
        g = np.array(self.gram, dtype=float)
        if g.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"Gram matrix must be {self.dim}x{self.dim}, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("Gram matrix has non-finite entries")
        scale = float(np.max(np.abs(g)))
        if float(np.max(np.abs(g - g.T))) > SYMMETRY_TOL * max(scale, 1.0):
            raise ValueError("Gram matrix is not symmetric")
        try:
            lower = scipy.linalg.cholesky(g, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"Gram matrix is not positive definite: {exc}") from exc
        if float(np.min(np.diag(lower) ** 2)) <= PD_PIVOT_TOL * scale:
            raise ValueError("Gram matrix is not positive definite (Cholesky pivot below threshold)")
        g.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "gram", g)

    @staticmethod
    def euclidean(dim: int) -> "Space":
        return Space(dim=dim, gram=np.eye(dim))

    @staticmethod
    def from_gram(gram: Any) -> "Space":
        g = np.asarray(gram, dtype=float)
        if g.ndim != 2:
            raise DimensionMismatchError(f"Gram matrix must be 2-D, got {g.ndim}-D")
        return Space(dim=g.shape[0], gram=g)

    @property
    def is_euclidean(self) -> bool:
        return bool(np.array_equal(self.gram, np.eye(self.dim)))


@dataclass(frozen=True, eq=False)
class Basis:
    """Ordered basis; `vectors[i]` is the i-th basis vector."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 2 or not 1 <= v.shape[0] <= v.shape[1]:
            raise DimensionMismatchError(f"Basis needs 1 <= k <= n vectors of length n, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @staticmethod
    def from_columns(columns: np.ndarray) -> "Basis":
        return Basis(vectors=np.asarray(columns, dtype=float).T)

    @property
    def dim(self) -> int:
        """Number of vectors, the dimension of their span."""
        return int(self.vectors.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def is_spanning(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def columns(self) -> np.ndarray:
        return self.vectors.T

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, i: int) -> np.ndarray:
        return self.vectors[i]

    def image(self, matrix: np.ndarray) -> "Basis":
        """Basis `{M b_i}` (not checked for independence)."""
        return Basis.from_columns(np.asarray(matrix, dtype=float) @ self.columns)

    def scaled(self, factors: Any) -> "Basis":
        f = np.broadcast_to(np.asarray(factors, dtype=float), (self.dim,))
        return Basis(vectors=self.vectors * f[:, None])

    def reordered(self, order: Any) -> "Basis":
        return Basis(vectors=self.vectors[list(order)])


def as_vector(space: Space, x: Any) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (space.dim,):
        raise DimensionMismatchError(f"Expected a vector of length {space.dim}, got shape {v.shape}")
    return v


def as_matrix(space: Space, a: Any) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.shape != (space.dim, space.dim):
        raise DimensionMismatchError(f"Expected a {space.dim}x{space.dim} matrix, got shape {m.shape}")
    return m


def inner(space: Space, x: Any, y: Any) -> float:
    xv = as_vector(space, x)
    yv = as_vector(space, y)
    return float(xv @ space.gram @ yv)


def norm(space: Space, x: Any) -> float:
    # Rounding can push <x, x> a hair below zero for tiny x.
    return math.sqrt(max(inner(space, x, x), 0.0))


def angle(space: Space, x: Any, y: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    nx = norm(space, x)
    ny = norm(space, y)
    if nx <= tol.abs or ny <= tol.abs:
        raise ZeroVectorError("angle() is undefined for a zero vector")
    cos = inner(space, x, y) / (nx * ny)
    return math.acos(min(1.0, max(-1.0, cos)))


def _lu(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with warnings.catch_warnings():
        # Exactly singular input is reported through the pivots, not a warning.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        return scipy.linalg.lu_factor(a, check_finite=True)


def _check_pivots(lu: np.ndarray, a: np.ndarray, tol: Tolerance) -> None:
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or float(np.min(pivots)) < tol.rank_tol * scale:
        raise SingularMatrixError(
            f"Matrix is singular to working precision (min pivot {float(np.min(pivots)):.3e}, max|A| {scale:.3e})"
        )


def solve(space: Space, a: Any, b: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    m = as_matrix(space, a)
    rhs = as_vector(space, b)
    lu, piv = _lu(m)
    _check_pivots(lu, m, tol)
    return scipy.linalg.lu_solve((lu, piv), rhs)


def inverse(space: Space, a: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    m = as_matrix(space, a)
    lu, piv = _lu(m)
    _check_pivots(lu, m, tol)
    return scipy.linalg.lu_solve((lu, piv), np.eye(space.dim))


def det(space: Space, a: Any) -> float:
    m = as_matrix(space, a)
    lu, piv = _lu(m)
    swaps = int(np.count_nonzero(piv != np.arange(space.dim)))
    sign = -1.0 if swaps % 2 else 1.0
    return sign * float(np.prod(np.diag(lu)))


def rank(space: Space, a: Any, tol: Tolerance = DEFAULT_TOLERANCE, *, scale: float | None = None) -> int:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != space.dim or m.shape[1] > space.dim:
        raise DimensionMismatchError(f"Expected {space.dim} rows and at most {space.dim} columns, got shape {m.shape}")
    ref = float(np.max(np.abs(m))) if scale is None else float(scale)
    if ref == 0.0:
        return 0
    if not np.all(np.isfinite(m)):
        raise ValueError("array must not contain infs or NaNs")
    # Complete pivoting: every later pivot is bounded by the current one. Columns are padded
    # with zeros to a square array; getc2 replaces pivots below eps*max|A| by that floor.
    square = np.zeros((space.dim, space.dim))
    square[:, : m.shape[1]] = m
    lu, _, _, _ = scipy.linalg.lapack.dgetc2(square)
    pivots = np.abs(np.diag(lu))
    return int(np.count_nonzero(pivots > tol.rank_tol * ref))


def orthonormal_basis(space: Space) -> Basis:
    lower = scipy.linalg.cholesky(space.gram, lower=True)
    columns = scipy.linalg.solve_triangular(lower.T, np.eye(space.dim), lower=False)
    return Basis.from_columns(columns)


def relative_residual(target: np.ndarray, approx: np.ndarray) -> float:
    """Frobenius norm of `approx - target` over the Frobenius norm of `target`."""
    denom = float(np.linalg.norm(target))
    diff = float(np.linalg.norm(approx - target))
    return diff / denom if denom > 0.0 else diff
