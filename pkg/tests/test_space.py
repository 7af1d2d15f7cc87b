from __future__ import annotations

import math

import numpy as np
import pytest

from axdecomp.space import (
    DEFAULT_TOLERANCE,
    Basis,
    DimensionMismatchError,
    SingularMatrixError,
    Space,
    Tolerance,
    ZeroVectorError,
    angle,
    det,
    inner,
    inverse,
    norm,
    orthonormal_basis,
    rank,
    relative_residual,
    solve,
)


@pytest.mark.parametrize(
    ("gram", "x", "y", "expected"),
    [
        (np.eye(2), (1, 0), (0, 1), 0.0),
        (np.eye(2), (1, 1), (1, 1), 2.0),
        (np.diag([2.0, 3.0]), (1, 1), (1, -1), -1.0),
    ],
)
def test_inner_evaluates_x_transpose_g_y(gram, x, y, expected) -> None:
    assert inner(Space.from_gram(gram), x, y) == pytest.approx(expected)


@pytest.mark.parametrize(
    ("gram", "x", "expected"),
    [
        (np.eye(3), (0, 0, 0), 0.0),
        (np.eye(2), (3, 4), 5.0),
        (np.diag([4.0, 1.0]), (1, 0), 2.0),
    ],
)
def test_norm_examples(gram, x, expected) -> None:
    assert norm(Space.from_gram(gram), x) == pytest.approx(expected)


@pytest.mark.parametrize(
    ("y", "expected"),
    [((0, 1), math.pi / 2), ((1, 1), math.pi / 4), ((-1, 0), math.pi)],
)
def test_angle_examples(y, expected) -> None:
    assert angle(Space.euclidean(2), (1, 0), y) == pytest.approx(expected)


def test_angle_rejects_zero_vector() -> None:
    with pytest.raises(ZeroVectorError):
        angle(Space.euclidean(2), (0, 0), (1, 0))


@pytest.mark.parametrize(
    ("a", "b", "expected"),
    [
        (np.eye(2), (1, 1), (1, 1)),
        ([[2, 0], [0, 4]], (2, 4), (1, 1)),
        ([[1, 1], [0, 1]], (3, 1), (2, 1)),
    ],
)
def test_solve_examples(a, b, expected) -> None:
    np.testing.assert_allclose(solve(Space.euclidean(2), a, b), expected)


def test_solve_and_inverse_reject_singular_matrix() -> None:
    space = Space.euclidean(2)
    with pytest.raises(SingularMatrixError, match="singular"):
        solve(space, [[1, 2], [2, 4]], (1, 1))
    with pytest.raises(SingularMatrixError):
        inverse(space, np.zeros((2, 2)))


@pytest.mark.parametrize(
    ("a", "expected"),
    [(np.eye(2), 1.0), ([[0, -1], [1, 0]], 1.0), ([[1, 0], [0, -1]], -1.0)],
)
def test_det_examples(a, expected) -> None:
    assert det(Space.euclidean(2), a) == pytest.approx(expected)


def test_det_of_permutation_tracks_pivot_swaps() -> None:
    p = np.eye(3)[[1, 2, 0]]
    assert det(Space.euclidean(3), p) == pytest.approx(1.0)
    assert det(Space.euclidean(3), np.eye(3)[[1, 0, 2]]) == pytest.approx(-1.0)


@pytest.mark.parametrize(
    ("a", "expected"),
    [(np.eye(3), 3), (np.zeros((3, 3)), 0), (np.ones((3, 3)), 1)],
)
def test_rank_examples(a, expected) -> None:
    assert rank(Space.euclidean(3), a) == expected


def test_rank_is_scale_invariant() -> None:
    space = Space.euclidean(2)
    assert rank(space, 1e-8 * np.array([[1.0, 1.0], [1.0, 1.0]])) == 1
    assert rank(space, 1e8 * np.eye(2)) == 2


@pytest.mark.parametrize(
    ("a", "expected"),
    [
        ([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], 1),
        ([[0.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]], 1),
        ([[0.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.0, 3.0, 0.0]], 2),
        ([[1.0, 1.0, 1.0], [1.0, 1.0 + 1e-12, 1.0], [1.0, 1.0, 1.0 + 1e-12]], 1),
    ],
)
def test_rank_counts_pivots_regardless_of_column_order(a, expected) -> None:
    assert rank(Space.euclidean(3), a) == expected


def test_rank_of_column_vectors() -> None:
    space = Space.euclidean(3)

    assert rank(space, [[1.0, 2.0], [0.0, 0.0], [1.0, 2.0]]) == 1
    assert rank(space, [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]) == 2
    with pytest.raises(DimensionMismatchError):
        rank(space, np.ones((2, 2)))
    with pytest.raises(DimensionMismatchError):
        rank(space, np.ones((3, 4)))


def test_orthonormal_basis_examples() -> None:
    np.testing.assert_allclose(orthonormal_basis(Space.euclidean(2)).vectors, np.eye(2))
    np.testing.assert_allclose(orthonormal_basis(Space.from_gram(np.diag([4.0, 1.0]))).vectors, [[0.5, 0.0], [0.0, 1.0]])


def test_orthonormal_basis_is_g_orthonormal_and_starts_along_e1() -> None:
    space = Space.from_gram([[2.0, 1.0], [1.0, 2.0]])
    b = orthonormal_basis(space)

    np.testing.assert_allclose(b[0], [1 / math.sqrt(2), 0.0], atol=1e-15)
    np.testing.assert_allclose(b.columns.T @ space.gram @ b.columns, np.eye(2), atol=1e-12)


@pytest.mark.parametrize(
    ("gram", "match"),
    [
        ([[1.0, 0.5], [0.0, 1.0]], "not symmetric"),
        ([[1.0, 2.0], [2.0, 1.0]], "not positive definite"),
        ([[1.0, 1.0], [1.0, 1.0]], "not positive definite"),
    ],
)
def test_space_rejects_bad_gram(gram, match) -> None:
    with pytest.raises(ValueError, match=match):
        Space.from_gram(gram)


def test_space_rejects_shape_mismatch_and_freezes_gram() -> None:
    with pytest.raises(DimensionMismatchError):
        Space(dim=3, gram=np.eye(2))

    space = Space.euclidean(2)
    assert space.is_euclidean
    with pytest.raises(ValueError):
        space.gram[0, 0] = 5.0


def test_vector_shape_is_checked() -> None:
    with pytest.raises(DimensionMismatchError, match="length 2"):
        inner(Space.euclidean(2), (1, 2, 3), (1, 2))


def test_tolerance_from_rel_scales_every_field() -> None:
    tol = Tolerance.from_rel(1e-6)

    assert tol.rel == pytest.approx(1e-6)
    assert tol.abs == pytest.approx(DEFAULT_TOLERANCE.abs * 1e3)
    assert tol.rank_tol == pytest.approx(DEFAULT_TOLERANCE.rank_tol * 1e3)
    assert tol.accept == pytest.approx(DEFAULT_TOLERANCE.accept * 1e3)


@pytest.mark.parametrize("bad", [0.0, -1e-9, float("nan"), float("inf")])
def test_tolerance_rejects_non_positive_values(bad: float) -> None:
    with pytest.raises(ValueError, match="positive and finite"):
        Tolerance(rel=bad)


def test_basis_rows_are_vectors_and_columns_transpose() -> None:
    b = Basis(vectors=[[1.0, 0.0], [1.0, 1.0]])

    np.testing.assert_array_equal(b[1], [1.0, 1.0])
    np.testing.assert_array_equal(b.columns, [[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_array_equal(b.scaled([2.0, 3.0]).vectors, [[2.0, 0.0], [3.0, 3.0]])
    np.testing.assert_array_equal(b.reordered([1, 0]).vectors, [[1.0, 1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(b.image(2 * np.eye(2)).vectors, [[2.0, 0.0], [2.0, 2.0]])


def test_basis_of_a_subspace() -> None:
    b = Basis(vectors=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    assert (b.dim, b.ambient_dim, b.is_spanning) == (2, 3, False)
    assert Basis(np.eye(3)).is_spanning
    with pytest.raises(DimensionMismatchError):
        Basis(vectors=np.ones((3, 2)))


def test_relative_residual_handles_zero_target() -> None:
    assert relative_residual(np.eye(2), np.eye(2)) == 0.0
    assert relative_residual(np.zeros((2, 2)), np.ones((2, 2))) == pytest.approx(2.0)
