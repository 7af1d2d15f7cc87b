from __future__ import annotations

import math

import numpy as np
import pytest

from axdecomp.basis_axis import (
    Cone,
    Line,
    associated_cone,
    axial_vector,
    axis_of,
    cone_contains,
    cone_member,
    cones_equal,
    is_axial_vector,
    is_equimodular,
    is_unimodular,
    lines_equal,
    require_basis,
)
from axdecomp.space import (
    Basis,
    DegenerateBasisError,
    DimensionMismatchError,
    PreconditionError,
    Space,
    ZeroVectorError,
    angle,
)


@pytest.mark.parametrize(
    ("vectors", "equimodular", "delta"),
    [
        (np.eye(3), True, 1.0),
        ([[1.0, 0.0], [1.0, 1.0]], False, None),
        ([[2.0, 0.0], [0.0, 2.0]], True, 2.0),
    ],
)
def test_is_equimodular_examples(vectors, equimodular, delta) -> None:
    b = Basis(vectors)
    result = is_equimodular(Space.euclidean(b.dim), b)

    assert bool(result) is equimodular
    assert result.delta == (pytest.approx(delta) if delta is not None else None)


def test_is_unimodular_requires_unit_length() -> None:
    assert is_unimodular(Space.euclidean(3), Basis(np.eye(3)))
    assert not is_unimodular(Space.euclidean(2), Basis(2 * np.eye(2)))


def test_equimodularity_uses_the_metric() -> None:
    space = Space.from_gram(np.diag([4.0, 1.0]))
    assert is_equimodular(space, Basis([[1.0, 0.0], [0.0, 2.0]])).delta == pytest.approx(2.0)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_standard_basis_axial_vector_is_all_ones(n: int) -> None:
    cert = axial_vector(Space.euclidean(n), Basis(np.eye(n)))

    np.testing.assert_allclose(cert.axial, np.ones(n))
    assert cert.omega == 1.0
    assert cert.vertex_angle == pytest.approx(math.acos(1 / math.sqrt(n)), abs=1e-12)


def test_axial_vector_of_skewed_planar_basis() -> None:
    cert = axial_vector(Space.euclidean(2), Basis([[1.0, 0.0], [1.0, 1.0]]))
    direction = cert.axial / cert.axial[0]

    np.testing.assert_allclose(direction, [1.0, math.sqrt(2) - 1.0])


def test_one_dimensional_axial_vector_follows_the_vector_sign() -> None:
    cert = axial_vector(Space.euclidean(1), Basis([[-3.0]]))

    np.testing.assert_allclose(cert.axial, [-1.0])
    assert cert.vertex_angle == 0.0


def test_axial_vector_honours_omega() -> None:
    space = Space.euclidean(3)
    b = Basis([[1.0, 0.2, 0.0], [0.0, 1.0, 0.5], [0.3, 0.0, 1.0]])
    cert = axial_vector(space, b, omega=-2.0)

    units = b.vectors / np.linalg.norm(b.vectors, axis=1)[:, None]
    np.testing.assert_allclose(units @ cert.axial, [-2.0, -2.0, -2.0])
    assert is_axial_vector(space, b, cert.axial)
    with pytest.raises(PreconditionError, match="omega"):
        axial_vector(space, b, omega=0.0)


def test_axial_vector_makes_one_angle_under_a_general_metric() -> None:
    space = Space.from_gram([[3.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])
    b = Basis([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0], [2.0, 0.0, 1.0]])
    cert = axial_vector(space, b)

    angles = [angle(space, v, cert.axial) for v in b.vectors]
    assert max(angles) - min(angles) < 1e-10
    assert angles[0] == pytest.approx(cert.vertex_angle, abs=1e-12)


@pytest.mark.parametrize(
    "vectors",
    [
        [[1.0, 2.0], [2.0, 4.0]],
        [[1.0, 0.0], [0.0, 0.0]],
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
    ],
)
def test_dependent_vectors_are_rejected(vectors) -> None:
    b = Basis(vectors)
    with pytest.raises(DegenerateBasisError):
        axial_vector(Space.euclidean(b.dim), b)


def test_basis_dimension_must_match_space() -> None:
    with pytest.raises(DimensionMismatchError):
        require_basis(Space.euclidean(3), Basis(np.eye(2)))


def test_axis_is_invariant_under_rescale_and_reorder() -> None:
    space = Space.euclidean(3)
    b = Basis([[1.0, 0.1, 0.0], [0.2, 1.0, 0.3], [0.0, -0.4, 1.0]])
    line = axis_of(space, b)

    assert lines_equal(space, line, axis_of(space, b.scaled(5.0)))
    assert lines_equal(space, line, axis_of(space, b.reordered([2, 0, 1])))
    assert lines_equal(space, line, axis_of(space, b.scaled([0.5, 3.0, 7.0])))


def test_axis_of_standard_planar_basis() -> None:
    line = axis_of(Space.euclidean(2), Basis(np.eye(2)))
    np.testing.assert_allclose(line.direction, [1 / math.sqrt(2), 1 / math.sqrt(2)])


@pytest.mark.parametrize(
    ("second", "expected"),
    [
        ([-1.0, 0.0], True),
        ([0.0, 1.0], False),
        (np.array([1.0, 1e-12]) / np.hypot(1.0, 1e-12), True),
    ],
)
def test_lines_equal_examples(second, expected) -> None:
    space = Space.euclidean(2)
    assert lines_equal(space, Line(np.array([1.0, 0.0])), Line(np.asarray(second))) is expected


@pytest.mark.parametrize(
    ("theta", "x", "expected"),
    [
        (math.pi / 2, (1.0, 1.0, 0.0), True),
        (math.pi / 4, (1.0, 0.0, 1.0), True),
        (0.0, (1.0, 0.0, 1.0), False),
    ],
)
def test_cone_contains_examples(theta, x, expected) -> None:
    cone = Cone(axis_dir=np.array([0.0, 0.0, 1.0]), vertex_angle=theta)
    assert cone_contains(Space.euclidean(3), cone, np.array(x)) is expected


def test_cone_contains_rejects_zero_vector() -> None:
    cone = Cone(axis_dir=np.array([0.0, 1.0]), vertex_angle=0.5)
    with pytest.raises(ZeroVectorError):
        cone_contains(Space.euclidean(2), cone, np.zeros(2))


def test_associated_cone_contains_every_basis_vector() -> None:
    space = Space.euclidean(3)
    cone = associated_cone(space, Basis(np.eye(3)))
    np.testing.assert_allclose(cone.axis_dir, np.ones(3) / math.sqrt(3))
    assert cone.vertex_angle == pytest.approx(math.acos(1 / math.sqrt(3)))

    b = Basis([[2.0, 0.0, 1.0], [0.0, 3.0, 0.0], [1.0, 1.0, 1.0]])
    cone = associated_cone(space, b)
    assert all(cone_contains(space, cone, v) for v in b.vectors)


def test_cones_equal_uses_set_semantics() -> None:
    space = Space.euclidean(3)
    d = np.array([0.0, 0.6, 0.8])
    a = Cone(axis_dir=d, vertex_angle=math.pi / 4)

    assert cones_equal(space, a, Cone(axis_dir=d.copy(), vertex_angle=math.pi / 4))
    assert not cones_equal(space, a, Cone(axis_dir=d, vertex_angle=math.pi / 3))
    assert cones_equal(space, a, Cone(axis_dir=-d, vertex_angle=3 * math.pi / 4))
    assert not cones_equal(space, a, Cone(axis_dir=-d, vertex_angle=math.pi / 4))
    assert not cones_equal(space, a, Cone(axis_dir=np.array([1.0, 0.0, 0.0]), vertex_angle=math.pi / 4))


def test_flipped_cone_shares_members() -> None:
    space = Space.euclidean(3)
    d = np.array([1.0, 2.0, 2.0]) / 3.0
    a = Cone(axis_dir=d, vertex_angle=0.7)
    b = Cone(axis_dir=-d, vertex_angle=math.pi - 0.7)

    for s in range(5):
        assert cone_contains(space, b, cone_member(space, a, seed=s))


def test_cone_member_is_deterministic_and_on_cone() -> None:
    space = Space.from_gram(np.diag([1.0, 2.0, 3.0]))
    cone = Cone(axis_dir=np.array([1.0, 0.0, 0.0]), vertex_angle=1.1)

    x = cone_member(space, cone, seed=3)
    np.testing.assert_array_equal(x, cone_member(space, cone, seed=3))
    assert cone_contains(space, cone, x)


def test_cone_member_in_dimension_one() -> None:
    space = Space.euclidean(1)
    np.testing.assert_allclose(cone_member(space, Cone(np.array([1.0]), math.pi)), [-1.0])
    with pytest.raises(PreconditionError, match="empty"):
        cone_member(space, Cone(np.array([1.0]), 0.5))


def test_is_axial_vector_rejects_wrong_direction_and_zero() -> None:
    space = Space.euclidean(2)
    b = Basis([[1.0, 0.0], [1.0, 1.0]])

    assert is_axial_vector(space, b, np.array([1.0, math.sqrt(2) - 1.0]))
    assert not is_axial_vector(space, b, np.array([1.0, 1.0]))
    assert not is_axial_vector(space, b, np.zeros(2))
