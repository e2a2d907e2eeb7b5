"""
Unit tests for directions, lines, projective maps and projections.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from furstenberg_lab.exceptions import (
    DegenerateConfigurationError,
    IndexRangeError,
    InvalidParameterError,
    ValidationError,
)
from furstenberg_lab.ff_core import Field
from furstenberg_lab.geometry import (
    AtInfinity,
    Direction,
    Line,
    ProjectiveMap,
    apply_projective,
    bucket_prime_points,
    build_map_to_infinity,
    canonical_direction,
    direction_count,
    enumerate_directions,
    group_by_line,
    line_through,
    line_through_points,
    mat_inverse,
    orthogonal_project,
    points_on_line,
    project_line,
    rank,
    vec_sub,
)


def _all_points(f, n):
    return list(itertools.product(range(f.q), repeat=n))


def test_canonical_direction_examples():
    """Test scaling to a leading 1."""
    assert canonical_direction(Field(7), (0, 2, 4)).vector == (0, 1, 2)
    assert canonical_direction(Field(7), (1, 0, 0)).vector == (1, 0, 0)
    assert canonical_direction(Field(5), (3, 1)).vector == (1, 2)
    assert canonical_direction(Field(7), (0, 2, 4)).pivot == 1


def test_canonical_direction_rejects_zero():
    """Test that the zero vector has no direction."""
    with pytest.raises(InvalidParameterError):
        canonical_direction(Field(5), (0, 0))


@pytest.mark.parametrize("q", [3, 4, 5])
def test_canonical_direction_is_projective(q):
    """Test that proportional vectors share a canonical direction."""
    f = Field.from_order(q)
    for v in _all_points(f, 2):
        if not any(v):
            continue
        d = canonical_direction(f, v)
        for lam in range(1, q):
            assert canonical_direction(f, tuple(f.mul(lam, c) for c in v)) == d


def test_direction_rejects_non_canonical_vector():
    """Test the canonical-form check on construction."""
    with pytest.raises(ValidationError):
        Direction((2, 1), 0)
    with pytest.raises(ValidationError):
        Line(Direction((1, 1), 0), (1, 0))


def test_enumerate_directions_examples():
    """Test direction counts and order."""
    f3 = Field(3)
    assert [d.vector for d in enumerate_directions(f3, 2)] == [(1, 0), (1, 1), (1, 2), (0, 1)]
    assert len(enumerate_directions(Field(3, 2), 2)) == 10
    assert len(enumerate_directions(f3, 3)) == 13
    assert direction_count(7, 3) == 57


@pytest.mark.parametrize("q,n", [(2, 3), (3, 2), (4, 2), (5, 2), (3, 3)])
def test_directions_partition_space(q, n):
    """Test that each direction splits F_q^n into q^(n-1) lines of q points."""
    f = Field.from_order(q)
    directions = enumerate_directions(f, n)
    assert len(directions) == len(set(directions)) == direction_count(q, n)
    points = _all_points(f, n)
    for d in directions:
        buckets = group_by_line(f, points, d)
        assert len(buckets) == q ** (n - 1)
        assert all(len(members) == q for members in buckets.values())


def test_line_through_examples():
    """Test canonical base points."""
    f7 = Field(7)
    assert line_through(f7, (2, 3), canonical_direction(f7, (1, 5))).base == (0, 0)
    e1 = canonical_direction(f7, (1, 0, 0))
    assert line_through(f7, (4, 2, 6), e1).base == (0, 2, 6)
    f3 = Field(3)
    assert line_through(f3, (1, 2), canonical_direction(f3, (0, 1))).base == (1, 0)


@settings(max_examples=50, deadline=None)
@given(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)), st.integers(0, 56))
def test_line_through_is_independent_of_the_point(pt, index):
    """Test that every point of a line yields the same canonical line."""
    f = Field(7)
    d = enumerate_directions(f, 3)[index]
    line = line_through(f, pt, d)
    for other in points_on_line(f, line):
        assert line_through(f, other, d) == line


def test_points_on_line_examples():
    """Test line point sets."""
    f3 = Field(3)
    line = Line(canonical_direction(f3, (1, 1)), (0, 0))
    assert set(points_on_line(f3, line)) == {(0, 0), (1, 1), (2, 2)}
    f7 = Field(7)
    line7 = line_through(f7, (3, 1, 4), canonical_direction(f7, (1, 2, 3)))
    assert len(set(points_on_line(f7, line7))) == 7
    f9 = Field(3, 2)
    line9 = line_through(f9, (5, 7), canonical_direction(f9, (1, 4)))
    assert len(set(points_on_line(f9, line9))) == 9


def test_line_through_points():
    """Test the line spanned by two points."""
    f = Field(5)
    line = line_through_points(f, (1, 2), (3, 1))
    assert (1, 2) in points_on_line(f, line) and (3, 1) in points_on_line(f, line)
    with pytest.raises(DegenerateConfigurationError):
        line_through_points(f, (1, 2), (1, 2))


def test_map_to_infinity_example():
    """Test the map for x1 = (1,0), x2 = (0,1) in F_7^2."""
    f = Field(7)
    proj = build_map_to_infinity(f, [(1, 0), (0, 1)])
    assert proj.matrix == ((1, 0, 0), (0, 1, 0), (1, 1, 6))
    assert apply_projective(proj, (0, 0)) == (0, 0)
    image = apply_projective(proj, (1, 0))
    assert isinstance(image, AtInfinity)
    assert image.direction.vector == (1, 0)


def test_map_to_infinity_rejects_dependent_points():
    """Test that collinear input is degenerate."""
    with pytest.raises(DegenerateConfigurationError):
        build_map_to_infinity(Field(5), [(1, 1, 1), (2, 2, 2), (3, 3, 3)])


def test_map_to_infinity_translates_hyperplanes_through_origin():
    """Test points whose hyperplane contains 0."""
    f = Field(5)
    points = [(1, 0), (4, 0)]
    proj = build_map_to_infinity(f, points)
    for i, x in enumerate(points):
        image = apply_projective(proj, x)
        assert isinstance(image, AtInfinity)
        assert image.direction.vector == tuple(1 if j == i else 0 for j in range(2))


@pytest.mark.parametrize("q,points", [
    (5, [(1, 2, 0), (0, 1, 3), (4, 4, 1)]),
    (7, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
    (3, [(0, 0, 0), (1, 0, 0), (0, 1, 0)]),
])
def test_map_to_infinity_is_bijective_off_the_hyperplane(q, points):
    """Test exhaustively that exactly H goes to infinity and the rest maps injectively."""
    f = Field(q)
    proj = build_map_to_infinity(f, points)
    base = points[0]
    spanning = [vec_sub(f, x, base) for x in points[1:]]
    affine_images = set()
    for pt in _all_points(f, 3):
        on_h = rank(f, spanning + [vec_sub(f, pt, base)]) < 3
        image = apply_projective(proj, pt)
        assert isinstance(image, AtInfinity) == on_h
        if not on_h:
            affine_images.add(image)
    assert len(affine_images) == q ** 3 - q ** 2
    for i, x in enumerate(points):
        image = apply_projective(proj, x)
        assert isinstance(image, AtInfinity)
        assert image.direction.vector == tuple(1 if j == i else 0 for j in range(3))


def test_identity_map():
    """Test that the identity fixes every point."""
    f = Field(5)
    proj = ProjectiveMap.identity(f, 2)
    for pt in _all_points(f, 2):
        assert apply_projective(proj, pt) == pt


def test_singular_matrix_rejected():
    """Test that singular matrices are not projective maps."""
    f = Field(3)
    with pytest.raises(DegenerateConfigurationError):
        ProjectiveMap(f, ((1, 0, 0), (1, 0, 0), (0, 0, 1)))
    with pytest.raises(DegenerateConfigurationError):
        mat_inverse(f, ((1, 2), (2, 1)))


def test_orthogonal_project():
    """Test coordinate projections."""
    assert orthogonal_project((4, 5, 6), 1, 2) == (4, 5)
    assert orthogonal_project((4, 5, 6), 1, 3) == (4, 6)
    with pytest.raises(IndexRangeError):
        orthogonal_project((4, 5, 6), 2, 4)
    with pytest.raises(IndexRangeError):
        orthogonal_project((4, 5, 6), 2, 2)


def test_project_line_non_vertical():
    """Test that a non-vertical line projects onto a q-point planar line."""
    f = Field(5)
    line = line_through(f, (1, 2, 3), canonical_direction(f, (1, 3, 0)))
    image = project_line(f, line, 1, 3)
    assert image is not None
    projected = {orthogonal_project(pt, 1, 3) for pt in points_on_line(f, line)}
    assert projected == set(points_on_line(f, image))
    assert project_line(f, line_through(f, (0, 0, 0), canonical_direction(f, (0, 0, 1))), 1, 2) is None


def test_bucket_prime_points_matches_grouping():
    """Test the vectorized bucketing against dictionary grouping."""
    f = Field(7)
    rng = np.random.default_rng(3)
    points = [tuple(int(c) for c in row) for row in rng.integers(0, 7, size=(40, 3))]
    array = np.array(points, dtype=np.int64)
    for d in enumerate_directions(f, 3)[:10]:
        keys, counts = bucket_prime_points(array, d, 7)
        expected = {base: len(members) for base, members in group_by_line(f, points, d).items()}
        got = {tuple(int(c) for c in k): int(c) for k, c in zip(keys, counts)}
        assert got == expected
        assert sum(got.values()) == len(points)
