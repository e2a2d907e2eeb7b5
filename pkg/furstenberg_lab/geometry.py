"""
Directions, lines, projective maps and coordinate projections in F_q^n.

Points are tuples of packed field elements. A direction is stored in its
canonical projective form (first nonzero coordinate 1) and a line by its
direction plus the unique base point whose pivot coordinate is 0, so lines
can be hashed and sorted directly.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    DegenerateConfigurationError,
    IndexRangeError,
    InvalidParameterError,
    UnsupportedDimensionError,
    ValidationError,
)
from .ff_core import Field, FieldElem
from .validators import ParameterValidator

logger = logging.getLogger(__name__)

Point = Tuple[FieldElem, ...]
Matrix = Tuple[Tuple[FieldElem, ...], ...]


@dataclass(frozen=True, order=True)
class Direction:
    """Canonical projective direction: zeros before the pivot, 1 at the pivot."""

    vector: Point
    pivot: int

    def __post_init__(self):
        if not any(self.vector):
            raise InvalidParameterError("Direction vector must be nonzero", parameter="vector", value=self.vector)
        first = next(i for i, c in enumerate(self.vector) if c)
        if first != self.pivot or self.vector[first] != 1:
            raise ValidationError(f"Direction {self.vector} is not in canonical form")

    @property
    def n(self) -> int:
        return len(self.vector)


@dataclass(frozen=True, order=True)
class Line:
    """Line {base + t * direction}; the base has a zero pivot coordinate."""

    direction: Direction
    base: Point

    def __post_init__(self):
        if len(self.base) != self.direction.n:
            raise InvalidParameterError("Base point and direction differ in length", parameter="base", value=self.base)
        if self.base[self.direction.pivot] != 0:
            raise ValidationError(f"Line base {self.base} is not canonical for direction {self.direction.vector}")


@dataclass(frozen=True)
class AtInfinity:
    """Image of an affine point on the hyperplane at infinity."""

    direction: Direction


@dataclass(frozen=True)
class ProjectiveMap:
    """Invertible (n+1)x(n+1) matrix acting on homogeneous coordinates (v : 1)."""

    field: Field
    matrix: Matrix

    def __post_init__(self):
        size = len(self.matrix)
        if size < 3 or any(len(row) != size for row in self.matrix):
            raise InvalidParameterError("Projective map needs a square matrix of size >= 3", parameter="matrix")
        if determinant(self.field, self.matrix) == 0:
            raise DegenerateConfigurationError("Projective map matrix is singular", points=self.matrix)

    @property
    def n(self) -> int:
        return len(self.matrix) - 1

    @classmethod
    def identity(cls, f: Field, n: int) -> "ProjectiveMap":
        return cls(f, tuple(tuple(1 if i == j else 0 for j in range(n + 1)) for i in range(n + 1)))

    def compose(self, other: "ProjectiveMap") -> "ProjectiveMap":
        """The map applying other first, then self."""
        return ProjectiveMap(self.field, mat_mul(self.field, self.matrix, other.matrix))


# ---------------------------------------------------------------------------
# Vector and matrix helpers
# ---------------------------------------------------------------------------


def vec_add(f: Field, u: Sequence[FieldElem], v: Sequence[FieldElem]) -> Point:
    return tuple(f.add(a, b) for a, b in zip(u, v))


def vec_sub(f: Field, u: Sequence[FieldElem], v: Sequence[FieldElem]) -> Point:
    return tuple(f.sub(a, b) for a, b in zip(u, v))


def vec_scale(f: Field, c: FieldElem, v: Sequence[FieldElem]) -> Point:
    return tuple(f.mul(c, a) for a in v)


def dot(f: Field, u: Sequence[FieldElem], v: Sequence[FieldElem]) -> FieldElem:
    total = 0
    for a, b in zip(u, v):
        total = f.add(total, f.mul(a, b))
    return total


def mat_vec(f: Field, matrix: Sequence[Sequence[FieldElem]], v: Sequence[FieldElem]) -> Point:
    return tuple(dot(f, row, v) for row in matrix)


def mat_mul(f: Field, a: Sequence[Sequence[FieldElem]], b: Sequence[Sequence[FieldElem]]) -> Matrix:
    columns = list(zip(*b))
    return tuple(tuple(dot(f, row, col) for col in columns) for row in a)


def row_reduce(f: Field, rows: Sequence[Sequence[FieldElem]]) -> Tuple[List[List[FieldElem]], List[int]]:
    """
    Reduced row echelon form over f.

    Returns:
        (reduced rows, pivot columns); zero rows are dropped
    """
    work = [list(r) for r in rows]
    if not work:
        return [], []
    width = len(work[0])
    pivots: List[int] = []
    rank = 0
    for col in range(width):
        pivot_row = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        scale = f.inv(work[rank][col])
        work[rank] = [f.mul(scale, a) for a in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                factor = work[r][col]
                work[r] = [f.sub(a, f.mul(factor, b)) for a, b in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    return work[:rank], pivots


def rank(f: Field, rows: Sequence[Sequence[FieldElem]]) -> int:
    return len(row_reduce(f, rows)[1])


def nullspace(f: Field, rows: Sequence[Sequence[FieldElem]], width: int) -> List[Point]:
    """Basis of {v : row . v = 0 for every row}."""
    reduced, pivots = row_reduce(f, rows)
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * width
        v[fc] = 1
        for row, pc in zip(reduced, pivots):
            v[pc] = f.neg(row[fc])
        basis.append(tuple(v))
    return basis


def determinant(f: Field, matrix: Sequence[Sequence[FieldElem]]) -> FieldElem:
    work = [list(r) for r in matrix]
    size = len(work)
    det = 1
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if work[r][col]), None)
        if pivot_row is None:
            return 0
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            det = f.neg(det)
        det = f.mul(det, work[col][col])
        inv = f.inv(work[col][col])
        for r in range(col + 1, size):
            if work[r][col]:
                factor = f.mul(work[r][col], inv)
                work[r] = [f.sub(a, f.mul(factor, b)) for a, b in zip(work[r], work[col])]
    return det


def mat_inverse(f: Field, matrix: Sequence[Sequence[FieldElem]]) -> Matrix:
    """
    Inverse of a square matrix.

    Raises:
        DegenerateConfigurationError: If the matrix is singular
    """
    size = len(matrix)
    augmented = [list(row) + [1 if i == j else 0 for j in range(size)] for i, row in enumerate(matrix)]
    reduced, pivots = row_reduce(f, augmented)
    if pivots[:size] != list(range(size)) or len(reduced) < size:
        raise DegenerateConfigurationError("Matrix is singular", points=matrix)
    return tuple(tuple(row[size:]) for row in reduced)


# ---------------------------------------------------------------------------
# Directions and lines
# ---------------------------------------------------------------------------


def canonical_direction(f: Field, v: Sequence[FieldElem]) -> Direction:
    """
    Scale v so that its first nonzero coordinate is 1.

    Args:
        f: Field of the coordinates
        v: Nonzero vector

    Returns:
        Canonical Direction; proportional vectors give equal results

    Raises:
        InvalidParameterError: If v is the zero vector
    """
    pivot = next((i for i, c in enumerate(v) if c), None)
    if pivot is None:
        raise InvalidParameterError("The zero vector has no direction", parameter="vector", value=tuple(v))
    scale = f.inv(v[pivot])
    vector = tuple(0 if i < pivot else f.mul(scale, c) for i, c in enumerate(v))
    return Direction(vector, pivot)


def direction_count(q: int, n: int) -> int:
    """Number of directions (q^n - 1)/(q - 1) of F_q^n."""
    return (q ** n - 1) // (q - 1)


def iter_directions(f: Field, n: int) -> Iterator[Direction]:
    """Directions ordered by pivot, then by the tail in packed-lexicographic order."""
    ParameterValidator.validate_dimension(n, minimum=1)
    for pivot in range(n):
        for tail in itertools.product(range(f.q), repeat=n - pivot - 1):
            yield Direction((0,) * pivot + (1,) + tail, pivot)


def enumerate_directions(f: Field, n: int) -> List[Direction]:
    """All (q^n - 1)/(q - 1) canonical directions of F_q^n."""
    return list(iter_directions(f, n))


def line_through(f: Field, pt: Sequence[FieldElem], d: Direction) -> Line:
    """Canonical line through pt with direction d."""
    t = pt[d.pivot]
    if t == 0:
        return Line(d, tuple(pt))
    return Line(d, tuple(f.sub(a, f.mul(t, b)) for a, b in zip(pt, d.vector)))


def line_key(f: Field, pt: Sequence[FieldElem], d: Direction) -> Point:
    """Base point of the line through pt in direction d (hashable bucket key)."""
    return line_through(f, pt, d).base


def points_on_line(f: Field, line: Line) -> List[Point]:
    """The q points base + t * direction, ordered by t."""
    base, vector = line.base, line.direction.vector
    return [tuple(f.add(b, f.mul(t, v)) for b, v in zip(base, vector)) for t in range(f.q)]


def line_through_points(f: Field, a: Sequence[FieldElem], b: Sequence[FieldElem]) -> Line:
    """
    The line through two distinct points.

    Raises:
        DegenerateConfigurationError: If a == b
    """
    if tuple(a) == tuple(b):
        raise DegenerateConfigurationError("Two distinct points are needed to span a line", points=[a, b])
    return line_through(f, a, canonical_direction(f, vec_sub(f, b, a)))


def is_on_line(f: Field, pt: Sequence[FieldElem], line: Line) -> bool:
    return line_key(f, pt, line.direction) == line.base


def bucket_prime_points(points: np.ndarray, direction: Direction, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Group points of F_p^n by the line they span with a direction.

    Args:
        points: (N, n) integer array of residues
        direction: Canonical direction
        p: Field characteristic (prime field only)

    Returns:
        (unique canonical base points, multiplicity of each)
    """
    d = np.asarray(direction.vector, dtype=np.int64)
    t = points[:, direction.pivot][:, None]
    bases = (points - t * d[None, :]) % p
    keys, counts = np.unique(bases, axis=0, return_counts=True)
    return keys, counts


# ---------------------------------------------------------------------------
# Projective maps
# ---------------------------------------------------------------------------


def affinely_independent(f: Field, points: Sequence[Sequence[FieldElem]]) -> bool:
    if not points:
        return False
    first = points[0]
    diffs = [vec_sub(f, x, first) for x in points[1:]]
    return rank(f, diffs) == len(diffs) if diffs else True


def build_map_to_infinity(f: Field, points: Sequence[Sequence[FieldElem]]) -> ProjectiveMap:
    """
    Projective map sending x_i to the point at infinity of the i-th axis.

    The hyperplane H spanned by the points is sent to the hyperplane at
    infinity. With A the inverse of the matrix whose columns are the x_i and
    phi = 1^T A, the map is (v : 1) -> (A v : phi(v) - 1). If 0 lies on H
    the points are first translated by the first standard basis vector not
    parallel to H.

    Args:
        f: Field
        points: n affinely independent points of F_q^n

    Returns:
        The ProjectiveMap

    Raises:
        DegenerateConfigurationError: If the points are affinely dependent
        UnsupportedDimensionError: If fewer than two points are given
    """
    n = len(points)
    if n < 2:
        raise UnsupportedDimensionError("At least two points are needed", dimension=n, minimum=2)
    if any(len(x) != n for x in points):
        raise DegenerateConfigurationError(f"Expected {n} points of F_q^{n}", points=list(points))
    if not affinely_independent(f, points):
        raise DegenerateConfigurationError("Points are affinely dependent", points=list(points))

    diffs = [vec_sub(f, x, points[0]) for x in points[1:]]
    translation: Optional[Point] = None
    if rank(f, list(points)) < n:
        # 0 lies on H; shift H off the origin
        for k in range(n):
            e_k = tuple(1 if i == k else 0 for i in range(n))
            if rank(f, diffs + [e_k]) == n:
                translation = e_k
                break
        logger.debug(f"Hyperplane through the origin; translating by {translation}")
        points = [vec_add(f, x, translation) for x in points]

    columns = tuple(zip(*points))
    a = mat_inverse(f, columns)
    phi = tuple(
        _sum(f, (a[i][j] for i in range(n))) for j in range(n)
    )
    matrix = tuple(tuple(row) + (0,) for row in a) + (phi + (f.neg(1),),)
    result = ProjectiveMap(f, matrix)

    if translation is not None:
        shift = tuple(
            tuple(1 if i == j else 0 for j in range(n)) + (translation[i],) for i in range(n)
        ) + ((0,) * n + (1,),)
        result = result.compose(ProjectiveMap(f, shift))
    return result


def _sum(f: Field, values: Iterable[FieldElem]) -> FieldElem:
    total = 0
    for v in values:
        total = f.add(total, v)
    return total


def apply_projective(proj: ProjectiveMap, pt: Sequence[FieldElem]) -> Union[Point, AtInfinity]:
    """
    Image of an affine point under a projective map.

    Returns:
        The affine image, or AtInfinity carrying the image direction when
        the last homogeneous coordinate vanishes
    """
    f = proj.field
    image = mat_vec(f, proj.matrix, tuple(pt) + (1,))
    w = image[-1]
    if w == 0:
        return AtInfinity(canonical_direction(f, image[:-1]))
    scale = f.inv(w)
    return tuple(f.mul(scale, c) for c in image[:-1])


def orthogonal_project(pt: Sequence[FieldElem], j1: int, j2: int) -> Point:
    """
    Keep coordinates j1 < j2 (1-based).

    Raises:
        IndexRangeError: If the indices are out of order or out of range
    """
    n = len(pt)
    if not 1 <= j1 < j2 <= n:
        raise IndexRangeError(f"Need 1 <= j1 < j2 <= {n}, got ({j1}, {j2})", indices=[j1, j2], arity=n)
    return (pt[j1 - 1], pt[j2 - 1])


def project_line(f: Field, line: Line, j1: int, j2: int) -> Optional[Line]:
    """Image of a line under orthogonal_project, or None when it collapses to a point."""
    vector = orthogonal_project(line.direction.vector, j1, j2)
    if not any(vector):
        return None
    return line_through(f, orthogonal_project(line.base, j1, j2), canonical_direction(f, vector))


def group_by_line(f: Field, points: Iterable[Point], d: Direction) -> Dict[Point, List[Point]]:
    """Bucket points by the base of their line in direction d."""
    buckets: Dict[Point, List[Point]] = {}
    for pt in points:
        buckets.setdefault(line_key(f, pt, d), []).append(pt)
    return buckets
