"""
Incidence experiments on Furstenberg instances.

Exhaustive coverage checks, incidence counting, the S1/S2 point refinements,
hyperplanar classification and a desk-scale replay of the projective
transport / grid refinement / planar projection pipeline. Every inequality
with explicit constants is evaluated exactly and recorded as a Check.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .config import PipelineConfig
from .constructions import FurstenbergInstance
from .exceptions import (
    InconsistentInputError,
    InvalidParameterError,
    UnsupportedFieldError,
    ValidationError,
)
from .ff_core import Field
from .geometry import (
    AtInfinity,
    Direction,
    Line,
    Point,
    apply_projective,
    bucket_prime_points,
    build_map_to_infinity,
    canonical_direction,
    direction_count,
    enumerate_directions,
    is_on_line,
    line_key,
    line_through_points,
    nullspace,
    orthogonal_project,
    points_on_line,
    project_line,
    rank,
    vec_sub,
)
from .logger import LabLogger
from .lw_refine import GridSet, refine
from .numerics import as_fraction, ceil_scaled_power, ceil_sqrt
from .parallel import map_chunks
from .validators import ParameterValidator

logger = logging.getLogger(__name__)


def _line_dict(line: Line) -> Dict[str, Any]:
    return {"base": list(line.base), "dir": list(line.direction.vector)}


@dataclass
class Check:
    """Outcome of one explicit inequality."""

    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _record(checks: List[Check], name: str, passed: bool, **details: Any) -> Check:
    check = Check(name, bool(passed), details)
    checks.append(check)
    LabLogger().log_check(name, check.passed, details)
    return check


# ---------------------------------------------------------------------------
# Incidence systems
# ---------------------------------------------------------------------------


@dataclass
class IncidenceSystem:
    """Points, lines and the strong sets S_l of each line."""

    field: Field
    n: int
    points: FrozenSet[Point]
    lines: Tuple[Line, ...]
    strong_sets: Dict[Line, Tuple[Point, ...]]

    def __post_init__(self):
        self.points = frozenset(self.points)
        self.lines = tuple(sorted(self.lines))
        for line in self.lines:
            for pt in self.strong_sets.get(line, ()):
                if pt not in self.points or not is_on_line(self.field, pt, line):
                    raise ValidationError(f"Strong point {pt} is not a point of S on line {line}")
        self._lines_at: Dict[Point, List[Line]] = {}
        for line in self.lines:
            for pt in self.strong_sets.get(line, ()):
                self._lines_at.setdefault(pt, []).append(line)

    @classmethod
    def from_instance(cls, inst: FurstenbergInstance, strong_size: Optional[int] = None) -> "IncidenceSystem":
        """
        Strong sets from the witness lines of an instance.

        Args:
            inst: Instance with one witness per direction
            strong_size: |S_l|, default ceil(q^(1/2)); S_l is the smallest
                points of S on the line in sorted order

        Returns:
            The IncidenceSystem
        """
        f = inst.field
        size = ceil_sqrt(f.q) if strong_size is None else strong_size
        strong = {}
        for d in sorted(inst.witnesses):
            line = inst.witnesses[d].line
            on_line = sorted(pt for pt in points_on_line(f, line) if pt in inst.points)
            strong[line] = tuple(on_line[:size])
        return cls(f, inst.n, inst.points, tuple(strong), strong)

    @property
    def total_weight(self) -> int:
        """W = sum over lines of |S_l|."""
        return sum(len(s) for s in self.strong_sets.values())

    def lines_at(self, pt: Point) -> List[Line]:
        """Lines l with pt in S_l."""
        return self._lines_at.get(pt, [])

    def strong_degree(self, pt: Point) -> int:
        return len(self._lines_at.get(pt, ()))

    def triple_count(self, subset: Optional[Iterable[Point]] = None) -> int:
        """|{(x, x', l) : x, x' in subset and S_l}| = sum_l |subset n S_l|^2."""
        if subset is None:
            return sum(len(s) ** 2 for s in self.strong_sets.values())
        subset = subset if isinstance(subset, (set, frozenset)) else set(subset)
        return sum(sum(1 for pt in s if pt in subset) ** 2 for s in self.strong_sets.values())


def count_incidences(
    f: Field,
    points: Iterable[Point],
    lines: Iterable[Line],
    strong: Optional[Dict[Line, Sequence[Point]]] = None,
) -> int:
    """
    Number of (point, line) pairs with the point on the line.

    Args:
        f: Field of the coordinates
        points: Point set
        lines: Line set
        strong: When given, only points of strong[line] count (strong incidences)

    Returns:
        The incidence count
    """
    points = set(points)
    lines = list(lines)
    if not points or not lines:
        return 0
    if strong is not None:
        return sum(sum(1 for pt in strong.get(line, ()) if pt in points) for line in lines)

    by_direction: Dict[Direction, List[Line]] = {}
    for line in lines:
        by_direction.setdefault(line.direction, []).append(line)
    total = 0
    for d, group in by_direction.items():
        buckets = Counter(line_key(f, pt, d) for pt in points)
        total += sum(buckets.get(line.base, 0) for line in group)
    return total


# ---------------------------------------------------------------------------
# Coverage
# ---------------------------------------------------------------------------


@dataclass
class CoverageReport:
    """Per-direction maxima of |l n S| and the coverage verdict."""

    threshold: int
    maxima: Dict[Direction, int]
    best_lines: Dict[Direction, Optional[Line]]

    @property
    def covered(self) -> bool:
        return all(count >= self.threshold for count in self.maxima.values())

    @property
    def worst_direction(self) -> Optional[Direction]:
        if not self.maxima:
            return None
        return min(self.maxima, key=lambda d: (self.maxima[d], d))

    @property
    def min_maximum(self) -> int:
        return min(self.maxima.values(), default=0)

    def to_dict(self) -> Dict[str, Any]:
        worst = self.worst_direction
        return {
            "threshold": self.threshold,
            "covered": self.covered,
            "directions": len(self.maxima),
            "min_maximum": self.min_maximum,
            "worst_direction": list(worst.vector) if worst else None,
            "worst_line": _line_dict(self.best_lines[worst]) if worst and self.best_lines[worst] else None,
            "maxima": [
                {
                    "direction": list(d.vector),
                    "maximum": self.maxima[d],
                    "line": _line_dict(self.best_lines[d]) if self.best_lines[d] else None,
                }
                for d in sorted(self.maxima)
            ],
        }


def _maxima_batch(directions: List[Direction], f: Field, points: Any) -> List[Tuple[Direction, int, Optional[Line]]]:
    """Best line per direction; points is an (N, n) array for prime fields, else a frozenset."""
    results = []
    for d in directions:
        if len(points) == 0:
            results.append((d, 0, None))
            continue
        if isinstance(points, np.ndarray):
            keys, counts = bucket_prime_points(points, d, f.p)
            idx = int(np.argmax(counts))
            results.append((d, int(counts[idx]), Line(d, tuple(int(c) for c in keys[idx]))))
        else:
            buckets = Counter(line_key(f, pt, d) for pt in points)
            base = min(buckets, key=lambda b: (-buckets[b], b))
            results.append((d, buckets[base], Line(d, base)))
    return results


def furstenberg_check(inst: FurstenbergInstance, threshold: int, jobs: int = 1) -> CoverageReport:
    """
    Exhaustive check that every direction has a line meeting S in >= threshold points.

    Points are bucketed by the canonical key of the line they span with each
    direction, so every one of the q^(n-1) parallel lines is accounted for.

    Args:
        inst: Instance to check (its own witnesses are not trusted)
        threshold: Required number of points on the best line
        jobs: Worker processes for the direction scan

    Returns:
        CoverageReport
    """
    f = inst.field
    if f.is_prime_field:
        points: Any = np.array(sorted(inst.points), dtype=np.int64).reshape(-1, inst.n)
    else:
        points = frozenset(inst.points)
    rows = map_chunks(_maxima_batch, enumerate_directions(f, inst.n), jobs, f, points)
    report = CoverageReport(
        threshold=threshold,
        maxima={d: count for d, count, _ in rows},
        best_lines={d: line for d, _, line in rows},
    )
    LabLogger().log_check(
        "furstenberg_coverage",
        report.covered,
        {"threshold": threshold, "min_maximum": report.min_maximum, "directions": len(rows)},
    )
    return report


def naive_direction_maxima(f: Field, points: Iterable[Point], n: int) -> Dict[Direction, int]:
    """Oracle: enumerate all q^(n-1) lines of every direction and intersect explicitly."""
    points = set(points)
    maxima = {}
    for d in enumerate_directions(f, n):
        best = 0
        for base in itertools.product(range(f.q), repeat=n):
            if base[d.pivot] != 0:
                continue
            count = sum(1 for pt in points_on_line(f, Line(d, base)) if pt in points)
            best = max(best, count)
        maxima[d] = best
    return maxima


@dataclass
class PairCountReport:
    """|S|(|S| - 1) >= D t(t - 1) from counting pairs on witness lines."""

    size: int
    directions: int
    t: int
    lhs: int
    rhs: int

    @property
    def passed(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def implied_bound(self) -> float:
        """Lower bound (D t(t-1))^(1/2) on |S|."""
        return math.sqrt(self.rhs)

    def to_dict(self) -> Dict[str, Any]:
        return {**asdict(self), "implied_bound": self.implied_bound, "passed": self.passed}


def pair_count_certificate(inst: FurstenbergInstance) -> PairCountReport:
    """
    Pair-counting certificate: distinct directions see disjoint pairs of points.

    Args:
        inst: Instance whose witnesses give t = min witness count

    Returns:
        PairCountReport
    """
    D = direction_count(inst.field.q, inst.n)
    t = inst.min_witness_count
    size = inst.size
    report = PairCountReport(size=size, directions=D, t=t, lhs=size * (size - 1), rhs=D * t * (t - 1))
    LabLogger().log_check("pair_count", report.passed, {"lhs": report.lhs, "rhs": report.rhs})
    return report


# ---------------------------------------------------------------------------
# Point refinements
# ---------------------------------------------------------------------------


@dataclass
class S1Result:
    """Points of strong degree at most tau1 = s1 W M / q^n."""

    kept: FrozenSet[Point]
    removed: int
    W: int
    M: int
    volume: int
    s1_constant: Fraction

    @property
    def tau1(self) -> Fraction:
        return self.s1_constant * self.W * self.M / self.volume

    @property
    def removal_bound(self) -> Optional[Fraction]:
        """q^n / (s1 M); None when S is empty."""
        return None if self.M == 0 else Fraction(self.volume) / (self.s1_constant * self.M)

    @property
    def bound_ok(self) -> bool:
        return self.removal_bound is None or self.removed <= self.removal_bound


def refine_s1(system: IncidenceSystem, s1_constant: float = 100) -> S1Result:
    """
    Drop points lying in too many strong sets.

    x is removed when deg(x) > tau1 = s1 W M / q^n, with W = sum_l |S_l| and
    M = |S|. Since the degrees sum to W, at most q^n / (s1 M) points go.

    Args:
        system: Incidence system
        s1_constant: The constant s1

    Returns:
        S1Result
    """
    s1 = as_fraction(s1_constant)
    W, M = system.total_weight, len(system.points)
    volume = system.field.q ** system.n
    kept = frozenset(x for x in system.points if system.strong_degree(x) * volume <= s1 * W * M)
    result = S1Result(kept=kept, removed=M - len(kept), W=W, M=M, volume=volume, s1_constant=s1)
    logger.info(f"S1: kept {len(kept)} of {M} points (tau1 = {float(result.tau1):.3f})")
    return result


@dataclass
class S2Result:
    """Points of S1 whose triple weight is at least W3 / (s2 M)."""

    kept: FrozenSet[Point]
    weights: Dict[Point, int]
    W3: int
    retained: int
    M: int
    s2_constant: Fraction

    @property
    def threshold(self) -> Fraction:
        return Fraction(0) if self.M == 0 else Fraction(self.W3) / (self.s2_constant * self.M)

    @property
    def mass_ok(self) -> bool:
        """Retained mass is at least (1 - 1/s2) W3, i.e. half of it for s2 = 2."""
        s2 = self.s2_constant
        return s2 * self.retained >= (s2 - 1) * self.W3


def refine_s2(system: IncidenceSystem, S1: Iterable[Point], s2_constant: float = 2) -> S2Result:
    """
    Keep the points of S1 carrying their share of the triple mass.

    With w(x) = sum over lines l with x in S_l of |S1 n S_l| and W3 the sum of
    w over S1, x is kept when s2 M w(x) >= W3.

    Args:
        system: Incidence system
        S1: Result of refine_s1
        s2_constant: The constant s2

    Returns:
        S2Result
    """
    s2 = as_fraction(s2_constant)
    S1 = frozenset(S1)
    M = len(system.points)
    on_line = {line: sum(1 for pt in pts if pt in S1) for line, pts in system.strong_sets.items()}
    weights = {x: sum(on_line[line] for line in system.lines_at(x)) for x in S1}
    W3 = sum(weights.values())
    kept = frozenset(x for x, w in weights.items() if s2 * M * w >= W3)
    retained = sum(weights[x] for x in kept)
    logger.info(f"S2: kept {len(kept)} of {len(S1)} points, triple mass {retained}/{W3}")
    return S2Result(kept=kept, weights=weights, W3=W3, retained=retained, M=M, s2_constant=s2)


# ---------------------------------------------------------------------------
# Hyperplanar classification
# ---------------------------------------------------------------------------


def _count_orthogonal(f: Field, normals: Sequence[Sequence[int]], vectors: Sequence[Sequence[int]]) -> List[int]:
    if f.is_prime_field:
        products = (np.array(normals, dtype=np.int64) @ np.array(vectors, dtype=np.int64).T) % f.p
        return [int(c) for c in (products == 0).sum(axis=1)]
    counts = []
    for normal in normals:
        counts.append(sum(1 for v in vectors if _dot(f, normal, v) == 0))
    return counts


def _dot(f: Field, u: Sequence[int], v: Sequence[int]) -> int:
    total = 0
    for a, b in zip(u, v):
        total = f.add(total, f.mul(a, b))
    return total


def max_coplanar(f: Field, dirs: Iterable[Direction], n: int) -> int:
    """
    Largest number of dirs inside one (n-1)-dimensional linear subspace.

    Candidate hyperplanes are those spanned by (n-1)-subsets of dirs, or every
    canonical normal when that is the smaller family.
    """
    vectors = [d.vector for d in sorted(set(dirs))]
    if not vectors:
        return 0
    if rank(f, vectors) <= n - 1:
        return len(vectors)
    if math.comb(len(vectors), n - 1) <= direction_count(f.q, n):
        normals = set()
        for subset in itertools.combinations(vectors, n - 1):
            basis = nullspace(f, subset, n)
            if len(basis) == 1:
                normals.add(canonical_direction(f, basis[0]).vector)
        normals = sorted(normals)
    else:
        normals = [d.vector for d in enumerate_directions(f, n)]
    return max(_count_orthogonal(f, normals, vectors))


def classify_hyperplanar(f: Field, x: Point, dirs: Iterable[Direction], threshold: int) -> Tuple[bool, int]:
    """
    Decide whether at least `threshold` of the strong lines through x share a hyperplane.

    Args:
        f: Field
        x: The point (its length fixes n)
        dirs: Directions of the lines l with x in S_l
        threshold: Minimal coplanar count for a hyperplanar point

    Returns:
        (hyperplanar, maximal coplanar count)

    Raises:
        UnsupportedDimensionError: If n < 3
    """
    n = len(x)
    ParameterValidator.validate_dimension(n, minimum=3)
    best = max_coplanar(f, dirs, n)
    return best >= threshold, best


def hyperplanar_by_normals(f: Field, x: Point, dirs: Iterable[Direction], threshold: int) -> Tuple[bool, int]:
    """Oracle for classify_hyperplanar: scan every canonical normal vector."""
    n = len(x)
    ParameterValidator.validate_dimension(n, minimum=3)
    vectors = [d.vector for d in sorted(set(dirs))]
    if not vectors:
        return 0 >= threshold, 0
    best = max(_count_orthogonal(f, [d.vector for d in enumerate_directions(f, n)], vectors))
    return best >= threshold, best


def hyperplanar_min_count(cfg: PipelineConfig, M: int) -> int:
    """
    Smallest coplanar count classed as hyperplanar.

    max(floor, ceil(delta p^(n-1/2) / M)) with delta = c p^(-1/n), i.e. the
    power p^((2n^2 - n - 2) / (2n)) scaled by c / M.
    """
    exponent = Fraction(2 * cfg.n * cfg.n - cfg.n - 2, 2 * cfg.n)
    scaled = ceil_scaled_power(as_fraction(cfg.delta_coefficient) / max(M, 1), cfg.p, exponent)
    return max(cfg.floor, scaled)


def _hyperplanar_batch(items: List[Tuple[Point, Tuple[Direction, ...]]], f: Field, threshold: int) -> List[Tuple[Point, bool, int]]:
    return [(x, *classify_hyperplanar(f, x, dirs, threshold)) for x, dirs in items]


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


@dataclass
class TupleSearch:
    """Chosen tuple (x_1..x_n) and the points of S4 supporting it."""

    chosen: Optional[Tuple[Point, ...]]
    supporters: List[Point]
    evaluated: int
    method: str


def _spans(f: Field, x: Point, tup: Sequence[Point]) -> bool:
    return rank(f, [vec_sub(f, y, x) for y in tup]) == len(tup)


def select_tuple(
    f: Field, n: int, candidates: Dict[Point, Set[Point]], cap: int
) -> TupleSearch:
    """
    Pick (x_1..x_n) maximizing the number of x whose lines x x_i span F_p^n.

    Args:
        f: Field
        n: Dimension
        candidates: For each x of S4, the set G_x minus x
        cap: Exhaustive search is used while sum_x C(|G_x \\ x|, n) <= cap

    Returns:
        TupleSearch; chosen is None when no x sees a spanning tuple
    """
    total = sum(math.comb(len(c), n) for c in candidates.values())
    order = sorted(candidates)

    if total <= cap:
        scores: Counter = Counter()
        for x in order:
            for tup in itertools.combinations(sorted(candidates[x]), n):
                if _spans(f, x, tup):
                    scores[tup] += 1
        if not scores:
            return TupleSearch(None, [], total, "exhaustive")
        best = min(scores, key=lambda t: (-scores[t], t))
        supporters = [x for x in order if set(best) <= candidates[x] and _spans(f, x, best)]
        return TupleSearch(best, supporters, total, "exhaustive")

    prefix: List[Point] = []
    alive = order
    evaluated = 0
    for _ in range(n):
        pool = sorted(set().union(*(candidates[x] for x in alive)) - set(prefix))
        best, best_support = None, []
        for c in pool:
            evaluated += 1
            support = [x for x in alive if c in candidates[x] and _spans(f, x, prefix + [c])]
            if len(support) > len(best_support):
                best, best_support = c, support
        if best is None:
            return TupleSearch(None, [], evaluated, "greedy")
        prefix.append(best)
        alive = best_support
    return TupleSearch(tuple(prefix), alive, evaluated, "greedy")


def _planar_histogram(f: Field, points: Set[Point], lines: Set[Line]) -> Dict[int, int]:
    richness = Counter(sum(1 for pt in points if is_on_line(f, pt, line)) for line in lines)
    return dict(sorted(richness.items()))


def _within_cs(incidences: int, a: int, b: int) -> bool:
    """Exact incidences <= a b^(1/2) + b."""
    if incidences <= b:
        return True
    return (incidences - b) ** 2 <= a * a * b


@dataclass
class PipelineReport:
    """Sizes, thresholds, measurements and tagged checks of one pipeline run."""

    config: Dict[str, Any]
    M: int
    W: int
    sizes: Dict[str, int]
    triples: Dict[str, int]
    thresholds: Dict[str, Any]
    hyperplanar_fraction: float
    stage: str
    gx_stats: Dict[str, Any] = field(default_factory=dict)
    search: Dict[str, Any] = field(default_factory=dict)
    chosen_tuple: Optional[List[List[int]]] = None
    r: int = 0
    dropped_at_infinity: int = 0
    transport: Dict[str, int] = field(default_factory=dict)
    grid: Dict[str, int] = field(default_factory=dict)
    certificates: List[Dict[str, Any]] = field(default_factory=list)
    projection_pair: Optional[Tuple[int, int]] = None
    planar: Dict[str, Any] = field(default_factory=dict)
    histogram: Dict[int, int] = field(default_factory=dict)
    ratios: Dict[str, float] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["projection_pair"] = list(self.projection_pair) if self.projection_pair else None
        data["histogram"] = [{"richness": k, "line_count": v} for k, v in sorted(self.histogram.items())]
        data["passed"] = self.passed
        return data


def run_pipeline(cfg: PipelineConfig, inst: FurstenbergInstance, jobs: int = 1) -> PipelineReport:
    """
    Replay the refinement, transport, grid and projection steps on an instance.

    Args:
        cfg: Pipeline parameters
        inst: Prime-field instance over F_p^n with n >= 3
        jobs: Worker processes for the hyperplanar tests

    Returns:
        PipelineReport

    Raises:
        UnsupportedDimensionError: If n < 3
        UnsupportedFieldError: If the instance is not over a prime field
        InvalidParameterError: If the instance does not match cfg or beta != 1/2
        InconsistentInputError: If both S3 and S4 are empty
    """
    ParameterValidator.validate_dimension(inst.n, minimum=3)
    f = inst.field
    if not f.is_prime_field:
        raise UnsupportedFieldError(f"The pipeline needs a prime field, got {f}", parameter="field", value=f.q)
    if (f.p, inst.n) != (cfg.p, cfg.n):
        raise InvalidParameterError(
            f"Instance over F_{f.p}^{inst.n} does not match the configuration (p={cfg.p}, n={cfg.n})",
            parameter="inst",
            value=(f.p, inst.n),
        )
    if Fraction(inst.beta) != Fraction(1, 2):
        raise InvalidParameterError(
            f"The pipeline replays beta = 1/2 instances, got beta = {inst.beta}",
            parameter="beta",
            value=str(inst.beta),
        )
    p, n = cfg.p, cfg.n
    checks: List[Check] = []

    system = IncidenceSystem.from_instance(inst)
    S, M, W = system.points, len(system.points), system.total_weight

    s1 = refine_s1(system, cfg.s1_constant)
    _record(
        checks,
        "s1_removal_bound",
        s1.bound_ok,
        removed=s1.removed,
        bound=float(s1.removal_bound) if s1.removal_bound is not None else None,
    )
    s2 = refine_s2(system, s1.kept, cfg.s2_constant)
    _record(checks, "s2_triple_mass", s2.mass_ok, retained=s2.retained, W3=s2.W3)

    min_count = hyperplanar_min_count(cfg, M)
    items = [(x, tuple(line.direction for line in system.lines_at(x))) for x in sorted(s2.kept)]
    classified = map_chunks(_hyperplanar_batch, items, jobs, f, min_count)
    S3 = frozenset(x for x, hyper, _ in classified if hyper)
    S4 = frozenset(x for x, hyper, _ in classified if not hyper)
    if not S3 and not S4:
        raise InconsistentInputError("Both the hyperplanar and the non-hyperplanar parts are empty")

    _record(checks, "monotonicity", S >= s1.kept >= s2.kept, sizes=[M, len(s1.kept), len(s2.kept)])
    _record(
        checks,
        "hyperplanar_partition",
        (S3 | S4) == s2.kept and not (S3 & S4),
        s3=len(S3),
        s4=len(S4),
    )

    delta = float(cfg.delta_coefficient) * p ** (-1 / n)
    report = PipelineReport(
        config=cfg.to_dict(),
        M=M,
        W=W,
        sizes={"S": M, "S1": len(s1.kept), "S2": len(s2.kept), "S3": len(S3), "S4": len(S4)},
        triples={"S": system.triple_count(), "S1": s2.W3, "S2": system.triple_count(s2.kept)},
        thresholds={
            "tau1": float(s1.tau1),
            "s2_weight": float(s2.threshold),
            "delta": delta,
            "hyperplanar": delta * p ** (n - 0.5) / M if M else None,
            "hyperplanar_floor": cfg.floor,
            "hyperplanar_min_count": min_count,
        },
        hyperplanar_fraction=len(S3) / len(s2.kept),
        stage="hyperplanar_branch",
        ratios={"M_over_half_power": M / p ** (n / 2)},
        checks=checks,
    )
    logger.info(
        f"Pipeline sizes: {report.sizes}",
        extra={"extra": {"sizes": report.sizes, "p": p, "n": n}},
    )
    if not S4:
        return report

    # G_x: points of S1 sharing a strong set with x
    candidates: Dict[Point, Set[Point]] = {}
    for x in sorted(S4):
        gx = {y for line in system.lines_at(x) for y in system.strong_sets[line] if y in s1.kept}
        candidates[x] = gx - {x}
    gx_sizes = [len(c) + 1 for c in candidates.values()]
    report.gx_stats = {"min": min(gx_sizes), "max": max(gx_sizes), "mean": sum(gx_sizes) / len(gx_sizes)}

    search = select_tuple(f, n, candidates, cfg.tuple_search_cap)
    report.search = {"method": search.method, "evaluated": search.evaluated}
    report.r = len(search.supporters)
    report.ratios["r_over_reference"] = report.r / (p ** (n * n) / M ** (2 * n - 1))
    if search.chosen is None:
        report.stage = "no_tuple"
        logger.info("No point of S4 sees a spanning tuple; stopping before transport")
        return report
    report.chosen_tuple = [list(x) for x in search.chosen]

    proj = build_map_to_infinity(f, search.chosen)
    images = {x: apply_projective(proj, x) for x in sorted(S)}
    report.dropped_at_infinity = sum(1 for y in images.values() if isinstance(y, AtInfinity))
    if report.dropped_at_infinity:
        logger.warning(f"{report.dropped_at_infinity} points were sent to infinity by the transport")

    image_lines: Dict[Line, Line] = {}
    checked = violations = 0
    for line in system.lines:
        affine = [y for y in (apply_projective(proj, pt) for pt in points_on_line(f, line)) if not isinstance(y, AtInfinity)]
        if len(affine) < 2:
            continue
        image = line_through_points(f, affine[0], affine[1])
        image_lines[line] = image
        violations += sum(1 for y in affine if not is_on_line(f, y, image))
        for pt in system.strong_sets[line]:
            y = images[pt]
            if isinstance(y, AtInfinity):
                continue
            checked += 1
            violations += 0 if is_on_line(f, y, image) else 1
    report.transport = {"strong_incidences_checked": checked, "violations": violations}
    _record(checks, "transport_soundness", violations == 0, checked=checked, violations=violations)

    survivors = sorted(images[x] for x in search.supporters)
    labels = []
    for j in range(n):
        keys = sorted({y[:j] + y[j + 1:] for y in survivors})
        index = {key: i for i, key in enumerate(keys)}
        labels.append({y: index[y[:j] + y[j + 1:]] for y in survivors})
    point_of = {tuple(labels[j][y] for j in range(n)): y for y in survivors}
    current = frozenset(point_of)
    report.grid = {"initial": len(current)}

    for j1, j2 in itertools.combinations(range(n), 2):
        perm = (j1, j2) + tuple(j for j in range(n) if j not in (j1, j2))
        grid = GridSet(n, frozenset(tuple(e[i] for i in perm) for e in current))
        refined, cert = refine(grid, 2)
        inverse = [perm.index(i) for i in range(n)]
        current = frozenset(tuple(e[inverse[i]] for i in range(n)) for e in refined.elements)
        report.certificates.append({"pair": [j1 + 1, j2 + 1], "certificate": cert.to_dict()})
        _record(checks, f"grid_certificate_{j1 + 1}_{j2 + 1}", cert.passed, t0=cert.t0, t2=cert.t2)
    report.grid["refined"] = len(current)

    refined_points = {point_of[e] for e in current}
    refined_sources = {x for x in search.supporters if images[x] in refined_points}
    selected = sorted(
        {
            image_lines[line]
            for line in system.lines
            if line in image_lines and any(pt in refined_sources for pt in system.strong_sets[line])
        }
    )

    pairs = list(itertools.combinations(range(1, n + 1), 2))
    j1, j2 = max(pairs, key=lambda pr: sum(1 for l in selected if project_line(f, l, *pr)))
    report.projection_pair = (j1, j2)
    planar_points = {orthogonal_project(y, j1, j2) for y in refined_points}
    planar_lines = {pl for pl in (project_line(f, l, j1, j2) for l in selected) if pl is not None}
    report.histogram = _planar_histogram(f, planar_points, planar_lines)
    incidences = sum(k * v for k, v in report.histogram.items())
    P, L = len(planar_points), len(planar_lines)
    baseline = min(P * math.sqrt(L) + L, L * math.sqrt(P) + P)
    report.planar = {
        "points": P,
        "lines": L,
        "selected_lines": len(selected),
        "incidences": incidences,
        "cauchy_schwarz_baseline": baseline,
    }
    _record(
        checks,
        "cauchy_schwarz",
        _within_cs(incidences, P, L) and _within_cs(incidences, L, P),
        incidences=incidences,
        baseline=baseline,
    )
    report.stage = "complete"
    logger.info(
        f"Pipeline complete: r = {report.r}, grid {report.grid}, pair ({j1}, {j2}), {P} planar points",
        extra={"extra": {"r": report.r, "grid": report.grid, "planar": report.planar}},
    )
    return report
