"""
Extremal Furstenberg sets over finite fields.

Builds Delta-systems (a small set Delta with mu*Delta - Delta covering the
field), multiplier sets X with small sumsets x*Delta + Delta, the prime-field
construction (and its beta = 0 prime-power variant) and the F_{p^2}
construction, together with their verification reports.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .exceptions import (
    DegenerateConfigurationError,
    InsufficientMultipliersError,
    InvalidParameterError,
    InvariantViolationError,
    UnsupportedFieldError,
)
from .ff_core import Field, FieldElem
from .geometry import (
    Direction,
    Line,
    Point,
    direction_count,
    enumerate_directions,
    line_through,
    points_on_line,
)
from .logger import LabLogger
from .numerics import Rational, as_fraction, ceil_scaled_power, ceil_sqrt, format_rational
from .parallel import map_chunks
from .validators import ParameterValidator

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Delta-systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaSystem:
    """A set Delta and a multiplier mu with mu*Delta - Delta = F_q."""

    field: Field
    delta: Tuple[FieldElem, ...]
    mu: FieldElem
    recipe: str = "manual"
    K: float = 1.0

    def difference_set(self) -> Set[FieldElem]:
        """mu*Delta - Delta."""
        f = self.field
        return {f.sub(f.mul(self.mu, a), b) for a in self.delta for b in self.delta}

    def covers_field(self) -> bool:
        return len(self.difference_set()) == self.field.q


def sumset(d: DeltaSystem, x: FieldElem) -> Set[FieldElem]:
    """x*Delta + Delta."""
    f = d.field
    return {f.add(f.mul(x, a), b) for a in d.delta for b in d.delta}


def sumset_size(d: DeltaSystem, x: FieldElem) -> int:
    """|x*Delta + Delta|; vectorized for prime fields."""
    f = d.field
    if f.is_prime_field:
        values = np.asarray(d.delta, dtype=np.int64)
        return int(np.unique((x * values[:, None] + values[None, :]) % f.p).size)
    return len(sumset(d, x))


def _prime_delta(f: Field, K: Rational) -> DeltaSystem:
    s = ceil_sqrt(f.p)
    delta = tuple(sorted({k % f.p for k in range(1, s + 1)}))
    system = DeltaSystem(f, delta, (s + 1) % f.p, "prime", float(K))
    if system.covers_field():
        return system
    logger.warning(
        f"mu = {s + 1} does not give mu*Delta - Delta = F_{f.p}; falling back to mu = {s}",
        extra={"extra": {"p": f.p, "recipe": "prime-fallback"}},
    )
    return DeltaSystem(f, delta, s % f.p, "prime-fallback", float(K))


def build_delta(f: Field, K: Rational = 1) -> DeltaSystem:
    """
    Build the Delta-system of a field.

    Prime fields use Delta = {1, ..., s} with s = ceil(sqrt(p)) and mu = s + 1
    (mu = s when s + 1 fails to cover). For q = p^(2h), Delta is the set of
    polynomials of degree < h and mu = x^h. For q = p^(2h+1), Delta holds the
    polynomials of degree <= h whose constant term lies in Delta(p), and
    mu = x^h + mu(p).

    Args:
        f: Field
        K: Scale constant, recorded for the prime-power multiplier lemma

    Returns:
        DeltaSystem with mu*Delta - Delta = F_q

    Raises:
        InvalidParameterError: If K is not positive
        InvariantViolationError: If the recipe fails to cover the field
    """
    ParameterValidator.validate_scale(K)
    if f.is_prime_field:
        system = _prime_delta(f, K)
    else:
        h, odd = divmod(f.m, 2)
        if not odd:
            system = DeltaSystem(f, tuple(range(f.p ** h)), f.p ** h, "even", float(K))
        else:
            base = _prime_delta(Field.prime(f.p), K)
            delta = tuple(sorted(a0 + f.p * r for r in range(f.p ** h) for a0 in base.delta))
            system = DeltaSystem(f, delta, f.p ** h + base.mu, "odd", float(K))

    if not system.covers_field():
        raise InvariantViolationError(f"Delta-system for {f} does not cover the field", check="delta_coverage")
    logger.debug(f"Delta-system for {f}: |Delta| = {len(system.delta)}, mu = {f.format_element(system.mu)}")
    return system


@dataclass
class DeltaReport:
    """Verification report of a Delta-system."""

    field: Field
    delta_size: int
    mu: FieldElem
    recipe: str
    sqrt_q: float
    size_bound_ok: bool
    covered: bool
    missing: List[FieldElem]
    histogram: Dict[int, int]

    @property
    def passed(self) -> bool:
        return self.covered and self.size_bound_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field": self.field.to_dict(),
            "delta_size": self.delta_size,
            "mu": self.field.encode_element(self.mu),
            "recipe": self.recipe,
            "sqrt_q": self.sqrt_q,
            "size_bound_ok": self.size_bound_ok,
            "covered": self.covered,
            "missing": [self.field.encode_element(x) for x in self.missing],
            "sumset_histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "passed": self.passed,
        }


def verify_delta(d: DeltaSystem, histogram: bool = True) -> DeltaReport:
    """
    Check |Delta| <= 2 sqrt(q) + 2 and mu*Delta - Delta = F_q.

    Args:
        d: Delta-system
        histogram: Also tabulate |x*Delta + Delta| over every x in F_q

    Returns:
        DeltaReport
    """
    f = d.field
    size = len(d.delta)
    size_ok = size <= 2 or (size - 2) ** 2 <= 4 * f.q
    differences = d.difference_set()
    missing = [x for x in range(f.q) if x not in differences]

    counts: Dict[int, int] = {}
    if histogram:
        for x in range(f.q):
            s = sumset_size(d, x)
            counts[s] = counts.get(s, 0) + 1

    report = DeltaReport(
        field=f,
        delta_size=size,
        mu=d.mu,
        recipe=d.recipe,
        sqrt_q=math.sqrt(f.q),
        size_bound_ok=size_ok,
        covered=not missing,
        missing=missing,
        histogram=counts,
    )
    LabLogger().log_check(
        "delta_coverage", report.covered, {"q": f.q, "missing": len(missing), "delta_size": size}
    )
    return report


def compute_L(d: DeltaSystem, r: int) -> Tuple[int, List[FieldElem]]:
    """
    Count x != -mu in F_p with |x*Delta + Delta| <= r.

    Args:
        d: Delta-system over a prime field
        r: Sumset size bound

    Returns:
        (count, qualifying x in increasing order)

    Raises:
        UnsupportedFieldError: If the field is not prime
    """
    f = d.field
    if not f.is_prime_field:
        raise UnsupportedFieldError(f"L(r) is defined over prime fields, got {f}", parameter="q", value=f.q)
    minus_mu = f.neg(d.mu)
    xs = [x for x in range(f.q) if x != minus_mu and sumset_size(d, x) <= r]
    return len(xs), xs


# ---------------------------------------------------------------------------
# Multiplier sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplierSet:
    """Selected multipliers X, ordered by (|x*Delta + Delta|, x)."""

    delta: DeltaSystem
    xs: Tuple[FieldElem, ...]
    sizes: Tuple[int, ...]
    beta: Fraction
    K: float
    requested: int
    excluded: Tuple[FieldElem, ...] = ()
    minus_mu_in_X: bool = False
    capped: bool = False

    @property
    def max_sumset(self) -> int:
        return max(self.sizes) if self.sizes else 0

    def to_dict(self) -> Dict[str, Any]:
        f = self.delta.field
        return {
            "xs": [f.encode_element(x) for x in self.xs],
            "sizes": list(self.sizes),
            "max_sumset": self.max_sumset,
            "requested": self.requested,
            "excluded": [f.encode_element(x) for x in self.excluded],
            "minus_mu_in_X": self.minus_mu_in_X,
            "capped": self.capped,
        }


def degenerate_multipliers(d: DeltaSystem) -> List[FieldElem]:
    """Elements a with a*mu + 1 = 0."""
    f = d.field
    if d.mu == 0:
        return []
    return [f.neg(f.inv(d.mu))]


def lemma_degree(f: Field, K: Rational) -> int:
    """
    Smallest gamma >= 0 with K <= p^gamma.

    Raises:
        InsufficientMultipliersError: If K exceeds q
    """
    K = as_fraction(K)
    gamma = 0
    while K > f.p ** gamma:
        gamma += 1
    if gamma > f.m:
        raise InsufficientMultipliersError(
            f"K = {K} exceeds the field order {f.q}", requested=math.ceil(K), available=f.q
        )
    return gamma


def _rank_multipliers(d: DeltaSystem, candidates: Iterable[FieldElem]) -> List[Tuple[int, FieldElem]]:
    return sorted((sumset_size(d, x), x) for x in candidates)


def build_X(d: DeltaSystem, beta: Rational, K: Rational) -> MultiplierSet:
    """
    Choose ceil(K q^beta) multipliers with the smallest sumsets.

    Multipliers with a*mu + 1 = 0 are excluded. Over prime fields all of F_p
    is ranked; over prime powers (beta = 0 only) the polynomials of degree
    below gamma come first, gamma being the smallest integer with
    K <= p^gamma. When more multipliers are requested than exist, the set is
    capped for beta = 1 and K <= 1.

    Args:
        d: Delta-system
        beta: Exact exponent in [0, 1]
        K: Positive scale

    Returns:
        MultiplierSet

    Raises:
        UnsupportedFieldError: For a prime power with beta != 0
        InsufficientMultipliersError: If too few non-degenerate multipliers exist
    """
    beta = ParameterValidator.validate_beta(beta)
    ParameterValidator.validate_scale(K)
    f = d.field
    if not f.is_prime_field and beta != 0:
        raise UnsupportedFieldError(
            f"Prime-power fields are supported only at beta = 0, got {format_rational(beta)}",
            parameter="beta",
            value=beta,
        )

    requested = ceil_scaled_power(K, f.q, beta)
    degenerate = set(degenerate_multipliers(d))
    for x in sorted(degenerate):
        LabLogger().log_exclusion("degenerate", f.format_element(x))

    if f.is_prime_field:
        ranked = _rank_multipliers(d, (x for x in range(f.q) if x not in degenerate))
    else:
        bound = f.p ** lemma_degree(f, K)
        ranked = _rank_multipliers(d, (x for x in range(bound) if x not in degenerate))
        if len(ranked) < requested:
            ranked += _rank_multipliers(d, (x for x in range(bound, f.q) if x not in degenerate))

    capped = False
    count = requested
    if requested > len(ranked):
        if beta == 1 and as_fraction(K) <= 1:
            capped = True
            count = len(ranked)
            logger.info(f"Capping X at {count} non-degenerate multipliers (requested {requested})")
        else:
            raise InsufficientMultipliersError(
                f"Requested {requested} multipliers, only {len(ranked)} are non-degenerate",
                requested=requested,
                available=len(ranked),
            )

    chosen = ranked[:count]
    xs = tuple(x for _, x in chosen)
    return MultiplierSet(
        delta=d,
        xs=xs,
        sizes=tuple(s for s, _ in chosen),
        beta=beta,
        K=float(K),
        requested=requested,
        excluded=tuple(sorted(degenerate)),
        minus_mu_in_X=f.neg(d.mu) in xs,
        capped=capped,
    )


@dataclass
class MultiplierReport:
    """Sumset sizes of the multiplier candidates against the 8 sqrt(q) bound."""

    field: Field
    K: float
    gamma: Optional[int]
    candidates: List[FieldElem]
    sizes: Dict[FieldElem, int]
    required: int
    good: List[FieldElem]

    @property
    def passed(self) -> bool:
        return len(self.good) >= self.required

    def to_dict(self) -> Dict[str, Any]:
        f = self.field
        return {
            "field": f.to_dict(),
            "K": self.K,
            "gamma": self.gamma,
            "required": self.required,
            "candidates": [
                {"x": f.encode_element(x), "sumset": self.sizes[x]} for x in self.candidates
            ],
            "good": len(self.good),
            "passed": self.passed,
        }


def lemma_multipliers(d: DeltaSystem, K: Rational) -> MultiplierReport:
    """
    Multipliers with small sumsets.

    For q = p^m with m > 1 the candidates are the polynomials of degree below
    gamma (p^(gamma-1) < K <= p^gamma); for prime fields they are the
    ceil(K) best elements by sumset size. A candidate is good when
    |x*Delta + Delta| <= 8 sqrt(q), decided as size^2 <= 64 q.
    """
    ParameterValidator.validate_scale(K)
    f = d.field
    required = math.ceil(as_fraction(K))
    if f.is_prime_field:
        gamma = None
        ranked = _rank_multipliers(d, range(f.q))[:required]
        candidates = [x for _, x in ranked]
        sizes = {x: s for s, x in ranked}
    else:
        gamma = lemma_degree(f, K)
        candidates = list(range(f.p ** gamma))
        sizes = {x: sumset_size(d, x) for x in candidates}
    good = [x for x in candidates if sizes[x] ** 2 <= 64 * f.q]
    report = MultiplierReport(f, float(K), gamma, candidates, sizes, required, good)
    LabLogger().log_check("lemma_multipliers", report.passed, {"q": f.q, "good": len(good), "required": required})
    return report


@dataclass
class RatioReport:
    """Sumset sizes for the ratios x/y with 1 <= x, y <= t."""

    t: int
    bound: int
    max_size: int
    distinct_ratios: int
    violations: List[Tuple[int, int]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "bound": self.bound,
            "max_size": self.max_size,
            "distinct_ratios": self.distinct_ratios,
            "violations": [list(v) for v in self.violations],
            "passed": self.passed,
        }


def verify_ratio_sumsets(d: DeltaSystem, t: int) -> RatioReport:
    """
    Check |(x/y)*Delta + Delta| <= 2t(ceil(sqrt(p)) + 1) for integers 1 <= x, y <= t.

    Raises:
        UnsupportedFieldError: If the field is not prime
        InvalidParameterError: If t is outside [1, p - 1]
    """
    f = d.field
    if not f.is_prime_field:
        raise UnsupportedFieldError("Ratio sumsets are defined over prime fields", parameter="q", value=f.q)
    if not 1 <= t < f.p:
        raise InvalidParameterError(f"t must lie in [1, {f.p - 1}], got {t}", parameter="t", value=t)

    bound = 2 * t * (ceil_sqrt(f.p) + 1)
    ratios: Dict[FieldElem, int] = {}
    violations = []
    for x in range(1, t + 1):
        for y in range(1, t + 1):
            r = f.div(x, y)
            if r not in ratios:
                ratios[r] = sumset_size(d, r)
            if ratios[r] > bound:
                violations.append((x, y))
    report = RatioReport(t, bound, max(ratios.values()), len(ratios), violations)
    LabLogger().log_check("ratio_sumsets", report.passed, {"t": t, "bound": bound, "max": report.max_size})
    return report


# ---------------------------------------------------------------------------
# Furstenberg instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A line in a given direction and the number of points of S it meets."""

    direction: Direction
    line: Line
    count: int


@dataclass
class FurstenbergInstance:
    """A point set S of F_q^n with one witness line per direction."""

    field: Field
    n: int
    beta: Fraction
    K: float
    points: FrozenSet[Point]
    witnesses: Dict[Direction, Witness]
    threshold: int
    construction: str = "prime"
    size_bound: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def min_witness_count(self) -> int:
        return min((w.count for w in self.witnesses.values()), default=0)


def swap_coordinates(pt: Sequence[FieldElem], i: int) -> Point:
    """Apply the transposition of coordinates 0 and i."""
    pt = list(pt)
    pt[0], pt[i] = pt[i], pt[0]
    return tuple(pt)


def _union_of_copies(first: Iterable[Point], n: int) -> FrozenSet[Point]:
    first = list(first)
    points: Set[Point] = set(first)
    for i in range(1, n):
        points.update(swap_coordinates(pt, i) for pt in first)
    return frozenset(points)


def _witness_batch(
    directions: List[Direction], f: Field, anchor_base: List[FieldElem], points: FrozenSet[Point]
) -> List[Witness]:
    """Witness lines for a batch of directions (module-level so worker processes can run it)."""
    witnesses = []
    for d in directions:
        slope = swap_coordinates(d.vector, d.pivot)
        base = swap_coordinates((0,) + tuple(anchor_base[y] for y in slope[1:]), d.pivot)
        line = line_through(f, base, d)
        count = sum(1 for pt in points_on_line(f, line) if pt in points)
        witnesses.append(Witness(d, line, count))
    return witnesses


def _collect_witnesses(
    f: Field, n: int, anchor_base: List[FieldElem], points: FrozenSet[Point], threshold: int, jobs: int
) -> Dict[Direction, Witness]:
    directions = enumerate_directions(f, n)
    witnesses = map_chunks(_witness_batch, directions, jobs, f, anchor_base, points)
    short = [w for w in witnesses if w.count < threshold]
    if short:
        raise InvariantViolationError(
            f"{len(short)} witness lines meet S in fewer than {threshold} points", check="witness_count"
        )
    return {w.direction: w for w in witnesses}


def difference_anchors(d: DeltaSystem) -> List[Tuple[FieldElem, FieldElem]]:
    """
    For every y, the first (u, v) in Delta^2 with v*mu - u = y.

    The scan runs over v in the outer loop and u in the inner loop.

    Raises:
        DegenerateConfigurationError: If some y has no anchor
    """
    f = d.field
    anchors: List[Optional[Tuple[FieldElem, FieldElem]]] = [None] * f.q
    for v in d.delta:
        for u in d.delta:
            y = f.sub(f.mul(v, d.mu), u)
            if anchors[y] is None:
                anchors[y] = (u, v)
    missing = [y for y, a in enumerate(anchors) if a is None]
    if missing:
        raise DegenerateConfigurationError(f"No anchors for {len(missing)} field elements", points=missing[:10])
    return anchors


def build_furstenberg(
    f: Field, n: int, beta: Rational, K: Rational, jobs: int = 1, delta: Optional[DeltaSystem] = None
) -> FurstenbergInstance:
    """
    Build the multiplier construction in F_q^n.

    The first copy is E_1 = {(1/(a mu + 1), (a u_j + v_j) mu/(a mu + 1))} over
    a in X and u, v in Delta^(n-1); E_i swaps coordinates 1 and i, and S is
    the union. For a direction with pivot i and remaining slopes y_j, the
    witness line passes through (0, u_2, ..., u_n) (swapped back), where
    v_j mu - u_j = y_j; it meets E_i once for every a in X.

    Args:
        f: Field (prime, or a prime power with beta = 0)
        n: Dimension >= 2
        beta: Exact exponent in [0, 1]
        K: Positive scale (K <= 1 when beta = 1)
        jobs: Worker processes for the witness scan
        delta: Optional Delta-system to use instead of build_delta(f, K)

    Returns:
        FurstenbergInstance with threshold |X|

    Raises:
        InvalidParameterError: For beta = 1 with K > 1
        UnsupportedFieldError: For a prime power with beta != 0
    """
    ParameterValidator.validate_dimension(n, minimum=2)
    beta = ParameterValidator.validate_beta(beta)
    ParameterValidator.validate_scale(K)
    if beta == 1 and as_fraction(K) > 1:
        raise InvalidParameterError("beta = 1 requires K <= 1", parameter="K", value=K)
    if not f.is_prime_field and beta != 0:
        raise UnsupportedFieldError(
            f"{f} is not prime; only beta = 0 is supported over prime powers", parameter="beta", value=beta
        )

    d = delta if delta is not None else build_delta(f, K)
    X = build_X(d, beta, K)

    first_copy = []
    for a in X.xs:
        c = f.inv(f.add(f.mul(a, d.mu), 1))
        scale = f.mul(d.mu, c)
        values = sorted({f.mul(scale, s) for s in sumset(d, a)})
        first_copy.extend((c,) + tail for tail in itertools.product(values, repeat=n - 1))
    points = _union_of_copies(first_copy, n)

    anchors = difference_anchors(d)
    threshold = len(X.xs)
    witnesses = _collect_witnesses(f, n, [u for u, _ in anchors], points, threshold, jobs)

    instance = FurstenbergInstance(
        field=f,
        n=n,
        beta=beta,
        K=float(K),
        points=points,
        witnesses=witnesses,
        threshold=threshold,
        construction="prime" if f.is_prime_field else "prime-power",
        size_bound=n * threshold * X.max_sumset ** (n - 1),
        details={
            "delta": [f.encode_element(x) for x in d.delta],
            "mu": f.encode_element(d.mu),
            "recipe": d.recipe,
            "multipliers": X.to_dict(),
        },
    )
    LabLogger().log_construction(
        instance.construction,
        {"q": f.q, "n": n, "beta": format_rational(beta), "K": float(K)},
        {"size": instance.size, "X": threshold, "max_sumset": X.max_sumset},
    )
    return instance


def build_prime_furstenberg(p: int, n: int, beta: Rational, K: Rational, jobs: int = 1) -> FurstenbergInstance:
    """The multiplier construction over the prime field F_p."""
    return build_furstenberg(Field.prime(p), n, beta, K, jobs=jobs)


def build_psquare(p: int, n: int, jobs: int = 1) -> FurstenbergInstance:
    """
    Build the F_{p^2} construction with |l cap S| >= p in every direction.

    With mu = x, the first copy is
    {(b/(a mu + b), c_2 mu/(a mu + b), ..., c_n mu/(a mu + b))} over projective
    pairs (a : b) of F_p and c in F_p^(n-1). Writing a slope as
    y = y_1 x + y_0, the witness line passes through the base coordinate
    u = -y_0 and contains the p + 1 points with c_j = a u_j + b y_1j.

    Args:
        p: Prime
        n: Dimension >= 2
        jobs: Worker processes for the witness scan

    Returns:
        FurstenbergInstance over F_{p^2} with threshold p
    """
    ParameterValidator.validate_prime(p)
    ParameterValidator.validate_dimension(n, minimum=2)
    f = Field(p, 2)
    mu = f.generator_x()

    pairs = [(0, 1)] + [(1, b) for b in range(p)]
    first_copy = []
    for a, b in pairs:
        denom = f.add(f.mul(a, mu), b)
        first = f.div(b, denom)
        scale = f.div(mu, denom)
        for cs in itertools.product(range(p), repeat=n - 1):
            first_copy.append((first,) + tuple(f.mul(scale, c) for c in cs))
    points = _union_of_copies(first_copy, n)

    anchor_base = [(-(y % p)) % p for y in range(f.q)]
    witnesses = _collect_witnesses(f, n, anchor_base, points, p, jobs)

    instance = FurstenbergInstance(
        field=f,
        n=n,
        beta=Fraction(1, 2),
        K=1.0,
        points=points,
        witnesses=witnesses,
        threshold=p,
        construction="psquare",
        size_bound=n * (p + 1) * p ** (n - 1),
        details={"mu": f.encode_element(mu)},
    )
    LabLogger().log_construction("psquare", {"p": p, "n": n}, {"size": instance.size})
    return instance


@dataclass
class InstanceReport:
    """Consistency report of a stored instance against its own witnesses."""

    directions_expected: int
    directions_witnessed: int
    min_count: int
    threshold: int
    miscounted: List[Direction]
    size: int
    size_bound: Optional[int]

    @property
    def size_ok(self) -> bool:
        return self.size_bound is None or self.size <= self.size_bound

    @property
    def passed(self) -> bool:
        return (
            self.directions_witnessed == self.directions_expected
            and self.min_count >= self.threshold
            and not self.miscounted
            and self.size_ok
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "directions_expected": self.directions_expected,
            "directions_witnessed": self.directions_witnessed,
            "min_count": self.min_count,
            "threshold": self.threshold,
            "miscounted": [list(d.vector) for d in self.miscounted],
            "size": self.size,
            "size_bound": self.size_bound,
            "size_ok": self.size_ok,
            "passed": self.passed,
        }


def verify_instance(inst: FurstenbergInstance) -> InstanceReport:
    """Recount every witness line and check the declared size bound."""
    f = inst.field
    miscounted = []
    for d, w in sorted(inst.witnesses.items()):
        actual = sum(1 for pt in points_on_line(f, w.line) if pt in inst.points)
        if w.line.direction != d or actual != w.count:
            miscounted.append(d)
    report = InstanceReport(
        directions_expected=direction_count(f.q, inst.n),
        directions_witnessed=len(inst.witnesses),
        min_count=inst.min_witness_count,
        threshold=inst.threshold,
        miscounted=miscounted,
        size=inst.size,
        size_bound=inst.size_bound,
    )
    LabLogger().log_check("instance_witnesses", report.passed, {"size": inst.size, "min_count": report.min_count})
    return report


def exponent_summary(q: int, n: int, beta: Rational, size: int) -> Dict[str, Any]:
    """
    Easy lower-bound exponents next to the construction exponent and the measured size.

    Returns:
        Exponents as "num/den" strings plus log_q |S| and |S| / q^construction
    """
    beta = as_fraction(beta)
    pair = beta + Fraction(n - 1, 2)
    polynomial = n * beta
    construction = Fraction(n - 1, 2) + Fraction(n + 1, 2) * beta
    measured = math.log(size, q) if size > 0 else float("-inf")
    return {
        "pair_counting_exponent": format_rational(pair),
        "polynomial_exponent": format_rational(polynomial),
        "construction_exponent": format_rational(construction),
        "measured_exponent": measured,
        "size_ratio": size / q ** float(construction),
    }
