"""
Loomis-Whitney near-equality refinement on abstract grids.

A GridSet is a finite subset T of B^n with integer labels. Axes keep their
original 1-based indices through projections, so nested projections compose.
refine() returns a refinement T' whose Pr_{1..m}-fibers are rich and
uniform, together with a certificate of the explicit-constant conclusions.
All pass/fail decisions compare integers.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import IndexRangeError, InvalidParameterError
from .logger import LabLogger
from .numerics import Rational, as_fraction, exact_power_root
from .validators import ParameterValidator

logger = logging.getLogger(__name__)

Label = Tuple[int, ...]


@dataclass(frozen=True)
class GridSet:
    """Finite subset of B^n; `axes` are the original indices of the coordinates."""

    n: int
    elements: FrozenSet[Label]
    axes: Optional[Tuple[int, ...]] = None
    _cache: Dict[Tuple[int, ...], "GridSet"] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidParameterError(f"Grid arity must be >= 1, got {self.n}", parameter="n", value=self.n)
        elements = frozenset(tuple(int(c) for c in x) for x in self.elements)
        bad = [x for x in elements if len(x) != self.n]
        if bad:
            raise InvalidParameterError(
                f"{len(bad)} elements do not have arity {self.n}", parameter="elements", value=bad[:3]
            )
        object.__setattr__(self, "elements", elements)
        axes = tuple(range(1, self.n + 1)) if self.axes is None else tuple(self.axes)
        if len(axes) != self.n:
            raise IndexRangeError("Axis labels do not match the arity", indices=list(axes), arity=self.n)
        if any(b <= a for a, b in zip(axes, axes[1:])):
            raise IndexRangeError(f"Axis labels {list(axes)} must be strictly ascending", indices=list(axes), arity=self.n)
        object.__setattr__(self, "axes", axes)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item) -> bool:
        return tuple(item) in self.elements

    def positions(self, indices: Sequence[int]) -> List[int]:
        return [self.axes.index(k) for k in indices]


def _project_raw(elements: Iterable[Label], positions: Sequence[int]) -> set:
    return {tuple(x[i] for i in positions) for x in elements}


def project(T: GridSet, indices: Sequence[int]) -> GridSet:
    """
    Projection Pr_{k_1, ..., k_t}(T).

    Args:
        T: Grid set
        indices: Non-empty, strictly ascending axis indices carried by T

    Returns:
        GridSet over the selected axes

    Raises:
        IndexRangeError: For an empty, unsorted or out-of-range index list
    """
    indices = tuple(indices)
    ParameterValidator.validate_index_list(indices, T.axes)
    if indices == T.axes:
        return T
    cached = T._cache.get(indices)
    if cached is None:
        cached = GridSet(len(indices), frozenset(_project_raw(T.elements, T.positions(indices))), indices)
        T._cache[indices] = cached
    return cached


def project_out(T: GridSet, axis: int) -> GridSet:
    """Pr with one axis removed."""
    return project(T, [k for k in T.axes if k != axis])


def projection_sizes(T: GridSet) -> List[int]:
    """|Pr_{1..k^..n}(T)| for every axis k."""
    return [len(project_out(T, k)) for k in T.axes]


def lw_product(T: GridSet) -> int:
    prod = 1
    for size in projection_sizes(T):
        prod *= size
    return prod


def lw_bound(T: GridSet) -> float:
    """
    (prod_k |Pr_{1..k^..n}(T)|)^(1/(n-1)), exact when the product is a perfect power.

    Raises:
        UnsupportedDimensionError: If n < 2
    """
    ParameterValidator.validate_dimension(T.n, minimum=2)
    return exact_power_root(lw_product(T), T.n - 1)


def lw_holds(T: GridSet) -> bool:
    """Exact form |T|^(n-1) <= prod_k |Pr_{1..k^..n}(T)|."""
    ParameterValidator.validate_dimension(T.n, minimum=2)
    return len(T) ** (T.n - 1) <= lw_product(T)


def fibers(T: GridSet, m: int) -> Dict[Label, List[Label]]:
    """Group elements by their first m coordinates; values are the remaining coordinates."""
    groups: Dict[Label, List[Label]] = {}
    for x in T.elements:
        groups.setdefault(x[:m], []).append(x[m:])
    return groups


def fiber_richness(tails: Sequence[Label]) -> List[int]:
    """a_j for each trailing axis j: distinct tails once coordinate j is dropped."""
    k = len(tails[0]) if tails else 0
    return [len({t[:i] + t[i + 1:] for t in tails}) for i in range(k)]


@dataclass
class RefineCertificate:
    """Measured constants of a refinement and the outcome of every explicit inequality."""

    n: int
    m: int
    N: int
    c: Fraction
    t0: int
    t1: int
    t2: int
    min_aj: Optional[int]
    max_fibers: int
    min_fiber: int
    max_dropped: int
    bounds_ok: Tuple[bool, bool, bool, bool]
    mass_ok: bool
    fiber_lw_ok: bool
    monotone_ok: bool
    sharp_ok: Optional[bool] = None

    @property
    def k(self) -> int:
        return self.n - self.m

    @property
    def passed(self) -> bool:
        return (
            all(self.bounds_ok)
            and self.mass_ok
            and self.fiber_lw_ok
            and self.monotone_ok
            and self.sharp_ok is not False
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "N": self.N,
            "c": f"{self.c.numerator}/{self.c.denominator}",
            "t0": self.t0,
            "t1": self.t1,
            "t2": self.t2,
            "min_aj": self.min_aj,
            "max_fibers": self.max_fibers,
            "min_fiber": self.min_fiber,
            "max_dropped": self.max_dropped,
            "bounds_ok": {
                "fiber_richness": self.bounds_ok[0],
                "image_size": self.bounds_ok[1],
                "fiber_size": self.bounds_ok[2],
                "dropped_image_size": self.bounds_ok[3],
            },
            "mass_ok": self.mass_ok,
            "fiber_lw_ok": self.fiber_lw_ok,
            "monotone_ok": self.monotone_ok,
            "sharp_ok": self.sharp_ok,
            "passed": self.passed,
        }


def _check_range(T: GridSet, m: int) -> None:
    if not isinstance(m, int) or not 1 <= m <= T.n:
        raise IndexRangeError(f"m must lie in [1, {T.n}], got {m}", indices=[m], arity=T.n)


def refine(T: GridSet, m: int, c: Optional[Rational] = None) -> Tuple[GridSet, RefineCertificate]:
    """
    Refine T so that its Pr_{1..m}-fibers are rich and uniform.

    With N the largest projection |Pr_{1..k^..n}(T)|, t = |T| and k = n - m:
    for m = n nothing is removed; for m = n - 1 fibers smaller than t/(2N)
    are removed. For m <= n - 2 a fiber y is removed when, for some trailing
    axis j, prod_l a_l(y) (cN)^(k-1) <= (a_j(y) t)^(k-1), giving T_1; then
    fibers of T_1 smaller than |T_1|/(2 F_1) are removed, F_1 being the
    number of fibers of T_1.

    Args:
        T: Non-empty grid set
        m: Number of leading coordinates that index the fibers
        c: Removal constant, default 100n

    Returns:
        (T', certificate)

    Raises:
        InvalidParameterError: If T is empty or c is not positive
        IndexRangeError: If m is outside [1, n]
    """
    if not T.elements:
        raise InvalidParameterError("Cannot refine an empty grid set", parameter="T", value=0)
    _check_range(T, m)
    n = T.n
    c = as_fraction(100 * n if c is None else c)
    if c <= 0:
        raise InvalidParameterError(f"Removal constant must be positive, got {c}", parameter="c", value=c)

    N = max(projection_sizes(T)) if n > 1 else 1
    t = len(T)
    k = n - m

    if k == 0:
        refined = T
        t1 = t
    elif k == 1:
        groups = fibers(T, m)
        kept = [y for y, tails in groups.items() if 2 * N * len(tails) >= t]
        refined = _from_fibers(T, groups, kept, m)
        t1 = t
    else:
        groups = fibers(T, m)
        survivors = []
        for y, tails in groups.items():
            richness = fiber_richness(tails)
            prod = 1
            for a in richness:
                prod *= a
            lhs = prod * (c * N) ** (k - 1)
            if all(lhs > (a * t) ** (k - 1) for a in richness):
                survivors.append(y)
        t1 = sum(len(groups[y]) for y in survivors)
        f1 = len(survivors)
        kept = [y for y in survivors if 2 * f1 * len(groups[y]) >= t1]
        refined = _from_fibers(T, groups, kept, m)

    certificate = verify_certificate(T, refined, m, N, c=c, t1=t1)
    logger.info(
        f"refine(n={n}, m={m}): |T| = {t}, |T1| = {t1}, |T2| = {len(refined)}, N = {N}",
        extra={"extra": {"n": n, "m": m, "t0": t, "t1": t1, "t2": len(refined), "N": N}},
    )
    return refined, certificate


def _from_fibers(T: GridSet, groups: Dict[Label, List[Label]], kept: Iterable[Label], m: int) -> GridSet:
    elements = frozenset(y + tail for y in kept for tail in groups[y])
    return GridSet(T.n, elements, T.axes)


def verify_certificate(
    T: GridSet,
    T2: GridSet,
    m: int,
    N: Optional[int] = None,
    c: Optional[Rational] = None,
    t1: Optional[int] = None,
) -> RefineCertificate:
    """
    Check the refinement conclusions for T2 against T with explicit constants.

    With t = |T|, k = n - m and c = 100n by default:

    - fiber richness (k >= 2): a_j(y) (cN)^(k-1) >= t^(k-1)
    - image size: |Pr_{1..m}(T2)| t^(k-1) <= c^(k-1) N^k
    - fiber size: 200 |fiber| c^(k-1) N^k >= 99 t^k
    - dropped image size: 99 |Pr_{1..j^..m}(T2)| t^k <= 200 c^(k-1) N^(k+1)
    - mass: c t1 >= (c - k) t, 100 t1 >= 99 t, 2 |T2| > t1
    - every fiber obeys |fiber|^(k-1) <= prod_j a_j(y)
    - every projection of T2 lies inside the same projection of T

    For m = n - 1 the sharp bounds (fibers >= t/(2N), |T2| > t/2,
    |Pr_{1..m}(T2)| <= N, dropped image <= 2N^2/t) are checked as well.
    For m = n the conclusions hold vacuously.

    Args:
        T: Original grid set
        T2: Refined subset
        m: Fiber depth
        N: Projection bound; measured from T when omitted
        c: Removal constant; 100n when omitted
        t1: Size of the intermediate set, when known

    Returns:
        RefineCertificate
    """
    _check_range(T, m)
    n = T.n
    c = as_fraction(100 * n if c is None else c)
    if N is None:
        N = max(projection_sizes(T)) if n > 1 else 1
    t = len(T)
    t2 = len(T2)
    k = n - m
    measured_t1 = t1 is not None
    if t1 is None:
        t1 = t if k <= 1 else t2

    subset_ok = T2.elements <= T.elements
    monotone_ok = subset_ok and all(
        project_out(T2, j).elements <= project_out(T, j).elements for j in T.axes
    ) if n > 1 else subset_ok

    groups = fibers(T2, m)
    fiber_sizes = [len(tails) for tails in groups.values()]
    image = len(groups)
    min_fiber = min(fiber_sizes, default=0)

    if m == 1:
        max_dropped = 1 if t2 else 0
    else:
        max_dropped = max((len(project_out(project(T2, T2.axes[:m]), j)) for j in T2.axes[:m]), default=0)

    if k == 0:
        cert = RefineCertificate(
            n=n, m=m, N=N, c=c, t0=t, t1=t1, t2=t2, min_aj=None,
            max_fibers=image, min_fiber=min_fiber, max_dropped=max_dropped,
            bounds_ok=(True, True, True, True),
            mass_ok=t2 == t, fiber_lw_ok=True, monotone_ok=monotone_ok,
        )
        LabLogger().log_check("lw_certificate", cert.passed, {"n": n, "m": m})
        return cert

    richness_all = [fiber_richness(tails) for tails in groups.values()]
    min_aj = min((min(r) for r in richness_all if r), default=None)

    if k >= 2:
        richness_ok = all(a * (c * N) ** (k - 1) >= t ** (k - 1) for r in richness_all for a in r)
    else:
        richness_ok = True
    image_ok = image * t ** (k - 1) <= c ** (k - 1) * N ** k
    fiber_ok = all(200 * s * c ** (k - 1) * N ** k >= 99 * t ** k for s in fiber_sizes)
    dropped_ok = 99 * max_dropped * t ** k <= 200 * c ** (k - 1) * N ** (k + 1)

    if measured_t1 or k <= 1:
        mass_ok = c * t1 >= (c - k) * t and 100 * t1 >= 99 * t and 2 * t2 > t1
    else:
        mass_ok = 200 * t2 > 99 * t

    fiber_lw_ok = True
    for size, r in zip(fiber_sizes, richness_all):
        prod = 1
        for a in r:
            prod *= a
        if size ** (k - 1) > prod:
            fiber_lw_ok = False
            break

    sharp_ok = None
    if k == 1:
        sharp_ok = (
            all(2 * N * s >= t for s in fiber_sizes)
            and 2 * t2 > t
            and image <= N
            and max_dropped * t <= 2 * N * N
        )

    cert = RefineCertificate(
        n=n,
        m=m,
        N=N,
        c=c,
        t0=t,
        t1=t1,
        t2=t2,
        min_aj=min_aj,
        max_fibers=image,
        min_fiber=min_fiber,
        max_dropped=max_dropped,
        bounds_ok=(richness_ok, image_ok, fiber_ok, dropped_ok),
        mass_ok=mass_ok,
        fiber_lw_ok=fiber_lw_ok,
        monotone_ok=monotone_ok,
        sharp_ok=sharp_ok,
    )
    LabLogger().log_check("lw_certificate", cert.passed, {"n": n, "m": m, "t0": t, "t2": t2, "N": N})
    return cert


def full_cube(n: int, b: int) -> GridSet:
    """[0, b)^n."""
    grid = np.indices((b,) * n).reshape(n, -1).T
    return GridSet(n, frozenset(tuple(int(v) for v in row) for row in grid))


def random_grid(n: int, b: int, size: int, seed: int) -> GridSet:
    """
    A seeded random subset of [0, b)^n with min(size, b^n) elements.

    Raises:
        InvalidParameterError: If n, b or size is not positive
    """
    if n < 1 or b < 1 or size < 1:
        raise InvalidParameterError(
            f"Random grid needs positive n, b and size, got {(n, b, size)}", parameter="random", value=(n, b, size)
        )
    rng = np.random.default_rng(seed)
    total = b ** n
    flat = rng.choice(total, size=min(size, total), replace=False)
    coords = np.stack(np.unravel_index(flat, (b,) * n), axis=1)
    return GridSet(n, frozenset(tuple(int(v) for v in row) for row in coords))
