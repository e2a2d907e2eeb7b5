"""
Tests for Delta-systems, multiplier sets and the Furstenberg constructions.
"""

import dataclasses
from fractions import Fraction

import pytest

from furstenberg_lab.constructions import (
    DeltaSystem,
    build_delta,
    build_furstenberg,
    build_prime_furstenberg,
    build_psquare,
    build_X,
    compute_L,
    degenerate_multipliers,
    difference_anchors,
    exponent_summary,
    lemma_degree,
    lemma_multipliers,
    sumset_size,
    verify_delta,
    verify_instance,
    verify_ratio_sumsets,
)
from furstenberg_lab.exceptions import (
    DegenerateConfigurationError,
    InsufficientMultipliersError,
    InvalidParameterError,
    UnsupportedDimensionError,
    UnsupportedFieldError,
)
from furstenberg_lab.ff_core import Field
from furstenberg_lab.geometry import direction_count, points_on_line
from furstenberg_lab.incidence_lab import furstenberg_check, pair_count_certificate


@pytest.fixture
def f7_system():
    """Delta = {1, 2, 3}, mu = 4 over F_7."""
    return build_delta(Field(7))


@pytest.fixture
def f13_manual():
    """Delta = {1, 2, 3, 4}, mu = 5 over F_13."""
    return DeltaSystem(Field(13), (1, 2, 3, 4), 5)


def test_build_delta_prime_examples(f7_system):
    """Test the prime recipe on F_7 and F_5."""
    assert f7_system.delta == (1, 2, 3)
    assert f7_system.mu == 4
    f5 = build_delta(Field(5))
    assert f5.delta == (1, 2, 3) and f5.mu == 4
    assert f5.difference_set() == set(range(5))


def test_build_delta_falls_back_when_mu_fails():
    """Test the mu = s fallback on F_13, where 5*Delta - Delta misses 10."""
    assert not DeltaSystem(Field(13), (1, 2, 3, 4), 5).covers_field()
    system = build_delta(Field(13))
    assert system.mu == 4
    assert system.recipe == "prime-fallback"
    assert system.covers_field()


def test_build_delta_even_extension():
    """Test F_9: Delta = {0, 1, 2}, mu = x."""
    f9 = Field(3, 2)
    system = build_delta(f9)
    assert system.delta == (0, 1, 2)
    assert system.mu == f9.generator_x()
    assert system.recipe == "even"


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 9, 11, 13, 16, 25, 31, 49])
def test_build_delta_covers_field(q):
    """Test mu*Delta - Delta = F_q and the size bound."""
    report = verify_delta(build_delta(Field.from_order(q)))
    assert report.covered
    assert report.size_bound_ok
    assert report.passed
    assert sum(report.histogram.values()) == q


def test_build_delta_rejects_bad_scale():
    """Test that K must be positive."""
    with pytest.raises(InvalidParameterError):
        build_delta(Field(7), K=0)


def test_verify_delta_detects_missing_differences():
    """Test that Delta = {0} covers nothing but 0."""
    report = verify_delta(DeltaSystem(Field(7), (0,), 1), histogram=False)
    assert not report.covered
    assert report.missing == [1, 2, 3, 4, 5, 6]
    assert report.histogram == {}
    assert not report.to_dict()["passed"]


def test_compute_l_examples(f7_system):
    """Test L(r) on F_7."""
    assert compute_L(f7_system, 7) == (6, [0, 1, 2, 4, 5, 6])
    assert compute_L(f7_system, 5) == (3, [0, 1, 6])
    for r in (7, 8, 20):
        assert compute_L(f7_system, r)[0] == 6


def test_compute_l_needs_prime_field():
    """Test that L(r) refuses prime powers."""
    with pytest.raises(UnsupportedFieldError):
        compute_L(build_delta(Field(3, 2)), 5)


def test_sumset_sizes(f13_manual):
    """Test |x*Delta + Delta| on F_13."""
    assert sumset_size(f13_manual, 0) == 4
    assert sumset_size(f13_manual, 1) == 7
    assert sumset_size(f13_manual, 12) == 7
    assert sumset_size(f13_manual, 2) == 10
    assert sumset_size(f13_manual, 3) == 13


def test_build_x_f13(f13_manual):
    """Test the four best multipliers at beta = 1/2."""
    X = build_X(f13_manual, Fraction(1, 2), 1)
    assert X.xs == (0, 1, 12, 2)
    assert X.sizes == (4, 7, 7, 10)
    assert X.max_sumset == 10
    assert X.excluded == (5,)
    assert 5 not in X.xs


def test_build_x_beta_zero(f7_system):
    """Test that beta = 0 keeps the single best multiplier."""
    X = build_X(f7_system, 0, 1)
    assert X.xs == (0,)
    assert X.requested == 1


def test_build_x_full_beta_is_capped(f7_system):
    """Test that beta = 1 keeps every non-degenerate multiplier."""
    X = build_X(f7_system, 1, 1)
    assert X.capped
    assert len(X.xs) == 6
    assert degenerate_multipliers(f7_system) == [5]
    assert 5 not in X.xs
    f = f7_system.field
    assert all(f.add(f.mul(a, f7_system.mu), 1) != 0 for a in X.xs)


def test_build_x_rejects_too_many(f7_system):
    """Test that K q^beta beyond the field is refused below beta = 1."""
    with pytest.raises(InsufficientMultipliersError):
        build_X(f7_system, Fraction(1, 2), 4)


def test_build_x_prime_power_needs_beta_zero():
    """Test that prime powers support beta = 0 only."""
    system = build_delta(Field(3, 2))
    with pytest.raises(UnsupportedFieldError):
        build_X(system, Fraction(1, 2), 1)
    assert len(build_X(system, 0, 2).xs) == 2


def test_lemma_degree():
    """Test gamma with p^(gamma-1) < K <= p^gamma."""
    f25 = Field(5, 2)
    assert lemma_degree(f25, 1) == 0
    assert lemma_degree(f25, 3) == 1
    assert lemma_degree(f25, 25) == 2
    with pytest.raises(InsufficientMultipliersError):
        lemma_degree(f25, 26)


def test_lemma_multipliers_prime_power():
    """Test the low-degree candidates against 8 sqrt(q)."""
    report = lemma_multipliers(build_delta(Field(5, 2)), 3)
    assert report.gamma == 1
    assert report.candidates == [0, 1, 2, 3, 4]
    assert all(report.sizes[x] == 5 for x in report.candidates)
    assert report.passed


def test_lemma_multipliers_prime(f7_system):
    """Test the prime-field variant."""
    report = lemma_multipliers(f7_system, 2)
    assert report.gamma is None
    assert report.required == 2
    assert report.candidates[0] == 0
    assert report.passed


def test_ratio_sumsets():
    """Test the bound 2t(ceil(sqrt p) + 1) on F_31 with t = 2."""
    report = verify_ratio_sumsets(build_delta(Field(31)), 2)
    assert report.bound == 28
    assert report.distinct_ratios == 3
    assert report.max_size == 16
    assert report.passed


def test_ratio_sumsets_rejects_bad_input(f7_system):
    """Test t range and field type."""
    with pytest.raises(InvalidParameterError):
        verify_ratio_sumsets(f7_system, 7)
    with pytest.raises(UnsupportedFieldError):
        verify_ratio_sumsets(build_delta(Field(3, 2)), 1)


def test_difference_anchors(f7_system):
    """Test that each y gets (u, v) with v*mu - u = y."""
    f = f7_system.field
    anchors = difference_anchors(f7_system)
    for y, (u, v) in enumerate(anchors):
        assert f.sub(f.mul(v, f7_system.mu), u) == y
    with pytest.raises(DegenerateConfigurationError):
        difference_anchors(DeltaSystem(Field(13), (1, 2, 3, 4), 5))


def _assert_witnesses_hold(inst):
    f = inst.field
    assert len(inst.witnesses) == direction_count(f.q, inst.n)
    for d, w in inst.witnesses.items():
        assert w.line.direction == d
        count = sum(1 for pt in points_on_line(f, w.line) if pt in inst.points)
        assert count == w.count >= inst.threshold


def test_prime_construction_f13():
    """Test (13, 2, 1/2, 1): 14 directions, count >= 4, |S| <= 80."""
    inst = build_prime_furstenberg(13, 2, Fraction(1, 2), 1)
    assert inst.threshold == 4
    assert inst.size_bound == 80
    assert inst.size <= 80
    _assert_witnesses_hold(inst)
    assert verify_instance(inst).passed


def test_prime_construction_full_beta():
    """Test (7, 2, 1, 1): six points on a line in every direction."""
    inst = build_prime_furstenberg(7, 2, 1, 1)
    assert inst.threshold == 6
    _assert_witnesses_hold(inst)


def test_prime_construction_beta_zero():
    """Test (5, 2, 0, 1): one point per direction."""
    inst = build_prime_furstenberg(5, 2, 0, 1)
    assert inst.threshold == 1
    _assert_witnesses_hold(inst)


def test_prime_construction_three_dimensions():
    """Test (7, 3, 1/2, 1) against its size bound."""
    inst = build_prime_furstenberg(7, 3, "1/2", 1)
    assert inst.threshold == 3
    assert inst.size <= inst.size_bound
    _assert_witnesses_hold(inst)


def test_prime_construction_parallel_matches_serial():
    """Test that worker processes give the same witnesses."""
    serial = build_prime_furstenberg(7, 2, Fraction(1, 2), 1, jobs=1)
    parallel = build_prime_furstenberg(7, 2, Fraction(1, 2), 1, jobs=2)
    assert serial.points == parallel.points
    assert serial.witnesses == parallel.witnesses


def test_prime_power_construction_beta_zero():
    """Test the multiplier construction over F_9 at beta = 0."""
    inst = build_furstenberg(Field(3, 2), 2, 0, 1)
    assert inst.construction == "prime-power"
    _assert_witnesses_hold(inst)


def test_construction_rejects_bad_parameters():
    """Test parameter validation."""
    with pytest.raises(InvalidParameterError):
        build_prime_furstenberg(7, 2, 1, 2)
    with pytest.raises(InvalidParameterError):
        build_prime_furstenberg(7, 2, Fraction(3, 2), 1)
    with pytest.raises(InvalidParameterError):
        build_prime_furstenberg(8, 2, 0, 1)
    with pytest.raises(UnsupportedDimensionError):
        build_prime_furstenberg(7, 1, 0, 1)
    with pytest.raises(UnsupportedFieldError):
        build_furstenberg(Field(3, 2), 2, Fraction(1, 2), 1)


@pytest.mark.parametrize("p,n,bound,directions", [
    (3, 2, 24, 10),
    (5, 2, 60, 26),
    (3, 3, 108, 91),
])
def test_psquare_construction(p, n, bound, directions):
    """Test the F_{p^2} construction: count >= p in every direction."""
    inst = build_psquare(p, n)
    assert inst.field.q == p * p
    assert inst.threshold == p
    assert inst.size <= bound
    assert len(inst.witnesses) == directions
    _assert_witnesses_hold(inst)
    assert verify_instance(inst).passed
    assert furstenberg_check(inst, inst.threshold).covered
    assert pair_count_certificate(inst).passed


def test_verify_instance_detects_tampering():
    """Test that a wrong stored count or a missing direction fails."""
    inst = build_psquare(3, 2)
    d, w = next(iter(sorted(inst.witnesses.items())))
    tampered = dict(inst.witnesses)
    tampered[d] = dataclasses.replace(w, count=w.count + 1)
    report = verify_instance(dataclasses.replace(inst, witnesses=tampered))
    assert not report.passed
    assert report.miscounted == [d]

    del tampered[d]
    report = verify_instance(dataclasses.replace(inst, witnesses=tampered))
    assert report.directions_witnessed == 9
    assert not report.passed


def test_exponent_summary():
    """Test the exponents for q = 13, n = 2, beta = 1/2."""
    summary = exponent_summary(13, 2, Fraction(1, 2), 169)
    assert summary["pair_counting_exponent"] == "1/1"
    assert summary["polynomial_exponent"] == "1/1"
    assert summary["construction_exponent"] == "5/4"
    assert summary["measured_exponent"] == pytest.approx(2.0)


@pytest.mark.slow
def test_delta_systems_up_to_97():
    """Test |Delta| <= sqrt(p) + 1 and full coverage for every prime 5 <= p <= 97."""
    primes = [p for p in range(5, 98) if all(p % k for k in range(2, p))]
    for p in primes:
        system = build_delta(Field(p))
        assert (len(system.delta) - 1) ** 2 <= p
        assert system.covers_field()


@pytest.mark.slow
def test_delta_systems_over_prime_powers():
    """Test coverage for q in {4, 8, 9, 16, 25, 27, 32} and two good multipliers."""
    for q in (4, 8, 9, 16, 25, 27, 32):
        system = build_delta(Field.from_order(q))
        assert system.covers_field()
        if q in (16, 25, 32):
            assert lemma_multipliers(build_delta(Field.from_order(q), K=2), 2).passed


@pytest.mark.slow
@pytest.mark.parametrize("p", [11, 13, 17, 19, 23])
@pytest.mark.parametrize("n", [2, 3])
def test_prime_constructions_sweep(p, n):
    """Test coverage at |X|, pair counting and the exact size bound at beta = 1/2, K = 1."""
    inst = build_prime_furstenberg(p, n, Fraction(1, 2), 1)
    assert inst.size <= inst.size_bound
    _assert_witnesses_hold(inst)
    assert verify_instance(inst).passed
    assert furstenberg_check(inst, inst.threshold).covered
    assert pair_count_certificate(inst).passed


@pytest.mark.slow
def test_psquare_construction_p7():
    """Test the F_49 plane."""
    inst = build_psquare(7, 2)
    assert inst.size <= 2 * 8 * 7
    assert verify_instance(inst).passed
    assert furstenberg_check(inst, inst.threshold).covered
    assert pair_count_certificate(inst).passed
