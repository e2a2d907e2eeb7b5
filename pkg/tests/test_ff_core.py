"""
Unit tests for finite-field arithmetic.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from furstenberg_lab.exceptions import (
    FieldDivisionError,
    InvalidElementError,
    InvalidParameterError,
    UnsupportedScaleError,
    ValidationError,
)
from furstenberg_lab.ff_core import (
    Field,
    enumerate_field,
    fe_inv,
    fe_mul,
    find_irreducible,
    format_polynomial,
    is_irreducible,
    is_prime_power,
    verify_field_axioms,
)

FIELD_ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49]


@pytest.fixture
def f9():
    """F_9 with modulus x^2 + 1."""
    return Field(3, 2)


def test_find_irreducible_prime_field_has_no_modulus():
    """Test that degree one needs no modulus."""
    assert find_irreducible(5, 1) is None


def test_find_irreducible_quadratics():
    """Test the lexicographically smallest monic irreducible quadratics."""
    assert find_irreducible(2, 2) == (1, 1, 1)
    assert find_irreducible(3, 2) == (1, 0, 1)
    assert format_polynomial(find_irreducible(3, 2)) == "x^2 + 1"


def test_find_irreducible_rejects_composite():
    """Test that a composite characteristic is rejected."""
    with pytest.raises(InvalidParameterError):
        find_irreducible(6, 2)


def test_find_irreducible_cubic_is_irreducible():
    """Test that the chosen cubic over F_2 has no factor."""
    modulus = find_irreducible(2, 3)
    assert len(modulus) == 4 and modulus[-1] == 1
    assert is_irreducible(modulus, 2)
    assert not is_irreducible((0, 1, 1), 2)


def test_field_default_modulus(f9):
    """Test that F_9 picks x^2 + 1."""
    assert f9.modulus == (1, 0, 1)
    assert f9.q == 9
    assert not f9.is_prime_field


def test_field_rejects_reducible_modulus():
    """Test that a reducible modulus is refused."""
    with pytest.raises(InvalidParameterError):
        Field(3, 2, (2, 0, 1))  # x^2 + 2 = (x + 1)(x + 2)


def test_field_rejects_large_order():
    """Test the exhaustive-scale limit."""
    with pytest.raises(UnsupportedScaleError):
        Field(2, 21)


def test_from_order():
    """Test field lookup by order."""
    assert Field.from_order(7) == Field(7)
    assert Field.from_order(27).m == 3
    with pytest.raises(InvalidParameterError):
        Field.from_order(12)


def test_is_prime_power():
    """Test prime-power detection."""
    assert is_prime_power(9)
    assert is_prime_power(13)
    assert not is_prime_power(12)
    assert not is_prime_power(1)


def test_fe_mul_examples(f9):
    """Test products from small fields."""
    f7 = Field(7)
    assert fe_mul(f7, 3, 5) == 1
    x = f9.generator_x()
    assert fe_mul(f9, x, x) == 2
    for a in enumerate_field(f9):
        assert fe_mul(f9, 0, a) == 0


def test_fe_inv_examples(f9):
    """Test inverses from small fields."""
    assert fe_inv(Field(7), 3) == 5
    x = f9.generator_x()
    assert fe_inv(f9, x) == f9.from_coeffs([0, 2])
    assert fe_inv(f9, 1) == 1
    f4 = Field.from_order(4)
    assert fe_inv(f4, 1) == 1
    assert fe_inv(f4, f4.generator_x()) == f4.from_coeffs([1, 1])


def test_fe_inv_zero_raises(f9):
    """Test that zero has no inverse."""
    with pytest.raises(FieldDivisionError):
        fe_inv(f9, 0)
    with pytest.raises(ZeroDivisionError):
        Field(5).inv(0)


def test_fe_mul_rejects_foreign_element(f9):
    """Test that elements outside the field are rejected."""
    with pytest.raises(InvalidElementError):
        fe_mul(f9, 9, 1)
    with pytest.raises(InvalidElementError):
        f9.decode_element([1, 2, 0])


def test_enumerate_field():
    """Test deterministic enumeration."""
    assert enumerate_field(Field(3)) == [0, 1, 2]
    assert len(enumerate_field(Field(2, 2))) == 4
    elements = enumerate_field(Field(3, 2))
    assert len(elements) == 9 and len(set(elements)) == 9


@pytest.mark.parametrize("q", FIELD_ORDERS)
def test_every_nonzero_element_is_invertible(q):
    """Test a * a^-1 = 1 for every nonzero a."""
    f = Field.from_order(q)
    for a in range(1, q):
        assert f.mul(a, fe_inv(f, a)) == 1


@pytest.mark.parametrize("q", FIELD_ORDERS)
def test_field_axioms(q):
    """Test ring laws on 1000 triples (exhaustively for tiny fields)."""
    report = verify_field_axioms(Field.from_order(q), samples=1000, seed=q)
    assert report.passed
    assert report.exhaustive == (q ** 3 <= 1000)
    assert report.triples == min(1000, q ** 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 24), st.integers(0, 24), st.integers(0, 24))
def test_f25_distributes(a, b, c):
    """Test distributivity in F_25 on arbitrary triples."""
    f = Field(5, 2)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.sub(f.add(a, b), b) == a


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 26), st.integers(0, 30))
def test_f27_pow_matches_repeated_multiplication(a, e):
    """Test fast exponentiation against repeated products."""
    f = Field(3, 3)
    expected = 1
    for _ in range(e):
        expected = f.mul(expected, a)
    assert f.pow(a, e) == expected


def test_field_json_round_trip(f9):
    """Test the JSON form of a field and its elements."""
    data = f9.to_dict()
    assert data == {"p": 3, "m": 2, "modulus": [1, 0, 1]}
    assert Field.from_dict(data) == f9
    assert Field(7).to_dict() == {"p": 7, "m": 1}
    x = f9.generator_x()
    assert f9.encode_element(x) == [0, 1]
    assert f9.decode_element([0, 1]) == x
    with pytest.raises(ValidationError):
        Field.from_dict({"m": 2})
