"""
Exact finite-field arithmetic for F_p and F_{p^m}.

Elements are packed integers in [0, q): the coefficient of x^i of the
polynomial representative is the i-th base-p digit, so F_p elements are just
their residues and 0 and 1 are the field's zero and one. Extension fields
multiply through exp/log tables built from a primitive element and add
through a Zech-logarithm table, so every operation is a few table lookups.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import factorint, isprime, perfect_power

from .exceptions import (
    FieldDivisionError,
    InvalidElementError,
    InvalidParameterError,
    ValidationError,
)
from .validators import MAX_ORDER, ParameterValidator

logger = logging.getLogger(__name__)

FieldElem = int
Polynomial = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Polynomials over F_p (coefficient tuples, constant term first)
# ---------------------------------------------------------------------------


def _poly_trim(coeffs: List[int]) -> List[int]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_rem(num: Sequence[int], den: Sequence[int], p: int) -> List[int]:
    """Remainder of num modulo den over F_p (den must have a nonzero leading term)."""
    rem = _poly_trim([c % p for c in num])
    den = _poly_trim([c % p for c in den])
    lead_inv = pow(den[-1], p - 2, p)
    while len(rem) >= len(den):
        factor = rem[-1] * lead_inv % p
        shift = len(rem) - len(den)
        for i, c in enumerate(den):
            rem[shift + i] = (rem[shift + i] - factor * c) % p
        _poly_trim(rem)
    return rem


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> List[int]:
    product = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                product[i + j] = (product[i + j] + x * y) % p
    return _poly_rem(product, modulus, p)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """
    Decide irreducibility of a monic polynomial over F_p.

    Roots are ruled out first; then every monic divisor candidate of degree
    up to deg/2 is tried.

    Args:
        poly: Coefficients, constant term first, leading coefficient 1
        p: Prime characteristic

    Returns:
        True if poly has no factor of degree 1..deg/2
    """
    degree = len(poly) - 1
    if degree < 1:
        return False
    if degree == 1:
        return True
    for root in range(p):
        value = 0
        for c in reversed(poly):
            value = (value * root + c) % p
        if value == 0:
            return False
    for d in range(2, degree // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_rem(poly, list(low) + [1], p):
                return False
    return True


def find_irreducible(p: int, m: int) -> Optional[Polynomial]:
    """
    Find the lexicographically smallest monic irreducible polynomial of degree m.

    Candidates are ordered by their coefficient sequence with the constant
    term first, so x^2+x+1 is chosen over F_2 and x^2+1 over F_3.

    Args:
        p: Prime characteristic
        m: Degree

    Returns:
        Coefficient tuple of length m+1 (constant term first), or None for m = 1

    Raises:
        InvalidParameterError: If p is not prime or m < 1
    """
    ParameterValidator.validate_prime(p)
    ParameterValidator.validate_degree(m)
    if m == 1:
        return None
    for low in itertools.product(range(p), repeat=m):
        candidate = tuple(low) + (1,)
        if is_irreducible(candidate, p):
            logger.debug(f"Irreducible modulus for F_{p}^{m}: {format_polynomial(candidate)}")
            return candidate
    raise InvalidParameterError(f"No irreducible polynomial of degree {m} over F_{p}", parameter="m", value=m)


def format_polynomial(coeffs: Sequence[int], var: str = "x") -> str:
    """Render coefficients (constant term first) as a readable polynomial."""
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            power = var if i == 1 else f"{var}^{i}"
            terms.append(power if c == 1 else f"{c}{power}")
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Field:
    """
    The finite field F_{p^m}.

    For m = 1 the modulus is None. For m > 1 it is a monic irreducible
    polynomial (constant term first); when omitted the lexicographically
    smallest one is chosen.
    """

    p: int
    m: int = 1
    modulus: Optional[Polynomial] = None

    def __post_init__(self):
        ParameterValidator.validate_prime(self.p)
        ParameterValidator.validate_degree(self.m)
        ParameterValidator.validate_order(self.p ** self.m, MAX_ORDER)

        if self.m == 1:
            if self.modulus is not None and len(self.modulus) > 0:
                raise InvalidParameterError(
                    "A prime field takes no modulus", parameter="modulus", value=self.modulus
                )
            object.__setattr__(self, "modulus", None)
            return

        if self.modulus is None:
            object.__setattr__(self, "modulus", find_irreducible(self.p, self.m))
            return

        modulus = tuple(int(c) for c in self.modulus)
        if len(modulus) != self.m + 1 or modulus[-1] != 1:
            raise InvalidParameterError(
                f"Modulus must be monic of degree {self.m}", parameter="modulus", value=self.modulus
            )
        if any(not 0 <= c < self.p for c in modulus):
            raise InvalidParameterError(
                f"Modulus coefficients must lie in [0, {self.p})", parameter="modulus", value=self.modulus
            )
        if not is_irreducible(modulus, self.p):
            raise InvalidParameterError(
                f"{format_polynomial(modulus)} is reducible over F_{self.p}",
                parameter="modulus",
                value=self.modulus,
            )
        object.__setattr__(self, "modulus", modulus)

    # -- constructors -----------------------------------------------------

    @classmethod
    def prime(cls, p: int) -> "Field":
        """The prime field F_p."""
        return cls(p, 1)

    @classmethod
    def create(cls, p: int, m: int = 1, modulus: Optional[Sequence[int]] = None) -> "Field":
        """F_{p^m} with an explicit or automatically chosen modulus."""
        return cls(p, m, tuple(modulus) if modulus is not None else None)

    @classmethod
    def from_order(cls, q: int) -> "Field":
        """
        The field of order q.

        Raises:
            InvalidParameterError: If q is not a prime power
        """
        if not isinstance(q, int) or isinstance(q, bool) or q < 2:
            raise InvalidParameterError(f"Field order must be an integer >= 2, got {q}", parameter="q", value=q)
        ParameterValidator.validate_order(q, MAX_ORDER)
        if isprime(q):
            return cls(q, 1)
        factors = factorint(q)
        if len(factors) != 1:
            raise InvalidParameterError(f"{q} is not a prime power", parameter="q", value=q)
        (p, m), = factors.items()
        return cls(int(p), int(m))

    # -- basic properties -------------------------------------------------

    @property
    def q(self) -> int:
        """Field order p^m."""
        return self.p ** self.m

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    def __str__(self) -> str:
        if self.m == 1:
            return f"F_{self.p}"
        return f"F_{self.q} = F_{self.p}[x]/({format_polynomial(self.modulus)})"

    # -- tables (extension fields only) -----------------------------------

    @cached_property
    def _tables(self) -> Tuple[List[int], List[int], List[int]]:
        """exp, log and Zech-log tables relative to a primitive element."""
        p, q = self.p, self.q
        generator = self.primitive_element
        gen_coeffs = self.to_coeffs(generator)

        exp = [0] * (q - 1)
        log = [-1] * q
        current = [1]
        for k in range(q - 1):
            value = self.from_coeffs(current)
            exp[k] = value
            log[value] = k
            current = _poly_mulmod(current, gen_coeffs, self.modulus, p)

        # zech[k] = log(1 + g^k), or -1 when 1 + g^k = 0
        zech = [-1] * (q - 1)
        for k, value in enumerate(exp):
            plus_one = value - value % p + (value % p + 1) % p
            zech[k] = log[plus_one] if plus_one else -1
        return exp, log, zech

    @cached_property
    def primitive_element(self) -> FieldElem:
        """Smallest packed element generating the multiplicative group."""
        if self.m == 1:
            if self.p == 2:
                return 1
            exponents = [(self.p - 1) // r for r in factorint(self.p - 1)]
            for g in range(2, self.p):
                if all(pow(g, e, self.p) != 1 for e in exponents):
                    return g
        exponents = [(self.q - 1) // r for r in factorint(self.q - 1)]
        for g in range(self.p, self.q):
            coeffs = self.to_coeffs(g)
            if all(self._slow_pow(coeffs, e) != [1] for e in exponents):
                return g
        raise InvalidParameterError(f"No primitive element found in {self}", parameter="q", value=self.q)

    def _slow_pow(self, coeffs: List[int], exponent: int) -> List[int]:
        result, base = [1], list(coeffs)
        while exponent:
            if exponent & 1:
                result = _poly_mulmod(result, base, self.modulus, self.p)
            base = _poly_mulmod(base, base, self.modulus, self.p)
            exponent >>= 1
        return result

    # -- conversions ------------------------------------------------------

    def to_coeffs(self, a: FieldElem) -> List[int]:
        """Coefficient list of length m, constant term first."""
        coeffs = []
        for _ in range(self.m):
            a, digit = divmod(a, self.p)
            coeffs.append(digit)
        return coeffs

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElem:
        """Pack a coefficient sequence (length at most m, reduced mod p)."""
        if len(coeffs) > self.m:
            raise InvalidElementError(
                f"{len(coeffs)} coefficients do not fit a degree-{self.m} field", value=list(coeffs), order=self.q
            )
        value = 0
        for c in reversed(list(coeffs)):
            value = value * self.p + int(c) % self.p
        return value

    def from_int(self, k: int) -> FieldElem:
        """Image of the integer k in the prime subfield."""
        return k % self.p

    def generator_x(self) -> FieldElem:
        """The residue class of x (only meaningful when m > 1)."""
        return self.p if self.m > 1 else 1

    def validate(self, a: Any) -> FieldElem:
        """
        Check that a is an element of this field.

        Raises:
            InvalidElementError: If a is not an integer in [0, q)
        """
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < self.q:
            raise InvalidElementError(f"{a!r} is not an element of {self}", value=a, order=self.q)
        return a

    def format_element(self, a: FieldElem) -> str:
        if self.m == 1:
            return str(a)
        return format_polynomial(self.to_coeffs(a))

    # -- arithmetic -------------------------------------------------------

    def add(self, a: FieldElem, b: FieldElem) -> FieldElem:
        if self.m == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        if self.p == 2:
            return a ^ b
        exp, log, zech = self._tables
        order = self.q - 1
        z = zech[(log[b] - log[a]) % order]
        if z < 0:
            return 0
        return exp[(log[a] + z) % order]

    def neg(self, a: FieldElem) -> FieldElem:
        if self.m == 1:
            return -a % self.p
        if self.p == 2 or a == 0:
            return a
        return self.mul(a, self.p - 1)

    def sub(self, a: FieldElem, b: FieldElem) -> FieldElem:
        if self.m == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a: FieldElem, b: FieldElem) -> FieldElem:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        exp, log, _ = self._tables
        return exp[(log[a] + log[b]) % (self.q - 1)]

    def inv(self, a: FieldElem) -> FieldElem:
        """Multiplicative inverse a^(q-2)."""
        if a == 0:
            raise FieldDivisionError(f"Zero has no inverse in {self}")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: FieldElem, b: FieldElem) -> FieldElem:
        return self.mul(a, self.inv(b))

    def pow(self, a: FieldElem, exponent: int) -> FieldElem:
        if exponent < 0:
            return self.pow(self.inv(a), -exponent)
        if self.m == 1:
            return pow(a, exponent, self.p)
        if a == 0:
            return 1 if exponent == 0 else 0
        exp, log, _ = self._tables
        return exp[log[a] * exponent % (self.q - 1)]

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"p": self.p, "m": self.m}
        if self.m > 1:
            data["modulus"] = list(self.modulus)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Field":
        """
        Rebuild a field from its JSON form.

        Raises:
            ValidationError: If required keys are missing
        """
        try:
            p, m = int(data["p"]), int(data.get("m", 1))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"Malformed field record {data!r}: {e}")
        modulus = data.get("modulus")
        return cls(p, m, tuple(modulus) if modulus is not None else None)

    def encode_element(self, a: FieldElem) -> Any:
        """JSON form: an int for prime fields, a coefficient list otherwise."""
        return a if self.m == 1 else self.to_coeffs(a)

    def decode_element(self, value: Any) -> FieldElem:
        """
        Inverse of encode_element.

        Raises:
            InvalidElementError: If the value has the wrong shape or range
        """
        if self.m == 1:
            return self.validate(value)
        if not isinstance(value, (list, tuple)) or len(value) != self.m:
            raise InvalidElementError(
                f"Expected {self.m} coefficients, got {value!r}", value=value, order=self.q
            )
        if any(isinstance(c, bool) or not isinstance(c, int) or not 0 <= c < self.p for c in value):
            raise InvalidElementError(f"Coefficients of {value!r} must lie in [0, {self.p})", value=value, order=self.q)
        return self.from_coeffs(value)


def is_prime_power(q: int) -> bool:
    """True when q = p^m for a prime p and m >= 1."""
    if q < 2:
        return False
    if isprime(q):
        return True
    power = perfect_power(q)
    return bool(power) and isprime(power[0])


def fe_mul(f: Field, a: FieldElem, b: FieldElem) -> FieldElem:
    """
    Product of two elements of f.

    Raises:
        InvalidElementError: If either operand does not belong to f
    """
    return f.mul(f.validate(a), f.validate(b))


def fe_inv(f: Field, a: FieldElem) -> FieldElem:
    """
    Multiplicative inverse in f.

    Raises:
        FieldDivisionError: If a is zero
        InvalidElementError: If a does not belong to f
    """
    return f.inv(f.validate(a))


def enumerate_field(f: Field) -> List[FieldElem]:
    """All q elements in increasing packed order."""
    return list(range(f.q))


@dataclass
class FieldAxiomReport:
    """Outcome of a randomized (or exhaustive) field-axiom self-check."""

    field: Field
    triples: int
    exhaustive: bool
    associativity: bool = True
    commutativity: bool = True
    distributivity: bool = True
    inverses: bool = True
    failures: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.associativity and self.commutativity and self.distributivity and self.inverses

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field": self.field.to_dict(),
            "triples": self.triples,
            "exhaustive": self.exhaustive,
            "associativity": self.associativity,
            "commutativity": self.commutativity,
            "distributivity": self.distributivity,
            "inverses": self.inverses,
            "passed": self.passed,
        }


def verify_field_axioms(f: Field, samples: int = 1000, seed: int = 0) -> FieldAxiomReport:
    """
    Check ring laws on triples and inverses on every nonzero element.

    Args:
        f: Field under test
        samples: Number of random triples; all q^3 triples when q^3 <= samples
        seed: Seed for the triple sampler

    Returns:
        FieldAxiomReport with one flag per law
    """
    q = f.q
    exhaustive = q ** 3 <= samples
    if exhaustive:
        triples = itertools.product(range(q), repeat=3)
        count = q ** 3
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(q), rng.randrange(q), rng.randrange(q)) for _ in range(samples))
        count = samples

    report = FieldAxiomReport(field=f, triples=count, exhaustive=exhaustive)
    add, mul = f.add, f.mul
    for a, b, c in triples:
        ok = True
        if add(add(a, b), c) != add(a, add(b, c)) or mul(mul(a, b), c) != mul(a, mul(b, c)):
            report.associativity = ok = False
        if add(a, b) != add(b, a) or mul(a, b) != mul(b, a):
            report.commutativity = ok = False
        if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
            report.distributivity = ok = False
        if not ok and len(report.failures) < 10:
            report.failures.append((a, b, c))

    report.inverses = all(mul(a, f.inv(a)) == 1 for a in range(1, q))
    if not report.passed:
        logger.warning(f"Field axiom check failed for {f}: {report.failures[:3]}")
    return report
