"""
Exact integer and rational helpers.

Every pass/fail decision in the library goes through these functions, so
fractional powers are always compared by cross-multiplying integer powers.
"""

import math
import re
from fractions import Fraction
from typing import Union

from .exceptions import InvalidParameterError

Rational = Union[int, float, Fraction]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def as_fraction(value: Rational) -> Fraction:
    """Convert an int, float or Fraction to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidParameterError("Booleans are not numbers here", value=value)
    if isinstance(value, float):
        # shortest decimal form, so 0.1 becomes 1/10
        return Fraction(repr(value))
    return Fraction(value)


def parse_rational(text: str) -> Fraction:
    """
    Parse an exact rational written as "num/den" or as an integer.

    Decimal and exponent notation are rejected so thresholds stay exact.

    Args:
        text: Textual rational

    Returns:
        The parsed Fraction

    Raises:
        InvalidParameterError: If the text is not an exact rational
    """
    if isinstance(text, Fraction):
        return text
    match = _RATIONAL_RE.match(str(text))
    if not match:
        raise InvalidParameterError(
            f"Expected an exact rational like '1/2', got {text!r}", parameter="beta", value=text
        )
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise InvalidParameterError("Zero denominator", parameter="beta", value=text)
    return Fraction(num, den)


def parse_scale(text: str) -> Fraction:
    """
    Parse a scale constant such as K.

    Accepts "num/den", integers and decimals ("1.5" becomes 3/2).

    Raises:
        InvalidParameterError: If the text is not a finite number
    """
    if isinstance(text, Fraction):
        return text
    if _RATIONAL_RE.match(str(text)):
        return parse_rational(text)
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"Expected a number like '1.5' or '3/2', got {text!r}", parameter="K", value=text)
    if not math.isfinite(value):
        raise InvalidParameterError(f"K must be finite, got {text!r}", parameter="K", value=text)
    return as_fraction(value)


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "num/den" (denominator always present)."""
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def ceil_sqrt(n: int) -> int:
    """Least integer s with s * s >= n."""
    if n < 0:
        raise InvalidParameterError("Square root of a negative number", value=n)
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def integer_root(x: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if x < 0 or k < 1:
        raise InvalidParameterError("integer_root needs x >= 0 and k >= 1", value=(x, k))
    if x < 2 or k == 1:
        return x
    try:
        r = int(round(x ** (1.0 / k)))
    except OverflowError:
        lo, hi = 1, 1 << (x.bit_length() // k + 1)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid ** k <= x:
                lo = mid
            else:
                hi = mid - 1
        return lo
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def at_least_scaled_power(value: Rational, K: Rational, q: int, exponent: Rational) -> bool:
    """
    Decide value >= K * q**exponent exactly.

    Args:
        value: Non-negative left-hand side
        K: Non-negative scale
        q: Positive base
        exponent: Rational exponent (any sign)

    Returns:
        True when the inequality holds
    """
    value, K, exponent = as_fraction(value), as_fraction(K), as_fraction(exponent)
    if K <= 0:
        return value >= 0
    if value < 0:
        return False
    a, b = exponent.numerator, exponent.denominator
    lhs = value ** b
    rhs = K ** b
    if a >= 0:
        rhs *= Fraction(q) ** a
    else:
        lhs *= Fraction(q) ** (-a)
    return lhs >= rhs


def ceil_scaled_power(K: Rational, q: int, beta: Rational) -> int:
    """
    Smallest integer t with t >= K * q**beta, computed exactly.

    Args:
        K: Positive scale
        q: Field order
        beta: Rational exponent in [0, 1]

    Returns:
        The ceiling as an int
    """
    K, beta = as_fraction(K), as_fraction(beta)
    estimate = max(0, math.ceil(float(K) * float(q) ** float(beta)))
    while estimate > 0 and at_least_scaled_power(estimate - 1, K, q, beta):
        estimate -= 1
    while not at_least_scaled_power(estimate, K, q, beta):
        estimate += 1
    return estimate


def exact_power_root(value: int, k: int) -> float:
    """
    k-th root of a non-negative integer as a float, exact when it is a perfect power.
    """
    r = integer_root(value, k)
    if r ** k == value:
        return float(r)
    return value ** (1.0 / k)
