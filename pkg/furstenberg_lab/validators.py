"""
Parameter validators shared by the builders, the pipeline and the CLI.
"""

import math
from fractions import Fraction
from typing import Sequence

from sympy import isprime

from .exceptions import (
    IndexRangeError,
    InvalidParameterError,
    UnsupportedDimensionError,
    UnsupportedScaleError,
)
from .numerics import Rational, as_fraction, parse_rational

MAX_ORDER = 1 << 20


class ParameterValidator:
    """Validates construction and pipeline parameters."""

    @staticmethod
    def validate_prime(p: int) -> bool:
        """
        Validate that p is a prime integer.

        Args:
            p: Candidate characteristic

        Returns:
            True if valid

        Raises:
            InvalidParameterError: If p is not a prime
        """
        if not isinstance(p, int) or isinstance(p, bool):
            raise InvalidParameterError("p must be an integer", parameter="p", value=p)
        if p < 2 or not isprime(p):
            raise InvalidParameterError(f"p = {p} is not prime", parameter="p", value=p)
        return True

    @staticmethod
    def validate_degree(m: int) -> bool:
        """Validate an extension degree m >= 1."""
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise InvalidParameterError(f"Extension degree must be >= 1, got {m}", parameter="m", value=m)
        return True

    @staticmethod
    def validate_order(q: int, limit: int = MAX_ORDER) -> bool:
        """
        Validate that a field order is within the exhaustive-verification scale.

        Raises:
            UnsupportedScaleError: If q exceeds the limit
        """
        if q > limit:
            raise UnsupportedScaleError(
                f"Field order {q} exceeds the supported scale {limit}", order=q, limit=limit
            )
        return True

    @staticmethod
    def validate_dimension(n: int, minimum: int = 2) -> bool:
        """
        Validate the ambient dimension.

        Raises:
            UnsupportedDimensionError: If n < minimum
        """
        if not isinstance(n, int) or isinstance(n, bool):
            raise InvalidParameterError("n must be an integer", parameter="n", value=n)
        if n < minimum:
            raise UnsupportedDimensionError(
                f"Dimension n = {n} is below the minimum {minimum}", dimension=n, minimum=minimum
            )
        return True

    @staticmethod
    def validate_beta(beta) -> Fraction:
        """
        Validate and normalize the exponent beta.

        Args:
            beta: Fraction, int, or "num/den" string; floats are rejected

        Returns:
            beta as a Fraction in [0, 1]
        """
        if isinstance(beta, float):
            raise InvalidParameterError(
                "beta must be an exact rational, not a float", parameter="beta", value=beta
            )
        value = parse_rational(beta) if isinstance(beta, str) else as_fraction(beta)
        if not 0 <= value <= 1:
            raise InvalidParameterError(f"beta = {value} is outside [0, 1]", parameter="beta", value=beta)
        return value

    @staticmethod
    def validate_scale(K: Rational) -> bool:
        """Validate a positive, finite scale constant K."""
        if isinstance(K, bool) or not isinstance(K, (int, float, Fraction)):
            raise InvalidParameterError("K must be a number", parameter="K", value=K)
        if isinstance(K, float) and not math.isfinite(K):
            raise InvalidParameterError("K must be finite", parameter="K", value=K)
        if K <= 0:
            raise InvalidParameterError(f"K must be positive, got {K}", parameter="K", value=K)
        return True

    @staticmethod
    def validate_jobs(jobs: int) -> bool:
        """Validate the --jobs contract (any positive integer)."""
        if not isinstance(jobs, int) or isinstance(jobs, bool) or jobs < 1:
            raise InvalidParameterError(f"jobs must be a positive integer, got {jobs}", parameter="jobs", value=jobs)
        return True

    @staticmethod
    def validate_index_list(indices: Sequence[int], axes: Sequence[int]) -> bool:
        """
        Validate a projection index list against the available axes.

        Args:
            indices: Non-empty, strictly ascending 1-based indices
            axes: Axes the projected set still carries

        Raises:
            IndexRangeError: If the list is empty, unsorted, or names a missing axis
        """
        indices = list(indices)
        if not indices:
            raise IndexRangeError("Index list must not be empty", indices=indices, arity=len(axes))
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise IndexRangeError(f"Index list {indices} is not strictly ascending", indices=indices, arity=len(axes))
        missing = [k for k in indices if k not in axes]
        if missing:
            raise IndexRangeError(
                f"Indices {missing} are not among the axes {list(axes)}", indices=indices, arity=len(axes)
            )
        return True
