"""
Custom exceptions for Furstenberg Lab.
"""

from typing import Any, Optional, Sequence


class FurstenbergLabException(Exception):
    """Base exception for all Furstenberg Lab errors."""

    pass


class ConfigurationError(FurstenbergLabException):
    """Raised when configuration is invalid."""

    pass


class ParameterError(FurstenbergLabException):
    """Raised when a caller supplies parameters an operation cannot accept."""

    def __init__(self, message: str, parameter: str = None, value: Any = None):
        super().__init__(message)
        self.parameter = parameter
        self.value = value


class InvalidParameterError(ParameterError):
    """Raised for out-of-domain parameters such as a non-prime p or K <= 0."""

    pass


class InvalidElementError(ParameterError):
    """Raised when a value is not an element of the field it is used with."""

    def __init__(self, message: str, value: Any = None, order: int = None):
        super().__init__(message, parameter="element", value=value)
        self.order = order


class IndexRangeError(ParameterError):
    """Raised for a malformed coordinate index list or refinement depth."""

    def __init__(self, message: str, indices: Sequence[int] = None, arity: int = None):
        super().__init__(message, parameter="indices", value=indices)
        self.indices = indices
        self.arity = arity


class UnsupportedScaleError(ParameterError):
    """Raised when a field is larger than the exhaustive verifiers allow."""

    def __init__(self, message: str, order: int = None, limit: int = None):
        super().__init__(message, parameter="q", value=order)
        self.order = order
        self.limit = limit


class UnsupportedFieldError(ParameterError):
    """Raised when a prime-field-only operation receives a prime power."""

    pass


class UnsupportedDimensionError(ParameterError):
    """Raised when the ambient dimension is too small for an operation."""

    def __init__(self, message: str, dimension: int = None, minimum: int = None):
        super().__init__(message, parameter="n", value=dimension)
        self.dimension = dimension
        self.minimum = minimum


class FieldDivisionError(FurstenbergLabException, ZeroDivisionError):
    """Raised when inverting the zero element."""

    pass


class DegenerateConfigurationError(FurstenbergLabException):
    """Raised when points or anchors are in a degenerate position."""

    def __init__(self, message: str, points: Optional[Sequence[Any]] = None):
        super().__init__(message)
        self.points = points


class InsufficientMultipliersError(FurstenbergLabException):
    """Raised when too few non-degenerate multipliers exist for |X|."""

    def __init__(self, message: str, requested: int = None, available: int = None):
        super().__init__(message)
        self.requested = requested
        self.available = available


class InconsistentInputError(FurstenbergLabException):
    """Raised when a pipeline input leaves nothing to classify."""

    pass


class InvariantViolationError(FurstenbergLabException):
    """Raised when a guarantee forced by a construction does not hold."""

    def __init__(self, message: str, check: str = None):
        super().__init__(message)
        self.check = check


class ValidationError(FurstenbergLabException):
    """Raised when a loaded artifact fails validation."""

    pass


class ExportError(FurstenbergLabException):
    """Raised when an artifact cannot be written."""

    def __init__(self, message: str, format: str = None, filepath: str = None):
        super().__init__(message)
        self.format = format
        self.filepath = filepath
