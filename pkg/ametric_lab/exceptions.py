"""
Error types for ametric-lab

Every library error derives from AMetricLabError; Result carries failures
across the config and CLI boundary without raising.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Generic, Optional, TypeVar

T = TypeVar("T")


class ErrorSeverity(Enum):
    """How serious an error is for the caller"""

    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


# ============================================================================
# Base Exceptions
# ============================================================================


class AMetricLabError(Exception):
    """Base exception for all library errors"""

    def __init__(self, message: str, severity: ErrorSeverity = ErrorSeverity.ERROR):
        super().__init__(message)
        self.message = message
        self.severity = severity


# ============================================================================
# Input Exceptions
# ============================================================================


class InputShapeError(AMetricLabError):
    """Raised when points or tuples do not match the space arity or dimension"""

    def __init__(self, expected: str, got: str):
        self.expected = expected
        self.got = got
        super().__init__(f"Expected {expected}, got {got}", ErrorSeverity.ERROR)


class InvalidArityError(AMetricLabError):
    """Raised when a space or structure is requested with an unsupported arity"""

    def __init__(self, arity: int, reason: str = ""):
        self.arity = arity
        message = f"Invalid arity t={arity}"
        if reason:
            message += f": {reason}"
        super().__init__(message, ErrorSeverity.ERROR)


class InvalidWeightsError(AMetricLabError):
    """Raised when a weight vector is outside [0,1] or does not sum to 1"""

    def __init__(self, weights: Any, reason: str = ""):
        self.weights = weights
        message = f"Invalid weights {weights}"
        if reason:
            message += f": {reason}"
        super().__init__(message, ErrorSeverity.ERROR)


class InvalidModulusError(AMetricLabError):
    """Raised when a contraction modulus is outside [0, 1)"""

    def __init__(self, delta: float):
        self.delta = delta
        super().__init__(
            f"Contraction modulus must lie in [0, 1), got {delta}", ErrorSeverity.ERROR
        )


class InvalidParameterError(AMetricLabError):
    """Raised when a named parameter is outside its admissible range"""

    def __init__(self, name: str, value: Any, reason: str = ""):
        self.name = name
        self.value = value
        message = f"Invalid value for '{name}': {value}"
        if reason:
            message += f" ({reason})"
        super().__init__(message, ErrorSeverity.ERROR)


# ============================================================================
# Runtime Exceptions
# ============================================================================


class DivergenceError(AMetricLabError):
    """Raised when an iteration leaves the finite range; carries the partial trace"""

    def __init__(self, step: int, magnitude: float, trace: Any = None):
        self.step = step
        self.magnitude = magnitude
        self.trace = trace
        super().__init__(
            f"Iteration diverged at step {step} (|x| = {magnitude:.3e})", ErrorSeverity.ERROR
        )


class MapDomainError(AMetricLabError):
    """Raised when a tabulated map is evaluated outside its table hull"""

    def __init__(self, map_name: str, point: Any):
        self.map_name = map_name
        self.point = point
        super().__init__(
            f"Point {point} lies outside the domain of map '{map_name}'", ErrorSeverity.ERROR
        )


# ============================================================================
# Configuration Exceptions
# ============================================================================


class ConfigError(AMetricLabError):
    """Raised when an experiment configuration is missing, unreadable or invalid"""

    def __init__(self, section: str, reason: str = ""):
        self.section = section
        message = f"Invalid configuration in '{section}'"
        if reason:
            message += f": {reason}"
        super().__init__(message, ErrorSeverity.ERROR)


# ============================================================================
# Result Pattern
# ============================================================================


@dataclass
class Result(Generic[T]):
    """
    Outcome of a fallible step that should not raise

    Usage:
        result = load_config(path)
        if result.is_failure():
            print(result.error_code, result.error)
        config = result.unwrap()
    """

    success: bool
    data: Optional[T] = None
    error: Optional[str] = None
    error_code: Optional[str] = None

    @classmethod
    def ok(cls, data: T) -> "Result[T]":
        return cls(success=True, data=data)

    @classmethod
    def fail(cls, error: str, error_code: Optional[str] = None) -> "Result[T]":
        return cls(success=False, error=error, error_code=error_code)

    @classmethod
    def from_exception(cls, exception: Exception) -> "Result[T]":
        """Failure whose error_code is the exception class name"""
        return cls(success=False, error=str(exception), error_code=type(exception).__name__)

    def is_success(self) -> bool:
        return self.success

    def is_failure(self) -> bool:
        return not self.success

    def unwrap(self) -> T:
        """
        Payload of a success

        Raises:
            ValueError: On a failure or an empty payload
        """
        if not self.success:
            raise ValueError(f"Unwrapped a failed result: {self.error}")
        if self.data is None:
            raise ValueError("Unwrapped a result without data")
        return self.data

    def map(self, func: Callable[[T], "Result"]) -> "Result":
        """Apply a Result-returning step to the payload; exceptions become failures"""
        if not self.success:
            return self
        if self.data is None:
            return Result.fail("No data to map over")
        try:
            return func(self.data)
        except Exception as e:
            return Result.from_exception(e)


# Public names
__all__ = [
    # Base
    "AMetricLabError",
    "ErrorSeverity",
    # Input
    "InputShapeError",
    "InvalidArityError",
    "InvalidWeightsError",
    "InvalidModulusError",
    "InvalidParameterError",
    # Runtime
    "DivergenceError",
    "MapDomainError",
    # Configuration
    "ConfigError",
    # Result pattern
    "Result",
]
