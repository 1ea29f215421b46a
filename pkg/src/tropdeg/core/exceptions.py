"""Custom exceptions for the `tropdeg` package.

This module defines domain-specific exceptions used across `tropdeg` so that
callers (and the CLI's exit-code mapping) can tell input problems apart from
broken invariants and failed numerical checks.
"""

__all__ = [
    "TropDegError",
    "InputFileError",
    "LinearAlgebraError",
    "DimensionMismatchError",
    "ComplexValidationError",
    "SubdivisionError",
    "ComplexMismatchError",
    "FlavorMismatchError",
    "NotBalancedError",
    "NotPositiveError",
    "NumericalToleranceError",
    "OracleMismatchError",
    "OracleError",
]


class TropDegError(Exception):
    """Base exception for all `tropdeg` errors."""

    pass


class InputFileError(TropDegError):
    """Raised when an input file cannot be read or does not match its schema.

    Args:
        message: Description of the problem.
        path: Optional path to the offending file.
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        if path:
            message = f'{message} (file: "{path}")'
        super().__init__(message)


class LinearAlgebraError(TropDegError):
    """Raised on singular systems, dependent vectors or non-SPD Gram matrices."""

    pass


class DimensionMismatchError(TropDegError):
    """Raised when vector, matrix or weight dimensions do not fit together.

    Args:
        message: Description of the mismatch.
        expected: Optional expected size.
        actual: Optional size that was supplied.
    """

    def __init__(
        self, message: str, expected: int | None = None, actual: int | None = None
    ):
        self.expected = expected
        self.actual = actual
        if expected is not None and actual is not None:
            message = f"{message} (expected {expected}, got {actual})"
        super().__init__(message)


class ComplexValidationError(TropDegError):
    """Raised when a conical complex violates one of its invariants.

    Args:
        message: Description of the violation.
        code: Diagnostic code (e.g. ``dependent-images``).
        cone: Optional key of the cone where the violation was found.
    """

    def __init__(self, message: str, code: str | None = None, cone: str | None = None):
        self.code = code
        self.cone = cone
        if code:
            message = f"[{code}] {message}"
        if cone:
            message = f"{message} (cone: {cone})"
        super().__init__(message)


class SubdivisionError(TropDegError):
    """Raised when a subdivision cannot be built or is not a valid refinement.

    Args:
        message: Description of the problem.
        cone: Optional key of the cone being split.
    """

    def __init__(self, message: str, cone: str | None = None):
        self.cone = cone
        if cone:
            message = f"{message} (cone: {cone})"
        super().__init__(message)


class ComplexMismatchError(TropDegError):
    """Raised when operands live on different complexes."""

    pass


class FlavorMismatchError(TropDegError):
    """Raised when a lattice-only operation meets Euclidean or inexact data."""

    pass


class NotBalancedError(TropDegError):
    """Raised when a weight that must be balanced is not.

    Args:
        message: Description of the failure.
        face: Optional key of the first failing face.
    """

    def __init__(self, message: str, face: str | None = None):
        self.face = face
        if face is not None:
            message = f"{message} (face: {face or 'apex'})"
        super().__init__(message)


class NotPositiveError(TropDegError):
    """Raised when a cycle required to be positive has a negative value."""

    pass


class NumericalToleranceError(TropDegError):
    """Raised when a computed identity fails its floating point tolerance.

    Args:
        message: Description of the failed check.
        defect: Optional size of the observed defect.
    """

    def __init__(self, message: str, defect: float | None = None):
        self.defect = defect
        if defect is not None:
            message = f"{message} (defect: {defect:.3e})"
        super().__init__(message)


class OracleMismatchError(NumericalToleranceError):
    """Raised when the toric oracle and the tropical engine disagree."""

    pass


class OracleError(TropDegError):
    """Raised when an oracle precondition fails (unbounded polytope, huge box)."""

    pass
