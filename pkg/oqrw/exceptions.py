"""
Custom exceptions for the oqrw library.
"""

from __future__ import annotations


class OQRWError(Exception):
    """Base exception for all open quantum random walk errors."""

    exit_code = 1


class StructuralError(OQRWError):
    """Raised when matrix dimensions, site labels or block layouts do not fit together."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        if pair is not None:
            message = f"{message} (target={pair[0]}, source={pair[1]})"
        super().__init__(message)
        self.pair = pair


class NormalizationError(OQRWError):
    """Raised when the Kraus condition fails for a strict transition family."""

    def __init__(self, message: str, residuals: dict[int, float] | None = None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class InvalidStateError(OQRWError):
    """Raised when a block state or a projection violates its invariants."""
    pass


class SupportError(OQRWError):
    """Raised when a site outside the support of the state is used where support is required."""
    pass


class KindError(OQRWError):
    """Raised when an operation is restricted to one kind of Markov pair."""
    pass


class PreconditionError(OQRWError):
    """Raised when a recurrence criterion is undefined for the given projection."""

    exit_code = 4


class InvariantStateNotFound(OQRWError):
    """Raised when no invariant state could be found."""
    pass


class InvalidParameterError(OQRWError):
    """Raised when a numerical parameter lies outside its admissible range."""

    exit_code = 2


class FileFormatError(OQRWError):
    """Raised when an input document cannot be parsed."""

    exit_code = 2

    def __init__(self, message: str, location: str | None = None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
