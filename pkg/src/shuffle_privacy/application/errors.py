"""Error contracts shared by the randomizers, bounds, oracle and simulator."""

from __future__ import annotations


class ShufflePrivacyError(Exception):
    """Base error for shuffle-model computations."""


class InputDomainError(ShufflePrivacyError, ValueError):
    """Raised when an input or message lies outside the randomizer's domain."""


class PreconditionError(ShufflePrivacyError, ValueError):
    """Raised when a numeric precondition of a bound is violated."""


class BoundValidityError(PreconditionError):
    """Raised when a bound is applied outside its validity region."""

    def __init__(self, message: str, *, condition: str) -> None:
        super().__init__(message)
        self.condition = condition


class InfeasibleParametersError(ShufflePrivacyError):
    """Raised when no parameter choice satisfies the requested guarantee."""

    def __init__(self, message: str, *, reason: str) -> None:
        super().__init__(message)
        self.reason = reason


class OracleCapacityError(ShufflePrivacyError):
    """Raised when exact enumeration is requested above its configured cap."""

    def __init__(self, message: str, *, requested: int, cap: int) -> None:
        super().__init__(message)
        self.requested = requested
        self.cap = cap
