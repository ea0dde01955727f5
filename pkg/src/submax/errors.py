from __future__ import annotations


class InvalidInputError(ValueError):
    """Raised when an oracle or algorithm precondition is violated."""


class InstanceTooLargeError(InvalidInputError):
    """Raised when a brute-force routine refuses an oversized instance."""
