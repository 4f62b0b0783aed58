"""
Exceptions raised by the sigma-product toolkit.
"""


class SigmaError(Exception):
    """Base class for all toolkit errors."""


class AnchorLookupError(SigmaError, KeyError):
    """An anchor id is not registered in the space."""

    def __init__(self, anchor_id: str):
        self.anchor_id = anchor_id
        super().__init__(f"Unknown anchor: {anchor_id!r}")

    def __str__(self) -> str:
        return self.args[0]


class DimensionMismatchError(SigmaError, ValueError):
    """A coordinate vector does not match the dimension of its coordinate space."""


class AnchorMismatchError(SigmaError, ValueError):
    """A point lives over a different anchor than the object it is used with."""


class PreconditionError(SigmaError, ValueError):
    """An operation was called outside its domain."""


class NotNearlyOpenError(SigmaError, ValueError):
    """A set fails to be nearly open near a point (no positive margin)."""

    def __init__(self, message: str, stage: int = None):
        self.stage = stage
        super().__init__(message)


class InfeasibleGridError(SigmaError, ValueError):
    """No grid point satisfies the predicate of a brute-force oracle."""


class EmptyUnionError(SigmaError, ValueError):
    """A nearly-open union needs at least one ball product."""
