"""Semantic exceptions and warnings shared across the package."""

from __future__ import annotations


class ChoquetKitError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ChoquetKitError, ValueError):
    """A set, point, or region lies outside the capacity's ground domain."""


class PreconditionError(ChoquetKitError, ValueError):
    """An operation's stated precondition is violated."""


class WindowError(ChoquetKitError, ValueError):
    """The sampling window is too small for the retained operator cells."""

    def __init__(self, message: str, required_b: float):
        super().__init__(message)
        self.required_b = required_b


class GridSnapWarning(UserWarning):
    """An integration region was snapped to the sampling grid."""
