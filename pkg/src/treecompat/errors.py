"""Exception hierarchy shared by every module."""

from __future__ import annotations


class TreeCompatError(Exception):
    """Base class for errors raised by treecompat."""


class InputError(TreeCompatError, ValueError):
    """Malformed or inconsistent user input (bad Newick, unknown label, ...)."""


class PreconditionError(TreeCompatError, ValueError):
    """An operation was called on a value that violates its precondition."""


class InstanceTooLarge(TreeCompatError):
    """The search space exceeds the configured cap.

    Distinct from an incompatibility verdict: nothing was decided.
    """

    def __init__(self, size: int, limit: int, what: str = "candidate fill edges"):
        self.size = size
        self.limit = limit
        super().__init__(f"instance too large: {size} {what} exceeds limit {limit}")


class ExtractionError(TreeCompatError):
    """Internal consistency failure while turning a triangulation into a supertree."""
