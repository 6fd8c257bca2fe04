"""Exception hierarchy shared by every pinsep module."""

from __future__ import annotations

from typing import Any


class PinsepError(Exception):
    """Base class for all library errors."""


class StructuralError(PinsepError, ValueError):
    """Malformed input: mismatched moduli, shapes or non-prime p."""


class ParseError(PinsepError):
    """Syntax error in an input document, with 1-based position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


class PreconditionError(PinsepError):
    """An operation was called outside its domain.

    ``witness`` optionally carries a machine-readable counter-example,
    for instance an idempotent proving that an algebra is not local.
    """

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)


class RouteError(PreconditionError):
    """A requested computation route is unavailable for this input."""


class ResourceError(PinsepError):
    """A configured size threshold would be exceeded."""
