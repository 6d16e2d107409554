"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["RolescopeError", "GraphError", "ValidationError", "ParseError"]


class RolescopeError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(RolescopeError):
    """Malformed graph structure (self loops, bad node ids, empty graphs)."""


class ValidationError(RolescopeError):
    """Invalid argument or precondition violation on an operation."""


class ParseError(RolescopeError):
    """File could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
