"""Exception taxonomy for binlcs.

Every library-raised error derives from LcsApproxError so callers (and the CLI,
which maps them to exit code 1) can catch one base type. ParseError carries the
byte offset of the offending character.
"""
from __future__ import annotations


class LcsApproxError(Exception):
    """Base class for all binlcs errors."""


class ContractError(LcsApproxError):
    """A documented precondition or invariant of an operation was violated."""


class RangeError(LcsApproxError):
    """An index or interval lies outside the valid range."""


class DomainError(LcsApproxError):
    """The operation is undefined for this input (e.g. empty interval density)."""


class CapacityError(LcsApproxError):
    """The input exceeds a documented size cap for this operation."""


class ConfigError(LcsApproxError):
    """Invalid parameter set, profile, or generator specification."""


class ParseError(LcsApproxError):
    """Malformed textual input. Records the byte offset of the first bad byte."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset
