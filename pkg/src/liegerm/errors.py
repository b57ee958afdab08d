"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class LiegermError(Exception):
    """Base class for all library errors."""


class RingMismatchError(LiegermError, ValueError):
    """Operands live in different rings, or module ranks disagree."""


class DomainError(LiegermError, ValueError):
    """An operation's precondition is violated."""


class InversionError(DomainError):
    """An automorphism cannot be inverted exactly."""


class ExtractionError(DomainError):
    """A lambda table is not of the induced form."""


class ParseError(LiegermError, ValueError):
    """Malformed input text; carries a 0-based offset and optional line."""

    def __init__(self, message: str, offset: int = 0, line: int | None = None, text: str = ""):
        self.offset = offset
        self.line = line
        self.text = text
        self.message = message
        where = f"offset {offset}" if line is None else f"line {line}, column {offset + 1}"
        super().__init__(f"{where}: {message}")
