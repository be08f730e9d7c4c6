"""Errors raised by the formal language lexer, parser and evaluator."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional


@dataclass(frozen=True)
class Span:
    """A 1-based source position."""

    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


UNKNOWN_SPAN = Span(0, 0)


class ErrorKind(str, Enum):
    """Error kinds that can appear in an observation."""

    LEX = "lex"
    SYNTAX = "syntax"
    NAME_UNBOUND = "name-unbound"
    TYPE_MISMATCH = "type-mismatch"
    INDEX_OUT_OF_RANGE = "index-out-of-range"
    KEY_MISSING = "key-missing"
    HOST_FAILURE = "host-failure"
    BUDGET_EXCEEDED = "budget-exceeded"


class FormalLanguageError(Exception):
    """Base class for all formal language errors."""

    kind: ErrorKind = ErrorKind.SYNTAX

    def __init__(self, message: str, span: Optional[Span] = None):
        super().__init__(message)
        self.message = message
        self.span = span or UNKNOWN_SPAN

    def render(self) -> str:
        """Render in the stable observation format."""
        return f"Error({self.kind.value}): {self.message} @ {self.span}"


class LexError(FormalLanguageError):
    """Raised on an unterminated string or an illegal character."""

    kind = ErrorKind.LEX


class ParseError(FormalLanguageError):
    """Raised at the first token the grammar cannot accept."""

    kind = ErrorKind.SYNTAX


class EvalError(FormalLanguageError):
    """Raised while evaluating a program."""

    def __init__(self, kind: ErrorKind, message: str, span: Optional[Span] = None):
        super().__init__(message, span)
        self.kind = kind
