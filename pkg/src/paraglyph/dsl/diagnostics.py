"""Source-anchored diagnostics shared by the lexer, parser and evaluator."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    file: str | None = None


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: Span

    def format(self) -> str:
        name = self.span.file or "<source>"
        return (f"{name}:{self.span.line}:{self.span.col}: "
                f"{self.severity.value}: {self.message}")


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def error(message: str, span: Span) -> Diagnostic:
    return Diagnostic(Severity.ERROR, message, span)


def warning(message: str, span: Span) -> Diagnostic:
    return Diagnostic(Severity.WARNING, message, span)


class SourceError(Exception):
    """Raised by stages that cannot return partial results; carries the
    diagnostics so callers can surface them uniformly."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.format() for d in diagnostics))
        self.diagnostics = list(diagnostics)
