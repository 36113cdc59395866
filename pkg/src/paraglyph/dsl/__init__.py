"""Glyph description language: lexer, parser, evaluator, diagnostics."""

from .ast import Program, to_source
from .diagnostics import Diagnostic, Severity, SourceError, Span, has_errors
from .evaluator import (
    EvaluationTimeout,
    GlyphResult,
    evaluate,
    file_loader,
    resolve_includes,
)
from .parser import ParseResult, parse

__all__ = [
    "Diagnostic",
    "EvaluationTimeout",
    "GlyphResult",
    "ParseResult",
    "Program",
    "Severity",
    "SourceError",
    "Span",
    "evaluate",
    "file_loader",
    "has_errors",
    "parse",
    "resolve_includes",
    "to_source",
]
