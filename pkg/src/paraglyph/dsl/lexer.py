"""Tokenizer for the glyph description language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, Span, error


@dataclass(frozen=True)
class Token:
    kind: str      # NUMBER | IDENT | STRING | UNICODE | OP | EOF
    text: str
    line: int
    col: int

    def span(self, file: str | None = None) -> Span:
        return Span(self.line, self.col, file)


_TOKEN_RE = re.compile(
    r"""
    (?P<COMMENT>%[^\n]*)
  | (?P<SKIP>[ \t\r]+)
  | (?P<NEWLINE>\n)
  | (?P<UNICODE>U\+[0-9A-Fa-f]+)
  | (?P<NUMBER>\d+\.\d*|\.\d+|\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<STRING>"[^"\n]*")
  | (?P<OP>:=|---|--|\.\.|[-+*/=(){},;.])
    """,
    re.VERBOSE,
)


def tokenize(source: str, file: str | None = None) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    line = 1
    line_start = 0
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            diagnostics.append(error(
                f"unexpected character {source[pos]!r}", Span(line, col, file)))
            pos += 1
            continue
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "NEWLINE":
            line += 1
            line_start = pos
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "STRING":
            text = text[1:-1]
        tokens.append(Token(kind, text, line, col))
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens, diagnostics
