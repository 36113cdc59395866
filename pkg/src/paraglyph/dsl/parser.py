"""Recursive-descent parser with span-carrying diagnostics and recovery.

Statements are delimited by semicolons; after a syntax error the parser skips
to the next semicolon so every problem in a file is reported in one pass.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..hobby import JointKind
from . import ast
from .diagnostics import Diagnostic, Severity, Span, error
from .lexer import Token, tokenize

_Z_NAME = re.compile(r"^z\d+$")
_NAMED_DIRS = {"right": 0.0, "up": 90.0, "left": 180.0, "down": -90.0}
_DECL_KINDS = {"path", "pair", "pen", "numeric"}

_RESERVED = {
    "draw", "fill", "pickup", "input", "vardef", "enddef", "pen_stroke",
    "glyph", "beginfig", "endfig", "cycle", "controls", "and", "of", "dir",
    "advance", "withpen", "withcolor", "fix_nib", "pencircle", "pensquare",
    "scaled", "xscaled", "yscaled", "xyscaled", "rotated", "angle",
    "direction", "nib", "cut", "tip", "ignore_directions", "rel",
} | _DECL_KINDS | set(_NAMED_DIRS)


class _ParseError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


@dataclass
class ParseResult:
    program: ast.Program
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not any(d.severity is Severity.ERROR for d in self.diagnostics)


def parse(source: str, filename: str | None = None) -> ParseResult:
    tokens, diagnostics = tokenize(source, filename)
    parser = _Parser(tokens, filename)
    program = parser.parse_program()
    return ParseResult(program, diagnostics + parser.diagnostics)


class _Parser:
    def __init__(self, tokens: list[Token], filename: str | None):
        self.tokens = tokens
        self.pos = 0
        self.file = filename
        self.diagnostics: list[Diagnostic] = []

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def at_ident(self, text: str) -> bool:
        return self.at("IDENT", text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None, what: str = "") -> Token:
        if self.at(kind, text):
            return self.advance()
        tok = self.peek()
        wanted = what or (text or kind)
        raise _ParseError(error(
            f"expected {wanted}, found {tok.text or tok.kind!r}",
            tok.span(self.file)))

    def span(self, tok: Token) -> Span:
        return tok.span(self.file)

    # -- program -----------------------------------------------------------

    def parse_program(self) -> ast.Program:
        statements: list[ast.Stmt] = []
        while not self.at("EOF"):
            if self.accept("OP", ";"):
                continue
            if self._skip_fig_wrapper():
                continue
            try:
                stmt = self.parse_statement()
                if stmt is not None:
                    statements.append(stmt)
            except _ParseError as exc:
                self.diagnostics.append(exc.diagnostic)
                self._recover()
        return ast.Program(tuple(statements), self.file)

    def _skip_fig_wrapper(self) -> bool:
        if self.at_ident("beginfig"):
            self.advance()
            self.expect("OP", "(")
            depth = 1
            while depth and not self.at("EOF"):
                tok = self.advance()
                if tok.kind == "OP" and tok.text == "(":
                    depth += 1
                elif tok.kind == "OP" and tok.text == ")":
                    depth -= 1
            self.accept("OP", ";")
            return True
        if self.at_ident("endfig"):
            self.advance()
            self.accept("OP", ";")
            return True
        return False

    def _recover(self) -> None:
        while not self.at("EOF"):
            tok = self.advance()
            if tok.kind == "OP" and tok.text == ";":
                return

    # -- statements ----------------------------------------------------------

    def parse_statement(self) -> ast.Stmt | None:
        tok = self.peek()
        if tok.kind == "IDENT":
            text = tok.text
            if text == "input":
                return self.parse_include()
            if text == "vardef":
                return self.parse_pendef()
            if text in _DECL_KINDS and self.peek(1).kind == "IDENT":
                return self.parse_decl()
            if text == "pickup":
                return self.parse_pickup()
            if text == "pen_stroke":
                return self.parse_pen_stroke()
            if text in ("draw", "fill"):
                return self.parse_draw_fill()
            if text == "glyph":
                return self.parse_glyph_header()
            return self.parse_assignment_or_equation()
        if tok.kind == "OP" and tok.text == "(":
            return self.parse_assignment_or_equation()
        raise _ParseError(error(
            f"unexpected {tok.text or tok.kind!r} at statement start",
            self.span(tok)))

    def parse_include(self) -> ast.Include:
        start = self.advance()  # input
        parts: list[str] = []
        while not self.at("OP", ";") and not self.at("EOF"):
            parts.append(self.advance().text)
        self.expect("OP", ";")
        path = "".join(parts)
        if not path:
            raise _ParseError(error("input needs a file path", self.span(start)))
        return ast.Include(path, span=self.span(start))

    def parse_pendef(self) -> ast.PenDef:
        start = self.advance()  # vardef
        name = self.expect("IDENT", what="pen name").text
        self.expect("OP", "=")
        pen = self.parse_pen_expr()
        if not self.accept("IDENT", "enddef"):
            raise _ParseError(error("expected enddef to close vardef",
                                    self.span(self.peek())))
        self.expect("OP", ";")
        return ast.PenDef(name, pen, span=self.span(start))

    def parse_decl(self) -> ast.Decl:
        start = self.advance()
        names = [self.expect("IDENT", what="name").text]
        while self.accept("OP", ","):
            names.append(self.expect("IDENT", what="name").text)
        self.expect("OP", ";")
        return ast.Decl(start.text, tuple(names), span=self.span(start))

    def parse_pickup(self) -> ast.Pickup:
        start = self.advance()
        pen = self.parse_pen_expr()
        self.expect("OP", ";")
        return ast.Pickup(pen, span=self.span(start))

    def parse_glyph_header(self) -> ast.GlyphHeader:
        start = self.advance()
        name = self.expect("STRING", what="glyph name string").text
        unicode_value: int | None = None
        advance: ast.Expr | None = None
        if self.at("UNICODE"):
            unicode_value = int(self.advance().text[2:], 16)
        if self.accept("IDENT", "advance"):
            advance = self.parse_expr()
        self.expect("OP", ";")
        return ast.GlyphHeader(name, unicode_value, advance, span=self.span(start))

    def parse_assignment_or_equation(self) -> ast.Stmt:
        tok = self.peek()
        if tok.kind == "IDENT" and self.peek(1).kind == "OP" \
                and self.peek(1).text == ":=":
            name = self.advance().text
            self.advance()  # :=
            if name in _RESERVED:
                raise _ParseError(error(
                    f"'{name}' is a reserved word and cannot be assigned",
                    self.span(tok)))
            return self._parse_assign_rhs(name, self.span(tok))
        # Point equation: <side> = <side> ;
        lhs = self.parse_eq_side()
        self.expect("OP", "=", what="'=' or ':='")
        rhs = self.parse_eq_side()
        self.expect("OP", ";")
        return ast.PointEquation(lhs, rhs, span=self.span(tok))

    def _parse_assign_rhs(self, name: str, span: Span) -> ast.Stmt:
        # Numeric first; if the whole right side isn't a numeric expression
        # terminated by ';', re-parse it as a path.
        saved = self.pos
        saved_diags = len(self.diagnostics)
        numeric_error: _ParseError | None = None
        numeric_end = saved
        try:
            value = self.parse_expr()
            if self.at("OP", ";"):
                self.advance()
                return ast.ParamAssign(name, value, span=span)
            tok = self.peek()
            numeric_error = _ParseError(error(
                f"expected ';' after expression, found "
                f"{tok.text or tok.kind!r}", self.span(tok)))
            numeric_end = self.pos
        except _ParseError as exc:
            numeric_error = exc
            numeric_end = self.pos
        self.pos = saved
        del self.diagnostics[saved_diags:]
        try:
            path = self.parse_path_expr()
            self.expect("OP", ";")
        except _ParseError as path_error:
            # Report whichever attempt got further into the source.
            if numeric_error is not None and numeric_end >= self.pos:
                raise numeric_error from None
            raise path_error
        return ast.PathAssign(name, path, span=span)

    def parse_draw_fill(self) -> ast.Stmt:
        start = self.advance()
        target = self.parse_drawable()
        options: list[ast.DrawOption] = []
        while self.at("IDENT", "withpen") or self.at("IDENT", "withcolor"):
            opt = self.advance()
            if opt.text == "withpen":
                options.append(ast.DrawOption("withpen",
                                              pen=self.parse_pen_expr(),
                                              span=self.span(opt)))
            else:
                options.append(ast.DrawOption("withcolor",
                                              color=self.parse_color(),
                                              span=self.span(opt)))
        self.expect("OP", ";")
        cls = ast.Draw if start.text == "draw" else ast.Fill
        return cls(target, tuple(options), span=self.span(start))

    def parse_drawable(self) -> ast.Drawable:
        tok = self.peek()
        if tok.kind == "IDENT" and not _Z_NAME.match(tok.text):
            nxt = self.peek(1)
            if not (nxt.kind == "OP" and nxt.text in ("..", "--", "---", "{")):
                self.advance()
                return ast.PathRef(tok.text, span=self.span(tok))
        return self.parse_path_expr()

    def parse_color(self) -> ast.ColorExpr:
        tok = self.peek()
        if self.accept("OP", "("):
            r = self.parse_expr()
            self.expect("OP", ",")
            g = self.parse_expr()
            self.expect("OP", ",")
            b = self.parse_expr()
            self.expect("OP", ")")
            return ast.ColorExpr(triple=(r, g, b), span=self.span(tok))
        scale: ast.Expr | None = None
        if self.at("NUMBER"):
            scale = ast.Num(float(self.advance().text), span=self.span(tok))
        name = self.expect("IDENT", what="color name").text
        return ast.ColorExpr(scale=scale, name=name, span=self.span(tok))

    # -- pen_stroke ----------------------------------------------------------

    def parse_pen_stroke(self) -> ast.PenStroke:
        start = self.advance()
        self.expect("OP", "(")
        ops: list[ast.StrokeOp] = []
        while not self.at("OP", ")"):
            if self.accept("OP", ";"):
                continue
            ops.append(self.parse_stroke_op())
        self.expect("OP", ")")
        self.expect("OP", "(")
        path = self.parse_drawable()
        self.expect("OP", ")")
        self.expect("OP", "(")
        result = self.expect("IDENT", what="result name").text
        self.expect("OP", ")")
        self.expect("OP", ";")
        return ast.PenStroke(tuple(ops), path, result, span=self.span(start))

    def parse_stroke_op(self) -> ast.StrokeOp:
        tok = self.expect("IDENT", what="nib, cut, tip or ignore_directions")
        op = tok.text
        if op not in ("nib", "cut", "tip", "ignore_directions"):
            raise _ParseError(error(
                f"unknown stroke operator '{op}'", self.span(tok)))
        pen: ast.PenExpr | None = None
        angle: ast.Expr | None = None
        relative = False
        if op == "ignore_directions":
            nodes = self._parse_node_list() if self.at("OP", "(") else ()
            return ast.StrokeOp(op, None, None, False, nodes, span=self.span(tok))
        self.expect("OP", "(")
        pen = self.parse_pen_expr()
        if op == "cut":
            self.expect("OP", ",")
            if self.accept("IDENT", "rel"):
                relative = True
            angle = self.parse_expr()
        self.expect("OP", ")")
        nodes = self._parse_node_list()
        return ast.StrokeOp(op, pen, angle, relative, nodes, span=self.span(tok))

    def _parse_node_list(self) -> tuple[ast.Expr, ...]:
        self.expect("OP", "(")
        nodes = [self.parse_expr()]
        while self.accept("OP", ","):
            nodes.append(self.parse_expr())
        self.expect("OP", ")")
        return tuple(nodes)

    # -- paths ----------------------------------------------------------------

    def parse_path_expr(self) -> ast.PathExpr:
        start = self.peek()
        knots: list[ast.PathKnot] = []
        joints: list[ast.Joint] = []
        cyclic = False
        dir_in = self.parse_dirspec() if self.at("OP", "{") else None
        knots.append(self.parse_path_knot(dir_in))
        while True:
            joint = self.parse_joint()
            if joint is None:
                break
            dir_in = self.parse_dirspec() if self.at("OP", "{") else None
            if self.at_ident("cycle"):
                self.advance()
                if dir_in is not None:
                    first = knots[0]
                    if first.dir_in is not None:
                        raise _ParseError(error(
                            "conflicting incoming directions on the cycle knot",
                            self.span(start)))
                    knots[0] = ast.PathKnot(first.point, dir_in, first.dir_out,
                                            span=first.span)
                joints.append(joint)
                cyclic = True
                break
            joints.append(joint)
            knots.append(self.parse_path_knot(dir_in))
        if len(knots) == 1 and not cyclic:
            raise _ParseError(error("a path needs at least two knots",
                                    self.span(start)))
        return ast.PathExpr(tuple(knots), tuple(joints), cyclic,
                            span=self.span(start))

    def parse_path_knot(self, dir_in: ast.Expr | None) -> ast.PathKnot:
        tok = self.peek()
        point = self.parse_pair()
        dir_out = self.parse_dirspec() if self.at("OP", "{") else None
        return ast.PathKnot(point, dir_in, dir_out, span=self.span(tok))

    def parse_joint(self) -> ast.Joint | None:
        if self.at("OP", "--"):
            self.advance()
            return JointKind.LINE
        if self.at("OP", "---"):
            self.advance()
            return JointKind.SMOOTH_LINE
        if self.at("OP", ".."):
            self.advance()
            if self.accept("IDENT", "controls"):
                c0 = self.parse_pair()
                self.expect("IDENT", "and")
                c1 = self.parse_pair()
                self.expect("OP", "..")
                return ast.ExplicitControls(c0, c1)
            return JointKind.CURVE
        return None

    def parse_dirspec(self) -> ast.Expr:
        self.expect("OP", "{")
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in _NAMED_DIRS:
            self.advance()
            value: ast.Expr = ast.Num(_NAMED_DIRS[tok.text], span=self.span(tok))
        else:
            self.expect("IDENT", "dir")
            value = self.parse_expr()
        self.expect("OP", "}")
        return value

    # -- pens --------------------------------------------------------------

    def parse_pen_expr(self) -> ast.PenExpr:
        pen = self.parse_pen_primary()
        while True:
            tok = self.peek()
            if tok.kind == "IDENT" and tok.text in ("scaled", "xscaled",
                                                    "yscaled", "rotated"):
                self.advance()
                arg = self.parse_term()
                pen = ast.PenTransform(pen, tok.text, arg, span=self.span(tok))
            elif tok.kind == "IDENT" and tok.text == "xyscaled":
                self.advance()
                self.expect("OP", "(")
                sx = self.parse_expr()
                self.expect("OP", ",")
                sy = self.parse_expr()
                self.expect("OP", ")")
                pen = ast.PenXYScaled(pen, sx, sy, span=self.span(tok))
            else:
                return pen

    def parse_pen_primary(self) -> ast.PenExpr:
        tok = self.peek()
        if self.accept("IDENT", "fix_nib"):
            self.expect("OP", "(")
            w = self.parse_expr()
            self.expect("OP", ",")
            h = self.parse_expr()
            self.expect("OP", ",")
            a = self.parse_expr()
            self.expect("OP", ")")
            return ast.FixNib(w, h, a, span=self.span(tok))
        if self.accept("IDENT", "pencircle"):
            return ast.PenCircle(span=self.span(tok))
        if self.accept("IDENT", "pensquare"):
            return ast.PenSquare(span=self.span(tok))
        name = self.expect("IDENT", what="pen expression")
        return ast.PenRef(name.text, span=self.span(name))

    # -- equations, pairs and numeric expressions ----------------------------

    def parse_eq_side(self) -> ast.EqSide:
        tok = self.peek()
        if tok.kind == "IDENT" and _Z_NAME.match(tok.text):
            nxt = self.peek(1)
            if nxt.kind == "OP" and nxt.text in ("=", ";"):
                self.advance()
                return ast.ZName(tok.text, span=self.span(tok))
        if tok.kind == "OP" and tok.text == "(":
            saved = self.pos
            try:
                return self.parse_pair_literal()
            except _ParseError:
                self.pos = saved
        return self.parse_expr()

    def parse_pair_literal(self) -> ast.PairLit:
        tok = self.expect("OP", "(")
        x = self.parse_expr()
        self.expect("OP", ",")
        y = self.parse_expr()
        self.expect("OP", ")")
        return ast.PairLit(x, y, span=self.span(tok))

    def parse_pair(self) -> ast.PairExpr:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "(":
            return self.parse_pair_literal()
        if tok.kind == "IDENT" and _Z_NAME.match(tok.text):
            self.advance()
            return ast.ZName(tok.text, span=self.span(tok))
        if self.accept("IDENT", "direction"):
            index = self.parse_expr()
            self.expect("IDENT", "of")
            path = self.expect("IDENT", what="path name").text
            return ast.DirectionOf(index, path, span=self.span(tok))
        raise _ParseError(error(
            f"expected a point, found {tok.text or tok.kind!r}",
            self.span(tok)))

    def parse_expr(self) -> ast.Expr:
        left = self.parse_term()
        while self.at("OP", "+") or self.at("OP", "-"):
            op = self.advance()
            right = self.parse_term()
            left = ast.BinOp(op.text, left, right, span=self.span(op))
        return left

    def parse_term(self) -> ast.Expr:
        left = self.parse_unary()
        while True:
            if self.at("OP", "*") or self.at("OP", "/"):
                op = self.advance()
                right = self.parse_unary()
                left = ast.BinOp(op.text, left, right, span=self.span(op))
            else:
                return left

    def parse_unary(self) -> ast.Expr:
        tok = self.peek()
        if self.accept("OP", "-"):
            return ast.Neg(self.parse_unary(), span=self.span(tok))
        if self.accept("OP", "+"):
            return self.parse_unary()
        return self.parse_primary()

    def parse_primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            value = ast.Num(float(tok.text), span=self.span(tok))
            # Numeral-times-name shorthand: 8u, 0.9u, 2cm.
            nxt = self.peek()
            if nxt.kind == "IDENT" and nxt.text not in _RESERVED:
                self.advance()
                return ast.BinOp("*", value,
                                 ast.Name(nxt.text, span=self.span(nxt)),
                                 span=self.span(tok))
            return value
        if tok.kind == "IDENT":
            if tok.text == "angle":
                self.advance()
                self.expect("OP", "(")
                pair = self.parse_pair()
                self.expect("OP", ")")
                return ast.AngleOf(pair, span=self.span(tok))
            if tok.text == "direction":
                self.advance()
                index = self.parse_expr()
                self.expect("IDENT", "of")
                path = self.expect("IDENT", what="path name").text
                return ast.DirectionOf(index, path, span=self.span(tok))
            if tok.text in _RESERVED:
                raise _ParseError(error(
                    f"unexpected keyword '{tok.text}' in expression",
                    self.span(tok)))
            self.advance()
            return ast.Name(tok.text, span=self.span(tok))
        if self.accept("OP", "("):
            inner = self.parse_expr()
            self.expect("OP", ")")
            return inner
        raise _ParseError(error(
            f"expected an expression, found {tok.text or tok.kind!r}",
            self.span(tok)))
