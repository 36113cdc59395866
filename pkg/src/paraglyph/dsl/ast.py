"""AST for glyph programs, plus the canonical pretty-printer.

Spans are carried for diagnostics but excluded from equality, so structural
comparison (used by the parse/print round-trip tests) ignores layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..hobby import JointKind
from .diagnostics import Span


def _span_field():
    return field(default=None, compare=False, repr=False)


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Name:
    id: str
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span | None = _span_field()


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"
    span: Span | None = _span_field()


@dataclass(frozen=True)
class AngleOf:
    pair: "PairExpr"
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PairLit:
    x: "Expr"
    y: "Expr"
    span: Span | None = _span_field()


@dataclass(frozen=True)
class ZName:
    id: str  # e.g. "z0"
    span: Span | None = _span_field()

    @property
    def index(self) -> str:
        return self.id[1:]


@dataclass(frozen=True)
class DirectionOf:
    index: "Expr"
    path_name: str
    span: Span | None = _span_field()


Expr = Union[Num, Name, Neg, BinOp, AngleOf, DirectionOf]
PairExpr = Union[PairLit, ZName, DirectionOf]
EqSide = Union[PairLit, ZName, Num, Name, Neg, BinOp, AngleOf, DirectionOf]


# --- pens -------------------------------------------------------------------

@dataclass(frozen=True)
class FixNib:
    width: Expr
    height: Expr
    angle: Expr
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenCircle:
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenSquare:
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenRef:
    name: str
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenTransform:
    base: "PenExpr"
    op: str  # scaled | xscaled | yscaled | rotated
    arg: Expr
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenXYScaled:
    base: "PenExpr"
    sx: Expr
    sy: Expr
    span: Span | None = _span_field()


PenExpr = Union[FixNib, PenCircle, PenSquare, PenRef, PenTransform, PenXYScaled]


# --- paths ------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitControls:
    c0: PairExpr
    c1: PairExpr
    span: Span | None = _span_field()


Joint = Union[JointKind, ExplicitControls]


@dataclass(frozen=True)
class PathKnot:
    point: PairExpr
    dir_in: Expr | None = None
    dir_out: Expr | None = None
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PathExpr:
    knots: tuple[PathKnot, ...]
    joints: tuple[Joint, ...]
    cyclic: bool = False
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PathRef:
    name: str
    span: Span | None = _span_field()


Drawable = Union[PathExpr, PathRef]


@dataclass(frozen=True)
class ColorExpr:
    scale: Expr | None = None
    name: str | None = None
    triple: tuple[Expr, Expr, Expr] | None = None
    span: Span | None = _span_field()


@dataclass(frozen=True)
class DrawOption:
    kind: str  # withpen | withcolor
    pen: PenExpr | None = None
    color: ColorExpr | None = None
    span: Span | None = _span_field()


# --- statements ---------------------------------------------------------

@dataclass(frozen=True)
class ParamAssign:
    name: str
    value: Expr
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PointEquation:
    lhs: EqSide
    rhs: EqSide
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Include:
    path: str
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenDef:
    name: str
    pen: PenExpr
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Decl:
    kind: str  # path | pair | pen | numeric
    names: tuple[str, ...]
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PathAssign:
    name: str
    path: PathExpr
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Pickup:
    pen: PenExpr
    span: Span | None = _span_field()


@dataclass(frozen=True)
class StrokeOp:
    op: str  # nib | cut | tip | ignore_directions
    pen: PenExpr | None
    angle: Expr | None
    relative: bool
    nodes: tuple[Expr, ...]
    span: Span | None = _span_field()


@dataclass(frozen=True)
class PenStroke:
    ops: tuple[StrokeOp, ...]
    path: Drawable
    result: str
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Draw:
    target: Drawable
    options: tuple[DrawOption, ...] = ()
    span: Span | None = _span_field()


@dataclass(frozen=True)
class Fill:
    target: Drawable
    options: tuple[DrawOption, ...] = ()
    span: Span | None = _span_field()


@dataclass(frozen=True)
class GlyphHeader:
    name: str
    unicode: int | None = None
    advance: Expr | None = None
    span: Span | None = _span_field()


Stmt = Union[ParamAssign, PointEquation, Include, PenDef, Decl, PathAssign,
             Pickup, PenStroke, Draw, Fill, GlyphHeader]


@dataclass(frozen=True)
class Program:
    statements: tuple[Stmt, ...]
    source_name: str | None = _span_field()


# --------------------------------------------------------------------------
# Pretty printing (canonical source form)
# --------------------------------------------------------------------------

def format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return 1 if e.op in "+-" else 2
    if isinstance(e, Neg):
        return 3
    return 4


def _expr(e, min_prec: int = 0) -> str:
    if isinstance(e, Num):
        text = format_number(e.value)
    elif isinstance(e, Name):
        text = e.id
    elif isinstance(e, Neg):
        text = f"-{_expr(e.operand, 4)}"
    elif isinstance(e, BinOp):
        prec = _prec(e)
        text = (f"{_expr(e.left, prec)} {e.op} {_expr(e.right, prec + 1)}")
    elif isinstance(e, AngleOf):
        text = f"angle({_pair(e.pair)})"
    elif isinstance(e, DirectionOf):
        # Binds loosely; parenthesise whenever embedded in an operation.
        text = f"direction {_expr(e.index, 4)} of {e.path_name}"
        if min_prec > 0:
            return f"({text})"
        return text
    else:
        raise TypeError(f"not an expression: {e!r}")
    if _prec(e) < min_prec:
        return f"({text})"
    return text


def _atom(e) -> str:
    return _expr(e, 4)


def _pair(p) -> str:
    if isinstance(p, PairLit):
        return f"({_expr(p.x)}, {_expr(p.y)})"
    if isinstance(p, ZName):
        return p.id
    if isinstance(p, DirectionOf):
        return f"direction {_expr(p.index)} of {p.path_name}"
    raise TypeError(f"not a pair expression: {p!r}")


def _pen(p) -> str:
    if isinstance(p, FixNib):
        return f"fix_nib({_expr(p.width)}, {_expr(p.height)}, {_expr(p.angle)})"
    if isinstance(p, PenCircle):
        return "pencircle"
    if isinstance(p, PenSquare):
        return "pensquare"
    if isinstance(p, PenRef):
        return p.name
    if isinstance(p, PenTransform):
        return f"{_pen(p.base)} {p.op} {_atom(p.arg)}"
    if isinstance(p, PenXYScaled):
        return f"{_pen(p.base)} xyscaled ({_expr(p.sx)}, {_expr(p.sy)})"
    raise TypeError(f"not a pen expression: {p!r}")


def _joint(j) -> str:
    if isinstance(j, ExplicitControls):
        return f"..controls {_pair(j.c0)} and {_pair(j.c1)}.."
    return j.value


def _path(p) -> str:
    if isinstance(p, PathRef):
        return p.name
    parts: list[str] = []
    for i, knot in enumerate(p.knots):
        text = ""
        if knot.dir_in is not None:
            text += "{dir " + _expr(knot.dir_in) + "}"
        text += _pair(knot.point)
        if knot.dir_out is not None:
            text += "{dir " + _expr(knot.dir_out) + "}"
        parts.append(text)
        if i < len(p.joints):
            parts.append(_joint(p.joints[i]))
    if p.cyclic:
        parts.append("cycle")
    return "".join(parts)


def _eq_side(e) -> str:
    if isinstance(e, (PairLit, ZName)):
        return _pair(e)
    return _expr(e)


def _color(c: ColorExpr) -> str:
    if c.triple is not None:
        return f"({_expr(c.triple[0])}, {_expr(c.triple[1])}, {_expr(c.triple[2])})"
    scale = format_number(c.scale.value) if isinstance(c.scale, Num) else (
        _expr(c.scale) if c.scale is not None else "")
    return f"{scale}{c.name}"


def _options(options: tuple[DrawOption, ...]) -> str:
    out = ""
    for opt in options:
        if opt.kind == "withpen":
            out += f" withpen {_pen(opt.pen)}"
        else:
            out += f" withcolor {_color(opt.color)}"
    return out


def stmt_to_source(stmt: Stmt) -> str:
    if isinstance(stmt, ParamAssign):
        return f"{stmt.name} := {_expr(stmt.value)};"
    if isinstance(stmt, PointEquation):
        return f"{_eq_side(stmt.lhs)} = {_eq_side(stmt.rhs)};"
    if isinstance(stmt, Include):
        return f"input {stmt.path};"
    if isinstance(stmt, PenDef):
        return f"vardef {stmt.name} = {_pen(stmt.pen)} enddef;"
    if isinstance(stmt, Decl):
        return f"{stmt.kind} {', '.join(stmt.names)};"
    if isinstance(stmt, PathAssign):
        return f"{stmt.name} := {_path(stmt.path)};"
    if isinstance(stmt, Pickup):
        return f"pickup {_pen(stmt.pen)};"
    if isinstance(stmt, PenStroke):
        ops = []
        for op in stmt.ops:
            if op.op == "nib":
                head = f"nib({_pen(op.pen)})"
            elif op.op == "cut":
                rel = "rel " if op.relative else ""
                head = f"cut({_pen(op.pen)}, {rel}{_expr(op.angle)})"
            elif op.op == "tip":
                head = f"tip({_pen(op.pen)})"
            else:
                head = "ignore_directions"
            nodes = ", ".join(_expr(e) for e in op.nodes)
            ops.append(f"{head}({nodes})" if op.nodes else head)
        body = " ".join(ops)
        return f"pen_stroke({body})({_path(stmt.path)})({stmt.result});"
    if isinstance(stmt, Draw):
        return f"draw {_path(stmt.target)}{_options(stmt.options)};"
    if isinstance(stmt, Fill):
        return f"fill {_path(stmt.target)}{_options(stmt.options)};"
    if isinstance(stmt, GlyphHeader):
        out = f'glyph "{stmt.name}"'
        if stmt.unicode is not None:
            out += f" U+{stmt.unicode:04X}"
        if stmt.advance is not None:
            out += f" advance {_expr(stmt.advance)}"
        return out + ";"
    raise TypeError(f"not a statement: {stmt!r}")


def to_source(program: Program) -> str:
    return "\n".join(stmt_to_source(s) for s in program.statements) + "\n"
