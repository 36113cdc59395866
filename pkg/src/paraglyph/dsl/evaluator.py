"""Statement-by-statement execution of glyph programs.

Parameters bind scalars, point equations accumulate in the linear solver,
path assignments run the smoothing solver, and stroke statements expand
envelopes; draw/fill append contours to the glyph outline. Errors become
span-carrying diagnostics and evaluation carries on, so one pass reports as
much as possible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .. import pen as penlib
from ..equations import (
    EquationError,
    EquationSystem,
    LinExpr,
)
from ..geometry import Contour, Point
from ..hobby import JointKind, Knot, PathSpec, PathSpecError, direction_at, solve
from . import ast
from .diagnostics import (
    Diagnostic,
    Severity,
    SourceError,
    Span,
    error,
    has_errors,
    warning,
)
from .parser import parse

_PRELUDE_CACHE: ast.Program | None = None


def prelude_program() -> ast.Program:
    global _PRELUDE_CACHE
    if _PRELUDE_CACHE is None:
        from importlib import resources
        text = (resources.files("paraglyph.dsl") / "prelude.mpg").read_text("utf-8")
        result = parse(text, "<prelude>")
        if not result.ok:
            raise SourceError(result.diagnostics)
        _PRELUDE_CACHE = result.program
    return _PRELUDE_CACHE


class EvaluationTimeout(Exception):
    pass


@dataclass
class GlyphResult:
    outlines: list[Contour]
    diagnostics: list[Diagnostic]
    advance: float | None = None
    name: str | None = None
    unicode: int | None = None
    params: list[tuple[str, float]] = field(default_factory=list)
    center_paths: list[Contour] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)


class _EvalError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


_COORD_HEAD = ("x", "y")


def _is_coord_var(name: str) -> bool:
    return (len(name) > 1 and name[0] in _COORD_HEAD and name[1:].isdigit())


class Evaluator:
    def __init__(self, overrides: dict[str, float] | None = None,
                 deadline: float | None = None):
        self.overrides = dict(overrides or {})
        self.deadline = deadline
        self.params: dict[str, float] = dict(self.overrides)
        self.declared: list[str] = []
        self.system = EquationSystem()
        self.paths: dict[str, Contour] = {}
        self.pens: dict[str, ast.PenExpr] = {}
        self.envelopes: dict[str, penlib.Envelope] = {}
        self.current_pen: penlib.Nib | None = None
        self.outlines: list[Contour] = []
        self._outline_ids: set[int] = set()
        self._envelope_ids: set[int] = set()
        self.center_paths: list[Contour] = []
        self.diagnostics: list[Diagnostic] = []
        self.header: ast.GlyphHeader | None = None

    # -- misc ----------------------------------------------------------------

    def _check_deadline(self, span: Span | None) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise EvaluationTimeout()

    def _fail(self, message: str, span: Span | None) -> _EvalError:
        return _EvalError(error(message, span or Span(1, 1)))

    def _warn(self, message: str, span: Span | None) -> None:
        self.diagnostics.append(warning(message, span or Span(1, 1)))

    # -- expression evaluation -------------------------------------------------

    def eval_expr(self, expr: ast.Expr) -> float:
        if isinstance(expr, ast.Num):
            return expr.value
        if isinstance(expr, ast.Name):
            return self._lookup(expr.id, expr.span)
        if isinstance(expr, ast.Neg):
            return -self.eval_expr(expr.operand)
        if isinstance(expr, ast.BinOp):
            left = self.eval_expr(expr.left)
            right = self.eval_expr(expr.right)
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            if right == 0.0:
                raise self._fail("division by zero", expr.span)
            return left / right
        if isinstance(expr, ast.AngleOf):
            p = self.eval_pair(expr.pair)
            return p.angle()
        if isinstance(expr, ast.DirectionOf):
            raise self._fail(
                "a direction is a vector; wrap it in angle(...) to use it "
                "as a number", expr.span)
        raise self._fail(f"cannot evaluate {type(expr).__name__}", None)

    def _lookup(self, name: str, span: Span | None) -> float:
        if name in self.params:
            return self.params[name]
        if _is_coord_var(name):
            try:
                return self.system.value_of(name)
            except EquationError as exc:
                raise self._fail(str(exc), span) from exc
        raise self._fail(f"undefined name '{name}'", span)

    def eval_pair(self, expr: ast.PairExpr, span: Span | None = None) -> Point:
        self._check_deadline(span)
        if isinstance(expr, ast.PairLit):
            return Point(self.eval_expr(expr.x), self.eval_expr(expr.y))
        if isinstance(expr, ast.ZName):
            idx = expr.index
            try:
                return Point(self.system.value_of(f"x{idx}"),
                             self.system.value_of(f"y{idx}"))
            except EquationError as exc:
                raise self._fail(str(exc), expr.span or span) from exc
        if isinstance(expr, ast.DirectionOf):
            contour = self._lookup_path(expr.path_name, expr.span)
            index = int(round(self.eval_expr(expr.index)))
            try:
                angle = direction_at(contour, index)
            except IndexError as exc:
                raise self._fail(str(exc), expr.span) from exc
            return Point(math.cos(math.radians(angle)),
                         math.sin(math.radians(angle)))
        raise self._fail("expected a point", span)

    def _lookup_path(self, name: str, span: Span | None) -> Contour:
        contour = self.paths.get(name)
        if contour is None:
            if name in self.envelopes:
                raise self._fail(
                    f"stroke '{name}' of a cyclic path has no complete "
                    f"envelope; use {name}_l / {name}_r", span)
            raise self._fail(f"undefined path '{name}'", span)
        return contour

    # -- linear expressions -----------------------------------------------------

    def linexpr(self, expr: ast.Expr) -> LinExpr:
        if isinstance(expr, ast.Num):
            return LinExpr.const(expr.value)
        if isinstance(expr, ast.Name):
            if expr.id in self.params:
                return LinExpr.const(self.params[expr.id])
            if _is_coord_var(expr.id):
                return LinExpr.var(expr.id)
            raise self._fail(f"undefined name '{expr.id}' in equation", expr.span)
        if isinstance(expr, ast.Neg):
            return self.linexpr(expr.operand).scaled(-1.0)
        if isinstance(expr, ast.BinOp):
            left = self.linexpr(expr.left)
            right = self.linexpr(expr.right)
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                if left.is_constant():
                    return right.scaled(left.constant)
                if right.is_constant():
                    return left.scaled(right.constant)
                raise self._fail(
                    "nonlinear equation: product of two unknowns", expr.span)
            if not right.is_constant():
                raise self._fail(
                    "nonlinear equation: division by an unknown", expr.span)
            if right.constant == 0.0:
                raise self._fail("division by zero", expr.span)
            return left.scaled(1.0 / right.constant)
        if isinstance(expr, (ast.AngleOf, ast.DirectionOf)):
            return LinExpr.const(self.eval_expr(expr))
        raise self._fail("unsupported term in equation", None)

    # -- pens ------------------------------------------------------------------

    def eval_pen(self, expr: ast.PenExpr) -> penlib.Nib:
        if isinstance(expr, ast.FixNib):
            w = self.eval_expr(expr.width)
            h = self.eval_expr(expr.height)
            a = self.eval_expr(expr.angle)
            if w < 0 or h < 0:
                raise self._fail(
                    f"nib extents must be non-negative, got {w:g} x {h:g}",
                    expr.span)
            return penlib.Nib(w, h, a)
        if isinstance(expr, ast.PenCircle):
            return penlib.Nib(1.0, 1.0, 0.0)
        if isinstance(expr, ast.PenSquare):
            self._warn("pensquare is approximated by an elliptical nib",
                       expr.span)
            return penlib.Nib(1.0, 1.0, 0.0)
        if isinstance(expr, ast.PenRef):
            definition = self.pens.get(expr.name)
            if definition is None:
                raise self._fail(f"undefined pen '{expr.name}'", expr.span)
            return self.eval_pen(definition)
        if isinstance(expr, ast.PenTransform):
            base = self.eval_pen(expr.base)
            value = self.eval_expr(expr.arg)
            if expr.op == "rotated":
                return base.rotated(value)
            if value < 0:
                raise self._fail("nib scale must be non-negative", expr.span)
            if expr.op == "scaled":
                return base.scaled(value)
            if base.angle % 360.0 != 0.0:
                raise self._fail(
                    f"{expr.op} after rotation is not representable; apply "
                    "axis scaling before rotating the nib", expr.span)
            if expr.op == "xscaled":
                return penlib.Nib(base.width * value, base.height, base.angle)
            return penlib.Nib(base.width, base.height * value, base.angle)
        if isinstance(expr, ast.PenXYScaled):
            base = self.eval_pen(expr.base)
            sx = self.eval_expr(expr.sx)
            sy = self.eval_expr(expr.sy)
            if sx < 0 or sy < 0:
                raise self._fail("nib scale must be non-negative", expr.span)
            if base.angle % 360.0 != 0.0:
                raise self._fail(
                    "xyscaled after rotation is not representable; apply "
                    "axis scaling before rotating the nib", expr.span)
            return penlib.Nib(base.width * sx, base.height * sy, base.angle)
        raise self._fail("unsupported pen expression", None)

    # -- paths -----------------------------------------------------------------

    def eval_path(self, expr: ast.PathExpr) -> Contour:
        knots: list[Knot] = []
        for k in expr.knots:
            self._check_deadline(k.span)
            point = self.eval_pair(k.point, k.span)
            dir_in = self.eval_expr(k.dir_in) if k.dir_in is not None else None
            dir_out = self.eval_expr(k.dir_out) if k.dir_out is not None else None
            knots.append(Knot(point, dir_in, dir_out))
        joints: list[JointKind] = []
        for i, joint in enumerate(expr.joints):
            if isinstance(joint, ast.ExplicitControls):
                c0 = self.eval_pair(joint.c0, joint.span)
                c1 = self.eval_pair(joint.c1, joint.span)
                knots[i] = Knot(knots[i].point, knots[i].dir_in,
                                knots[i].dir_out, (c0, c1))
                joints.append(JointKind.CURVE)
            else:
                joints.append(joint)
        warnings: list[str] = []
        try:
            spec = PathSpec(tuple(knots), tuple(joints), expr.cyclic)
            contour = solve(spec, warnings)
        except PathSpecError as exc:
            raise self._fail(str(exc), expr.span) from exc
        for w in warnings:
            self._warn(w, expr.span)
        return contour

    def _resolve_drawable(self, target: ast.Drawable) -> tuple[Contour, bool]:
        """Return (contour, is_envelope_output)."""
        if isinstance(target, ast.PathRef):
            contour = self._lookup_path(target.name, target.span)
            return contour, id(contour) in self._envelope_ids
        return self.eval_path(target), False

    # -- statements ---------------------------------------------------------------

    def run(self, program: ast.Program) -> None:
        for stmt in program.statements:
            self._check_deadline(stmt.span)
            try:
                self._execute(stmt)
            except _EvalError as exc:
                self.diagnostics.append(exc.diagnostic)

    def _execute(self, stmt: ast.Stmt) -> None:
        if isinstance(stmt, ast.ParamAssign):
            if stmt.name not in self.declared:
                self.declared.append(stmt.name)
            if stmt.name in self.overrides:
                return  # overrides pin the value against in-file assignments
            self.params[stmt.name] = self.eval_expr(stmt.value)
        elif isinstance(stmt, ast.PointEquation):
            self._execute_equation(stmt)
        elif isinstance(stmt, ast.Include):
            raise self._fail(
                f"unresolved include '{stmt.path}' (includes must be resolved "
                "before evaluation)", stmt.span)
        elif isinstance(stmt, ast.PenDef):
            self.pens[stmt.name] = stmt.pen
        elif isinstance(stmt, ast.Decl):
            pass
        elif isinstance(stmt, ast.PathAssign):
            self.paths[stmt.name] = self.eval_path(stmt.path)
        elif isinstance(stmt, ast.Pickup):
            self.current_pen = self.eval_pen(stmt.pen)
        elif isinstance(stmt, ast.PenStroke):
            self._execute_pen_stroke(stmt)
        elif isinstance(stmt, (ast.Draw, ast.Fill)):
            self._execute_draw_fill(stmt)
        elif isinstance(stmt, ast.GlyphHeader):
            self.header = stmt
        else:
            raise self._fail(f"cannot execute {type(stmt).__name__}", stmt.span)

    def _eq_linexprs(self, side: ast.EqSide,
                     span: Span | None) -> tuple[LinExpr, LinExpr] | LinExpr:
        if isinstance(side, ast.ZName):
            idx = side.index
            return (LinExpr.var(f"x{idx}"), LinExpr.var(f"y{idx}"))
        if isinstance(side, ast.PairLit):
            return (self.linexpr(side.x), self.linexpr(side.y))
        return self.linexpr(side)

    def _execute_equation(self, stmt: ast.PointEquation) -> None:
        self._check_deadline(stmt.span)
        lhs = self._eq_linexprs(stmt.lhs, stmt.span)
        rhs = self._eq_linexprs(stmt.rhs, stmt.span)
        label = ast.stmt_to_source(stmt).rstrip(";")
        lhs_pair = isinstance(lhs, tuple)
        rhs_pair = isinstance(rhs, tuple)
        if lhs_pair != rhs_pair:
            raise self._fail(
                "cannot equate a point with a number", stmt.span)
        try:
            if lhs_pair:
                self.system.assert_equal(lhs[0], rhs[0], label)
                self.system.assert_equal(lhs[1], rhs[1], label)
            else:
                self.system.assert_equal(lhs, rhs, label)
        except EquationError as exc:
            raise self._fail(str(exc), stmt.span) from exc

    def _execute_pen_stroke(self, stmt: ast.PenStroke) -> None:
        contour, _ = self._resolve_drawable(stmt.path)
        styles: list[penlib.NodeStyle] = []
        for op in stmt.ops:
            if op.op in ("tip", "ignore_directions"):
                self._warn(f"stroke operator '{op.op}' is not supported yet; "
                           "ignored", op.span)
                continue
            nib = self.eval_pen(op.pen)
            for node_expr in op.nodes:
                index = int(round(self.eval_expr(node_expr)))
                if op.op == "nib":
                    override: penlib.NibOverride | penlib.CutOverride = \
                        penlib.NibOverride(nib)
                else:
                    mode = (penlib.CutMode.RELATIVE if op.relative
                            else penlib.CutMode.ABSOLUTE)
                    override = penlib.CutOverride(nib, self.eval_expr(op.angle),
                                                  mode)
                styles.append(penlib.NodeStyle(index, override))
        default = self.pens.get("default_nib")
        if default is None:
            raise self._fail("no default_nib pen is defined", stmt.span)
        try:
            envelope = penlib.pen_stroke(contour, self.eval_pen(default), styles)
        except penlib.PenError as exc:
            raise self._fail(str(exc), stmt.span) from exc
        for w in envelope.warnings:
            self._warn(w, stmt.span)
        self.envelopes[stmt.result] = envelope
        self.center_paths.append(contour)
        name = stmt.result
        if envelope.result is not None:
            self.paths[name] = envelope.result
            self._envelope_ids.add(id(envelope.result))
        self.paths[f"{name}_l"] = envelope.left
        self.paths[f"{name}_r"] = envelope.right
        self._envelope_ids.update((id(envelope.left), id(envelope.right)))
        if envelope.begin_cap is not None:
            self.paths[f"{name}_b"] = envelope.begin_cap
            self._envelope_ids.add(id(envelope.begin_cap))
        if envelope.end_cap is not None:
            self.paths[f"{name}_e"] = envelope.end_cap
            self._envelope_ids.add(id(envelope.end_cap))

    def _append_outline(self, contour: Contour) -> None:
        if id(contour) in self._outline_ids:
            return
        self._outline_ids.add(id(contour))
        self.outlines.append(contour)

    @staticmethod
    def _close_if_loop(contour: Contour) -> Contour:
        if (not contour.closed and contour.segments
                and contour.segments[-1].p1.close_to(contour.segments[0].p0, 1e-6)):
            return Contour(contour.segments, closed=True)
        return contour

    def _execute_draw_fill(self, stmt: ast.Draw | ast.Fill) -> None:
        contour, is_envelope = self._resolve_drawable(stmt.target)
        filling = isinstance(stmt, ast.Fill)
        if is_envelope:
            self._append_outline(contour)
            return
        if self.current_pen is not None and not filling:
            self._stroke_with_current_pen(contour, stmt.span)
            return
        contour = self._close_if_loop(contour)
        if filling and not contour.closed:
            raise self._fail("cannot fill an open path", stmt.span)
        self._append_outline(contour)

    def _stroke_with_current_pen(self, contour: Contour, span: Span | None) -> None:
        nib = self.current_pen
        assert nib is not None
        styles: list[penlib.NodeStyle] = []
        if not contour.closed:
            # Free-standing strokes get the pen's own shape as end caps
            # (round caps for a circular pen).
            last = contour.node_count() - 1
            styles = [penlib.NodeStyle(0, penlib.NibOverride(nib)),
                      penlib.NodeStyle(last, penlib.NibOverride(nib))]
        try:
            envelope = penlib.pen_stroke(contour, nib, styles)
        except penlib.PenError as exc:
            raise self._fail(str(exc), span) from exc
        for w in envelope.warnings:
            self._warn(w, span)
        self.center_paths.append(contour)
        if envelope.result is not None:
            self._append_outline(envelope.result)
        else:
            self._append_outline(envelope.left)
            self._append_outline(envelope.right)

    # -- result ---------------------------------------------------------------

    def result(self) -> GlyphResult:
        advance: float | None = None
        name: str | None = None
        unicode_value: int | None = None
        if self.header is not None:
            name = self.header.name
            unicode_value = self.header.unicode
            if self.header.advance is not None:
                try:
                    advance = self.eval_expr(self.header.advance)
                except _EvalError as exc:
                    self.diagnostics.append(exc.diagnostic)
        params = [(p, self.params[p]) for p in self.declared if p in self.params]
        return GlyphResult(
            outlines=self.outlines,
            diagnostics=self.diagnostics,
            advance=advance,
            name=name,
            unicode=unicode_value,
            params=params,
            center_paths=self.center_paths,
        )


def evaluate(program: ast.Program, overrides: dict[str, float] | None = None,
             *, use_prelude: bool = True,
             deadline: float | None = None) -> GlyphResult:
    """Execute a resolved program and collect its outlines and diagnostics."""
    evaluator = Evaluator(overrides, deadline)
    if use_prelude:
        evaluator.run(prelude_program())
    evaluator.run(program)
    return evaluator.result()


# ---------------------------------------------------------------------------
# Includes
# ---------------------------------------------------------------------------

def file_loader(path: str, base: str | None) -> tuple[str, str, str]:
    """Resolve `input` paths against the including file's directory.

    Returns (text, canonical id, new base directory). Bare names may omit
    the .mpg extension.
    """
    import os

    candidate = path if base is None else os.path.join(base, path)
    for attempt in (candidate, candidate + ".mpg"):
        if os.path.isfile(attempt):
            real = os.path.realpath(attempt)
            with open(attempt, encoding="utf-8") as fh:
                return fh.read(), real, os.path.dirname(real)
    raise FileNotFoundError(candidate)


def resolve_includes(program: ast.Program, loader=file_loader,
                     base: str | None = None) -> ast.Program:
    """Splice included files in place of their `input` statements."""
    return _resolve(program, loader, base, active=[], seen_stack=set())


def _resolve(program: ast.Program, loader, base: str | None,
             active: list[str], seen_stack: set[str]) -> ast.Program:
    statements: list[ast.Stmt] = []
    for stmt in program.statements:
        if not isinstance(stmt, ast.Include):
            statements.append(stmt)
            continue
        span = stmt.span or Span(1, 1)
        try:
            text, key, new_base = loader(stmt.path, base)
        except (FileNotFoundError, OSError) as exc:
            raise SourceError([error(
                f"cannot read include '{stmt.path}': {exc}", span)]) from exc
        if key in seen_stack:
            chain = " -> ".join(active + [key])
            raise SourceError([error(
                f"include cycle: {chain}", span)])
        result = parse(text, stmt.path)
        if not result.ok:
            raise SourceError([d for d in result.diagnostics
                               if d.severity is Severity.ERROR])
        seen_stack.add(key)
        active.append(key)
        nested = _resolve(result.program, loader, new_base, active, seen_stack)
        active.pop()
        seen_stack.discard(key)
        statements.extend(nested.statements)
    return ast.Program(tuple(statements), program.source_name)
