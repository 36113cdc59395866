"""Master building, compatibility checking and instance interpolation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from ..dsl import evaluate, parse, resolve_includes
from ..dsl import ast
from ..dsl.diagnostics import has_errors
from ..geometry import (
    Affine,
    Contour,
    CubicSegment,
    Point,
    bbox,
    condense_scale,
    slant_shear,
    translation,
)
from .config import TypographicConfig
from .manifest import AxisDef, MasterSpec, Project


class BuildError(ValueError):
    def __init__(self, message: str, diagnostics: list | None = None):
        details = ""
        if diagnostics:
            details = "\n" + "\n".join(d.format() for d in diagnostics)
        super().__init__(message + details)
        self.diagnostics = diagnostics or []


@dataclass
class BuiltGlyph:
    name: str
    unicode: int | None
    outlines: list[Contour]
    advance: float
    center_paths: list[Contour] = field(default_factory=list)


@dataclass
class Master:
    spec: MasterSpec
    config: TypographicConfig
    params: dict[str, float]
    glyphs: dict[str, BuiltGlyph]
    location: dict[str, float] = field(default_factory=dict)


@dataclass
class MasterSet:
    axes: tuple[AxisDef, ...]
    masters: list[Master]
    named_instances: list
    default_master: Master

    def master_at(self, location: dict[str, float]) -> Master | None:
        for master in self.masters:
            if master.location == location:
                return master
        return None


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------

def load_config_params(config_path: str,
                       overrides: dict[str, float] | None = None) -> dict[str, float]:
    """Evaluate a configuration program into its parameter dictionary."""
    with open(config_path, encoding="utf-8") as fh:
        text = fh.read()
    result = parse(text, config_path)
    if not result.ok:
        raise BuildError(f"config {config_path} has syntax errors",
                         result.diagnostics)
    program = resolve_includes(result.program,
                               base=os.path.dirname(os.path.abspath(config_path)))
    glyph = evaluate(program, use_prelude=False)
    if not glyph.ok:
        raise BuildError(f"config {config_path} failed to evaluate",
                         glyph.diagnostics)
    params = dict(glyph.params)
    params.update(overrides or {})
    return params


def _inject_header(program: ast.Program, entry) -> ast.Program:
    """Manifest metadata wins over any in-file glyph header."""
    if entry.name is None and entry.unicode is None and entry.advance is None:
        return program
    existing = None
    statements = []
    for stmt in program.statements:
        if isinstance(stmt, ast.GlyphHeader):
            existing = stmt
            continue
        statements.append(stmt)
    name = entry.name or (existing.name if existing else
                          os.path.splitext(os.path.basename(entry.file))[0])
    unicode_value = entry.unicode if entry.unicode is not None else (
        existing.unicode if existing else None)
    advance = existing.advance if existing else None
    if entry.advance is not None:
        advance_result = parse(f"advance_override := {entry.advance};",
                               f"<manifest advance for {name}>")
        if not advance_result.ok:
            raise BuildError(f"bad advance expression for glyph {name!r}",
                             advance_result.diagnostics)
        advance = advance_result.program.statements[0].value
    statements.append(ast.GlyphHeader(name, unicode_value, advance))
    return ast.Program(tuple(statements), program.source_name)


def build_glyph(project: Project, entry, params: dict[str, float],
                config: TypographicConfig) -> BuiltGlyph:
    path = project.resolve(entry.file)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    result = parse(text, path)
    if not result.ok:
        raise BuildError(f"glyph {entry.file}: syntax errors", result.diagnostics)
    program = resolve_includes(result.program,
                               base=os.path.dirname(os.path.abspath(path)))
    program = _inject_header(program, entry)
    glyph = evaluate(program, overrides=params)
    if has_errors(glyph.diagnostics):
        raise BuildError(f"glyph {entry.file}: evaluation failed",
                         glyph.diagnostics)

    name = glyph.name or entry.name or \
        os.path.splitext(os.path.basename(entry.file))[0]
    outlines = list(glyph.outlines)
    center_paths = list(glyph.center_paths)

    # Position against the left bearing, then derive the advance.
    if outlines:
        xmin, _, xmax, _ = bbox(outlines)
        shift = translation(config.lbearing - xmin, 0.0)
        outlines = [c.transformed(shift) for c in outlines]
        center_paths = [c.transformed(shift) for c in center_paths]
        drawn = xmax - xmin
    else:
        drawn = 0.0
    advance = (glyph.advance if glyph.advance is not None
               else drawn + config.lbearing + config.rbearing)

    # Style transforms: slant shear about the baseline, then condensation.
    style = condense_scale(config.condense).compose(slant_shear(config.slant))
    if style != Affine():
        outlines = [c.transformed(style) for c in outlines]
        center_paths = [c.transformed(style) for c in center_paths]
    advance *= config.condense

    return BuiltGlyph(name=name, unicode=glyph.unicode, outlines=outlines,
                      advance=advance, center_paths=center_paths)


def build_master(project: Project, spec: MasterSpec) -> Master:
    params = load_config_params(project.resolve(spec.config), spec.overrides)
    config = TypographicConfig.from_params(params)
    glyphs: dict[str, BuiltGlyph] = {}
    for entry in project.glyphs:
        built = build_glyph(project, entry, params, config)
        if built.name in glyphs:
            raise BuildError(f"duplicate glyph name {built.name!r}")
        glyphs[built.name] = built
    return Master(spec=spec, config=config, params=params, glyphs=glyphs,
                  location=project.full_location(spec.location))


def build_master_set(project: Project,
                     only: str | None = None) -> MasterSet:
    masters = []
    for spec in project.masters:
        if only is not None and spec.name != only:
            continue
        masters.append(build_master(project, spec))
    if not masters:
        raise BuildError(f"no master named {only!r}" if only else
                         "project has no masters")
    default_location = {axis.tag: axis.default for axis in project.axes}
    default = next((m for m in masters if m.location == default_location), None)
    if default is None:
        raise BuildError("no master sits at the default location "
                         f"{default_location}")
    return MasterSet(axes=project.axes, masters=masters,
                     named_instances=list(project.instances),
                     default_master=default)


# ---------------------------------------------------------------------------
# Compatibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompatIssue:
    glyph: str
    message: str

    def format(self) -> str:
        return f"{self.glyph}: {self.message}"


@dataclass
class CompatReport:
    issues: list[CompatIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def format(self) -> str:
        if self.ok:
            return "compatible: all masters share identical outline structure"
        return "\n".join(issue.format() for issue in self.issues)


def _contour_signature(contour: Contour) -> tuple:
    return (contour.closed, len(contour.segments),
            tuple(seg.is_line(1e-9) for seg in contour.segments))


def check_compatibility(master_set: MasterSet) -> CompatReport:
    report = CompatReport()
    masters = master_set.masters
    if len(masters) < 2:
        return report
    reference = masters[0]
    all_names = sorted({name for m in masters for name in m.glyphs})
    for name in all_names:
        present = [m for m in masters if name in m.glyphs]
        missing = [m.spec.name for m in masters if name not in m.glyphs]
        if missing:
            report.issues.append(CompatIssue(
                name, f"missing from master(s): {', '.join(missing)}"))
            continue
        ref_glyph = present[0].glyphs[name]
        ref_sigs = [_contour_signature(c) for c in ref_glyph.outlines]
        for master in present[1:]:
            glyph = master.glyphs[name]
            sigs = [_contour_signature(c) for c in glyph.outlines]
            if len(sigs) != len(ref_sigs):
                report.issues.append(CompatIssue(
                    name,
                    f"contour count differs: {len(ref_sigs)} in "
                    f"{present[0].spec.name} vs {len(sigs)} in "
                    f"{master.spec.name}"))
                continue
            for idx, (a, b) in enumerate(zip(ref_sigs, sigs)):
                if a[0] != b[0]:
                    report.issues.append(CompatIssue(
                        name, f"contour {idx}: closed flag differs between "
                        f"{present[0].spec.name} and {master.spec.name}"))
                elif a[1] != b[1]:
                    report.issues.append(CompatIssue(
                        name, f"contour {idx}: segment count {a[1]} in "
                        f"{present[0].spec.name} vs {b[1]} in "
                        f"{master.spec.name}"))
                elif a[2] != b[2]:
                    report.issues.append(CompatIssue(
                        name, f"contour {idx}: line/curve structure differs "
                        f"between {present[0].spec.name} and "
                        f"{master.spec.name}"))
    return report


# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------

class InterpolationError(ValueError):
    pass


def _axis_weights(master_set: MasterSet,
                  location: dict[str, float]) -> list[tuple[Master, float]]:
    """Weights for the star variation model: the default master plus one
    master per active axis extreme."""
    full = {axis.tag: axis.default for axis in master_set.axes}
    for tag, value in location.items():
        if tag not in full:
            raise InterpolationError(f"unknown axis tag {tag!r}")
        full[tag] = float(value)

    weights: list[tuple[Master, float]] = []
    default_weight = 1.0
    default_location = {axis.tag: axis.default for axis in master_set.axes}
    for axis in master_set.axes:
        value = full[axis.tag]
        n = axis.normalize(value)
        if n == 0.0:
            continue
        corner = dict(default_location)
        corner[axis.tag] = axis.minimum if n < 0 else axis.maximum
        master = master_set.master_at(corner)
        if master is None:
            side = "minimum" if n < 0 else "maximum"
            raise InterpolationError(
                f"no master at the {side} of axis {axis.tag!r}; cannot reach "
                f"{axis.tag}={value:g}")
        weights.append((master, abs(n)))
        default_weight -= abs(n)
    out = []
    if default_weight != 0.0:
        out.append((master_set.default_master, default_weight))
    out.extend((m, w) for m, w in weights if w != 0.0)
    return out


def _combine_points(points: list[tuple[Point, float]]) -> Point:
    x = 0.0
    y = 0.0
    for p, w in points:
        x += w * p.x
        y += w * p.y
    return Point(x, y)


def _copy_glyph(glyph: BuiltGlyph) -> BuiltGlyph:
    return BuiltGlyph(glyph.name, glyph.unicode, list(glyph.outlines),
                      glyph.advance, list(glyph.center_paths))


def interpolate(master_set: MasterSet,
                location: dict[str, float]) -> dict[str, BuiltGlyph]:
    """Blend masters linearly at a designspace location.

    A location that coincides with a master reproduces it bit-for-bit; the
    midpoint of a two-master axis is the per-point arithmetic mean.
    """
    weights = _axis_weights(master_set, location)
    if len(weights) == 1 and weights[0][1] == 1.0:
        return {name: _copy_glyph(g)
                for name, g in weights[0][0].glyphs.items()}

    names = set(master_set.default_master.glyphs)
    for master, _ in weights:
        if set(master.glyphs) != names:
            raise InterpolationError(
                f"master {master.spec.name!r} has a different glyph set; "
                "run the compatibility check")

    out: dict[str, BuiltGlyph] = {}
    for name in sorted(names):
        per_master = [(m.glyphs[name], w) for m, w in weights]
        ref = per_master[0][0]
        structures = {tuple(len(c.segments) for c in g.outlines)
                      for g, _ in per_master}
        if len(structures) > 1:
            raise InterpolationError(
                f"glyph {name!r} is not interpolation-compatible across "
                "masters; run the compatibility check")
        contours = []
        for ci in range(len(ref.outlines)):
            segments = []
            for si in range(len(ref.outlines[ci].segments)):
                segs = [(g.outlines[ci].segments[si], w) for g, w in per_master]
                segments.append(CubicSegment(
                    _combine_points([(s.p0, w) for s, w in segs]),
                    _combine_points([(s.c0, w) for s, w in segs]),
                    _combine_points([(s.c1, w) for s, w in segs]),
                    _combine_points([(s.p1, w) for s, w in segs]),
                ))
            contours.append(Contour(tuple(segments), ref.outlines[ci].closed))
        advance = sum(g.advance * w for g, w in per_master)
        out[name] = BuiltGlyph(name=name, unicode=ref.unicode,
                               outlines=contours, advance=advance)
    return out
