"""Tracing-practice variants: stroke paths replaced by dots or arrows."""

from __future__ import annotations

import math
from enum import Enum

from ..geometry import Contour, CubicSegment, Point, line_segment
from ..pen import place_arrows, place_dots
from .build import BuiltGlyph

KAPPA = 0.5522847498307936


class EducationMode(Enum):
    DOTS = "dots"
    ARROWS = "arrows"


def circle_contour(center: Point, radius: float) -> Contour:
    r = radius
    k = KAPPA * radius
    c = center
    quads = (
        ((r, 0), (r, k), (k, r), (0, r)),
        ((0, r), (-k, r), (-r, k), (-r, 0)),
        ((-r, 0), (-r, -k), (-k, -r), (0, -r)),
        ((0, -r), (k, -r), (r, -k), (r, 0)),
    )
    segs = tuple(
        CubicSegment(*(Point(c.x + px, c.y + py) for px, py in quad))
        for quad in quads)
    return Contour(segs, closed=True)


# Arrowhead template in unit coordinates, pointing along +x.
_ARROW = ((0.6, 0.0), (-0.6, 0.5), (-0.35, 0.0), (-0.6, -0.5))


def arrow_contour(position: Point, angle_deg: float, size: float) -> Contour:
    a = math.radians(angle_deg)
    ca, sa = math.cos(a), math.sin(a)
    pts = [Point(position.x + size * (x * ca - y * sa),
                 position.y + size * (x * sa + y * ca)) for x, y in _ARROW]
    segs = tuple(line_segment(pts[i], pts[(i + 1) % len(pts)])
                 for i in range(len(pts)))
    return Contour(segs, closed=True)


class EducationError(ValueError):
    pass


def derive_education_variant(glyphs: dict[str, BuiltGlyph],
                             mode: EducationMode, spacing: float,
                             stroke_width: float) -> dict[str, BuiltGlyph]:
    """Replace each glyph's stroke paths with dot or arrow markers.

    `stroke_width` sizes the markers (dot diameter; arrow length scale) and
    normally comes from the master's thick parameter.
    """
    out: dict[str, BuiltGlyph] = {}
    for name, glyph in glyphs.items():
        if not glyph.center_paths:
            raise EducationError(
                f"glyph {name!r} kept no stroke paths; education variants "
                "need the pre-envelope centre lines")
        contours: list[Contour] = []
        for path in glyph.center_paths:
            if mode is EducationMode.DOTS:
                for p in place_dots(path, spacing, stroke_width):
                    contours.append(circle_contour(p, stroke_width / 2.0))
            else:
                for p, angle in place_arrows(path, spacing):
                    contours.append(arrow_contour(p, angle, stroke_width))
        out[name] = BuiltGlyph(name=glyph.name, unicode=glyph.unicode,
                               outlines=contours, advance=glyph.advance,
                               center_paths=list(glyph.center_paths))
    return out
