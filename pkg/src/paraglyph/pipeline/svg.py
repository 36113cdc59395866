"""SVG emission for compiled glyphs, with an optional debugging overlay."""

from __future__ import annotations

import os
from dataclasses import dataclass

from ..geometry import Contour, Point, bbox
from .config import TypographicConfig
from .fsutil import write_atomic

DEBUG_COLORS = {
    "outline": "#1a1a1a",
    "center": "#cc3333",
    "knot": "#cc3333",
    "handle": "#2e8b57",
    "guide": "#8888cc",
}


def _fmt(value: float) -> str:
    q = round(value, 3)
    if q == 0.0:
        q = 0.0  # normalise -0
    text = f"{q:.3f}".rstrip("0").rstrip(".")
    return text if text else "0"


@dataclass
class _Frame:
    """Maps font coordinates into the SVG viewport (y grows downward)."""

    y_base: float  # svg_y = y_base - font_y
    viewbox: tuple[float, float, float, float]

    def pt(self, p: Point) -> tuple[float, float]:
        return p.x, self.y_base - p.y


def _frame_for(outlines: list[Contour], extra: list[Contour],
               config: TypographicConfig | None,
               advance: float | None) -> _Frame:
    if config is not None:
        width = advance if advance is not None else config.em
        return _Frame(y_base=config.ascent, viewbox=(0, 0, width, config.em))
    drawable = [c for c in outlines + extra if c.segments]
    if not drawable:
        return _Frame(y_base=1.0, viewbox=(0, 0, 1, 1))
    xmin, ymin, xmax, ymax = bbox(drawable)
    return _Frame(y_base=ymax, viewbox=(xmin, 0, max(xmax - xmin, 1e-6),
                                        max(ymax - ymin, 1e-6)))


def contour_path_data(contour: Contour, frame: _Frame) -> str:
    if not contour.segments:
        return ""
    x0, y0 = frame.pt(contour.segments[0].p0)
    parts = [f"M {_fmt(x0)} {_fmt(y0)}"]
    last = len(contour.segments) - 1
    for i, seg in enumerate(contour.segments):
        closing_line = contour.closed and i == last and seg.is_line()
        if closing_line:
            break
        if seg.is_line():
            x, y = frame.pt(seg.p1)
            parts.append(f"L {_fmt(x)} {_fmt(y)}")
        else:
            c0 = frame.pt(seg.c0)
            c1 = frame.pt(seg.c1)
            p1 = frame.pt(seg.p1)
            parts.append(
                f"C {_fmt(c0[0])} {_fmt(c0[1])} {_fmt(c1[0])} {_fmt(c1[1])} "
                f"{_fmt(p1[0])} {_fmt(p1[1])}")
    if contour.closed:
        parts.append("Z")
    return " ".join(parts)


def outline_path_data(outlines: list[Contour], frame: _Frame) -> str:
    return " ".join(filter(None, (contour_path_data(c, frame)
                                  for c in outlines)))


def _debug_overlay(outlines: list[Contour], center_paths: list[Contour],
                   frame: _Frame, config: TypographicConfig | None,
                   knot_radius: float) -> list[str]:
    parts = ["<g class=\"debug\">"]
    if config is not None:
        x0, _, w, _ = frame.viewbox
        for label, y in (("baseline", 0.0), ("xheight", config.xheight),
                         ("ascent", config.ascent),
                         ("descent", -config.descent)):
            sy = _fmt(frame.y_base - y)
            parts.append(f'<line class="guide" data-guide="{label}" '
                         f'x1="{_fmt(x0)}" y1="{sy}" x2="{_fmt(x0 + w)}" '
                         f'y2="{sy}"/>')
    for path in center_paths:
        data = contour_path_data(path, frame)
        parts.append(f'<path class="center" d="{data}"/>')
    for contour in outlines + center_paths:
        for seg in contour.segments:
            if not seg.is_line():
                for anchor, ctrl in ((seg.p0, seg.c0), (seg.p1, seg.c1)):
                    ax, ay = frame.pt(anchor)
                    cx, cy = frame.pt(ctrl)
                    parts.append(f'<line class="handle" x1="{_fmt(ax)}" '
                                 f'y1="{_fmt(ay)}" x2="{_fmt(cx)}" '
                                 f'y2="{_fmt(cy)}"/>')
                    parts.append(f'<circle class="handle" cx="{_fmt(cx)}" '
                                 f'cy="{_fmt(cy)}" r="{_fmt(knot_radius * 0.7)}"/>')
        for node in contour.nodes:
            x, y = frame.pt(node)
            parts.append(f'<circle class="knot" cx="{_fmt(x)}" cy="{_fmt(y)}" '
                         f'r="{_fmt(knot_radius)}"/>')
    parts.append("</g>")
    return parts


def glyph_to_svg(outlines: list[Contour], *,
                 config: TypographicConfig | None = None,
                 advance: float | None = None,
                 debug: bool = False,
                 center_paths: list[Contour] | None = None,
                 colors: dict[str, str] | None = None) -> str:
    """Render one glyph as a standalone SVG document."""
    center_paths = list(center_paths or [])
    palette = dict(DEBUG_COLORS)
    palette.update(colors or {})
    frame = _frame_for(outlines, center_paths if debug else [], config, advance)
    x, y, w, h = frame.viewbox
    viewbox = f"{_fmt(x)} {_fmt(y)} {_fmt(w)} {_fmt(h)}"
    style = (
        f".outline{{fill:{palette['outline']};fill-rule:nonzero}}"
        f".center{{fill:none;stroke:{palette['center']};stroke-width:1;"
        f"stroke-dasharray:4 3}}"
        f".knot{{fill:{palette['knot']}}}"
        f".handle{{fill:{palette['handle']};stroke:{palette['handle']};"
        f"stroke-width:0.75}}"
        f".guide{{stroke:{palette['guide']};stroke-width:0.75;"
        f"stroke-dasharray:8 4}}"
    )
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{viewbox}">',
        f"<style>{style}</style>",
        f'<path class="outline" d="{outline_path_data(outlines, frame)}"/>',
    ]
    if debug:
        knot_radius = (config.em / 150.0) if config else max(w, h) / 60.0
        lines.extend(_debug_overlay(outlines, center_paths, frame, config,
                                    knot_radius))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg_dir(glyphs, out_dir: str, *,
                  config: TypographicConfig | None = None,
                  debug: bool = False) -> list[str]:
    """One SVG file per glyph; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name in sorted(glyphs):
        glyph = glyphs[name]
        svg = glyph_to_svg(glyph.outlines, config=config, advance=glyph.advance,
                           debug=debug, center_paths=glyph.center_paths)
        path = os.path.join(out_dir, f"{name}.svg")
        write_atomic(path, svg)
        written.append(path)
    return written
