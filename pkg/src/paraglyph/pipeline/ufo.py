"""UFO3 package emission (glif format 2) and a minimal reader for round-trips.

Coordinates are rounded to integers at this boundary only, half away from
zero, to keep downstream binary compilers happy; everything upstream stays
in floats.
"""

from __future__ import annotations

import math
import os
import plistlib
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from ..geometry import Contour, CubicSegment, Point, line_segment
from ..hobby import normalize_angle
from .config import TypographicConfig
from .fsutil import write_atomic, write_atomic_bytes

_SMOOTH_TOL_DEG = 1e-3


class UfoError(ValueError):
    pass


def iround(value: float) -> int:
    """Round half away from zero."""
    return int(math.floor(value + 0.5)) if value >= 0 else \
        int(math.ceil(value - 0.5))


@dataclass(frozen=True)
class FontMetadata:
    family: str
    style: str
    version: str = "1.0"


def _glif_filename(name: str) -> str:
    safe = re.sub(r"[^A-Za-z0-9._-]", "_", name)
    # Uppercase letters get an underscore suffix per common glif conventions.
    safe = "".join(c + "_" if c.isupper() else c for c in safe)
    return safe + ".glif"


def _tangents_agree(incoming: Point, outgoing: Point) -> bool:
    if incoming.length() == 0.0 or outgoing.length() == 0.0:
        return False
    return abs(normalize_angle(incoming.angle() - outgoing.angle())) \
        <= _SMOOTH_TOL_DEG


def _contour_points(contour: Contour) -> list[tuple[int, int, str | None, bool]]:
    """Flatten a contour into glif points: (x, y, type, smooth)."""
    points: list[tuple[int, int, str | None, bool]] = []
    segs = contour.segments
    n = len(segs)

    def smooth_at(i: int) -> bool:
        # Smoothness at the end knot of segment i (start of segment i+1).
        if not contour.closed and i == n - 1:
            return False
        nxt = segs[(i + 1) % n]
        incoming = segs[i].p1 - (segs[i].c1 if not segs[i].is_line()
                                 else segs[i].p0)
        outgoing = (nxt.c0 if not nxt.is_line() else nxt.p1) - nxt.p0
        return _tangents_agree(incoming, outgoing)

    if not contour.closed:
        first = segs[0].p0
        points.append((iround(first.x), iround(first.y), "move", False))
    for i, seg in enumerate(segs):
        if seg.is_line():
            points.append((iround(seg.p1.x), iround(seg.p1.y), "line",
                           smooth_at(i)))
        else:
            points.append((iround(seg.c0.x), iround(seg.c0.y), None, False))
            points.append((iround(seg.c1.x), iround(seg.c1.y), None, False))
            points.append((iround(seg.p1.x), iround(seg.p1.y), "curve",
                           smooth_at(i)))
    return points


def glyph_to_glif(name: str, unicode_value: int | None, advance: float,
                  outlines: list[Contour]) -> str:
    root = ET.Element("glyph", {"name": name, "format": "2"})
    ET.SubElement(root, "advance", {"width": str(iround(advance))})
    if unicode_value is not None:
        if not 0 <= unicode_value <= 0x10FFFF:
            raise UfoError(f"glyph {name!r}: invalid unicode "
                           f"U+{unicode_value:X}")
        ET.SubElement(root, "unicode", {"hex": f"{unicode_value:04X}"})
    outline = ET.SubElement(root, "outline")
    for contour in outlines:
        node = ET.SubElement(outline, "contour")
        for x, y, kind, smooth in _contour_points(contour):
            attrs = {"x": str(x), "y": str(y)}
            if kind:
                attrs["type"] = kind
            if smooth:
                attrs["smooth"] = "yes"
            ET.SubElement(node, "point", attrs)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def write_ufo(glyphs, metadata: FontMetadata, config: TypographicConfig,
              ufo_dir: str) -> str:
    """Write a complete UFO3 package directory; returns its path."""
    names = [glyphs[k].name for k in glyphs]
    if len(set(names)) != len(names):
        raise UfoError("duplicate glyph names in the glyph set")

    glyphs_dir = os.path.join(ufo_dir, "glyphs")
    os.makedirs(glyphs_dir, exist_ok=True)

    version_parts = (metadata.version.split(".") + ["0"])[:2]
    try:
        major, minor = (int(p) for p in version_parts)
    except ValueError:
        major, minor = 1, 0
    fontinfo = {
        "familyName": metadata.family,
        "styleName": metadata.style,
        "unitsPerEm": iround(config.em),
        "ascender": iround(config.ascent),
        "descender": -iround(config.descent),
        "xHeight": iround(config.xheight),
        "capHeight": iround(config.Xheight),
        "italicAngle": -config.slant if config.slant else 0.0,
        "versionMajor": major,
        "versionMinor": minor,
    }
    write_atomic_bytes(os.path.join(ufo_dir, "metainfo.plist"),
                       plistlib.dumps({"creator": "paraglyph",
                                       "formatVersion": 3}))
    write_atomic_bytes(os.path.join(ufo_dir, "fontinfo.plist"),
                       plistlib.dumps(fontinfo))
    write_atomic_bytes(os.path.join(ufo_dir, "layercontents.plist"),
                       plistlib.dumps([["public.default", "glyphs"]]))

    contents: dict[str, str] = {}
    for key in sorted(glyphs):
        glyph = glyphs[key]
        filename = _glif_filename(glyph.name)
        contents[glyph.name] = filename
        glif = glyph_to_glif(glyph.name, glyph.unicode, glyph.advance,
                             glyph.outlines)
        write_atomic(os.path.join(glyphs_dir, filename), glif)
    write_atomic_bytes(os.path.join(glyphs_dir, "contents.plist"),
                       plistlib.dumps(contents))
    return ufo_dir


# ---------------------------------------------------------------------------
# Minimal reader (round-trip testing and downstream checks)
# ---------------------------------------------------------------------------

@dataclass
class GlifGlyph:
    name: str
    unicode: int | None
    advance: float
    outlines: list[Contour]


def _points_to_contour(raw: list[tuple[float, float, str | None]]) -> Contour:
    closed = not (raw and raw[0][2] == "move")
    pts = raw[:]
    if not closed:
        pts = pts[1:]
        anchor = Point(raw[0][0], raw[0][1])
    else:
        # The list may start mid-contour; rotate so it ends on an on-curve.
        rotations = 0
        while pts and pts[-1][2] is None:
            pts.insert(0, pts.pop())
            rotations += 1
            if rotations > len(pts):
                raise UfoError("contour has no on-curve points")
        anchor = Point(pts[-1][0], pts[-1][1])
    segments: list[CubicSegment] = []
    pending: list[Point] = []
    current = anchor
    for x, y, kind in pts:
        p = Point(x, y)
        if kind is None:
            pending.append(p)
            continue
        if kind == "line":
            segments.append(line_segment(current, p))
        elif kind == "curve":
            if len(pending) != 2:
                raise UfoError(f"curve point with {len(pending)} off-curves")
            segments.append(CubicSegment(current, pending[0], pending[1], p))
        else:
            raise UfoError(f"unsupported point type {kind!r}")
        pending = []
        current = p
    if pending:
        raise UfoError("trailing off-curve points")
    return Contour(tuple(segments), closed=closed)


def read_glif(path: str) -> GlifGlyph:
    root = ET.parse(path).getroot()
    name = root.get("name", "")
    advance_el = root.find("advance")
    advance = float(advance_el.get("width", "0")) if advance_el is not None else 0.0
    unicode_el = root.find("unicode")
    unicode_value = int(unicode_el.get("hex"), 16) if unicode_el is not None \
        else None
    outlines = []
    outline_el = root.find("outline")
    if outline_el is not None:
        for contour_el in outline_el.findall("contour"):
            raw = [(float(p.get("x")), float(p.get("y")), p.get("type"))
                   for p in contour_el.findall("point")]
            if raw:
                outlines.append(_points_to_contour(raw))
    return GlifGlyph(name, unicode_value, advance, outlines)


def read_ufo(ufo_dir: str) -> tuple[dict, dict[str, GlifGlyph]]:
    with open(os.path.join(ufo_dir, "fontinfo.plist"), "rb") as fh:
        fontinfo = plistlib.load(fh)
    with open(os.path.join(ufo_dir, "glyphs", "contents.plist"), "rb") as fh:
        contents = plistlib.load(fh)
    glyphs = {}
    for name, filename in contents.items():
        glyphs[name] = read_glif(os.path.join(ufo_dir, "glyphs", filename))
    return fontinfo, glyphs
