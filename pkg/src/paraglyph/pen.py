"""Stroke expansion: sweep a nib along a path and emit a clean closed outline.

Offsets are computed only at the path's nodes and the edges are re-smoothed
between them with tangents matched to the source path, so each source node
contributes exactly one node to the outer edge and one to the inner edge.
That fixed structure is what keeps envelopes interpolation-compatible when
only nib sizes change between masters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geometry import (
    Contour,
    CubicSegment,
    Point,
    bezier_eval,
    flatten_contour,
    from_polar,
    line_segment,
    split_segment,
    tangent_angle,
)
from .hobby import direction_at, solve_segment


class PenError(ValueError):
    pass


class NibKind(Enum):
    RAZOR = "razor"
    ELLIPSE = "ellipse"


@dataclass(frozen=True)
class Nib:
    """A pen shape: full extents along its own axes, rotated by `angle`.

    Zero height collapses the ellipse to a razor (a straight blade), the
    shape used for calligraphic strokes.
    """

    width: float
    height: float = 0.0
    angle: float = 0.0

    def __post_init__(self) -> None:
        if self.width < 0 or self.height < 0:
            raise PenError(f"nib extents must be non-negative: "
                           f"{self.width} x {self.height}")

    @property
    def kind(self) -> NibKind:
        return NibKind.RAZOR if self.height == 0.0 else NibKind.ELLIPSE

    def scaled(self, s: float) -> Nib:
        if s < 0:
            raise PenError("nib scale must be non-negative")
        return Nib(self.width * s, self.height * s, self.angle)

    def rotated(self, a: float) -> Nib:
        return Nib(self.width, self.height, self.angle + a)

    def radius_along(self, direction_deg: float) -> float:
        """Half-extent of the nib boundary along an absolute direction."""
        u = math.radians(direction_deg - self.angle)
        a = self.width / 2.0
        b = self.height / 2.0
        if b == 0.0:
            # The blade has extent only along its own axis.
            return abs(a * math.cos(u))
        if a == 0.0:
            return abs(b * math.sin(u))
        return a * b / math.hypot(b * math.cos(u), a * math.sin(u))


class CutMode(Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class NibOverride:
    nib: Nib


@dataclass(frozen=True)
class CutOverride:
    nib: Nib
    angle: float
    mode: CutMode = CutMode.ABSOLUTE


@dataclass(frozen=True)
class NodeStyle:
    node_index: int
    override: NibOverride | CutOverride


@dataclass
class Envelope:
    """Expanded stroke: full outline plus its named subpaths.

    `result` is the closed outline (right edge, end cap, reversed left edge,
    begin cap) and exists only for open paths; closed input paths yield two
    closed edges and no caps.
    """

    left: Contour
    right: Contour
    result: Contour | None = None
    begin_cap: Contour | None = None
    end_cap: Contour | None = None
    warnings: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Node offsets
# ---------------------------------------------------------------------------

def _offset_vector(nib: Nib, direction_deg: float) -> Point:
    """Nib boundary point extremal perpendicular to the travel direction.

    For an ellipse this is the tangency point of lines parallel to the
    direction; the razor case falls out with height 0 (its own endpoints).
    """
    d = from_polar(1.0, direction_deg - nib.angle)  # direction in nib frame
    a = nib.width / 2.0
    b = nib.height / 2.0
    phi = math.atan2(-b * d.x, a * d.y) if (a or b) else 0.0
    local = Point(a * math.cos(phi), b * math.sin(phi))
    return _rotate(local, nib.angle)


def _rotate(p: Point, angle_deg: float) -> Point:
    a = math.radians(angle_deg)
    ca, sa = math.cos(a), math.sin(a)
    return Point(ca * p.x - sa * p.y, sa * p.x + ca * p.y)


def _node_offsets(nib: Nib, center: Point, direction_deg: float) -> tuple[Point, Point]:
    """Return (left, right) offset points for a node."""
    vec = _offset_vector(nib, direction_deg)
    travel = from_polar(1.0, direction_deg)
    if travel.cross(vec) >= 0.0:
        return center + vec, center - vec
    return center - vec, center + vec


def _cut_offsets(style: CutOverride, center: Point,
                 direction_deg: float) -> tuple[Point, Point, float]:
    """Terminal points for a straight cut, and the cut's absolute angle."""
    angle = style.angle
    if style.mode is CutMode.RELATIVE:
        angle = direction_deg + style.angle
    travel = from_polar(1.0, direction_deg)
    along = from_polar(1.0, angle)
    if abs(travel.cross(along)) < 1e-9:
        raise PenError(
            f"cut at {angle:g} deg is parallel to the stroke direction "
            f"({direction_deg:g} deg) and cannot separate the two edges")
    if style.nib.kind is NibKind.RAZOR:
        # A razor reorients along the cut line; its width sets the extent.
        half = style.nib.width / 2.0
    else:
        # The cut line is clipped to the nib boundary.
        half = style.nib.radius_along(angle)
    vec = along * half
    if travel.cross(vec) >= 0.0:
        return center + vec, center - vec, angle
    return center - vec, center + vec, angle


# ---------------------------------------------------------------------------
# Caps
# ---------------------------------------------------------------------------

_ARC_HANDLE = 4.0 * (math.sqrt(2.0) - 1.0) / 3.0  # circular quarter-arc factor


def _ellipse_point(nib: Nib, center: Point, phi: float) -> Point:
    local = Point(nib.width / 2.0 * math.cos(phi), nib.height / 2.0 * math.sin(phi))
    return center + _rotate(local, nib.angle)


def _ellipse_arc(nib: Nib, center: Point, phi0: float, phi1: float) -> list[CubicSegment]:
    """Cubic approximation of the nib boundary between two parameter angles.

    The ellipse is the affine image of the unit circle, so the standard
    circular-arc control construction maps through the nib's axes exactly.
    """
    segs: list[CubicSegment] = []
    total = phi1 - phi0
    pieces = max(1, math.ceil(abs(total) / (math.pi / 2.0) - 1e-12))
    step = total / pieces
    k = 4.0 / 3.0 * math.tan(step / 4.0)
    a = nib.width / 2.0
    b = nib.height / 2.0

    def to_world(x: float, y: float) -> Point:
        return center + _rotate(Point(a * x, b * y), nib.angle)

    for i in range(pieces):
        u0 = phi0 + i * step
        u1 = u0 + step
        c0u, s0u = math.cos(u0), math.sin(u0)
        c1u, s1u = math.cos(u1), math.sin(u1)
        p0 = to_world(c0u, s0u)
        p1 = to_world(c1u, s1u)
        c0 = to_world(c0u - k * s0u, s0u + k * c0u)
        c1 = to_world(c1u + k * s1u, s1u - k * c1u)
        segs.append(CubicSegment(p0, c0, c1, p1))
    return segs


def _nib_cap(nib: Nib, center: Point, start: Point, end: Point,
             outward_deg: float) -> list[CubicSegment]:
    """Cap made of the nib's own boundary arc from `start` to `end`, passing
    around the side of the nib that faces `outward_deg`."""
    if nib.kind is NibKind.RAZOR or nib.width == 0.0:
        return [line_segment(start, end)]

    def param_of(p: Point) -> float:
        local = _rotate(p - center, -nib.angle)
        return math.atan2(local.y / (nib.height / 2.0), local.x / (nib.width / 2.0))

    phi0 = param_of(start)
    phi1 = param_of(end)
    sweep = phi1 - phi0
    if sweep <= 0.0:
        sweep += 2.0 * math.pi
    # Two candidate arcs join the points; pick the one bulging outward.
    mid_ccw = _ellipse_point(nib, center, phi0 + sweep / 2.0)
    outward = from_polar(1.0, outward_deg)
    if (mid_ccw - center).dot(outward) >= 0.0:
        return _ellipse_arc(nib, center, phi0, phi0 + sweep)
    return _ellipse_arc(nib, center, phi0, phi0 - (2.0 * math.pi - sweep))


# ---------------------------------------------------------------------------
# pen_stroke
# ---------------------------------------------------------------------------

def _effective_styles(node_count: int, styles: list[NodeStyle],
                      cyclic: bool) -> dict[int, NibOverride | CutOverride]:
    table: dict[int, NibOverride | CutOverride] = {}
    for style in styles:
        idx = style.node_index
        if not 0 <= idx < node_count:
            raise PenError(f"node index {idx} out of range 0..{node_count - 1}")
        if idx in table:
            raise PenError(f"node {idx} has more than one style override")
        if isinstance(style.override, CutOverride):
            if cyclic:
                raise PenError("cut terminals are undefined on a cyclic path")
            if idx not in (0, node_count - 1):
                raise PenError(
                    f"cut applies only to the path terminals, not node {idx}")
        table[idx] = style.override
    return table


def _edges_cross(left: Contour, right: Contour) -> bool:
    """Coarse polyline test for the two edges crossing each other."""
    lp = flatten_contour(left, 8)
    rp = flatten_contour(right, 8)

    def seg_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
        d1 = (b - a).cross(c - a)
        d2 = (b - a).cross(d - a)
        d3 = (d - c).cross(a - c)
        d4 = (d - c).cross(b - c)
        return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))

    for i in range(len(lp) - 1):
        for j in range(len(rp) - 1):
            if seg_intersect(lp[i], lp[i + 1], rp[j], rp[j + 1]):
                return True
    return False


def pen_stroke(path: Contour, default_nib: Nib,
               styles: list[NodeStyle] | None = None) -> Envelope:
    """Expand a stroked path into its envelope with per-node nib control."""
    styles = styles or []
    nodes = path.nodes
    n = len(nodes)
    if n < 2:
        raise PenError("pen_stroke needs a path with at least 2 nodes")
    if all(nodes[0].close_to(p, 1e-12) for p in nodes):
        raise PenError("cannot stroke a path whose nodes all coincide")

    overrides = _effective_styles(n, styles, path.closed)
    directions = [direction_at(path, k) for k in range(n)]

    lefts: list[Point] = []
    rights: list[Point] = []
    cut_info: dict[int, float] = {}
    for k in range(n):
        override = overrides.get(k)
        if isinstance(override, CutOverride):
            left, right, cut_angle = _cut_offsets(override, nodes[k], directions[k])
            cut_info[k] = cut_angle
        else:
            nib = override.nib if isinstance(override, NibOverride) else default_nib
            left, right = _node_offsets(nib, nodes[k], directions[k])
        lefts.append(left)
        rights.append(right)

    def edge(points: list[Point]) -> Contour:
        segs = []
        count = n if path.closed else n - 1
        for k in range(count):
            k2 = (k + 1) % n
            if points[k].close_to(points[k2], 1e-12):
                segs.append(CubicSegment(points[k], points[k], points[k2], points[k2]))
            else:
                segs.append(solve_segment(points[k], points[k2],
                                          directions[k], directions[k2]))
        return Contour(tuple(segs), closed=path.closed)

    left_edge = edge(lefts)
    right_edge = edge(rights)

    warnings: list[str] = []
    if _edges_cross(left_edge, right_edge):
        warnings.append("stroke envelope self-intersects "
                        "(nib too large for the path curvature)")

    if path.closed:
        return Envelope(left=left_edge, right=right_edge, warnings=warnings)

    def cap(at: int, start: Point, end: Point, outward: float) -> Contour:
        override = overrides.get(at)
        if isinstance(override, NibOverride):
            segs = _nib_cap(override.nib, nodes[at], start, end, outward)
        else:
            # Default terminals and cuts both close with a straight joint.
            segs = [line_segment(start, end)]
        return Contour(tuple(segs))

    end_cap = cap(n - 1, rights[-1], lefts[-1], directions[-1])
    begin_cap = cap(0, lefts[0], rights[0], directions[0] + 180.0)

    result = Contour(
        right_edge.segments + end_cap.segments
        + left_edge.reversed().segments + begin_cap.segments,
        closed=True,
    )
    return Envelope(left=left_edge, right=right_edge, result=result,
                    begin_cap=begin_cap, end_cap=end_cap, warnings=warnings)


# ---------------------------------------------------------------------------
# Arc-length placement (dots and arrows)
# ---------------------------------------------------------------------------

_LENGTH_TOL = 1e-9


class _ArcTable:
    """Per-segment arc-length parametrisation from adaptive subdivision.

    Each segment is split until flat; the leaves give a monotone (t, s)
    table, and positions inside a flat leaf interpolate linearly, which is
    accurate to the same flatness tolerance as the length itself.
    """

    def __init__(self, path: Contour, tol: float = _LENGTH_TOL):
        self.path = path
        self.segment_tables: list[list[tuple[float, float, float]]] = []
        self.segment_lengths: list[float] = []
        for seg in path.segments:
            leaves: list[tuple[float, float, float]] = []
            self._collect(seg, 0.0, 1.0, tol, leaves, 0)
            cum = 0.0
            table = []
            for t0, t1, ln in leaves:
                table.append((t0, t1, cum))
                cum += ln
            self.segment_tables.append(table)
            self.segment_lengths.append(cum)
        self.total = sum(self.segment_lengths)

    def _collect(self, seg: CubicSegment, t0: float, t1: float, tol: float,
                 out: list[tuple[float, float, float]], depth: int) -> None:
        chord = seg.p0.distance(seg.p1)
        poly = (seg.p0.distance(seg.c0) + seg.c0.distance(seg.c1)
                + seg.c1.distance(seg.p1))
        if depth >= 40 or poly - chord <= tol * max(chord, 1e-30):
            out.append((t0, t1, 0.5 * (chord + poly)))
            return
        left, right = split_segment(seg, 0.5)
        tm = 0.5 * (t0 + t1)
        self._collect(left, t0, tm, tol, out, depth + 1)
        self._collect(right, tm, t1, tol, out, depth + 1)

    def locate(self, s: float) -> tuple[int, float]:
        """Map an arc-length position to (segment index, parameter t)."""
        remaining = s
        last = len(self.segment_lengths) - 1
        for i, length in enumerate(self.segment_lengths):
            if remaining <= length or i == last:
                target = min(remaining, length)
                table = self.segment_tables[i]
                lo, hi = 0, len(table) - 1
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if table[mid][2] <= target:
                        lo = mid
                    else:
                        hi = mid - 1
                t0, t1, start = table[lo]
                leaf_len = (self.segment_lengths[i] - start
                            if lo == len(table) - 1
                            else table[lo + 1][2] - start)
                frac = 0.0 if leaf_len <= 0.0 else (target - start) / leaf_len
                return i, min(1.0, t0 + (t1 - t0) * min(frac, 1.0))
            remaining -= length
        return last, 1.0


def _placement_positions(total: float, spacing: float, closed: bool) -> list[float]:
    if spacing <= 0.0:
        raise PenError(f"spacing must be positive: {spacing!r}")
    positions = []
    s = 0.0
    limit = total - spacing * 1e-9 - 1e-9 if closed else total + spacing * 1e-9
    while s <= limit:
        positions.append(min(s, total))
        s += spacing
    if not closed and positions and positions[-1] < total - 1e-9:
        positions.append(total)  # keep the end point; last gap may be short
    return positions


def place_dots(path: Contour, spacing: float, nib_width: float = 0.0) -> list[Point]:
    """Points at equal arc-length steps along the path.

    Open paths include both endpoints (the final interval may be shorter);
    closed paths stop before the seam so no point doubles up. `nib_width`
    is accepted for callers sizing the dots; it does not move the points.
    """
    del nib_width
    table = _ArcTable(path)
    out = []
    for s in _placement_positions(table.total, spacing, path.closed):
        i, t = table.locate(s)
        out.append(bezier_eval(path.segments[i], t))
    return out


def place_arrows(path: Contour, spacing: float) -> list[tuple[Point, float]]:
    """Like place_dots, but each point carries the tangent angle there."""
    table = _ArcTable(path)
    out = []
    for s in _placement_positions(table.total, spacing, path.closed):
        i, t = table.locate(s)
        out.append((bezier_eval(path.segments[i], t),
                    tangent_angle(path.segments[i], t)))
    return out
