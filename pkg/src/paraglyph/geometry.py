"""Core vector types: points, affine maps, cubic segments, contours.

All coordinates are in font units (em square = 1000 by convention) and are
kept as floats throughout; rounding to integers happens only in the export
writers. Every type here is an immutable value, so instances can be shared
and evaluated in parallel freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Default tolerance for coordinate equality checks, in font units.
EPSILON = 1e-9


class EmptyOutlineError(ValueError):
    """Raised when an operation needs geometry but the outline is empty."""


def _require_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite coordinate: {v!r}")


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite(self.x, self.y)

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Point:
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def length(self) -> float:
        return math.hypot(self.x, self.y)

    def distance(self, other: Point) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def dot(self, other: Point) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point) -> float:
        return self.x * other.y - self.y * other.x

    def angle(self) -> float:
        """Direction of the vector in degrees, in (-180, 180]."""
        a = math.degrees(math.atan2(self.y, self.x))
        return 180.0 if a == -180.0 else a

    def close_to(self, other: Point, tol: float = EPSILON) -> bool:
        return abs(self.x - other.x) <= tol and abs(self.y - other.y) <= tol


def from_polar(radius: float, angle_deg: float) -> Point:
    a = math.radians(angle_deg)
    return Point(radius * math.cos(a), radius * math.sin(a))


@dataclass(frozen=True)
class Affine:
    """Affine map (x, y) -> (a*x + c*y + tx, b*x + d*y + ty)."""

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    tx: float = 0.0
    ty: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(self.a, self.b, self.c, self.d, self.tx, self.ty)

    def apply(self, p: Point) -> Point:
        return Point(self.a * p.x + self.c * p.y + self.tx,
                     self.b * p.x + self.d * p.y + self.ty)

    def compose(self, inner: Affine) -> Affine:
        """Return self∘inner (inner applied first)."""
        return Affine(
            a=self.a * inner.a + self.c * inner.b,
            b=self.b * inner.a + self.d * inner.b,
            c=self.a * inner.c + self.c * inner.d,
            d=self.b * inner.c + self.d * inner.d,
            tx=self.a * inner.tx + self.c * inner.ty + self.tx,
            ty=self.b * inner.tx + self.d * inner.ty + self.ty,
        )


IDENTITY = Affine()


def translation(tx: float, ty: float) -> Affine:
    return Affine(tx=tx, ty=ty)


def scaling(sx: float, sy: float | None = None) -> Affine:
    return Affine(a=sx, d=sx if sy is None else sy)


def rotation(angle_deg: float) -> Affine:
    a = math.radians(angle_deg)
    return Affine(a=math.cos(a), b=math.sin(a), c=-math.sin(a), d=math.cos(a))


def slant_shear(angle_deg: float) -> Affine:
    """Shear x' = x + y*tan(angle) used for oblique styles."""
    return Affine(c=math.tan(math.radians(angle_deg)))


def condense_scale(factor: float) -> Affine:
    return Affine(a=factor)


@dataclass(frozen=True)
class CubicSegment:
    """One cubic Bézier piece: start knot, two controls, end knot.

    Straight lines are stored as degree-elevated cubics with the controls at
    the 1/3 and 2/3 points of the chord, so every segment is uniformly cubic
    and node structure stays identical across interpolation masters.
    """

    p0: Point
    c0: Point
    c1: Point
    p1: Point

    def reversed(self) -> CubicSegment:
        return CubicSegment(self.p1, self.c1, self.c0, self.p0)

    def transformed(self, m: Affine) -> CubicSegment:
        return CubicSegment(m.apply(self.p0), m.apply(self.c0),
                            m.apply(self.c1), m.apply(self.p1))

    def is_line(self, tol: float = EPSILON) -> bool:
        """True when the controls sit exactly at the chord's third points."""
        third = self.p0 + (self.p1 - self.p0) * (1.0 / 3.0)
        two_thirds = self.p0 + (self.p1 - self.p0) * (2.0 / 3.0)
        return self.c0.close_to(third, tol) and self.c1.close_to(two_thirds, tol)


def line_segment(p0: Point, p1: Point) -> CubicSegment:
    d = p1 - p0
    return CubicSegment(p0, p0 + d * (1.0 / 3.0), p0 + d * (2.0 / 3.0), p1)


def bezier_eval(seg: CubicSegment, t: float) -> Point:
    """Evaluate the cubic at parameter t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"bezier parameter outside [0, 1]: {t!r}")
    mt = 1.0 - t
    w0 = mt * mt * mt
    w1 = 3.0 * mt * mt * t
    w2 = 3.0 * mt * t * t
    w3 = t * t * t
    return Point(
        w0 * seg.p0.x + w1 * seg.c0.x + w2 * seg.c1.x + w3 * seg.p1.x,
        w0 * seg.p0.y + w1 * seg.c0.y + w2 * seg.c1.y + w3 * seg.p1.y,
    )


def bezier_derivative(seg: CubicSegment, t: float) -> Point:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"bezier parameter outside [0, 1]: {t!r}")
    mt = 1.0 - t
    d0 = (seg.c0 - seg.p0) * (3.0 * mt * mt)
    d1 = (seg.c1 - seg.c0) * (6.0 * mt * t)
    d2 = (seg.p1 - seg.c1) * (3.0 * t * t)
    return d0 + d1 + d2


def tangent_angle(seg: CubicSegment, t: float) -> float:
    """Tangent direction at t in degrees, robust to coincident controls."""
    d = bezier_derivative(seg, t)
    if d.length() > EPSILON:
        return d.angle()
    # Degenerate derivative: fall back to the nearest distinct defining point.
    if t < 0.5:
        for probe in (seg.c0, seg.c1, seg.p1):
            v = probe - seg.p0
            if v.length() > EPSILON:
                return v.angle()
    else:
        for probe in (seg.c1, seg.c0, seg.p0):
            v = seg.p1 - probe
            if v.length() > EPSILON:
                return v.angle()
    return 0.0


def split_segment(seg: CubicSegment, t: float) -> tuple[CubicSegment, CubicSegment]:
    """De Casteljau split at t."""
    def lerp(a: Point, b: Point) -> Point:
        return Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)

    q0 = lerp(seg.p0, seg.c0)
    q1 = lerp(seg.c0, seg.c1)
    q2 = lerp(seg.c1, seg.p1)
    r0 = lerp(q0, q1)
    r1 = lerp(q1, q2)
    s = lerp(r0, r1)
    return CubicSegment(seg.p0, q0, r0, s), CubicSegment(s, r1, q2, seg.p1)


@dataclass(frozen=True)
class Contour:
    """A chain of cubic segments; consecutive segments share endpoints."""

    segments: tuple[CubicSegment, ...]
    closed: bool = False

    def __post_init__(self) -> None:
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for prev, cur in zip(segs, segs[1:]):
            if not prev.p1.close_to(cur.p0, 1e-6):
                raise ValueError("contour segments do not chain: "
                                 f"{prev.p1} != {cur.p0}")
        if self.closed and segs and not segs[-1].p1.close_to(segs[0].p0, 1e-6):
            raise ValueError("closed contour does not return to its start")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def nodes(self) -> tuple[Point, ...]:
        """On-curve knots: one per segment start, plus the end for open paths."""
        pts = tuple(seg.p0 for seg in self.segments)
        if not self.closed and self.segments:
            pts = pts + (self.segments[-1].p1,)
        return pts

    def node_count(self) -> int:
        return len(self.nodes)

    def reversed(self) -> Contour:
        return Contour(tuple(seg.reversed() for seg in reversed(self.segments)),
                       self.closed)

    def transformed(self, m: Affine) -> Contour:
        return Contour(tuple(seg.transformed(m) for seg in self.segments),
                       self.closed)


def transform(contour: Contour, m: Affine) -> Contour:
    return contour.transformed(m)


# ---------------------------------------------------------------------------
# Arc length
# ---------------------------------------------------------------------------

def _segment_arc_length(seg: CubicSegment, tol: float, depth: int = 0) -> float:
    chord = seg.p0.distance(seg.p1)
    poly = (seg.p0.distance(seg.c0) + seg.c0.distance(seg.c1)
            + seg.c1.distance(seg.p1))
    if depth >= 48 or poly - chord <= tol * max(chord, 1e-30):
        return 0.5 * (chord + poly)
    left, right = split_segment(seg, 0.5)
    return (_segment_arc_length(left, tol, depth + 1)
            + _segment_arc_length(right, tol, depth + 1))


def segment_arc_length(seg: CubicSegment, tol: float = 1e-9) -> float:
    if tol <= 0:
        raise ValueError(f"tolerance must be positive: {tol!r}")
    return _segment_arc_length(seg, tol)


def arc_length(contour: Contour, tol: float = 1e-9) -> float:
    """Total curve length via adaptive subdivision.

    Subdivides until the control polygon exceeds the chord by less than
    tol*chord, which bounds the relative error of the (chord+polygon)/2
    estimate.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive: {tol!r}")
    return sum(_segment_arc_length(seg, tol) for seg in contour.segments)


# ---------------------------------------------------------------------------
# Bounding box
# ---------------------------------------------------------------------------

def _axis_extrema(p0: float, c0: float, c1: float, p1: float) -> list[float]:
    """Interior parameter values where the axis derivative vanishes."""
    # Derivative is the quadratic 3*(a*t^2 + b*t + c).
    a = -p0 + 3.0 * c0 - 3.0 * c1 + p1
    b = 2.0 * (p0 - 2.0 * c0 + c1)
    c = c0 - p0
    ts: list[float] = []
    if abs(a) < 1e-14:
        if abs(b) > 1e-14:
            t = -c / b
            if 0.0 < t < 1.0:
                ts.append(t)
        return ts
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ts
    sq = math.sqrt(disc)
    for t in ((-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)):
        if 0.0 < t < 1.0:
            ts.append(t)
    return ts


def bbox(outline: list[Contour]) -> tuple[float, float, float, float]:
    """Tight bounds of the true curves, from the derivative's quadratic roots."""
    xs: list[float] = []
    ys: list[float] = []
    for contour in outline:
        for seg in contour.segments:
            xs.extend((seg.p0.x, seg.p1.x))
            ys.extend((seg.p0.y, seg.p1.y))
            for t in _axis_extrema(seg.p0.x, seg.c0.x, seg.c1.x, seg.p1.x):
                xs.append(bezier_eval(seg, t).x)
            for t in _axis_extrema(seg.p0.y, seg.c0.y, seg.c1.y, seg.p1.y):
                ys.append(bezier_eval(seg, t).y)
    if not xs:
        raise EmptyOutlineError("cannot compute bbox of an empty outline")
    return min(xs), min(ys), max(xs), max(ys)


def flatten_contour(contour: Contour, samples_per_segment: int = 24) -> list[Point]:
    """Polyline approximation, for intersection tests and containment checks."""
    pts: list[Point] = []
    for i, seg in enumerate(contour.segments):
        start = 0 if i == 0 else 1
        for k in range(start, samples_per_segment + 1):
            pts.append(bezier_eval(seg, k / samples_per_segment))
    return pts
