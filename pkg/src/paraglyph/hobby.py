"""Smoothing solver: turns knot sequences into explicit cubic control points.

Unknown tangent angles at the knots are found from the mock-curvature
equality conditions, which form a tridiagonal linear system (cyclic
tridiagonal for closed all-curve paths). Tension is fixed at 1 and free ends
use curl 1; the knot type leaves room to add both later.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geometry import (
    Contour,
    CubicSegment,
    Point,
    from_polar,
    line_segment,
    tangent_angle,
)

_SQRT2 = math.sqrt(2.0)
_SQRT5 = math.sqrt(5.0)


class PathSpecError(ValueError):
    """Invalid or contradictory path specification."""


class JointKind(Enum):
    CURVE = ".."
    LINE = "--"
    SMOOTH_LINE = "---"


@dataclass(frozen=True)
class Knot:
    point: Point
    dir_in: float | None = None   # degrees, constrains the arriving tangent
    dir_out: float | None = None  # degrees, constrains the departing tangent
    explicit_controls_after: tuple[Point, Point] | None = None


@dataclass(frozen=True)
class PathSpec:
    knots: tuple[Knot, ...]
    joints: tuple[JointKind, ...]
    cyclic: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "knots", tuple(self.knots))
        object.__setattr__(self, "joints", tuple(self.joints))
        if len(self.knots) < 2:
            raise PathSpecError("a path needs at least 2 knots")
        expected = len(self.knots) if self.cyclic else len(self.knots) - 1
        if len(self.joints) != expected:
            raise PathSpecError(
                f"expected {expected} joints for {len(self.knots)} knots, "
                f"got {len(self.joints)}")


def normalize_angle(deg: float) -> float:
    """Map an angle in degrees to (-180, 180]."""
    a = math.fmod(deg, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def _norm_rad(a: float) -> float:
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def velocity(theta: float, phi: float) -> float:
    """Hobby's control-point speed for departure angle theta, arrival phi.

    Angles in radians, relative to the chord. Capped at 4 like the reference
    implementations so extreme angles cannot fling controls to infinity.
    """
    st, ct = math.sin(theta), math.cos(theta)
    sf, cf = math.sin(phi), math.cos(phi)
    num = 2.0 + _SQRT2 * (st - sf / 16.0) * (sf - st / 16.0) * (ct - cf)
    den = 1.0 + 0.5 * (_SQRT5 - 1.0) * ct + 0.5 * (3.0 - _SQRT5) * cf
    return min(num / den, 4.0)


def control_points(p0: Point, p1: Point, theta: float, phi: float) -> CubicSegment:
    """Build one cubic from chord endpoints and relative tangent angles."""
    chord = p1 - p0
    d = chord.length()
    gamma = math.atan2(chord.y, chord.x)
    rho = velocity(theta, phi)
    sigma = velocity(phi, theta)
    c0 = p0 + from_polar(rho * d / 3.0, math.degrees(gamma + theta))
    c1 = p1 - from_polar(sigma * d / 3.0, math.degrees(gamma - phi))
    return CubicSegment(p0, c0, c1, p1)


def solve_segment(p0: Point, p1: Point, dir0: float, dir1: float) -> CubicSegment:
    """Single cubic with both tangent directions given (degrees, absolute)."""
    chord = p1 - p0
    if chord.length() == 0.0:
        return CubicSegment(p0, p0, p1, p1)
    gamma = math.atan2(chord.y, chord.x)
    theta = _norm_rad(math.radians(dir0) - gamma)
    phi = _norm_rad(gamma - math.radians(dir1))
    return control_points(p0, p1, theta, phi)


# ---------------------------------------------------------------------------
# Linear solvers
# ---------------------------------------------------------------------------

def _solve_tridiagonal(sub: list[float], diag: list[float], sup: list[float],
                       rhs: list[float]) -> list[float]:
    """Thomas elimination; the mock-curvature system is diagonally dominant."""
    n = len(diag)
    c = [0.0] * n
    d = [0.0] * n
    c[0] = sup[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - sub[i] * c[i - 1]
        c[i] = sup[i] / denom
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom
    x = [0.0] * n
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _solve_cyclic_tridiagonal(sub: list[float], diag: list[float],
                              sup: list[float], rhs: list[float]) -> list[float]:
    """Sherman-Morrison reduction of the wrap-around tridiagonal system.

    sub[i] multiplies x[i-1] and sup[i] multiplies x[i+1], indices mod n.
    """
    n = len(diag)
    if n == 2:
        # Both off-diagonals hit the same neighbour; solve the 2x2 directly.
        a, b = diag[0], sub[0] + sup[0]
        c, d = sub[1] + sup[1], diag[1]
        det = a * d - b * c
        return [(rhs[0] * d - b * rhs[1]) / det,
                (a * rhs[1] - rhs[0] * c) / det]
    gamma = -diag[0]
    diag2 = list(diag)
    diag2[0] = diag[0] - gamma
    diag2[-1] = diag[-1] - sup[-1] * sub[0] / gamma
    y = _solve_tridiagonal(sub, diag2, sup, rhs)
    u = [0.0] * n
    u[0] = gamma
    u[-1] = sup[-1]
    q = _solve_tridiagonal(sub, diag2, sup, u)
    fact = (y[0] + sub[0] * y[-1] / gamma) / (1.0 + q[0] + sub[0] * q[-1] / gamma)
    return [y[i] - fact * q[i] for i in range(n)]


# ---------------------------------------------------------------------------
# Run decomposition
# ---------------------------------------------------------------------------

@dataclass
class _Boundary:
    """Boundary condition at one end of a curve run."""
    angle: float | None = None  # absolute direction in radians, None = curl 1


@dataclass
class _Run:
    """A maximal stretch of consecutive curve joints solved as one system."""
    points: list[Point]
    start: _Boundary
    end: _Boundary
    joint_indices: list[int] = field(default_factory=list)


def _effective_dir(knot: Knot, prefer_out: bool) -> float | None:
    """One-sided direction specs apply to both sides of a smooth knot."""
    if prefer_out:
        return knot.dir_out if knot.dir_out is not None else knot.dir_in
    return knot.dir_in if knot.dir_in is not None else knot.dir_out


def _check_conflicts(spec: PathSpec) -> None:
    n = len(spec.knots)
    for j, kind in enumerate(spec.joints):
        start = spec.knots[j]
        end = spec.knots[(j + 1) % n]
        if start.explicit_controls_after is not None:
            if start.dir_out is not None:
                raise PathSpecError(
                    f"knot {j}: explicit controls conflict with an outgoing "
                    "direction on the same joint")
            if end.dir_in is not None:
                raise PathSpecError(
                    f"knot {(j + 1) % n}: explicit controls conflict with an "
                    "incoming direction on the same joint")
            if kind is not JointKind.CURVE:
                raise PathSpecError(
                    f"knot {j}: explicit controls require a curve joint")


def solve(spec: PathSpec, warnings: list[str] | None = None) -> Contour:
    """Resolve every joint of the path into an explicit cubic segment."""
    _check_conflicts(spec)
    knots = spec.knots
    n = len(knots)
    m = len(spec.joints)

    def chord(j: int) -> Point:
        return knots[(j + 1) % n].point - knots[j].point

    # Joint classification; zero chords become degenerate stubs, not failures.
    CURVE, LINE, SMOOTH, EXPLICIT, DEGEN = range(5)
    kinds: list[int] = []
    for j, joint in enumerate(spec.joints):
        if chord(j).length() == 0.0 and knots[j].explicit_controls_after is None:
            kinds.append(DEGEN)
            if warnings is not None:
                warnings.append(
                    f"coincident knots {j} and {(j + 1) % n}: degenerate segment")
        elif knots[j].explicit_controls_after is not None:
            kinds.append(EXPLICIT)
        elif joint is JointKind.LINE:
            kinds.append(LINE)
        elif joint is JointKind.SMOOTH_LINE:
            kinds.append(SMOOTH)
        else:
            kinds.append(CURVE)

    def constrained(k: int) -> bool:
        return knots[k].dir_in is not None or knots[k].dir_out is not None

    def joined(j: int, j2: int) -> bool:
        """True when joints j and j2 (consecutive) belong to one curve run."""
        shared = (j + 1) % n
        return (kinds[j] == CURVE and kinds[j2] == CURVE
                and not constrained(shared))

    segments: list[CubicSegment | None] = [None] * m

    # Non-curve joints resolve immediately.
    for j in range(m):
        a = knots[j].point
        b = knots[(j + 1) % n].point
        if kinds[j] in (LINE, SMOOTH):
            segments[j] = line_segment(a, b)
        elif kinds[j] == EXPLICIT:
            c0, c1 = knots[j].explicit_controls_after  # type: ignore[misc]
            segments[j] = CubicSegment(a, c0, c1, b)
        elif kinds[j] == DEGEN:
            segments[j] = CubicSegment(a, a, b, b)

    curve_joints = [j for j in range(m) if kinds[j] == CURVE]
    if curve_joints:
        fully_cyclic = (
            spec.cyclic
            and all(k == CURVE for k in kinds)
            and not any(constrained(k) for k in range(n))
        )
        if fully_cyclic:
            for j, seg in enumerate(_solve_cyclic([k.point for k in knots])):
                segments[j] = seg
        else:
            for run in _collect_runs(spec, kinds, joined):
                solved = _solve_open_run(run)
                for idx, seg in zip(run.joint_indices, solved):
                    segments[idx] = seg

    assert all(seg is not None for seg in segments)
    return Contour(tuple(segments), closed=spec.cyclic)  # type: ignore[arg-type]


def _collect_runs(spec: PathSpec, kinds: list[int], joined) -> list[_Run]:
    CURVE = 0
    knots = spec.knots
    n = len(knots)
    m = len(spec.joints)
    runs: list[_Run] = []

    starts: list[int] = []
    for j in range(m):
        if kinds[j] != CURVE:
            continue
        prev = j - 1 if j > 0 else (m - 1 if spec.cyclic else None)
        if prev is None or not joined(prev, j):
            starts.append(j)
    if not starts and spec.cyclic:
        starts = [0]  # all joints joined into one wrapped run

    for s in starts:
        joint_indices = [s]
        j = s
        while True:
            nxt = j + 1 if j + 1 < m else (0 if spec.cyclic else None)
            if nxt is None or nxt == s or not joined(j, nxt):
                break
            joint_indices.append(nxt)
            j = nxt
        first = joint_indices[0]
        last = joint_indices[-1]
        points = [knots[first].point]
        for idx in joint_indices:
            points.append(knots[(idx + 1) % n].point)
        runs.append(_Run(
            points=points,
            start=_run_boundary(spec, kinds, first, at_start=True),
            end=_run_boundary(spec, kinds, last, at_start=False),
            joint_indices=joint_indices,
        ))
    return runs


def _run_boundary(spec: PathSpec, kinds: list[int], joint: int,
                  at_start: bool) -> _Boundary:
    SMOOTH = 2
    knots = spec.knots
    n = len(knots)
    m = len(spec.joints)
    knot_idx = joint if at_start else (joint + 1) % n
    given = _effective_dir(knots[knot_idx], prefer_out=at_start)
    if given is not None:
        return _Boundary(angle=math.radians(normalize_angle(given)))
    # A straight joint with a smooth connection imposes its chord direction
    # on both of its neighbours.
    if at_start:
        neighbour = joint - 1 if joint > 0 else (m - 1 if spec.cyclic else None)
    else:
        neighbour = joint + 1 if joint + 1 < m else (0 if spec.cyclic else None)
    if neighbour is not None and kinds[neighbour] == SMOOTH:
        a = knots[neighbour].point
        b = knots[(neighbour + 1) % n].point
        v = b - a
        if v.length() > 0.0:
            return _Boundary(angle=math.atan2(v.y, v.x))
    return _Boundary(angle=None)


# ---------------------------------------------------------------------------
# Angle systems
# ---------------------------------------------------------------------------

def _chord_data(points: list[Point]) -> tuple[list[float], list[float]]:
    ds: list[float] = []
    gammas: list[float] = []
    for a, b in zip(points, points[1:]):
        v = b - a
        ds.append(v.length())
        gammas.append(math.atan2(v.y, v.x))
    return ds, gammas


def _segments_from_angles(points: list[Point], thetas: list[float],
                          phis: list[float]) -> list[CubicSegment]:
    segs = []
    for k in range(len(points) - 1):
        segs.append(control_points(points[k], points[k + 1],
                                   thetas[k], phis[k + 1]))
    return segs


def _solve_open_run(run: _Run) -> list[CubicSegment]:
    """Solve one open run; unknowns are the start angles plus the final
    arrival angle, with direction or curl-1 conditions at the two ends."""
    points = run.points
    r = len(points) - 1
    ds, gammas = _chord_data(points)
    psi = [0.0] * (r + 1)
    for k in range(1, r):
        psi[k] = _norm_rad(gammas[k] - gammas[k - 1])

    start_given = run.start.angle is not None
    end_given = run.end.angle is not None

    if r == 1:
        if start_given and end_given:
            theta0 = _norm_rad(run.start.angle - gammas[0])
            phi1 = _norm_rad(gammas[0] - run.end.angle)
        elif start_given:
            theta0 = _norm_rad(run.start.angle - gammas[0])
            phi1 = theta0
        elif end_given:
            phi1 = _norm_rad(gammas[0] - run.end.angle)
            theta0 = phi1
        else:
            theta0 = phi1 = 0.0  # curl ends on a single chord: straight
        return _segments_from_angles(points, [theta0], [0.0, phi1])

    # Tridiagonal system over x = (theta_0 .. theta_{r-1}, phi_r).
    size = r + 1
    sub = [0.0] * size
    diag = [0.0] * size
    sup = [0.0] * size
    rhs = [0.0] * size

    if start_given:
        diag[0] = 1.0
        rhs[0] = _norm_rad(run.start.angle - gammas[0])
    else:
        # Curl 1: theta_0 equals the arrival angle phi_1 = -psi_1 - theta_1.
        diag[0] = 1.0
        sup[0] = 1.0
        rhs[0] = -psi[1]

    for k in range(1, r):
        sub[k] = 2.0 / ds[k - 1]
        diag[k] = 4.0 / ds[k - 1] + 4.0 / ds[k]
        rhs[k] = -4.0 * psi[k] / ds[k - 1]
        if k + 1 <= r - 1:
            sup[k] = 2.0 / ds[k]
            rhs[k] -= 2.0 * psi[k + 1] / ds[k]
        else:
            sup[k] = -2.0 / ds[k]  # multiplies phi_r

    if end_given:
        diag[size - 1] = 1.0
        rhs[size - 1] = _norm_rad(gammas[r - 1] - run.end.angle)
    else:
        sub[size - 1] = -1.0
        diag[size - 1] = 1.0  # curl 1: phi_r = theta_{r-1}

    x = _solve_tridiagonal(sub, diag, sup, rhs)
    thetas = x[:r]
    phis = [0.0] * (r + 1)
    for k in range(1, r):
        phis[k] = -psi[k] - thetas[k]
    phis[r] = x[r]
    return _segments_from_angles(points, thetas, phis)


def _solve_cyclic(points: list[Point]) -> list[CubicSegment]:
    """Closed all-curve path: one wrap-around system over the start angles."""
    n = len(points)
    ds = []
    gammas = []
    for k in range(n):
        v = points[(k + 1) % n] - points[k]
        ds.append(v.length())
        gammas.append(math.atan2(v.y, v.x))
    psi = [_norm_rad(gammas[k] - gammas[k - 1]) for k in range(n)]

    sub = [0.0] * n
    diag = [0.0] * n
    sup = [0.0] * n
    rhs = [0.0] * n
    for k in range(n):
        d_prev = ds[k - 1]
        d_next = ds[k]
        sub[k] = 2.0 / d_prev
        diag[k] = 4.0 / d_prev + 4.0 / d_next
        sup[k] = 2.0 / d_next
        rhs[k] = -4.0 * psi[k] / d_prev - 2.0 * psi[(k + 1) % n] / d_next

    thetas = _solve_cyclic_tridiagonal(sub, diag, sup, rhs)
    segs = []
    for k in range(n):
        phi_next = -psi[(k + 1) % n] - thetas[(k + 1) % n]
        segs.append(control_points(points[k], points[(k + 1) % n],
                                   thetas[k], phi_next))
    return segs


# ---------------------------------------------------------------------------
# Tangent queries
# ---------------------------------------------------------------------------

def direction_at(contour: Contour, knot_index: int) -> float:
    """Tangent direction at a knot in degrees: outgoing where defined,
    incoming at the open end."""
    n_segs = len(contour.segments)
    n_nodes = contour.node_count()
    if not 0 <= knot_index < n_nodes:
        raise IndexError(f"knot index {knot_index} out of range 0..{n_nodes - 1}")
    if knot_index < n_segs:
        return tangent_angle(contour.segments[knot_index], 0.0)
    return tangent_angle(contour.segments[-1], 1.0)
