import math
import random

import pytest

from paraglyph.geometry import Contour, Point, bezier_eval, line_segment
from paraglyph.hobby import (
    JointKind,
    Knot,
    PathSpec,
    PathSpecError,
    direction_at,
    normalize_angle,
    solve,
)

from oracles import reference_spline

C = JointKind.CURVE
L = JointKind.LINE
S = JointKind.SMOOTH_LINE


def curve_spec(points, cyclic=False, start_dir=None, end_dir=None):
    knots = [Knot(Point(*p)) for p in points]
    if start_dir is not None:
        knots[0] = Knot(knots[0].point, dir_out=start_dir)
    if end_dir is not None:
        knots[-1] = Knot(knots[-1].point, dir_in=end_dir)
    joints = [C] * (len(points) if cyclic else len(points) - 1)
    return PathSpec(tuple(knots), tuple(joints), cyclic)


def assert_matches_reference(contour, ref_segments, tol=1e-6):
    assert len(contour.segments) == len(ref_segments)
    for seg, ref in zip(contour.segments, ref_segments):
        for pt, rp in zip((seg.p0, seg.c0, seg.c1, seg.p1), ref):
            assert abs(pt.x - rp[0]) < tol
            assert abs(pt.y - rp[1]) < tol


class TestSolveBasics:
    def test_collinear_knots_stay_straight(self):
        contour = solve(curve_spec([(0, 0), (10, 0), (20, 0)]))
        for seg in contour.segments:
            for p in (seg.c0, seg.c1):
                assert abs(p.y) < 1e-9
        for seg in contour.segments:
            for k in range(11):
                assert abs(bezier_eval(seg, k / 10).y) < 1e-9

    def test_square_of_line_joints(self):
        side = 10
        pts = [(0, 0), (side, 0), (side, side), (0, side), (0, 0)]
        spec = PathSpec(tuple(Knot(Point(*p)) for p in pts), (L, L, L, L))
        contour = solve(spec)
        assert len(contour.segments) == 4
        for seg in contour.segments:
            assert seg.is_line(1e-9)
        assert [((s.p0.x, s.p0.y)) for s in contour.segments] == \
            [(0, 0), (10, 0), (10, 10), (0, 10)]

    def test_knots_are_interpolated(self):
        pts = [(0, 0), (60, 40), (40, 90), (10, 70), (30, 50)]
        contour = solve(curve_spec(pts))
        nodes = contour.nodes
        for node, p in zip(nodes, pts):
            assert node == Point(*p)

    def test_published_open_path_controls(self):
        # The first segment of this classic five-point path has known
        # control points (quoted to one decimal in the reference manual).
        pts = [(0, 0), (60, 40), (40, 90), (10, 70), (30, 50)]
        contour = solve(curve_spec(pts))
        c0 = contour.segments[0].c0
        c1 = contour.segments[0].c1
        assert abs(c0.x - 26.8) < 0.1
        assert abs(c0.y - -1.8) < 0.1
        assert abs(c1.x - 51.4) < 0.1
        assert abs(c1.y - 14.6) < 0.1

    def test_explicit_controls_kept_exactly(self):
        knots = (Knot(Point(0, 0),
                      explicit_controls_after=(Point(26.8, -1.8),
                                               Point(51.4, 14.6))),
                 Knot(Point(60, 40)))
        contour = solve(PathSpec(knots, (C,)))
        seg = contour.segments[0]
        assert seg.c0 == Point(26.8, -1.8)
        assert seg.c1 == Point(51.4, 14.6)

    def test_two_knot_free_path_is_straight(self):
        contour = solve(curve_spec([(0, 0), (30, 40)]))
        assert contour.segments[0].is_line(1e-9)

    def test_direction_figure_path(self):
        u = 56.7
        spec = curve_spec([(0, 0), (2 * u, 0), (4 * u, 0)],
                          start_dir=90.0, end_dir=90.0)
        contour = solve(spec)
        ref = reference_spline([(0, 0), (2 * u, 0), (4 * u, 0)],
                               start_dir=90.0, end_dir=90.0)
        assert_matches_reference(contour, ref)

    def test_degenerate_chord_warns_not_fails(self):
        warnings = []
        spec = curve_spec([(0, 0), (0, 0), (10, 0)])
        contour = solve(spec, warnings)
        assert len(contour.segments) == 2
        seg = contour.segments[0]
        assert seg.p0 == seg.p1 == seg.c0 == seg.c1
        assert warnings

    def test_conflicting_controls_and_direction(self):
        knots = (Knot(Point(0, 0), dir_out=10.0,
                      explicit_controls_after=(Point(1, 1), Point(2, 2))),
                 Knot(Point(10, 0)))
        with pytest.raises(PathSpecError):
            solve(PathSpec(knots, (C,)))

    def test_too_few_knots(self):
        with pytest.raises(PathSpecError):
            PathSpec((Knot(Point(0, 0)),), ())


class TestJointKinds:
    def test_line_joint_leaves_curve_free(self):
        # curve .. curve -- line: the curve's end behaves like a free end.
        spec = PathSpec(
            (Knot(Point(0, 0)), Knot(Point(50, 40)), Knot(Point(100, 40))),
            (C, L))
        contour = solve(spec)
        free = reference_spline([(0, 0), (50, 40)])
        assert_matches_reference(Contour((contour.segments[0],)), free)
        assert contour.segments[1].is_line(1e-9)

    def test_smooth_line_constrains_curve(self):
        # line --- curve: the curve must leave along the line's direction.
        spec = PathSpec(
            (Knot(Point(0, 0)), Knot(Point(50, 0)), Knot(Point(100, 40))),
            (S, C))
        contour = solve(spec)
        assert contour.segments[0].is_line(1e-9)
        assert abs(direction_at(contour, 1) - 0.0) < 1e-6
        ref = reference_spline([(50, 0), (100, 40)], start_dir=0.0)
        assert_matches_reference(Contour((contour.segments[1],)), ref)

    def test_smooth_line_constrains_preceding_curve(self):
        # curve --- line: the curve must arrive along the line's direction.
        spec = PathSpec(
            (Knot(Point(0, 0)), Knot(Point(50, 40)), Knot(Point(100, 40))),
            (C, S))
        contour = solve(spec)
        assert contour.segments[1].is_line(1e-9)
        ref = reference_spline([(0, 0), (50, 40)], end_dir=0.0)
        assert_matches_reference(Contour((contour.segments[0],)), ref)


class TestReferenceAgreement:
    def test_random_open_paths(self):
        rng = random.Random(2024)
        for trial in range(100):
            n = rng.randint(3, 8)
            pts = []
            x, y = 0.0, 0.0
            for _ in range(n):
                pts.append((x, y))
                x += rng.uniform(20, 120)
                y += rng.uniform(-90, 90)
            start_dir = rng.uniform(-180, 180) if trial % 3 == 0 else None
            end_dir = rng.uniform(-180, 180) if trial % 4 == 0 else None
            spec = curve_spec(pts, start_dir=start_dir, end_dir=end_dir)
            assert_matches_reference(solve(spec),
                                     reference_spline(pts, start_dir, end_dir))

    def test_random_cyclic_paths(self):
        rng = random.Random(99)
        for _ in range(40):
            n = rng.randint(3, 8)
            pts = []
            for k in range(n):
                angle = 2 * math.pi * k / n
                r = rng.uniform(40, 120)
                pts.append((r * math.cos(angle), r * math.sin(angle)))
            spec = curve_spec(pts, cyclic=True)
            ref = reference_spline(pts, cyclic=True)
            assert_matches_reference(solve(spec), ref)


class TestProperties:
    def _random_path(self, rng, n):
        pts = []
        x, y = rng.uniform(-50, 50), rng.uniform(-50, 50)
        for _ in range(n):
            pts.append((x, y))
            x += rng.uniform(30, 100)
            y += rng.uniform(-80, 80)
        return pts

    def test_c1_continuity_at_interior_knots(self):
        rng = random.Random(5)
        for _ in range(25):
            pts = self._random_path(rng, rng.randint(3, 8))
            contour = solve(curve_spec(pts))
            for k in range(1, len(pts) - 1):
                incoming = math.degrees(math.atan2(
                    (contour.segments[k - 1].p1 - contour.segments[k - 1].c1).y,
                    (contour.segments[k - 1].p1 - contour.segments[k - 1].c1).x))
                outgoing = math.degrees(math.atan2(
                    (contour.segments[k].c0 - contour.segments[k].p0).y,
                    (contour.segments[k].c0 - contour.segments[k].p0).x))
                assert abs(normalize_angle(incoming - outgoing)) < 1e-6

    def test_rigid_equivariance(self):
        rng = random.Random(11)
        pts = self._random_path(rng, 6)
        base = solve(curve_spec(pts))
        angle = 33.0
        ca, sa = math.cos(math.radians(angle)), math.sin(math.radians(angle))
        tx, ty, scale = 12.0, -7.0, 2.5

        def xf(p):
            return ((p[0] * ca - p[1] * sa) * scale + tx,
                    (p[0] * sa + p[1] * ca) * scale + ty)

        moved = solve(curve_spec([xf(p) for p in pts]))
        for s1, s2 in zip(base.segments, moved.segments):
            for p1, p2 in zip((s1.p0, s1.c0, s1.c1, s1.p1),
                              (s2.p0, s2.c0, s2.c1, s2.p1)):
                wx, wy = xf((p1.x, p1.y))
                assert abs(p2.x - wx) < 1e-9 * max(1.0, abs(wx)) * 10
                assert abs(p2.y - wy) < 1e-9 * max(1.0, abs(wy)) * 10

    def test_mirror_symmetry(self):
        rng = random.Random(13)
        pts = self._random_path(rng, 5)
        base = solve(curve_spec(pts))
        mirrored = solve(curve_spec([(x, -y) for x, y in pts]))
        for s1, s2 in zip(base.segments, mirrored.segments):
            for p1, p2 in zip((s1.p0, s1.c0, s1.c1, s1.p1),
                              (s2.p0, s2.c0, s2.c1, s2.p1)):
                assert abs(p1.x - p2.x) < 1e-9
                assert abs(p1.y + p2.y) < 1e-9

    def test_direction_constraints_honoured(self):
        rng = random.Random(17)
        for _ in range(20):
            pts = self._random_path(rng, 4)
            d0 = rng.uniform(-179, 179)
            d1 = rng.uniform(-179, 179)
            contour = solve(curve_spec(pts, start_dir=d0, end_dir=d1))
            assert abs(normalize_angle(direction_at(contour, 0) - d0)) < 1e-6
            last = len(pts) - 1
            assert abs(normalize_angle(direction_at(contour, last) - d1)) < 1e-6


class TestDirectionAt:
    def test_horizontal_line(self):
        c = Contour((line_segment(Point(0, 0), Point(10, 0)),))
        assert direction_at(c, 0) == 0.0

    def test_vertical_line(self):
        c = Contour((line_segment(Point(0, 0), Point(0, 10)),))
        assert direction_at(c, 0) == 90.0

    def test_constrained_start(self):
        spec = curve_spec([(50, 0), (0, 100), (66, 166)], start_dir=135.0)
        assert abs(direction_at(solve(spec), 0) - 135.0) < 1e-6

    def test_index_out_of_range(self):
        c = Contour((line_segment(Point(0, 0), Point(10, 0)),))
        with pytest.raises(IndexError):
            direction_at(c, 5)
