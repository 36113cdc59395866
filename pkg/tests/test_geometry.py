import math
import random

import pytest

from paraglyph.geometry import (
    Affine,
    Contour,
    CubicSegment,
    EmptyOutlineError,
    Point,
    arc_length,
    bbox,
    bezier_eval,
    condense_scale,
    line_segment,
    rotation,
    scaling,
    slant_shear,
    transform,
    translation,
)

from oracles import de_casteljau, dense_arc_length, dense_extrema

SEG = CubicSegment(Point(0, 0), Point(26.8, -1.8), Point(51.4, 14.6), Point(60, 40))

KAPPA = 0.5522847498


def circle_contour(r):
    k = KAPPA * r
    quads = [
        ((r, 0), (r, k), (k, r), (0, r)),
        ((0, r), (-k, r), (-r, k), (-r, 0)),
        ((-r, 0), (-r, -k), (-k, -r), (0, -r)),
        ((0, -r), (k, -r), (r, -k), (r, 0)),
    ]
    return Contour(tuple(CubicSegment(*(Point(*p) for p in q)) for q in quads),
                   closed=True)


class TestBezierEval:
    def test_endpoints(self):
        assert bezier_eval(SEG, 0.0) == SEG.p0
        assert bezier_eval(SEG, 1.0) == SEG.p1

    def test_explicit_controls_midpoint(self):
        p = bezier_eval(SEG, 0.5)
        assert p.x == 36.825
        assert p.y == 9.8

    def test_against_de_casteljau(self):
        rng = random.Random(42)
        pts = [(0, 0), (26.8, -1.8), (51.4, 14.6), (60, 40)]
        for _ in range(100):
            t = rng.random()
            want = de_casteljau(pts, t)
            got = bezier_eval(SEG, t)
            assert abs(got.x - want[0]) < 1e-12
            assert abs(got.y - want[1]) < 1e-12

    @pytest.mark.parametrize("t", [-0.1, 1.1, 2.0])
    def test_rejects_out_of_range(self, t):
        with pytest.raises(ValueError):
            bezier_eval(SEG, t)

    def test_convex_hull_containment(self):
        rng = random.Random(7)
        for _ in range(30):
            pts = [Point(rng.uniform(-50, 50), rng.uniform(-50, 50))
                   for _ in range(4)]
            seg = CubicSegment(*pts)
            # Sampled curve points stay within the control bounding box,
            # a necessary consequence of convex-hull containment.
            xs = [p.x for p in pts]
            ys = [p.y for p in pts]
            for k in range(33):
                p = bezier_eval(seg, k / 32)
                assert min(xs) - 1e-9 <= p.x <= max(xs) + 1e-9
                assert min(ys) - 1e-9 <= p.y <= max(ys) + 1e-9

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Point(float("nan"), 0.0)


class TestArcLength:
    def test_straight_segment_exact(self):
        seg = CubicSegment(Point(0, 0), Point(5, 0), Point(15, 0), Point(20, 0))
        assert arc_length(Contour((seg,)), 1e-9) == 20.0

    def test_degenerate_segment(self):
        p = Point(3, 4)
        seg = CubicSegment(p, p, p, p)
        assert arc_length(Contour((seg,)), 1e-9) == 0.0

    def test_circle_approximation(self):
        c = circle_contour(100.0)
        length = arc_length(c, 1e-9)
        assert abs(length - 2 * math.pi * 100) / (2 * math.pi * 100) < 1e-3

    def test_against_dense_oracle(self):
        c = circle_contour(100.0)
        segs = [((s.p0.x, s.p0.y), (s.c0.x, s.c0.y), (s.c1.x, s.c1.y),
                 (s.p1.x, s.p1.y)) for s in c.segments]
        want = dense_arc_length(segs, samples_per_segment=25_000)
        assert abs(arc_length(c, 1e-9) - want) < 1e-3

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            arc_length(Contour((line_segment(Point(0, 0), Point(1, 0)),)), 0.0)

    def test_rigid_motion_invariance(self):
        c = circle_contour(50.0)
        base = arc_length(c, 1e-9)
        moved = transform(c, rotation(37.0).compose(translation(12, -5)))
        assert abs(arc_length(moved, 1e-9) - base) < 1e-6 * base

    def test_scales_linearly(self):
        c = circle_contour(50.0)
        base = arc_length(c, 1e-9)
        scaled = transform(c, scaling(2.5))
        assert abs(arc_length(scaled, 1e-9) - 2.5 * base) < 1e-6 * base


class TestTransform:
    def test_identity(self):
        c = circle_contour(10.0)
        assert transform(c, Affine()) == c

    def test_slant_shear(self):
        p = slant_shear(15.0).apply(Point(0, 100))
        assert abs(p.x - 100 * math.tan(math.radians(15))) < 1e-9
        assert abs(p.x - 26.7949) < 1e-4
        assert p.y == 100

    def test_condense(self):
        p = condense_scale(0.8).apply(Point(100, 50))
        assert p == Point(80, 50)

    def test_composition(self):
        rng = random.Random(3)
        for _ in range(50):
            m1 = Affine(*(rng.uniform(-2, 2) for _ in range(6)))
            m2 = Affine(*(rng.uniform(-2, 2) for _ in range(6)))
            p = Point(rng.uniform(-100, 100), rng.uniform(-100, 100))
            once = m2.apply(m1.apply(p))
            composed = m2.compose(m1).apply(p)
            assert abs(once.x - composed.x) < 1e-9
            assert abs(once.y - composed.y) < 1e-9


class TestBBox:
    def test_line_segment(self):
        c = Contour((line_segment(Point(0, 0), Point(10, 10)),))
        assert bbox([c]) == (0, 0, 10, 10)

    def test_curve_extremum(self):
        seg = CubicSegment(Point(0, 0), Point(0, 20), Point(20, 20), Point(20, 0))
        xmin, ymin, xmax, ymax = bbox([Contour((seg,))])
        assert (xmin, ymin, xmax) == (0, 0, 20)
        assert abs(ymax - 15.0) < 1e-12
        lo, hi = dense_extrema([(((0, 0)), (0, 20), (20, 20), (20, 0))], axis=1)
        assert abs(ymax - hi) < 1e-6
        assert abs(ymin - lo) < 1e-6

    def test_square(self):
        pts = [Point(0, 0), Point(10, 0), Point(10, 10), Point(0, 10)]
        segs = tuple(line_segment(pts[i], pts[(i + 1) % 4]) for i in range(4))
        assert bbox([Contour(segs, closed=True)]) == (0, 0, 10, 10)

    def test_empty_outline(self):
        with pytest.raises(EmptyOutlineError):
            bbox([])

    def test_commutes_with_axis_scaling(self):
        seg = CubicSegment(Point(0, 0), Point(0, 20), Point(20, 20), Point(20, 0))
        c = Contour((seg,))
        m = scaling(2.0, 3.0)
        direct = bbox([transform(c, m)])
        xmin, ymin, xmax, ymax = bbox([c])
        assert direct == pytest.approx((2 * xmin, 3 * ymin, 2 * xmax, 3 * ymax),
                                       abs=1e-9)
