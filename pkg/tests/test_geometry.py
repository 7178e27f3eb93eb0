"""Tests for square geometry, the torus metric and the instability cross."""

import numpy as np
import pytest

from confetti.geometry import (Point2, Square, WindowSpec, boundary_overlap,
                               in_unstable_set, min_image_delta, square_contains)

from oracles import rasterized_minkowski_member, skeleton_member


UNIT = Square(Point2(0.0, 0.0), 0.5)


def test_square_contains_closed_boundary():
    assert square_contains(UNIT, Point2(0.5, 0.0), "closed")


def test_square_contains_open_excludes_boundary():
    assert not square_contains(UNIT, Point2(0.5, 0.0), "open")


def test_square_contains_far_point():
    assert not square_contains(Square(Point2(1.0, 1.0), 0.5), Point2(0.0, 0.0))


def test_square_contains_bad_mode():
    with pytest.raises(ValueError):
        square_contains(UNIT, Point2(0.0, 0.0), "fuzzy")


def test_min_image_wraps_across_seam():
    torus = WindowSpec.torus(10.0)
    assert min_image_delta(Point2(0.5, 0.0), Point2(9.5, 0.0), torus) == (1.0, 0.0)


def test_min_image_identity_and_no_wrap():
    torus = WindowSpec.torus(10.0)
    assert min_image_delta(Point2(2.0, 2.0), Point2(2.0, 2.0), torus) == (0.0, 0.0)
    assert min_image_delta(Point2(3.0, 3.0), Point2(1.0, 1.0), torus) == (2.0, 2.0)


def test_min_image_rectangle_plain_difference():
    rect = WindowSpec.rectangle(0.0, 10.0, 0.0, 10.0)
    assert min_image_delta(Point2(0.5, 0.0), Point2(9.5, 0.0), rect) == (-9.0, 0.0)


def test_min_image_half_open_range():
    torus = WindowSpec.torus(10.0)
    d = min_image_delta(Point2(5.0, 0.0), Point2(0.0, 0.0), torus)
    assert d == (5.0, 0.0)  # +period/2 kept, not -period/2
    d = min_image_delta(Point2(0.0, 0.0), Point2(5.0, 0.0), torus)
    assert d == (5.0, 0.0)


def test_unstable_set_on_strip():
    assert in_unstable_set(Point2(1.0, 0.7), 0.1)


def test_unstable_set_far_from_strips():
    assert not in_unstable_set(Point2(0.5, 0.5), 0.01)


def test_unstable_set_outside_arm():
    # frozen via the rasterized Minkowski-sum oracle at resolution 1e-3
    assert rasterized_minkowski_member(2.2, 1.0, 0.05) is False
    assert not in_unstable_set(Point2(2.2, 1.0), 0.05)


def test_unstable_set_symmetries():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3.0, 3.0, size=(2000, 2))
    for (x, y) in pts:
        m = in_unstable_set(Point2(x, y), 0.2)
        assert m == in_unstable_set(Point2(-x, -y), 0.2)
        assert m == in_unstable_set(Point2(y, x), 0.2)
        assert m == in_unstable_set(Point2(-x, y), 0.2)


def test_unstable_set_monotone_in_delta0():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-3.0, 3.0, size=(5000, 2))
    for (x, y) in pts:
        if in_unstable_set(Point2(x, y), 0.05):
            assert in_unstable_set(Point2(x, y), 0.15)


def test_unstable_set_matches_skeleton_distance_oracle():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-3.0, 3.0, size=(100_000, 2))
    for delta0 in (0.05, 0.2):
        for (x, y) in pts[:50_000]:
            assert in_unstable_set(Point2(x, y), delta0) == skeleton_member(x, y, delta0)


def test_boundary_overlap_shared_edge():
    segs = boundary_overlap(UNIT, Square(Point2(1.0, 0.0), 0.5))
    assert segs == [((0.5, -0.5), (0.5, 0.5))]


def test_boundary_overlap_partial_edge():
    # frozen via interval intersection: [-0.5, 0.5] n [0.0, 1.0] = [0.0, 0.5]
    segs = boundary_overlap(UNIT, Square(Point2(1.0, 0.5), 0.5))
    assert segs == [((0.5, 0.0), (0.5, 0.5))]


def test_boundary_overlap_disjoint():
    assert boundary_overlap(UNIT, Square(Point2(3.0, 0.0), 0.5)) == []


def test_boundary_overlap_nested_disjoint_boundaries():
    assert boundary_overlap(UNIT, Square(Point2(0.0, 0.0), 0.2)) == []


def test_boundary_overlap_crossing_points():
    # Generic overlapping squares meet in exactly two boundary crossings.
    segs = boundary_overlap(UNIT, Square(Point2(0.3, 0.3), 0.5))
    assert all(s[0] == s[1] for s in segs)
    assert {s[0] for s in segs} == {(0.5, -0.2), (-0.2, 0.5)}


def test_boundary_overlap_samples_lie_on_both_boundaries():
    rng = np.random.default_rng(4)

    def on_boundary(sq, p, tol=1e-12):
        dx = abs(p[0] - sq.center.x)
        dy = abs(p[1] - sq.center.y)
        inside = dx <= sq.half_side + tol and dy <= sq.half_side + tol
        on_edge = abs(dx - sq.half_side) <= tol or abs(dy - sq.half_side) <= tol
        return inside and on_edge

    for _ in range(300):
        a = Square(Point2(*rng.uniform(-1, 1, 2)), rng.uniform(0.2, 0.8))
        b = Square(Point2(*rng.uniform(-1, 1, 2)), rng.uniform(0.2, 0.8))
        for (p, q) in boundary_overlap(a, b):
            for w in np.linspace(0.0, 1.0, 9):
                pt = (p[0] + (q[0] - p[0]) * w, p[1] + (q[1] - p[1]) * w)
                assert on_boundary(a, pt) and on_boundary(b, pt)


def test_window_validation():
    with pytest.raises(ValueError):
        WindowSpec.torus(1.5)
    with pytest.raises(ValueError):
        WindowSpec.rectangle(0.0, 0.0, 0.0, 1.0)
    assert WindowSpec.torus(10.0).area() == 100.0
