"""Fast built-in checks over the documented example cases of every module."""

from __future__ import annotations

import math

import numpy as np

from . import connectivity, diagnostics, experiments
from .coloring import (boundary_visible, color_at, coverage, height_at, rasterize,
                       visible_leaves, black_dominates)
from .geometry import Point2, Square, WindowSpec, boundary_overlap, in_unstable_set, \
    min_image_delta, square_contains
from .process import (AdaptiveHorizon, FixedHorizon, Leaf, discretize,
                      economical_horizon, from_leaves, mesh_params, natural_coupling,
                      omega_process, perturb, sample_process, state_probabilities)

_checks = []


def check(name):
    def deco(fn):
        _checks.append((name, fn))
        return fn
    return deco


@check("geometry.square_contains")
def _():
    sq = Square(Point2(0.0, 0.0), 0.5)
    assert square_contains(sq, Point2(0.5, 0.0), "closed")
    assert not square_contains(sq, Point2(0.5, 0.0), "open")
    assert not square_contains(Square(Point2(1.0, 1.0), 0.5), Point2(0.0, 0.0))


@check("geometry.min_image_delta")
def _():
    torus = WindowSpec.torus(10.0)
    assert min_image_delta(Point2(0.5, 0.0), Point2(9.5, 0.0), torus) == (1.0, 0.0)
    assert min_image_delta(Point2(3.0, 3.0), Point2(3.0, 3.0), torus) == (0.0, 0.0)
    assert min_image_delta(Point2(3.0, 3.0), Point2(1.0, 1.0), torus) == (2.0, 2.0)


@check("geometry.in_unstable_set")
def _():
    assert in_unstable_set(Point2(1.0, 0.7), 0.1)
    assert not in_unstable_set(Point2(0.5, 0.5), 0.01)
    assert not in_unstable_set(Point2(2.2, 1.0), 0.05)


@check("geometry.boundary_overlap")
def _():
    a = Square(Point2(0.0, 0.0), 0.5)
    shared = boundary_overlap(a, Square(Point2(1.0, 0.0), 0.5))
    assert len(shared) == 1 and shared[0] == ((0.5, -0.5), (0.5, 0.5))
    assert boundary_overlap(a, Square(Point2(3.0, 0.0), 0.5)) == []


@check("process.sample_process")
def _():
    rect = WindowSpec.rectangle(0.0, 4.0, 0.0, 4.0)
    assert len(sample_process(rect, 0.5, FixedHorizon(0.0), 1)) == 0
    proc = sample_process(rect, 1.0, FixedHorizon(1.0), 2)
    assert np.all(proc.colors == 1)


@check("process.economical_horizon")
def _():
    assert economical_horizon(16, "torus") == 100.0
    assert economical_horizon(2, "torus") == 0.0
    assert abs(economical_horizon(math.e, "rectangle", c=50.0) - 50.0) < 1e-12


@check("process.perturb")
def _():
    win = WindowSpec.rectangle(0.0, 4.0, 0.0, 4.0)
    proc = from_leaves(win, [Leaf(0, Point2(1.0, 1.0), 1.0, 1),
                             Leaf(1, Point2(3.0, 3.0), 1.5, -1)])
    moved = perturb(proc, 0.1)
    black = moved.leaf_by_id(0)
    white = moved.leaf_by_id(1)
    assert (black.time, 2 * black.half_side) == (1.1, 0.8)
    assert (white.time, 2 * white.half_side) == (1.4, 1.2)
    assert perturb(proc, 0.0).same_configuration(proc)
    try:
        perturb(proc, 0.25)
        raise AssertionError("tolerance 1/4 must be rejected")
    except ValueError:
        pass


@check("process.natural_coupling")
def _():
    win = WindowSpec.rectangle(0.0, 6.0, 0.0, 6.0)
    a, b = natural_coupling(win, 0.3, 0.3, FixedHorizon(1.0), 5)
    assert a.same_configuration(b)
    a, b = natural_coupling(win, 0.0, 1.0, FixedHorizon(1.0), 6)
    assert np.all(a.colors == -1) and np.all(b.colors == 1)
    a, b = natural_coupling(win, 0.3, 0.6, FixedHorizon(2.0), 7)
    assert np.all(b.colors >= a.colors)


@check("process.state_probabilities")
def _():
    pw, pb, pn = state_probabilities(0.3, 0.25)
    assert abs(pw + pb + pn - 1.0) < 1e-12
    assert state_probabilities(1.0, 0.25)[0] == 0.0


@check("process.discretize")
def _():
    win = WindowSpec.torus(4.0)
    mesh = mesh_params(2, 1.0)  # delta = 1/4
    empty = discretize(from_leaves(win, []), mesh, 1.0)
    assert np.all(empty.states == 0)
    one = discretize(from_leaves(win, [Leaf(0, Point2(1.0, 1.0), 0.5, -1)]), mesh, 1.0)
    w, b, n = one.counts()
    assert (w, b) == (1, 0)
    both = from_leaves(win, [Leaf(0, Point2(1.01, 1.01), 0.45, 1),
                             Leaf(1, Point2(1.02, 1.02), 0.48, -1)])
    cfg = discretize(both, mesh, 1.0)
    assert cfg.counts()[:2] == (1, 0)  # white wins inside a shared cube


@check("process.omega_process")
def _():
    win = WindowSpec.torus(4.0)
    mesh = mesh_params(2, 1.0)
    assert len(omega_process(discretize(from_leaves(win, []), mesh, 1.0))) == 0
    black = discretize(from_leaves(win, [Leaf(0, Point2(1.0, 1.0), 0.3, 1)]), mesh, 1.0)
    leaf = omega_process(black).leaves[0]
    assert leaf.color == 1 and abs(2 * leaf.half_side - (1 - 2 * mesh.delta)) < 1e-12
    assert abs(leaf.time - 0.5) < 1e-12  # upper face of the (0.25, 0.5] slab
    white = discretize(from_leaves(win, [Leaf(0, Point2(1.0, 1.0), 0.3, -1)]), mesh, 1.0)
    leaf = omega_process(white).leaves[0]
    assert leaf.color == -1 and abs(2 * leaf.half_side - (1 + 2 * mesh.delta)) < 1e-12
    assert abs(leaf.time - 0.25) < 1e-12


@check("process.mesh_params")
def _():
    m = mesh_params(16, 1.0)
    assert (m.delta, m.delta1, m.delta2) == (1 / 16, 1 / 4, 1 / 2)
    m = mesh_params(2, 1.0)
    assert (m.delta, m.delta1) == (1 / 4, 1 / 2) and abs(m.delta2 - math.sqrt(0.5)) < 1e-12


@check("coloring.point_queries")
def _():
    win = WindowSpec.rectangle(-2.0, 2.0, -2.0, 2.0)
    one = from_leaves(win, [Leaf(0, Point2(0.0, 0.0), 0.7, 1)])
    assert height_at(one, Point2(0.0, 0.0)) == 0.7
    assert height_at(one, Point2(1.5, 1.5)) == -2.0
    tie = from_leaves(win, [Leaf(0, Point2(0.0, 0.0), 0.5, 1),
                            Leaf(1, Point2(0.1, 0.0), 0.5, -1)])
    assert height_at(tie, Point2(0.05, 0.0)) == -2.0
    two = from_leaves(win, [Leaf(0, Point2(0.0, 0.0), 0.1, -1),
                            Leaf(1, Point2(0.0, 0.0), 0.3, 1)])
    assert color_at(two, Point2(0.0, 0.0)) == -1


@check("coloring.rasterize")
def _():
    win = WindowSpec.rectangle(0.0, 1.0, 0.0, 1.0)
    field = rasterize(from_leaves(win, []), win.extent(), 1 / 8)
    assert np.all(field.values == 0)
    black = from_leaves(win, [Leaf(0, Point2(0.5, 0.5), 0.2, 1)])
    assert np.all(rasterize(black, (0.25, 0.75, 0.25, 0.75), 1 / 8).values == 1)


@check("coloring.coverage_and_visibility")
def _():
    win = WindowSpec.rectangle(0.0, 1.0, 0.0, 1.0)
    assert not coverage(from_leaves(win, []), win.extent(), 1 / 8).covered
    one = from_leaves(win, [Leaf(7, Point2(0.5, 0.5), 0.2, 1)])
    assert coverage(one, (0.25, 0.75, 0.25, 0.75), 1 / 8).covered
    assert visible_leaves(one, (0.25, 0.75, 0.25, 0.75), 1 / 8) == {7}
    occl = from_leaves(win, [Leaf(0, Point2(0.5, 0.5), 0.1, 1),
                             Leaf(1, Point2(0.5, 0.5), 0.2, -1, 0.2)])
    assert visible_leaves(occl, win.extent(), 1 / 8) == {0}


@check("coloring.black_dominates")
def _():
    win = WindowSpec.rectangle(0.0, 1.0, 0.0, 1.0)
    a = rasterize(from_leaves(win, [Leaf(0, Point2(0.5, 0.5), 0.1, 1)]), win.extent(), 1 / 4)
    assert black_dominates(a, a)
    mixed = rasterize(from_leaves(win, [Leaf(0, Point2(0.2, 0.2), 0.1, -1, 0.25)]),
                      win.extent(), 1 / 4)
    assert black_dominates(a, mixed)
    try:
        black_dominates(a, rasterize(from_leaves(win, []), win.extent(), 1 / 8))
        raise AssertionError("mismatched grids must be rejected")
    except ValueError:
        pass


@check("coloring.boundary_visible_far")
def _():
    win = WindowSpec.rectangle(-4.0, 4.0, -4.0, 4.0)
    proc = from_leaves(win, [Leaf(0, Point2(0.0, 0.0), 0.1, 1),
                             Leaf(1, Point2(2.5, 0.0), 0.2, -1)])
    assert not boundary_visible(proc, proc.leaf_by_id(1), proc.leaf_by_id(0))


@check("connectivity.labels_and_crossings")
def _():
    all_black = np.ones((6, 5), np.int8)
    grid = connectivity.label_values(all_black, 1, 4)
    assert grid.n_components == 1 and grid.component_sizes[1] == 30
    ii, jj = np.meshgrid(np.arange(6), np.arange(5), indexing="ij")
    checker = np.where((ii + jj) % 2 == 0, 1, -1).astype(np.int8)
    grid = connectivity.label_values(checker, 1, 4)
    assert grid.n_components == 15 and all(v == 1 for v in grid.component_sizes.values())
    assert connectivity.horizontal_crossing(all_black, 1)
    assert not connectivity.horizontal_crossing(-all_black, 1)
    rep = connectivity.crossing_report(all_black)
    assert (rep.black_horizontal, rep.white_vertical) == (True, False)


@check("diagnostics.unstable_pairs")
def _():
    win = WindowSpec.rectangle(-8.0, 8.0, -8.0, 8.0)
    assert diagnostics.temporally_unstable(1.0, 1.05, 0.1)
    assert not diagnostics.temporally_unstable(1.0, 1.2, 0.1)
    assert not diagnostics.temporally_unstable(1.0, 1.1, 0.1)  # strict boundary
    y = ((0.0, 0.0), 0.0)
    assert diagnostics.unstable_pair(y, ((1.0, 0.5), 1.0), 0.1, win)
    assert diagnostics.unstable_pair(y, ((0.5, 0.5), 0.05), 0.1, win)
    assert not diagnostics.unstable_pair(y, ((0.5, 0.5), 3.0), 0.1, win)


@check("diagnostics.bad_components")
def _():
    win = WindowSpec.rectangle(-8.0, 8.0, -8.0, 8.0)
    spread = from_leaves(win, [Leaf(0, Point2(-6.0, -6.0), 0.2, 1),
                               Leaf(1, Point2(6.0, 6.0), 5.0, -1)])
    rep = diagnostics.bad_components(spread, 0.1)
    assert rep.components == [[0], [1]] and rep.pair_edges == 0
    pair = from_leaves(win, [Leaf(0, Point2(0.0, 0.0), 1.0, 1),
                             Leaf(1, Point2(1.02, 0.3), 2.0, -1)])
    rep = diagnostics.bad_components(pair, 0.1)
    assert rep.components == [[0, 1]] and rep.pair_edges == 1


@check("diagnostics.tail_degenerate")
def _():
    rep = diagnostics.boundary_visible_tail(0.0, 50, 3)
    assert all(v == 0.0 for v in rep.empirical_tail)


@check("experiments.edge_cases")
def _():
    est = experiments.estimate_crossing(1.0, 1.0, 4, 10, 1 / 8, seed=11)
    assert est.p_hat == 1.0
    est = experiments.estimate_theta_proxy(0.0, 4, 10, 1 / 8, seed=12)
    assert est.p_hat == 0.0
    rep = experiments.fkg_check(4, 10, seed=13, p=1.0, h=1 / 8)
    assert rep.p_joint == 1.0 and rep.p_product == 1.0


def run(verbose: bool = False) -> int:
    failures = 0
    for name, fn in _checks:
        try:
            fn()
            if verbose:
                print(f"ok   {name}")
        except Exception as e:  # noqa: BLE001
            failures += 1
            print(f"FAIL {name}: {type(e).__name__}: {e}")
    if verbose:
        print(f"selftest: {len(_checks) - failures}/{len(_checks)} checks passed")
    return failures
