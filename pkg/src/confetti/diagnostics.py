"""Instability diagnostics: unstable pairs and triples, stable neighborhoods,
bad components, pair-count statistics and the boundary-visibility tail."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .coloring import boundary_visible
from .geometry import Point2, WindowSpec, in_unstable_set, min_image_delta
from .process import (Leaf, LeafProcess, FixedHorizon, STREAM_PAIRS, STREAM_TAIL,
                      derived_seed, sample_process, rng_for)


class SpaceTimePoint(NamedTuple):
    z: Point2
    t: float


def _as_stp(y) -> SpaceTimePoint:
    if isinstance(y, SpaceTimePoint):
        return y
    if isinstance(y, Leaf):
        return SpaceTimePoint(y.center, y.time)
    z, t = y
    return SpaceTimePoint(Point2(*z), float(t))


def temporally_unstable(t: float, t_prime: float, delta0: float) -> bool:
    """Strict closeness in time: |t - t'| < delta0."""
    return abs(t - t_prime) < delta0


def unstable_pair(y, y_prime, delta0: float, window: WindowSpec) -> bool:
    """Space-time pair within sup-distance 2 + delta0 that is spatially or
    temporally delta0-close (space measured torus-aware)."""
    a = _as_stp(y)
    b = _as_stp(y_prime)
    if window.is_torus and window.period < 2.0 * (2.0 + delta0):
        raise ValueError("torus period too small for the instability cross")
    d = min_image_delta(a.z, b.z, window)
    dt = abs(a.t - b.t)
    cap = 2.0 + delta0
    if max(abs(d.x), abs(d.y), dt) > cap:
        return False
    return in_unstable_set(d, delta0) or temporally_unstable(a.t, b.t, delta0)


def stable_neighborhood(proc: LeafProcess, leaf: Leaf, delta0: float) -> LeafProcess:
    """Sub-process of leaves not forming a delta0-unstable pair with leaf.

    The reference leaf itself is kept: its own occluders are exactly what
    height queries over the neighborhood need.
    """
    cap = 2.0 + delta0
    dx = proc.xs - leaf.center.x
    dy = proc.ys - leaf.center.y
    if proc.window.is_torus:
        p = proc.window.period
        if p < 2.0 * cap:
            raise ValueError("torus period too small for the instability cross")
        dx = dx - p * np.ceil(dx / p - 0.5)
        dy = dy - p * np.ceil(dy / p - 0.5)
    adx = np.abs(dx)
    ady = np.abs(dy)
    dt = np.abs(proc.ts - leaf.time)
    within = (adx <= cap) & (ady <= cap) & (dt <= cap)
    arm = cap
    on_strip_x = (adx <= delta0) | (np.abs(adx - 1.0) <= delta0)
    on_strip_y = (ady <= delta0) | (np.abs(ady - 1.0) <= delta0)
    spatial = (on_strip_x & (ady <= arm)) | (on_strip_y & (adx <= arm))
    temporal = dt < delta0
    unstable = within & (spatial | temporal)
    unstable &= proc.ids != leaf.id
    return proc.restrict(~unstable)


def unstable_triple(proc: LeafProcess, x: Leaf, x_prime: Leaf, x_second: Leaf,
                    delta0: float) -> bool:
    """{x, x'} is a delta0-unstable pair and x'' is boundary-visible from x in
    the stable neighborhood of x."""
    if len({x.id, x_prime.id, x_second.id}) != 3:
        raise ValueError("triple needs three distinct leaves")
    if not unstable_pair(x, x_prime, delta0, proc.window):
        return False
    nb = stable_neighborhood(proc, x, delta0)
    if not np.any(nb.ids == x_second.id):
        return False
    return boundary_visible(nb, x_second, x)


@dataclass(frozen=True)
class BadComponentReport:
    components: list[list[int]]
    max_size: int
    pair_edges: int
    triple_edges: int

    def partition(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.components}


class _DSU:
    def __init__(self, ids):
        self.parent = {i: i for i in ids}

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def bad_components(proc: LeafProcess, delta0: float) -> BadComponentReport:
    """Connected components of the graph whose edges are unstable pairs plus
    cliques over unstable triples."""
    leaves = proc.leaves
    n = len(leaves)
    ids = [lf.id for lf in leaves]
    dsu = _DSU(ids)
    pair_list: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(i + 1, n):
            if unstable_pair(leaves[i], leaves[j], delta0, proc.window):
                pair_list.append((i, j))
                dsu.union(ids[i], ids[j])
    triples: set[frozenset[int]] = set()
    for (i, j) in pair_list:
        for a, b in ((i, j), (j, i)):
            nb = stable_neighborhood(proc, leaves[a], delta0)
            present = set(int(v) for v in nb.ids)
            for k in range(n):
                if k == a or k == b or ids[k] not in present:
                    continue
                # boundary contact prefilter
                d = min_image_delta(leaves[k].center, leaves[a].center, proc.window)
                if max(abs(d.x), abs(d.y)) > leaves[k].half_side + leaves[a].half_side:
                    continue
                if boundary_visible(nb, leaves[k], leaves[a]):
                    triples.add(frozenset((ids[a], ids[b], ids[k])))
    for tri in triples:
        members = list(tri)
        dsu.union(members[0], members[1])
        dsu.union(members[0], members[2])
    groups: dict[int, list[int]] = {}
    for i in ids:
        groups.setdefault(dsu.find(i), []).append(i)
    components = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    max_size = max((len(g) for g in components), default=0)
    return BadComponentReport(components=components, max_size=max_size,
                              pair_edges=len(pair_list), triple_edges=len(triples))


# ---------------------------------------------------------------------------
# Pair-count statistics

def count_unstable_pairs(proc: LeafProcess, delta0: float) -> int:
    """Number of unordered delta0-unstable pairs in the process."""
    n = len(proc)
    if n < 2:
        return 0
    dx = np.abs(proc.xs[:, None] - proc.xs[None, :])
    dy = np.abs(proc.ys[:, None] - proc.ys[None, :])
    if proc.window.is_torus:
        p = proc.window.period
        dx = np.minimum(dx, p - dx)
        dy = np.minimum(dy, p - dy)
    dt = np.abs(proc.ts[:, None] - proc.ts[None, :])
    cap = 2.0 + delta0
    within = (dx <= cap) & (dy <= cap) & (dt <= cap)
    strip_x = (dx <= delta0) | (np.abs(dx - 1.0) <= delta0)
    strip_y = (dy <= delta0) | (np.abs(dy - 1.0) <= delta0)
    spatial = (strip_x & (dy <= cap)) | (strip_y & (dx <= cap))
    unstable = within & (spatial | (dt < delta0))
    iu = np.triu_indices(n, 1)
    return int(np.count_nonzero(unstable[iu]))


def unstable_pair_first_moment(window: WindowSpec, T: float, delta0: float) -> float:
    """Exact expected number of unordered unstable pairs for a unit-intensity
    process on a rectangle window over [0, T].

    The pair indicator depends on the difference variables only, so the
    moment is half the integral of the window covolumes over the instability
    region; the cross decomposes into strips, giving a closed form.
    """
    if window.is_torus:
        raise ValueError("first moment implemented for rectangle windows")
    if not 0.0 < delta0 < 0.5:
        raise ValueError(f"delta0 must lie in (0, 1/2), got {delta0}")
    x0, x1, y0, y1 = window.bounds
    a, b = x1 - x0, y1 - y0
    c = 2.0 + delta0
    if c > min(a, b):
        raise ValueError("window too small: need 2 + delta0 <= min(width, height)")

    def cap_integral(length: float, m: float) -> float:
        m = min(m, length)
        return 2.0 * length * m - m * m

    def strips_integral(length: float) -> float:
        s0 = 2.0 * length * delta0 - delta0 * delta0
        s1 = 2.0 * delta0 * (length - 1.0)
        return s0 + 2.0 * s1

    sx_cap = cap_integral(a, c)
    sy_cap = cap_integral(b, c)
    sx_str = strips_integral(a)
    sy_str = strips_integral(b)
    i_space = sx_str * sy_cap + sx_cap * sy_str - sx_str * sy_str
    st_cap = cap_integral(T, c)
    st_dlt = cap_integral(T, delta0)
    return 0.5 * (i_space * (st_cap - st_dlt) + sx_cap * sy_cap * st_dlt)


@dataclass(frozen=True)
class PairCountStats:
    empirical_mean: float
    analytic_mean: float
    std_error: float
    trials: int
    delta0: float
    T: float
    seed: int

    def csv_rows(self) -> list[str]:
        return ["statistic,empirical,analytic,std_error,trials,delta0,T,seed",
                f"pair_count,{self.empirical_mean!r},{self.analytic_mean!r},"
                f"{self.std_error!r},{self.trials},{self.delta0!r},{self.T!r},{self.seed}"]


def pair_count_stats(window: WindowSpec, T: float, delta0: float, trials: int,
                     seed: int) -> PairCountStats:
    """Empirical mean unstable-pair count over trials against the exact first
    moment; the sampling halo is disabled so counts match the window law."""
    counts = np.empty(trials, np.float64)
    for i in range(trials):
        proc = sample_process(window, 0.5, FixedHorizon(T),
                              derived_seed(seed, STREAM_PAIRS, i), margin=0.0)
        counts[i] = count_unstable_pairs(proc, delta0)
    analytic = unstable_pair_first_moment(window, T, delta0)
    std_err = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return PairCountStats(empirical_mean=float(counts.mean()), analytic_mean=analytic,
                          std_error=std_err, trials=trials, delta0=delta0, T=T, seed=seed)


# ---------------------------------------------------------------------------
# Boundary-visibility tail

def chain_tail_bound(n: int, lam: float) -> float:
    """Ordered-chain bound 9^n lam^n / (n!)^2 on P(N' >= n)."""
    return 9.0 ** n * lam ** n / math.factorial(n) ** 2


def corner_visible_count(proc: LeafProcess) -> int:
    """Leaves realizing the height on a unit probe's bottom edge through its
    lower-left corner.

    The probe is a unit square at the origin; counted are process leaves x
    whose closed square contains the corner P0 = (-1/2, -1/2) and whose
    arrival time equals the height, over the leaves whose open square
    contains P0, at some point of the bottom edge lying on the boundary of
    x's square.  The probe's own arrival time plays no role: its open square
    never contains its own corner.
    """
    p0x, p0y = -0.5, -0.5
    edge_y = -0.5
    xs, ys, ts, halfs = proc.xs, proc.ys, proc.ts, proc.half_sides
    open_mask = (np.abs(xs - p0x) < halfs) & (np.abs(ys - p0y) < halfs)
    odx = xs[open_mask]
    ody = ys[open_mask]
    ots = ts[open_mask]
    ohalf = halfs[open_mask]
    count = 0
    for m in range(len(proc)):
        if abs(xs[m] - p0x) > halfs[m] or abs(ys[m] - p0y) > halfs[m]:
            continue  # corner not in the leaf's closed square
        if abs(edge_y - ys[m]) > halfs[m]:
            continue  # leaf boundary misses the bottom edge line
        hit = False
        for px in (xs[m] - halfs[m], xs[m] + halfs[m]):
            if -0.5 <= px <= 0.5:
                cover = (np.abs(odx - px) <= ohalf) & (np.abs(ody - edge_y) <= ohalf)
                if cover.any() and float(ots[cover].min()) == ts[m]:
                    hit = True
                    break
        if not hit and abs(abs(edge_y - ys[m]) - halfs[m]) == 0.0:
            # Degenerate colinear overlap; witness endpoints and midpoint.
            lo = max(-0.5, xs[m] - halfs[m])
            hi = min(0.5, xs[m] + halfs[m])
            if lo <= hi:
                for px in (lo, hi, 0.5 * (lo + hi)):
                    cover = (np.abs(odx - px) <= ohalf) & (np.abs(ody - edge_y) <= ohalf)
                    if cover.any() and float(ots[cover].min()) == ts[m]:
                        hit = True
                        break
        if hit:
            count += 1
    return count


@dataclass(frozen=True)
class TailReport:
    n_values: list[int]
    empirical_tail: list[float]
    analytic_bound: list[float]
    trials: int
    lam: float
    seed: int

    def csv_rows(self) -> list[str]:
        rows = ["n,empirical,bound,trials,lambda,seed"]
        for n, emp, bnd in zip(self.n_values, self.empirical_tail, self.analytic_bound):
            rows.append(f"{n},{emp!r},{bnd!r},{self.trials},{self.lam!r},{self.seed}")
        return rows


def boundary_visible_tail(lam: float, trials: int, seed: int,
                          n_values: Sequence[int] = tuple(range(1, 11))) -> TailReport:
    """Empirical tail of the corner-restricted visible count against the
    analytic chain bound, with the probe inserted at mid-horizon."""
    if lam < 0.0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    window = WindowSpec.rectangle(-1.5, 1.5, -1.5, 1.5)
    counts = np.zeros(trials, np.int64)
    for i in range(trials):
        proc = sample_process(window, 0.5, FixedHorizon(lam),
                              derived_seed(seed, STREAM_TAIL, i), margin=0.0)
        counts[i] = corner_visible_count(proc)
    n_values = list(n_values)
    empirical = [float(np.count_nonzero(counts >= n) / trials) for n in n_values]
    bounds = [chain_tail_bound(n, lam) for n in n_values]
    return TailReport(n_values=n_values, empirical_tail=empirical,
                      analytic_bound=bounds, trials=trials, lam=lam, seed=seed)
