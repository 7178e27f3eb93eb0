"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the production code paths: flood fill
instead of union-find, dense sampling instead of breakpoint enumeration,
skeleton distances instead of strip decompositions, and grid quadrature
instead of closed forms.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np


# ---------------------------------------------------------------------------
# Instability cross membership

def skeleton_l_inf_distance(dx: float, dy: float) -> float:
    """L-inf distance from (dx, dy) to the axis cross
    ({0,+-1} x [-2,2]) u ([-2,2] x {0,+-1})."""
    best = math.inf
    for k in (-1.0, 0.0, 1.0):
        # vertical segment {k} x [-2, 2]
        best = min(best, max(abs(dx - k), max(0.0, abs(dy) - 2.0)))
        # horizontal segment [-2, 2] x {k}
        best = min(best, max(abs(dy - k), max(0.0, abs(dx) - 2.0)))
    return best


def skeleton_member(dx: float, dy: float, delta0: float) -> bool:
    return skeleton_l_inf_distance(dx, dy) <= delta0


def rasterized_minkowski_member(dx: float, dy: float, delta0: float,
                                resolution: float = 1e-3) -> bool:
    """Membership via explicit skeleton sampling (Minkowski sum with the
    delta0 box).  Only trustworthy for points farther than the resolution
    from the region boundary."""
    n = int(round(4.0 / resolution)) + 1
    coords = np.linspace(-2.0, 2.0, n)
    for k in (-1.0, 0.0, 1.0):
        if np.any((np.abs(dx - k) <= delta0) & (np.abs(dy - coords) <= delta0)):
            return True
        if np.any((np.abs(dy - k) <= delta0) & (np.abs(dx - coords) <= delta0)):
            return True
    return False


# ---------------------------------------------------------------------------
# Grid labeling by flood fill

def flood_fill_labels(values: np.ndarray, color: int, adjacency: int) -> np.ndarray:
    """BFS labeling; labels are assigned in scan order starting from 1."""
    nx, ny = values.shape
    labels = np.zeros((nx, ny), np.int32)
    if adjacency == 4:
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
    else:
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))
    current = 0
    for i in range(nx):
        for j in range(ny):
            if values[i, j] != color or labels[i, j] != 0:
                continue
            current += 1
            queue = deque([(i, j)])
            labels[i, j] = current
            while queue:
                a, b = queue.popleft()
                for da, db in steps:
                    na, nb = a + da, b + db
                    if 0 <= na < nx and 0 <= nb < ny and labels[na, nb] == 0 \
                            and values[na, nb] == color:
                        labels[na, nb] = current
                        queue.append((na, nb))
    return labels


def partition_of(labels: np.ndarray) -> set[frozenset]:
    out = {}
    nx, ny = labels.shape
    for i in range(nx):
        for j in range(ny):
            if labels[i, j] > 0:
                out.setdefault(labels[i, j], set()).add((i, j))
    return {frozenset(v) for v in out.values()}


# ---------------------------------------------------------------------------
# Dead-leaves pointwise color by direct scan (no spatial hash, no painter)

def brute_color(leaves, u, period: float = 0.0):
    """leaves: iterable of (x, y, t, color, half).  Returns (height, color)."""
    best_t = math.inf
    best_c = 0
    conflict = False
    for (x, y, t, c, half) in leaves:
        ddx = abs(x - u[0])
        ddy = abs(y - u[1])
        if period > 0.0:
            ddx = min(ddx, period - ddx)
            ddy = min(ddy, period - ddy)
        if ddx <= half and ddy <= half:
            if t < best_t:
                best_t, best_c, conflict = t, c, False
            elif t == best_t and c != best_c:
                conflict = True
    if conflict or best_t == math.inf:
        return (-2.0, 0)
    return (best_t, best_c)


# ---------------------------------------------------------------------------
# Boundary visibility by dense sampling

def _leaf_tuples(proc):
    return list(zip(proc.xs, proc.ys, proc.ts, proc.colors, proc.half_sides))


def dense_boundary_visible(proc, x, x_ref, samples_per_segment: int = 10_000) -> bool:
    """Sampled version of the corner/shared-boundary visibility predicate."""
    from confetti.geometry import Point2, Square, boundary_overlap, min_image_delta, \
        square_contains

    d = min_image_delta(x.center, x_ref.center, proc.window)
    sq_ref = Square(Point2(0.0, 0.0), x_ref.half_side)
    sq_x = Square(Point2(d.x, d.y), x.half_side)
    shared = boundary_overlap(sq_ref, sq_x)
    if not shared:
        return False
    dx = proc.xs - x_ref.center.x
    dy = proc.ys - x_ref.center.y
    if proc.window.is_torus:
        p = proc.window.period
        dx = dx - p * np.ceil(dx / p - 0.5)
        dy = dy - p * np.ceil(dy / p - 0.5)
    local = list(zip(dx, dy, proc.ts, proc.colors, proc.half_sides))
    for corner in sq_ref.corners():
        if not square_contains(sq_x, corner, mode="closed"):
            continue
        covering = [(lx, ly, t, c, half) for (lx, ly, t, c, half) in local
                    if abs(lx - corner.x) < half and abs(ly - corner.y) < half]
        if not covering:
            continue
        for (a, b) in shared:
            for w in np.linspace(0.0, 1.0, samples_per_segment):
                px = a.x + (b.x - a.x) * w
                py = a.y + (b.y - a.y) * w
                height, _ = brute_color(covering, (px, py))
                if height == x.time:
                    return True
    return False


def brute_bad_components(proc, delta0: float) -> set[frozenset]:
    """Edge-enumeration reference for the instability component partition."""
    from confetti.geometry import min_image_delta

    leaves = proc.leaves
    n = len(leaves)
    cap = 2.0 + delta0

    def pair(i: int, j: int) -> bool:
        d = min_image_delta(leaves[i].center, leaves[j].center, proc.window)
        dt = abs(leaves[i].time - leaves[j].time)
        if max(abs(d.x), abs(d.y), dt) > cap:
            return False
        if skeleton_member(d.x, d.y, delta0):
            return True
        return dt < delta0

    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if pair(i, j)]
    for (i, j) in pairs:
        union(i, j)
    for (i, j) in pairs:
        for a, b in ((i, j), (j, i)):
            keep = [k for k in range(n) if k == a or not pair(a, k)]
            sub = proc.restrict(np.isin(proc.ids, [leaves[k].id for k in keep]))
            for k in keep:
                if k in (a, b):
                    continue
                if dense_boundary_visible(sub, leaves[k], leaves[a],
                                          samples_per_segment=2000):
                    union(a, k)
                    union(b, k)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(leaves[i].id)
    return {frozenset(g) for g in groups.values()}


# ---------------------------------------------------------------------------
# Unstable-pair first moment by grid quadrature

def grid_pair_first_moment(a: float, b: float, T: float, delta0: float,
                           resolution: float = 1e-3) -> float:
    """Midpoint quadrature of the covolume-weighted instability indicator."""
    c = 2.0 + delta0

    def axis(length, bound):
        n = int(round(2.0 * bound / resolution))
        x = (np.arange(n) + 0.5) * resolution - bound
        return x, np.maximum(0.0, length - np.abs(x)) * resolution

    x, wx = axis(a, c)
    y, wy = axis(b, c)
    # spatial integral over the cross region (2-d, chunked)
    i_cross = 0.0
    chunk = 512
    for lo in range(0, x.size, chunk):
        xs = x[lo:lo + chunk, None]
        dist = np.full((xs.shape[0], y.size), np.inf)
        for k in (-1.0, 0.0, 1.0):
            dist = np.minimum(dist, np.maximum(np.abs(xs - k),
                                               np.maximum(0.0, np.abs(y)[None, :] - 2.0)))
            dist = np.minimum(dist, np.maximum(np.abs(y[None, :] - k),
                                               np.maximum(0.0, np.abs(xs) - 2.0)))
        member = dist <= delta0
        i_cross += float((wx[lo:lo + chunk, None] * wy[None, :] * member).sum())
    s_cap_2d = float(wx.sum()) * float(wy.sum())

    def time_integral(bound):
        n = int(round(2.0 * bound / 1e-6))
        tau = (np.arange(n) + 0.5) * 1e-6 - bound
        return float((np.maximum(0.0, T - np.abs(tau)) * 1e-6).sum())

    st_cap = time_integral(min(c, T))
    st_dlt = time_integral(min(delta0, T))
    return 0.5 * (i_cross * (st_cap - st_dlt) + s_cap_2d * st_dlt)
