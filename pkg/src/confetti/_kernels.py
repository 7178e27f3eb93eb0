"""Numba kernels for the hot loops: occlusion painting, labeling, point queries."""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def paint_first_wins(values, heights, ids_grid, x0, y0, h,
                     xs, ys, ts, colors, halfs, leaf_ids,
                     period, remaining, track_heights, track_ids):
    """Paint leaves in the given (time) order with first-write-wins.

    values is an int8 grid indexed [ix, iy]; pixel (i, j) sits at
    (x0 + (i+0.5)h, y0 + (j+0.5)h).  A pixel is unwritten while 0.
    period > 0 enables torus wrapping via shifted images.  Returns the new
    count of unwritten pixels and the index of the leaf that completed
    coverage (-1 if coverage was not reached).
    """
    nx, ny = values.shape
    n = xs.shape[0]
    cover_idx = -1
    if period > 0.0:
        shifts = np.array([0.0, -period, period])
    else:
        shifts = np.array([0.0])
    for m in range(n):
        if remaining == 0:
            break
        zx = xs[m]
        zy = ys[m]
        hs = halfs[m]
        t = ts[m]
        c = colors[m]
        lid = leaf_ids[m]
        for a in range(shifts.shape[0]):
            cx = zx + shifts[a]
            i_lo = int(np.ceil((cx - hs - x0) / h - 0.5))
            i_hi = int(np.floor((cx + hs - x0) / h - 0.5))
            if i_lo < 0:
                i_lo = 0
            if i_hi > nx - 1:
                i_hi = nx - 1
            if i_lo > i_hi:
                continue
            for b in range(shifts.shape[0]):
                cy = zy + shifts[b]
                j_lo = int(np.ceil((cy - hs - y0) / h - 0.5))
                j_hi = int(np.floor((cy + hs - y0) / h - 0.5))
                if j_lo < 0:
                    j_lo = 0
                if j_hi > ny - 1:
                    j_hi = ny - 1
                if j_lo > j_hi:
                    continue
                for i in range(i_lo, i_hi + 1):
                    for j in range(j_lo, j_hi + 1):
                        if values[i, j] == 0:
                            values[i, j] = c
                            if track_heights:
                                heights[i, j] = t
                            if track_ids:
                                ids_grid[i, j] = lid
                            remaining -= 1
        if remaining == 0:
            cover_idx = m
    return remaining, cover_idx


@nb.njit(cache=True, nogil=True)
def _find_root(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:  # path compression
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@nb.njit(cache=True, nogil=True)
def label_grid(values, color, eight):
    """Union-find connected labeling of pixels equal to color.

    Returns (labels, sizes): labels is int32 with 0 on non-target pixels and
    component ids 1..k elsewhere; sizes[c] is the pixel count of component c
    (sizes[0] unused).
    """
    nx, ny = values.shape
    parent = np.full(nx * ny, -1, np.int32)
    for i in range(nx):
        base = i * ny
        for j in range(ny):
            if values[i, j] != color:
                continue
            idx = base + j
            parent[idx] = idx
            if j > 0 and parent[idx - 1] >= 0:
                ra = _find_root(parent, idx)
                rb = _find_root(parent, idx - 1)
                if ra != rb:
                    parent[rb] = ra
            if i > 0:
                up = idx - ny
                if parent[up] >= 0:
                    ra = _find_root(parent, idx)
                    rb = _find_root(parent, up)
                    if ra != rb:
                        parent[rb] = ra
                if eight:
                    if j > 0 and parent[up - 1] >= 0:
                        ra = _find_root(parent, idx)
                        rb = _find_root(parent, up - 1)
                        if ra != rb:
                            parent[rb] = ra
                    if j < ny - 1 and parent[up + 1] >= 0:
                        ra = _find_root(parent, idx)
                        rb = _find_root(parent, up + 1)
                        if ra != rb:
                            parent[rb] = ra
    labels = np.zeros((nx, ny), np.int32)
    root_label = np.zeros(nx * ny, np.int32)
    ncomp = 0
    for i in range(nx):
        base = i * ny
        for j in range(ny):
            idx = base + j
            if parent[idx] < 0:
                continue
            r = _find_root(parent, idx)
            if root_label[r] == 0:
                ncomp += 1
                root_label[r] = ncomp
            labels[i, j] = root_label[r]
    sizes = np.zeros(ncomp + 1, np.int64)
    for i in range(nx):
        for j in range(ny):
            if labels[i, j] > 0:
                sizes[labels[i, j]] += 1
    return labels, sizes


@nb.njit(cache=True, nogil=True)
def query_colors(qx, qy, cell_ptr, cell_items, xs, ys, ts, colors, halfs,
                 ncx, ncy, cell_side, origin_x, origin_y, period, reach):
    """Pointwise occlusion color at each query point via a uniform cell hash.

    Applies the minimal-arrival rule with the color-conflict tie convention
    (conflicting colors at the minimal time yield 0).
    """
    nq = qx.shape[0]
    out = np.zeros(nq, np.int8)
    half_p = 0.5 * period
    for q in range(nq):
        ux = qx[q]
        uy = qy[q]
        ci = int(np.floor((ux - origin_x) / cell_side))
        cj = int(np.floor((uy - origin_y) / cell_side))
        best_t = np.inf
        best_c = np.int8(0)
        conflict = False
        for di in range(-reach, reach + 1):
            ii = ci + di
            if period > 0.0:
                ii = ii % ncx
            elif ii < 0 or ii >= ncx:
                continue
            for dj in range(-reach, reach + 1):
                jj = cj + dj
                if period > 0.0:
                    jj = jj % ncy
                elif jj < 0 or jj >= ncy:
                    continue
                cell = ii * ncy + jj
                for ptr in range(cell_ptr[cell], cell_ptr[cell + 1]):
                    m = cell_items[ptr]
                    ddx = abs(xs[m] - ux)
                    ddy = abs(ys[m] - uy)
                    if period > 0.0:
                        if ddx > half_p:
                            ddx = period - ddx
                        if ddy > half_p:
                            ddy = period - ddy
                    hs = halfs[m]
                    if ddx <= hs and ddy <= hs:
                        t = ts[m]
                        if t < best_t:
                            best_t = t
                            best_c = colors[m]
                            conflict = False
                        elif t == best_t and colors[m] != best_c:
                            conflict = True
        if conflict or best_t == np.inf:
            out[q] = 0
        else:
            out[q] = best_c
    return out


@nb.njit(cache=True, nogil=True)
def min_boundary_gap(qx, qy, cell_ptr, cell_items, xs, ys, halfs,
                     ncx, ncy, cell_side, origin_x, origin_y, period, reach):
    """Distance from each query point to the nearest nearby leaf edge line.

    For every leaf in the scanned neighbourhood the gap is how close either
    coordinate offset comes to the leaf half side; small gaps flag points
    sitting on (or nearly on) a leaf boundary.
    """
    nq = qx.shape[0]
    out = np.full(nq, np.inf)
    half_p = 0.5 * period
    for q in range(nq):
        ux = qx[q]
        uy = qy[q]
        ci = int(np.floor((ux - origin_x) / cell_side))
        cj = int(np.floor((uy - origin_y) / cell_side))
        best = np.inf
        for di in range(-reach, reach + 1):
            ii = ci + di
            if period > 0.0:
                ii = ii % ncx
            elif ii < 0 or ii >= ncx:
                continue
            for dj in range(-reach, reach + 1):
                jj = cj + dj
                if period > 0.0:
                    jj = jj % ncy
                elif jj < 0 or jj >= ncy:
                    continue
                cell = ii * ncy + jj
                for ptr in range(cell_ptr[cell], cell_ptr[cell + 1]):
                    m = cell_items[ptr]
                    ddx = abs(xs[m] - ux)
                    ddy = abs(ys[m] - uy)
                    if period > 0.0:
                        if ddx > half_p:
                            ddx = period - ddx
                        if ddy > half_p:
                            ddy = period - ddy
                    hs = halfs[m]
                    gx = abs(ddx - hs)
                    gy = abs(ddy - hs)
                    if gx < best:
                        best = gx
                    if gy < best:
                        best = gy
        out[q] = best
    return out
