"""Evaluation of the dead-leaves coloring: exact point queries, first-write-wins
rasterization, coverage checks, domination comparison and boundary visibility."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import Point2, Square, WindowSpec, boundary_overlap, min_image_delta, square_contains
from .process import Leaf, LeafProcess

UNDEFINED_HEIGHT = -2.0


@dataclass(frozen=True)
class ColorField:
    """Rasterized coloring on a pixel grid.

    values[i, j] is the pointwise color at the pixel center
    (x0 + (i+0.5) h, y0 + (j+0.5) h); heights and winning leaf ids are
    tracked on demand (sentinels -2 and -1 where undefined).
    """

    region: tuple[float, float, float, float]
    resolution: float
    values: np.ndarray
    heights: np.ndarray | None = None
    leaf_ids: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def pixel_center(self, i: int, j: int) -> Point2:
        x0, _, y0, _ = self.region
        h = self.resolution
        return Point2(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h)


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    uncovered_pixel_count: int
    first_uncovered: tuple[int, int] | None


def grid_shape(region: tuple[float, float, float, float], h: float) -> tuple[int, int]:
    x0, x1, y0, y1 = region
    return (max(1, round((x1 - x0) / h)), max(1, round((y1 - y0) / h)))


# ---------------------------------------------------------------------------
# Exact point queries

def _covering_mask(proc: LeafProcess, u: Point2) -> np.ndarray:
    dx = np.abs(proc.xs - u[0])
    dy = np.abs(proc.ys - u[1])
    if proc.window.is_torus:
        p = proc.window.period
        dx = np.minimum(dx, p - dx)
        dy = np.minimum(dy, p - dy)
    return (dx <= proc.half_sides) & (dy <= proc.half_sides)


def _winning(proc: LeafProcess, u: Point2) -> tuple[float, int, int] | None:
    """(time, color, id) of the visible leaf at u, or None if undefined."""
    mask = _covering_mask(proc, u)
    if not mask.any():
        return None
    ts = proc.ts[mask]
    i = int(np.argmin(ts))
    tmin = ts[i]
    at_min = np.nonzero(ts == tmin)[0]
    colors = proc.colors[mask][at_min]
    if np.unique(colors).size > 1:
        return None
    k = int(np.nonzero(mask)[0][at_min[0]])
    return (float(tmin), int(proc.colors[k]), int(proc.ids[k]))


def height_at(proc: LeafProcess, u: Point2) -> float:
    """Arrival time of the leaf visible at u; -2 when no leaf covers u or the
    minimal-time covering leaves carry conflicting colors."""
    w = _winning(proc, u)
    return UNDEFINED_HEIGHT if w is None else w[0]


def color_at(proc: LeafProcess, u: Point2) -> int:
    """Color of the first leaf covering u (0 exactly when the height is -2)."""
    w = _winning(proc, u)
    return 0 if w is None else w[1]


# ---------------------------------------------------------------------------
# Spatial hash for batch queries

@dataclass(frozen=True)
class _CellHash:
    cell_ptr: np.ndarray
    cell_items: np.ndarray
    ncx: int
    ncy: int
    cell_side: float
    origin_x: float
    origin_y: float
    period: float
    reach: int


def build_cell_hash(proc: LeafProcess) -> _CellHash:
    """Uniform cell hash (cell side about one leaf side) over the process."""
    if proc.window.is_torus:
        period = proc.window.period
        ncx = ncy = max(1, int(math.floor(period)))
        side = period / ncx
        ox = oy = 0.0
        ix = np.floor(proc.xs / side).astype(np.int64) % ncx
        iy = np.floor(proc.ys / side).astype(np.int64) % ncy
    else:
        period = 0.0
        x0, x1, y0, y1 = proc.window.extent()
        ox, oy = x0 - proc.margin, y0 - proc.margin
        side = 1.0
        ncx = max(1, int(math.ceil((x1 + proc.margin - ox) / side)) + 1)
        ncy = max(1, int(math.ceil((y1 + proc.margin - oy) / side)) + 1)
        ix = np.clip(np.floor((proc.xs - ox) / side).astype(np.int64), 0, ncx - 1)
        iy = np.clip(np.floor((proc.ys - oy) / side).astype(np.int64), 0, ncy - 1)
    flat = ix * ncy + iy
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat, minlength=ncx * ncy)
    cell_ptr = np.zeros(ncx * ncy + 1, np.int64)
    np.cumsum(counts, out=cell_ptr[1:])
    max_half = float(proc.half_sides.max()) if len(proc) else 0.5
    reach = int(math.floor(max_half / side)) + 1
    return _CellHash(cell_ptr=cell_ptr, cell_items=order.astype(np.int64),
                     ncx=ncx, ncy=ncy, cell_side=side, origin_x=ox, origin_y=oy,
                     period=period, reach=reach)


def color_many(proc: LeafProcess, points: np.ndarray,
               cell_hash: _CellHash | None = None) -> np.ndarray:
    """Pointwise colors at an (n, 2) array of query points."""
    points = np.asarray(points, np.float64)
    if cell_hash is None:
        cell_hash = build_cell_hash(proc)
    return _kernels.query_colors(
        np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]),
        cell_hash.cell_ptr, cell_hash.cell_items,
        proc.xs, proc.ys, proc.ts, proc.colors, proc.half_sides,
        cell_hash.ncx, cell_hash.ncy, cell_hash.cell_side,
        cell_hash.origin_x, cell_hash.origin_y, cell_hash.period, cell_hash.reach)


def boundary_gap(proc: LeafProcess, points: np.ndarray,
                 cell_hash: _CellHash | None = None) -> np.ndarray:
    """Distance from each point to the nearest nearby leaf edge coordinate."""
    points = np.asarray(points, np.float64)
    if cell_hash is None:
        cell_hash = build_cell_hash(proc)
    return _kernels.min_boundary_gap(
        np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]),
        cell_hash.cell_ptr, cell_hash.cell_items,
        proc.xs, proc.ys, proc.half_sides,
        cell_hash.ncx, cell_hash.ncy, cell_hash.cell_side,
        cell_hash.origin_x, cell_hash.origin_y, cell_hash.period, cell_hash.reach)


# ---------------------------------------------------------------------------
# Rasterization

def rasterize(proc: LeafProcess, region: tuple[float, float, float, float],
              h: float, track_heights: bool = False,
              track_leaf_ids: bool = False) -> ColorField:
    """Paint leaves in time order with first-write-wins onto pixel centers.

    Painting stops once every pixel is written; on a torus each leaf also
    paints its wrapped images.  Assumes strictly increasing arrival times.
    """
    if not h > 0.0:
        raise ValueError(f"resolution must be positive, got {h}")
    nx, ny = grid_shape(region, h)
    values = np.zeros((nx, ny), np.int8)
    heights = np.full((nx, ny), UNDEFINED_HEIGHT) if track_heights else np.empty((0, 0))
    ids_grid = np.full((nx, ny), -1, np.int64) if track_leaf_ids else np.empty((0, 0), np.int64)
    period = proc.window.period if proc.window.is_torus else 0.0
    _kernels.paint_first_wins(values, heights, ids_grid, region[0], region[2], h,
                              proc.xs, proc.ys, proc.ts, proc.colors, proc.half_sides,
                              proc.ids, period, nx * ny, track_heights, track_leaf_ids)
    return ColorField(region=region, resolution=h, values=values,
                      heights=heights if track_heights else None,
                      leaf_ids=ids_grid if track_leaf_ids else None)


def coverage(proc: LeafProcess, region: tuple[float, float, float, float],
             h: float) -> CoverageReport:
    """Covered iff no pixel is left colorless after painting the full process."""
    field = rasterize(proc, region, h)
    zeros = np.argwhere(field.values == 0)
    if zeros.shape[0] == 0:
        return CoverageReport(covered=True, uncovered_pixel_count=0, first_uncovered=None)
    return CoverageReport(covered=False, uncovered_pixel_count=int(zeros.shape[0]),
                          first_uncovered=(int(zeros[0, 0]), int(zeros[0, 1])))


def visible_leaves(proc: LeafProcess, region: tuple[float, float, float, float],
                   h: float) -> set[int]:
    """Ids of leaves winning at least one pixel (resolution-h visibility)."""
    field = rasterize(proc, region, h, track_leaf_ids=True)
    ids = np.unique(field.leaf_ids)
    return {int(v) for v in ids if v >= 0}


def black_dominates(a: ColorField, b: ColorField) -> bool:
    """Pixelwise a >= b; grids must agree exactly."""
    if a.region != b.region or a.resolution != b.resolution or a.shape != b.shape:
        raise ValueError("fields must share region and resolution")
    return bool(np.all(a.values >= b.values))


# ---------------------------------------------------------------------------
# Boundary visibility

def _local_frame(proc: LeafProcess, origin: Point2):
    """Leaf centers as displacements from origin (min-image on a torus)."""
    dx = proc.xs - origin.x
    dy = proc.ys - origin.y
    if proc.window.is_torus:
        p = proc.window.period
        dx = dx - p * np.ceil(dx / p - 0.5)
        dy = dy - p * np.ceil(dy / p - 0.5)
    return dx, dy


def _height_local(dx, dy, ts, colors, halfs, u: Point2) -> float:
    """Height at a local-frame point with the color-conflict tie rule."""
    mask = (np.abs(dx - u.x) <= halfs) & (np.abs(dy - u.y) <= halfs)
    if not mask.any():
        return UNDEFINED_HEIGHT
    tsel = ts[mask]
    tmin = tsel.min()
    cols = colors[mask][tsel == tmin]
    if np.unique(cols).size > 1:
        return UNDEFINED_HEIGHT
    return float(tmin)


def _segment_breakpoints(seg, dx, dy, halfs) -> list[float]:
    """Parameters in (0, len) where leaf edges cross an axis-parallel segment."""
    (ax, ay), (bx, by) = seg
    out = []
    if ax == bx:  # vertical, parameterized by y
        lo, hi = min(ay, by), max(ay, by)
        for k in range(dx.shape[0]):
            if abs(ax - dx[k]) <= halfs[k]:
                for edge in (dy[k] - halfs[k], dy[k] + halfs[k]):
                    if lo < edge < hi:
                        out.append(edge - lo)
    else:  # horizontal, parameterized by x
        lo, hi = min(ax, bx), max(ax, bx)
        for k in range(dx.shape[0]):
            if abs(ay - dy[k]) <= halfs[k]:
                for edge in (dx[k] - halfs[k], dx[k] + halfs[k]):
                    if lo < edge < hi:
                        out.append(edge - lo)
    return out


def _segment_point(seg, offset: float) -> Point2:
    (ax, ay), (bx, by) = seg
    if ax == bx:
        return Point2(ax, min(ay, by) + offset)
    return Point2(min(ax, bx) + offset, ay)


def _segment_length(seg) -> float:
    (ax, ay), (bx, by) = seg
    return abs(bx - ax) + abs(by - ay)


def boundary_visible(proc: LeafProcess, x: Leaf, x_ref: Leaf) -> bool:
    """Whether x realizes the height somewhere on its shared boundary with
    x_ref, witnessed through a corner of x_ref's square.

    A corner P0 of x_ref's square must lie in x's closed square, and some
    point P of the two boundaries' intersection must satisfy
    height(P) = x.time over the leaves whose open square contains P0.
    The height along a shared segment is piecewise constant with breakpoints
    exactly where leaf edges cross it, so endpoints, breakpoints and piece
    midpoints witness every value.
    """
    if x.id == x_ref.id:
        raise ValueError("boundary visibility needs two distinct leaves")
    dx, dy = _local_frame(proc, x_ref.center)
    d = min_image_delta(x.center, x_ref.center, proc.window)
    sq_ref = Square(Point2(0.0, 0.0), x_ref.half_side)
    sq_x = Square(Point2(d.x, d.y), x.half_side)
    shared = boundary_overlap(sq_ref, sq_x)
    if not shared:
        return False
    for corner in sq_ref.corners():
        if not square_contains(sq_x, corner, mode="closed"):
            continue
        # Leaves whose open square contains the corner.
        open_mask = (np.abs(dx - corner.x) < proc.half_sides) & \
                    (np.abs(dy - corner.y) < proc.half_sides)
        if not open_mask.any():
            continue
        odx = dx[open_mask]
        ody = dy[open_mask]
        ots = proc.ts[open_mask]
        ocol = proc.colors[open_mask]
        ohalf = proc.half_sides[open_mask]
        for seg in shared:
            length = _segment_length(seg)
            offsets = {0.0, length}
            brk = sorted(set(_segment_breakpoints(seg, odx, ody, ohalf)))
            offsets.update(brk)
            cuts = [0.0] + brk + [length]
            offsets.update((a + b) / 2.0 for a, b in zip(cuts, cuts[1:]))
            for off in offsets:
                u = _segment_point(seg, off)
                if _height_local(odx, ody, ots, ocol, ohalf, u) == x.time:
                    return True
    return False


# ---------------------------------------------------------------------------
# Field export

def write_ppm(field: ColorField, path: str) -> None:
    """P6 pixmap with black/white/gray for +1/-1/0, top row = highest y."""
    nx, ny = field.shape
    rgb = np.empty((ny, nx, 3), np.uint8)
    vals = field.values.T[::-1, :]  # rows top-down
    rgb[vals == 1] = (0, 0, 0)
    rgb[vals == -1] = (255, 255, 255)
    rgb[vals == 0] = (128, 128, 128)
    with open(path, "wb") as f:
        f.write(f"P6\n{nx} {ny}\n255\n".encode())
        f.write(rgb.tobytes())


def write_text_matrix(field: ColorField, path: str) -> None:
    """Plain text dump, one row of -1/0/1 per line (top row = highest y)."""
    with open(path, "w") as f:
        for row in field.values.T[::-1, :]:
            f.write(" ".join(f"{int(v):2d}" for v in row) + "\n")


def write_svg(proc: LeafProcess, region: tuple[float, float, float, float],
              path: str, scale: float = 40.0) -> None:
    """Vector drawing of the leaves as rectangles.

    Drawn in reverse arrival order so the earliest leaf ends up on top,
    matching the observed-from-below coloring.  Intended for small configs.
    """
    x0, x1, y0, y1 = region
    w = (x1 - x0) * scale
    ht = (y1 - y0) * scale
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" '
             f'height="{ht:.0f}" viewBox="0 0 {w:.6g} {ht:.6g}">',
             f'<rect width="{w:.6g}" height="{ht:.6g}" fill="#808080"/>']
    for i in range(len(proc) - 1, -1, -1):
        cx, cy, hs = proc.xs[i], proc.ys[i], proc.half_sides[i]
        fill = "#000000" if proc.colors[i] == 1 else "#ffffff"
        rx = (cx - hs - x0) * scale
        ry = (y1 - (cy + hs)) * scale
        side = 2 * hs * scale
        lines.append(f'<rect x="{rx:.6g}" y="{ry:.6g}" width="{side:.6g}" '
                     f'height="{side:.6g}" fill="{fill}" stroke="#404040" '
                     f'stroke-width="0.5"/>')
    lines.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
