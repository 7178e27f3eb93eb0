"""Axis-aligned square geometry, torus metric and the spatial instability region."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Square:
    """Axis-aligned square given by its center and half side length."""

    center: Point2
    half_side: float = 0.5

    def __post_init__(self):
        if not (self.half_side > 0.0 and math.isfinite(self.half_side)):
            raise ValueError(f"half_side must be positive and finite, got {self.half_side}")

    @property
    def x_interval(self) -> tuple[float, float]:
        return (self.center.x - self.half_side, self.center.x + self.half_side)

    @property
    def y_interval(self) -> tuple[float, float]:
        return (self.center.y - self.half_side, self.center.y + self.half_side)

    def corners(self) -> list[Point2]:
        x0, x1 = self.x_interval
        y0, y1 = self.y_interval
        return [Point2(x0, y0), Point2(x1, y0), Point2(x1, y1), Point2(x0, y1)]


@dataclass(frozen=True)
class WindowSpec:
    """Simulation domain: a plane rectangle or a square torus.

    Rectangles carry explicit bounds (x0, x1, y0, y1).  A torus is the square
    [0, period)^2 with opposite edges glued; the period must exceed 2 so a
    unit leaf can never wrap onto itself.
    """

    kind: str  # "rectangle" | "torus"
    bounds: tuple[float, float, float, float] | None = None
    period: float | None = None

    def __post_init__(self):
        if self.kind == "rectangle":
            if self.bounds is None:
                raise ValueError("rectangle window needs bounds")
            x0, x1, y0, y1 = self.bounds
            if not (x1 > x0 and y1 > y0):
                raise ValueError(f"rectangle bounds must have positive extent, got {self.bounds}")
        elif self.kind == "torus":
            if self.period is None or not self.period > 2.0:
                raise ValueError(f"torus period must exceed 2, got {self.period}")
        else:
            raise ValueError(f"unknown window kind {self.kind!r}")

    @classmethod
    def rectangle(cls, x0: float, x1: float, y0: float, y1: float) -> "WindowSpec":
        return cls(kind="rectangle", bounds=(x0, x1, y0, y1))

    @classmethod
    def torus(cls, period: float) -> "WindowSpec":
        return cls(kind="torus", period=period)

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    def extent(self) -> tuple[float, float, float, float]:
        """Bounding box of the domain itself ((0,P,0,P) for a torus)."""
        if self.is_torus:
            return (0.0, self.period, 0.0, self.period)
        return self.bounds

    def area(self) -> float:
        x0, x1, y0, y1 = self.extent()
        return (x1 - x0) * (y1 - y0)


def square_contains(sq: Square, u: Point2, mode: str = "closed") -> bool:
    """Membership of a point in a square; closed uses <=, open uses < on both axes."""
    dx = abs(u[0] - sq.center.x)
    dy = abs(u[1] - sq.center.y)
    if mode == "closed":
        return dx <= sq.half_side and dy <= sq.half_side
    if mode == "open":
        return dx < sq.half_side and dy < sq.half_side
    raise ValueError(f"mode must be 'closed' or 'open', got {mode!r}")


def _wrap_half_open(d: float, period: float) -> float:
    """Reduce d to the interval (-period/2, period/2]."""
    return d - period * math.ceil(d / period - 0.5)


def min_image_delta(u: Point2, v: Point2, window: WindowSpec) -> Point2:
    """Componentwise u - v, reduced to (-period/2, period/2] on a torus."""
    dx = u[0] - v[0]
    dy = u[1] - v[1]
    if window.is_torus:
        p = window.period
        return Point2(_wrap_half_open(dx, p), _wrap_half_open(dy, p))
    return Point2(dx, dy)


def in_unstable_set(d: Point2, delta0: float) -> bool:
    """Test whether a displacement lies in the fattened instability cross.

    The region is the Minkowski sum of the square [-delta0, delta0]^2 with the
    axis cross ({0,+-1} x [-2,2]) u ([-2,2] x {0,+-1}).  Within the enclosing
    box it decomposes into three vertical and three horizontal strips, so
    membership reduces to closed interval tests.
    """
    if not delta0 > 0.0:
        raise ValueError(f"delta0 must be positive, got {delta0}")
    dx, dy = abs(d[0]), abs(d[1])
    arm = 2.0 + delta0
    if dy <= arm and (dx <= delta0 or abs(dx - 1.0) <= delta0):
        return True
    if dx <= arm and (dy <= delta0 or abs(dy - 1.0) <= delta0):
        return True
    return False


Segment = tuple[Point2, Point2]


def _interval_overlap(a0: float, a1: float, b0: float, b1: float) -> tuple[float, float] | None:
    lo = max(a0, b0)
    hi = min(a1, b1)
    if lo <= hi:
        return (lo, hi)
    return None


def _point_on_segment(p: Point2, seg: Segment) -> bool:
    (x0, y0), (x1, y1) = seg
    if x0 == x1:  # vertical
        return p[0] == x0 and min(y0, y1) <= p[1] <= max(y0, y1)
    return p[1] == y0 and min(x0, x1) <= p[0] <= max(x0, x1)


def boundary_overlap(sq1: Square, sq2: Square) -> list[Segment]:
    """Exact intersection of two square boundaries.

    Returns axis-parallel segments, possibly degenerate to points (equal
    endpoints).  Comparisons are exact; generic inputs never produce ties.
    """
    x10, x11 = sq1.x_interval
    y10, y11 = sq1.y_interval
    x20, x21 = sq2.x_interval
    y20, y21 = sq2.y_interval

    segments: list[Segment] = []
    points: list[Point2] = []

    # Parallel vertical edges sharing the same line.
    for xa in (x10, x11):
        for xb in (x20, x21):
            if xa == xb:
                ov = _interval_overlap(y10, y11, y20, y21)
                if ov is not None:
                    segments.append((Point2(xa, ov[0]), Point2(xa, ov[1])))
    # Parallel horizontal edges.
    for ya in (y10, y11):
        for yb in (y20, y21):
            if ya == yb:
                ov = _interval_overlap(x10, x11, x20, x21)
                if ov is not None:
                    segments.append((Point2(ov[0], ya), Point2(ov[1], ya)))
    # Perpendicular crossings: vertical edge of one against horizontal edge of the other.
    for xa in (x10, x11):
        for yb in (y20, y21):
            if x20 <= xa <= x21 and y10 <= yb <= y11:
                points.append(Point2(xa, yb))
    for xb in (x20, x21):
        for ya in (y10, y11):
            if x10 <= xb <= x11 and y20 <= ya <= y21:
                points.append(Point2(xb, ya))

    # Split proper segments from degenerate ones, drop duplicates, then keep
    # only isolated points that no proper segment already covers.
    proper = []
    seen = set()
    for seg in segments:
        if seg[0] == seg[1]:
            points.append(seg[0])
            continue
        key = (seg[0], seg[1])
        if key not in seen:
            seen.add(key)
            proper.append(seg)
    out = list(proper)
    emitted = set()
    for p in points:
        if p in emitted:
            continue
        if any(_point_on_segment(p, seg) for seg in proper):
            continue
        emitted.add(p)
        out.append((p, p))
    return out
