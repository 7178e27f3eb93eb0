"""Component labeling of color fields and crossing-event detection.

Convention: black (+1) components use 4-adjacency, white (-1) components
8-adjacency.  On a fully two-colored grid these matched adjacencies make
"black horizontal crossing" and "white vertical crossing" mutually exclusive
and exhaustive.  Neutral (0) pixels block both colors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .coloring import ColorField

BLACK_ADJACENCY = 4
WHITE_ADJACENCY = 8


@dataclass(frozen=True)
class LabelGrid:
    labels: np.ndarray  # int32, 0 = not target color
    component_sizes: dict[int, int]

    @property
    def n_components(self) -> int:
        return len(self.component_sizes)


@dataclass(frozen=True)
class CrossingReport:
    black_horizontal: bool
    white_vertical: bool
    black_components: int
    largest_black: int


def _values_of(field) -> np.ndarray:
    return field.values if isinstance(field, ColorField) else np.asarray(field, np.int8)


def label_values(values: np.ndarray, color: int, adjacency: int = 4) -> LabelGrid:
    if color not in (-1, 1):
        raise ValueError(f"color must be +1 or -1, got {color}")
    if adjacency not in (4, 8):
        raise ValueError(f"adjacency must be 4 or 8, got {adjacency}")
    labels, sizes = _kernels.label_grid(np.ascontiguousarray(values, np.int8),
                                        np.int8(color), adjacency == 8)
    return LabelGrid(labels=labels,
                     component_sizes={c: int(sizes[c]) for c in range(1, sizes.shape[0])})


def label_components(field, color: int, adjacency: int = 4) -> LabelGrid:
    """Connected labeling of the pixels of one color under 4- or 8-adjacency."""
    return label_values(_values_of(field), color, adjacency)


def _touch_sets(labels: np.ndarray, axis: int) -> bool:
    if axis == 0:  # horizontal: leftmost and rightmost columns
        first, last = labels[0, :], labels[-1, :]
    else:  # vertical: bottom and top rows
        first, last = labels[:, 0], labels[:, -1]
    a = np.unique(first[first > 0])
    b = np.unique(last[last > 0])
    return bool(np.intersect1d(a, b, assume_unique=True).size > 0)


def horizontal_crossing(field, color: int, adjacency: int = 4) -> bool:
    """Some component of the color touches both the left and right pixel columns."""
    grid = label_components(field, color, adjacency)
    return _touch_sets(grid.labels, axis=0)


def vertical_crossing(field, color: int, adjacency: int = 4) -> bool:
    """Some component of the color touches both the bottom and top pixel rows."""
    grid = label_components(field, color, adjacency)
    return _touch_sets(grid.labels, axis=1)


def crossing_report(field, black_adjacency: int = BLACK_ADJACENCY,
                    white_adjacency: int = WHITE_ADJACENCY) -> CrossingReport:
    """Black horizontal and white vertical crossings from one labeling pass each."""
    values = _values_of(field)
    black = label_values(values, 1, black_adjacency)
    white = label_values(values, -1, white_adjacency)
    sizes = black.component_sizes
    return CrossingReport(
        black_horizontal=_touch_sets(black.labels, axis=0),
        white_vertical=_touch_sets(white.labels, axis=1),
        black_components=len(sizes),
        largest_black=max(sizes.values()) if sizes else 0,
    )


CROSSING_CSV_HEADER = "trial_id,seed,p,s,rho,h,black_h,white_v,n_black_components,largest_black"


def crossing_csv_row(report: CrossingReport, trial_id: int, seed: int, p: float,
                     s: float, rho: float, h: float) -> str:
    return (f"{trial_id},{seed},{p!r},{s!r},{rho!r},{h!r},"
            f"{int(report.black_horizontal)},{int(report.white_vertical)},"
            f"{report.black_components},{report.largest_black}")
