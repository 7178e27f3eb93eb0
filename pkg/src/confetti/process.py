"""Marked space-time Poisson leaf processes: sampling, perturbation, coupling,
mesh parameters and the cube discretization."""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence, Union

import numpy as np

from . import _kernels
from .geometry import Point2, Square, WindowSpec

DEFAULT_RESOLUTION = 1.0 / 16.0
UNIT_HALF_SIDE = 0.5

# Stream tags for derived per-trial generators; fixed so that scheduling can
# never change which substream a trial consumes.
STREAM_SAMPLE = 0
STREAM_CROSSING = 1
STREAM_THETA = 2
STREAM_FKG = 3
STREAM_RSW = 4
STREAM_DOMINATION = 5
STREAM_PAIRS = 6
STREAM_TAIL = 7
STREAM_COVERAGE = 8


def rng_for(seed: int, tag: int = STREAM_SAMPLE, index: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (master seed, stream tag, index)."""
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=(tag, index))
    return np.random.Generator(np.random.Philox(ss))


def derived_seed(seed: int, tag: int, index: int) -> int:
    """A plain integer seed derived from (master seed, tag, index)."""
    ss = np.random.SeedSequence(seed, spawn_key=(tag, index))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class FixedHorizon:
    T: float

    def __post_init__(self):
        if not self.T >= 0.0:
            raise ValueError(f"fixed horizon must be >= 0, got {self.T}")


@dataclass(frozen=True)
class AdaptiveHorizon:
    """Sample until the window is covered at the given grid resolution, or the
    time cap is reached (the process is then flagged possibly uncovered)."""

    cap: float
    resolution: float = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.cap >= 0.0:
            raise ValueError(f"time cap must be >= 0, got {self.cap}")
        if not self.resolution > 0.0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")


Horizon = Union[FixedHorizon, AdaptiveHorizon]


@dataclass(frozen=True)
class Leaf:
    id: int
    center: Point2
    time: float
    color: int
    half_side: float = UNIT_HALF_SIDE

    def square(self) -> Square:
        return Square(self.center, self.half_side)


@dataclass(frozen=True)
class LeafProcess:
    """A finite, time-sorted leaf configuration plus its sampling provenance.

    Leaf attributes live in parallel numpy arrays sorted by arrival time.
    Sampled processes have strictly increasing times (exact ties are redrawn);
    constructed processes (e.g. the cube coloring) may carry ties, which the
    pointwise queries resolve with the color-conflict rule.
    """

    window: WindowSpec
    margin: float
    p: float
    horizon: Horizon
    seed: int
    ids: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    ts: np.ndarray
    colors: np.ndarray
    half_sides: np.ndarray
    covered: bool | None = None

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    @property
    def leaves(self) -> list[Leaf]:
        return list(self.iter_leaves())

    def iter_leaves(self) -> Iterator[Leaf]:
        for i in range(len(self)):
            yield Leaf(
                id=int(self.ids[i]),
                center=Point2(float(self.xs[i]), float(self.ys[i])),
                time=float(self.ts[i]),
                color=int(self.colors[i]),
                half_side=float(self.half_sides[i]),
            )

    def leaf_by_id(self, leaf_id: int) -> Leaf:
        idx = np.nonzero(self.ids == leaf_id)[0]
        if idx.size == 0:
            raise ValueError(f"no leaf with id {leaf_id}")
        i = int(idx[0])
        return Leaf(int(self.ids[i]), Point2(float(self.xs[i]), float(self.ys[i])),
                    float(self.ts[i]), int(self.colors[i]), float(self.half_sides[i]))

    def with_flipped_marks(self) -> "LeafProcess":
        """The same configuration with every mark negated (exact duality tool)."""
        return replace(self, colors=(-self.colors).astype(np.int8), p=1.0 - self.p)

    def restrict(self, mask: np.ndarray) -> "LeafProcess":
        return replace(self, ids=self.ids[mask], xs=self.xs[mask], ys=self.ys[mask],
                       ts=self.ts[mask], colors=self.colors[mask],
                       half_sides=self.half_sides[mask])

    def same_configuration(self, other: "LeafProcess") -> bool:
        return (np.array_equal(self.ids, other.ids)
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.ys, other.ys)
                and np.array_equal(self.ts, other.ts)
                and np.array_equal(self.colors, other.colors)
                and np.array_equal(self.half_sides, other.half_sides))


def from_leaves(window: WindowSpec, leaves: Sequence[Leaf], p: float = 0.5,
                margin: float = 0.0, seed: int = 0) -> LeafProcess:
    """Build a process from explicit leaves (test and demo constructor)."""
    order = sorted(range(len(leaves)), key=lambda i: leaves[i].time)
    ids = np.array([leaves[i].id for i in order], np.int64)
    xs = np.array([leaves[i].center.x for i in order], np.float64)
    ys = np.array([leaves[i].center.y for i in order], np.float64)
    ts = np.array([leaves[i].time for i in order], np.float64)
    colors = np.array([leaves[i].color for i in order], np.int8)
    halfs = np.array([leaves[i].half_side for i in order], np.float64)
    if np.any((colors != 1) & (colors != -1)):
        raise ValueError("leaf colors must be +1 or -1")
    if np.any(ts < 0.0):
        raise ValueError("leaf times must be non-negative")
    T = float(ts[-1]) if len(ts) else 0.0
    return LeafProcess(window=window, margin=margin, p=p, horizon=FixedHorizon(T),
                       seed=seed, ids=ids, xs=xs, ys=ys, ts=ts, colors=colors,
                       half_sides=halfs, covered=None)


def default_margin(window: WindowSpec) -> float:
    # Half side of the largest (unit) leaf on rectangles; a torus needs no halo.
    return 0.0 if window.is_torus else UNIT_HALF_SIDE


def _sampling_box(window: WindowSpec, margin: float) -> tuple[float, float, float, float]:
    x0, x1, y0, y1 = window.extent()
    if window.is_torus:
        return (x0, x1, y0, y1)
    return (x0 - margin, x1 + margin, y0 - margin, y1 + margin)


def _strictify_times(ts: np.ndarray, lo: float, hi: float, rng: np.random.Generator) -> np.ndarray:
    """Sort times ascending and redraw exact duplicates until strict."""
    ts = np.sort(ts)
    while ts.size > 1:
        dup = np.nonzero(np.diff(ts) == 0.0)[0]
        if dup.size == 0:
            break
        ts[dup + 1] = lo + (hi - lo) * rng.random(dup.size)
        ts = np.sort(ts)
    return ts


def _draw_marks(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    # Marks are drawn by thresholding one uniform stream against p.
    u = rng.random(n)
    return np.where(u < p, 1, -1).astype(np.int8)


def _sample_fixed(window: WindowSpec, p: float, T: float, seed: int,
                  margin: float) -> LeafProcess:
    rng = rng_for(seed)
    bx0, bx1, by0, by1 = _sampling_box(window, margin)
    volume = (bx1 - bx0) * (by1 - by0) * T
    n = int(rng.poisson(volume)) if volume > 0.0 else 0
    ts = _strictify_times(T * rng.random(n), 0.0, T, rng)
    xs = bx0 + (bx1 - bx0) * rng.random(n)
    ys = by0 + (by1 - by0) * rng.random(n)
    colors = _draw_marks(rng, n, p)
    ids = np.arange(n, dtype=np.int64)
    halfs = np.full(n, UNIT_HALF_SIDE)
    return LeafProcess(window=window, margin=margin, p=p, horizon=FixedHorizon(T),
                       seed=seed, ids=ids, xs=xs, ys=ys, ts=ts, colors=colors,
                       half_sides=halfs, covered=None)


_ADAPTIVE_SLAB = 4.0


def _sample_adaptive(window: WindowSpec, p: float, horizon: AdaptiveHorizon, seed: int,
                     margin: float, want_field: bool):
    """Sample time slabs and paint until the window grid is covered.

    Returns (process, values) where values is the painted color grid of the
    window at the horizon's resolution (None unless want_field).
    """
    rng = rng_for(seed)
    bx0, bx1, by0, by1 = _sampling_box(window, margin)
    wx0, wx1, wy0, wy1 = window.extent()
    h = horizon.resolution
    nx = max(1, round((wx1 - wx0) / h))
    ny = max(1, round((wy1 - wy0) / h))
    values = np.zeros((nx, ny), np.int8)
    dummy_f = np.empty((0, 0), np.float64)
    dummy_i = np.empty((0, 0), np.int64)
    period = window.period if window.is_torus else 0.0
    remaining = nx * ny
    area = (bx1 - bx0) * (by1 - by0)

    chunks = []
    t_done = 0.0
    prev_last = -1.0
    covered = False
    while t_done < horizon.cap and not covered:
        dt = min(_ADAPTIVE_SLAB, horizon.cap - t_done)
        n = int(rng.poisson(area * dt))
        ts = _strictify_times(t_done + dt * rng.random(n), t_done, t_done + dt, rng)
        while ts.size and ts[0] == prev_last:  # tie across slab boundary
            ts[0] = t_done + dt * rng.random()
            ts = np.sort(ts)
        xs = bx0 + (bx1 - bx0) * rng.random(n)
        ys = by0 + (by1 - by0) * rng.random(n)
        colors = _draw_marks(rng, n, p)
        remaining, cover_idx = _kernels.paint_first_wins(
            values, dummy_f, dummy_i, wx0, wy0, h,
            xs, ys, ts, colors, np.full(n, UNIT_HALF_SIDE), np.zeros(n, np.int64),
            period, remaining, False, False)
        if remaining == 0:
            covered = True
            keep = cover_idx + 1
            chunks.append((xs[:keep], ys[:keep], ts[:keep], colors[:keep]))
        else:
            chunks.append((xs, ys, ts, colors))
        if n:
            prev_last = ts[-1] if not covered else ts[cover_idx]
        t_done += dt

    if chunks:
        xs = np.concatenate([c[0] for c in chunks])
        ys = np.concatenate([c[1] for c in chunks])
        ts = np.concatenate([c[2] for c in chunks])
        colors = np.concatenate([c[3] for c in chunks]).astype(np.int8)
    else:
        xs = ys = ts = np.empty(0, np.float64)
        colors = np.empty(0, np.int8)
    n = xs.shape[0]
    proc = LeafProcess(window=window, margin=margin, p=p, horizon=horizon, seed=seed,
                       ids=np.arange(n, dtype=np.int64), xs=xs, ys=ys, ts=ts,
                       colors=colors, half_sides=np.full(n, UNIT_HALF_SIDE),
                       covered=covered)
    return proc, (values if want_field else None)


def sample_process(window: WindowSpec, p: float, horizon: Horizon, seed: int,
                   margin: float | None = None) -> LeafProcess:
    """Sample an independently marked homogeneous Poisson leaf process.

    Centers are uniform on the window extended by the sampling halo, times
    uniform on the horizon, marks +1 with probability p.  Deterministic given
    (window, p, horizon, seed, margin).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if margin is None:
        margin = default_margin(window)
    if margin < 0.0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    if isinstance(horizon, FixedHorizon):
        return _sample_fixed(window, p, horizon.T, seed, margin)
    if isinstance(horizon, AdaptiveHorizon):
        proc, _ = _sample_adaptive(window, p, horizon, seed, margin, want_field=False)
        return proc
    raise ValueError(f"unknown horizon {horizon!r}")


def economical_horizon(s: int, variant: str = "torus", c: float = 50.0) -> float:
    """Truncation horizon that suffices once the window is fully covered.

    torus: 50 * floor(ln s); rectangle: c * ln s.  The torus value is 0 for
    s = 2, so torus runs must use s >= 3.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if variant == "torus":
        return 50.0 * math.floor(math.log(s))
    if variant == "rectangle":
        return c * math.log(s)
    raise ValueError(f"variant must be 'torus' or 'rectangle', got {variant!r}")


def perturb(proc: LeafProcess, tol: float | Sequence[float],
            limit: float = 0.25) -> LeafProcess:
    """Delay and shrink black leaves, advance and enlarge white ones.

    tol is a single tolerance or one per leaf (in time order).  Each black
    leaf moves to t + tol with side 1 - 2 tol, each white one to t - tol with
    side 1 + 2 tol.  Tolerances must satisfy 0 <= tol < limit; the default
    limit 1/4 keeps black sides above 1/2.  Advanced times may go negative
    and are kept as-is.  Ids are preserved; leaves are re-sorted by time.
    """
    n = len(proc)
    if not np.all(proc.half_sides == UNIT_HALF_SIDE):
        raise ValueError("perturbation is defined for unit-leaf processes")
    d = np.asarray(tol, np.float64)
    if d.ndim == 0:
        d = np.full(n, float(d))
    elif d.shape != (n,):
        raise ValueError(f"need one tolerance per leaf ({n}), got shape {d.shape}")
    if np.any(d < 0.0) or np.any(d >= limit):
        raise ValueError(f"perturbation tolerances must lie in [0, {limit})")
    ts = proc.ts + proc.colors * d
    halfs = (1.0 - 2.0 * proc.colors * d) / 2.0
    order = np.argsort(ts, kind="stable")
    return replace(proc, ids=proc.ids[order], xs=proc.xs[order], ys=proc.ys[order],
                   ts=ts[order], colors=proc.colors[order], half_sides=halfs[order])


def natural_coupling(window: WindowSpec, p1: float, p2: float, horizon: Horizon,
                     seed: int, margin: float | None = None
                     ) -> tuple[LeafProcess, LeafProcess]:
    """Two processes sharing positions and times with monotone-coupled marks.

    A leaf black at level p1 stays black at level p2; white leaves upgrade
    with probability (p2 - p1)/(1 - p1), realized by thresholding one shared
    uniform stream at p1 and p2.  The first component is bit-identical to
    sample_process(window, p1, horizon, seed).
    """
    if not 0.0 <= p1 <= p2 <= 1.0:
        raise ValueError(f"need 0 <= p1 <= p2 <= 1, got p1={p1}, p2={p2}")
    proc1 = sample_process(window, p1, horizon, seed, margin)
    # Regenerate the shared mark uniforms by replaying the same substream.
    proc2 = sample_process(window, p2, horizon, seed, margin)
    if not (np.array_equal(proc1.xs, proc2.xs) and np.array_equal(proc1.ts, proc2.ts)):
        raise AssertionError("coupled samples diverged; sampling is not seed-stable")
    return proc1, proc2


@dataclass(frozen=True)
class MeshParams:
    """Discretization scales: cube side delta plus the two coarser tolerances
    delta1 = 1/ceil(delta^(-1/2)) and delta2 = sqrt(delta1)."""

    delta: float
    delta1: float
    delta2: float
    gamma: float
    s: int


def mesh_params(s: int, gamma: float) -> MeshParams:
    if s < 2:
        raise ValueError(f"s must be >= 2, got {s}")
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    raw = s ** gamma / 4.0
    snapped = round(raw)
    quarter = snapped if abs(raw - snapped) < 1e-9 and snapped >= 1 else math.ceil(raw)
    m = 4 * int(quarter)  # delta^-1, a positive multiple of 4
    delta = 1.0 / m
    r = math.isqrt(m)
    ceil_sqrt = r if r * r == m else r + 1
    delta1 = 1.0 / ceil_sqrt
    delta2 = math.sqrt(delta1)
    return MeshParams(delta=delta, delta1=delta1, delta2=delta2, gamma=gamma, s=s)


def potential_pair_tolerance(mesh: MeshParams) -> float:
    """Instability tolerance at which center-level pair tests are exact for
    pairs of points known only up to their delta1 cube."""
    return mesh.delta2 + mesh.delta1


def potential_triple_tolerance(mesh: MeshParams) -> float:
    """Sufficient center-level tolerance for cube-level triples."""
    return mesh.delta2 + 2.0 * mesh.delta1


@dataclass(frozen=True)
class DiscreteConfig:
    """States of the space-time cubes: -1 white, 0 neutral, +1 black."""

    delta: float
    lam: float
    grid_dims: tuple[int, int, int]
    states: np.ndarray  # int8, shape grid_dims
    period: float

    def counts(self) -> tuple[int, int, int]:
        white = int(np.count_nonzero(self.states == -1))
        black = int(np.count_nonzero(self.states == 1))
        neutral = self.states.size - white - black
        return white, black, neutral


def discretize(proc: LeafProcess, mesh: MeshParams, lam: float) -> DiscreteConfig:
    """Assign each space-time cube white/black/neutral from the leaf points.

    A cube is white when it contains a white leaf point, black when it
    contains a black one and no white one, neutral otherwise.
    """
    if not proc.window.is_torus:
        raise ValueError("discretization requires a torus window")
    period = proc.window.period
    delta = mesh.delta
    nx = period / delta
    if abs(nx - round(nx)) > 1e-9:
        raise ValueError(f"cube side {delta} does not divide the period {period}")
    nx = ny = int(round(nx))
    if len(proc) and (proc.ts[0] < 0.0 or proc.ts[-1] > lam):
        raise ValueError(f"leaf times must lie in [0, {lam}]")
    nt = int(math.ceil(lam / delta - 1e-9))
    states = np.zeros((nx, ny, nt), np.int8)
    if len(proc):
        ix = np.floor(proc.xs / delta + 0.5).astype(np.int64) % nx
        iy = np.floor(proc.ys / delta + 0.5).astype(np.int64) % ny
        it = np.ceil(proc.ts / delta).astype(np.int64)
        np.clip(it, 1, nt, out=it)
        it -= 1
        black = proc.colors == 1
        states[ix[black], iy[black], it[black]] = 1
        white = ~black
        states[ix[white], iy[white], it[white]] = -1  # white takes precedence
    return DiscreteConfig(delta=delta, lam=lam, grid_dims=(nx, ny, nt),
                          states=states, period=period)


def state_probabilities(p: float, delta: float) -> tuple[float, float, float]:
    """Exact single-cube state law (p_white, p_black, p_neutral).

    p_white = 1 - exp(-d3 (1-p)), p_black = exp(-d3 (1-p)) (1 - exp(-d3 p)),
    p_neutral = exp(-d3) with d3 = delta^3; the three sum to 1 identically.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    d3 = delta ** 3
    p_white = 1.0 - math.exp(-d3 * (1.0 - p))
    p_black = math.exp(-d3 * (1.0 - p)) * (1.0 - math.exp(-d3 * p))
    p_neutral = math.exp(-d3)
    return (p_white, p_black, p_neutral)


def omega_process(cfg: DiscreteConfig) -> LeafProcess:
    """One leaf per non-neutral cube: black cubes give leaves of side
    1 - 2 delta at the cube's upper time face, white cubes leaves of side
    1 + 2 delta advanced by delta.  Times are gridded, so ties are expected."""
    delta = cfg.delta
    ix, iy, it = np.nonzero(cfg.states)
    omega = cfg.states[ix, iy, it].astype(np.float64)
    xs = ix * delta
    ys = iy * delta
    ts = (it + 1) * delta + (omega - 1.0) * delta / 2.0
    halfs = (1.0 - 2.0 * omega * delta) / 2.0
    order = np.argsort(ts, kind="stable")
    n = xs.shape[0]
    return LeafProcess(window=WindowSpec.torus(cfg.period), margin=0.0, p=0.5,
                       horizon=FixedHorizon(cfg.lam), seed=0,
                       ids=np.arange(n, dtype=np.int64),
                       xs=xs[order], ys=ys[order], ts=ts[order],
                       colors=cfg.states[ix, iy, it][order].astype(np.int8),
                       half_sides=halfs[order], covered=None)


# ---------------------------------------------------------------------------
# Serialization

def _horizon_token(h: Horizon) -> str:
    if isinstance(h, FixedHorizon):
        return f"fixed:{h.T!r}"
    return f"adaptive:{h.cap!r}:{h.resolution!r}"


def _parse_horizon(token: str) -> Horizon:
    parts = token.split(":")
    if parts[0] == "fixed":
        return FixedHorizon(float(parts[1]))
    if parts[0] == "adaptive":
        return AdaptiveHorizon(float(parts[1]), float(parts[2]))
    raise ValueError(f"bad horizon token {token!r}")


def _window_token(w: WindowSpec) -> str:
    if w.is_torus:
        return f"torus:{w.period!r}"
    x0, x1, y0, y1 = w.bounds
    return f"rect:{x0!r}:{x1!r}:{y0!r}:{y1!r}"


def _parse_window(token: str) -> WindowSpec:
    parts = token.split(":")
    if parts[0] == "torus":
        return WindowSpec.torus(float(parts[1]))
    if parts[0] == "rect":
        return WindowSpec.rectangle(*(float(v) for v in parts[1:5]))
    raise ValueError(f"bad window token {token!r}")


def save_process_text(proc: LeafProcess, path: str) -> None:
    """Newline-delimited records with a metadata header line."""
    with open(path, "w") as f:
        f.write(f"# confetti-process window={_window_token(proc.window)} "
                f"margin={proc.margin!r} p={proc.p!r} "
                f"horizon={_horizon_token(proc.horizon)} seed={proc.seed} "
                f"covered={proc.covered} n={len(proc)}\n")
        f.write("id,center_x,center_y,time,color,half_side\n")
        for i in range(len(proc)):
            f.write(f"{proc.ids[i]},{proc.xs[i]!r},{proc.ys[i]!r},"
                    f"{proc.ts[i]!r},{proc.colors[i]},{proc.half_sides[i]!r}\n")


def load_process_text(path: str) -> LeafProcess:
    with open(path) as f:
        header = f.readline().strip()
        if not header.startswith("# confetti-process "):
            raise ValueError("not a confetti process file")
        meta = dict(kv.split("=", 1) for kv in header[len("# confetti-process "):].split())
        f.readline()  # column header
        rows = [line.strip().split(",") for line in f if line.strip()]
    n = len(rows)
    ids = np.array([int(r[0]) for r in rows], np.int64)
    xs = np.array([float(r[1]) for r in rows], np.float64)
    ys = np.array([float(r[2]) for r in rows], np.float64)
    ts = np.array([float(r[3]) for r in rows], np.float64)
    colors = np.array([int(r[4]) for r in rows], np.int8)
    halfs = np.array([float(r[5]) for r in rows], np.float64)
    covered = {"True": True, "False": False, "None": None}[meta["covered"]]
    if int(meta["n"]) != n:
        raise ValueError(f"header claims {meta['n']} leaves, file has {n}")
    return LeafProcess(window=_parse_window(meta["window"]), margin=float(meta["margin"]),
                       p=float(meta["p"]), horizon=_parse_horizon(meta["horizon"]),
                       seed=int(meta["seed"]), ids=ids, xs=xs, ys=ys, ts=ts,
                       colors=colors, half_sides=halfs, covered=covered)


_BIN_MAGIC = b"CFTI"


def save_process_binary(proc: LeafProcess, path: str) -> None:
    """Compact little-endian dump for large runs."""
    header = (f"window={_window_token(proc.window)} margin={proc.margin!r} "
              f"p={proc.p!r} horizon={_horizon_token(proc.horizon)} "
              f"seed={proc.seed} covered={proc.covered}").encode()
    with open(path, "wb") as f:
        f.write(_BIN_MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(struct.pack("<q", len(proc)))
        f.write(proc.ids.astype("<i8").tobytes())
        f.write(proc.xs.astype("<f8").tobytes())
        f.write(proc.ys.astype("<f8").tobytes())
        f.write(proc.ts.astype("<f8").tobytes())
        f.write(proc.colors.astype("<i1").tobytes())
        f.write(proc.half_sides.astype("<f8").tobytes())


def load_process_binary(path: str) -> LeafProcess:
    with open(path, "rb") as f:
        if f.read(4) != _BIN_MAGIC:
            raise ValueError("not a confetti binary process file")
        (hlen,) = struct.unpack("<I", f.read(4))
        meta = dict(kv.split("=", 1) for kv in f.read(hlen).decode().split())
        (n,) = struct.unpack("<q", f.read(8))
        ids = np.frombuffer(f.read(8 * n), "<i8").astype(np.int64)
        xs = np.frombuffer(f.read(8 * n), "<f8").astype(np.float64)
        ys = np.frombuffer(f.read(8 * n), "<f8").astype(np.float64)
        ts = np.frombuffer(f.read(8 * n), "<f8").astype(np.float64)
        colors = np.frombuffer(f.read(n), "<i1").astype(np.int8)
        halfs = np.frombuffer(f.read(8 * n), "<f8").astype(np.float64)
    covered = {"True": True, "False": False, "None": None}[meta["covered"]]
    return LeafProcess(window=_parse_window(meta["window"]), margin=float(meta["margin"]),
                       p=float(meta["p"]), horizon=_parse_horizon(meta["horizon"]),
                       seed=int(meta["seed"]), ids=ids, xs=xs, ys=ys, ts=ts,
                       colors=colors, half_sides=halfs, covered=covered)
