"""Monte Carlo estimators and sweep campaigns: crossing probabilities, the
finite-box cluster proxy, critical-point scans, wide-box floors, positive
correlation checks and the cube-coloring domination chain."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import ndtri

from . import connectivity
from .coloring import boundary_gap, build_cell_hash, color_many, coverage, rasterize
from .geometry import WindowSpec
from .process import (AdaptiveHorizon, FixedHorizon, Horizon, LeafProcess,
                      STREAM_CROSSING, STREAM_DOMINATION, STREAM_FKG, STREAM_RSW,
                      STREAM_THETA, _sample_adaptive, derived_seed, economical_horizon,
                      mesh_params, omega_process, discretize, perturb, rng_for,
                      sample_process, DEFAULT_RESOLUTION)

STREAM_SWEEP = 9
STREAM_POINTS = 10

DEFAULT_TIME_CAP = 200.0


# ---------------------------------------------------------------------------
# Estimates

@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo proportion with a 95% Wilson score interval."""

    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    seed: int
    params: dict = field(default_factory=dict)


def wilson_interval(successes: int, trials: int,
                    confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    z = float(ndtri(0.5 + confidence / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials
                                     + z * z / (4.0 * trials * trials))
    return (max(0.0, center - margin), min(1.0, center + margin))


def _make_estimate(successes: int, trials: int, seed: int, **params) -> Estimate:
    lo, hi = wilson_interval(successes, trials)
    return Estimate(p_hat=successes / trials if trials else 0.0, trials=trials,
                    ci_low=lo, ci_high=hi, seed=seed,
                    params={"successes": successes, **params})


def _map_trials(fn, arg_list, workers: int):
    """Order-preserving trial map; results depend only on the arguments."""
    if workers <= 1 or len(arg_list) < 2:
        return [fn(a) for a in arg_list]
    chunk = max(1, len(arg_list) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, arg_list, chunksize=chunk))


# ---------------------------------------------------------------------------
# Crossing probability f(rho, s)

def _crossing_field(p: float, rho: float, s: float, h: float, trial_seed: int,
                    horizon: Horizon | None, cap: float):
    """Color grid of a fresh process on [0, rho s] x [0, s] and its coverage."""
    window = WindowSpec.rectangle(0.0, rho * s, 0.0, s)
    if horizon is None or isinstance(horizon, AdaptiveHorizon):
        hz = horizon if horizon is not None else AdaptiveHorizon(cap, h)
        proc, values = _sample_adaptive(window, p, hz, trial_seed,
                                        margin=0.5, want_field=True)
        return values, bool(proc.covered)
    proc = sample_process(window, p, horizon, trial_seed)
    fld = rasterize(proc, window.extent(), h)
    return fld.values, bool(np.all(fld.values != 0))


def _crossing_trial(args) -> tuple[bool, bool]:
    p, rho, s, h, trial_seed, horizon, cap = args
    values, covered = _crossing_field(p, rho, s, h, trial_seed, horizon, cap)
    crossed = connectivity.horizontal_crossing(values, 1, connectivity.BLACK_ADJACENCY)
    return crossed, covered


def estimate_crossing(p: float, rho: float, s: float, trials: int,
                      h: float = DEFAULT_RESOLUTION, seed: int = 0,
                      workers: int = 1, horizon: Horizon | None = None,
                      cap: float = DEFAULT_TIME_CAP) -> Estimate:
    """Fraction of trials with a black horizontal crossing of [0, rho s] x [0, s].

    Each trial samples a fresh process (adaptive horizon by default) on the
    rectangle with a half-leaf sampling halo and rasterizes at resolution h.
    Deterministic given the seed regardless of worker count.
    """
    if rho < 1.0:
        raise ValueError(f"rho must be >= 1 (transpose the rectangle), got {rho}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    args = [(p, rho, s, h, derived_seed(seed, STREAM_CROSSING, i), horizon, cap)
            for i in range(trials)]
    results = _map_trials(_crossing_trial, args, workers)
    successes = sum(1 for crossed, _ in results if crossed)
    uncovered = sum(1 for _, covered in results if not covered)
    return _make_estimate(successes, trials, seed, p=p, s=s, rho=rho, h=h,
                          uncovered_count=uncovered)


# ---------------------------------------------------------------------------
# Finite-box proxy for the infinite-cluster probability

def _theta_trial(args) -> tuple[bool, bool]:
    p, m, h, trial_seed, cap = args
    window = WindowSpec.rectangle(-m / 2.0, m / 2.0, -m / 2.0, m / 2.0)
    proc, values = _sample_adaptive(window, p, AdaptiveHorizon(cap, h), trial_seed,
                                    margin=0.5, want_field=True)
    nx, ny = values.shape
    i0 = min(nx - 1, int(math.floor(m / (2.0 * h))))
    j0 = min(ny - 1, int(math.floor(m / (2.0 * h))))
    if values[i0, j0] != 1:
        return False, bool(proc.covered)
    grid = connectivity.label_values(values, 1, connectivity.BLACK_ADJACENCY)
    lab = grid.labels[i0, j0]
    ring = np.concatenate([grid.labels[0, :], grid.labels[-1, :],
                           grid.labels[:, 0], grid.labels[:, -1]])
    return bool(np.any(ring == lab)), bool(proc.covered)


def estimate_theta_proxy(p: float, m: int, trials: int, h: float = DEFAULT_RESOLUTION,
                         seed: int = 0, workers: int = 1,
                         cap: float = DEFAULT_TIME_CAP) -> Estimate:
    """Proportion of trials whose origin pixel joins a black component touching
    the boundary of the m-box (failure, not error, when the origin is white)."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    args = [(p, m, h, derived_seed(seed, STREAM_THETA, i), cap) for i in range(trials)]
    results = _map_trials(_theta_trial, args, workers)
    successes = sum(1 for hit, _ in results if hit)
    uncovered = sum(1 for _, covered in results if not covered)
    return _make_estimate(successes, trials, seed, p=p, m=m, h=h,
                          uncovered_count=uncovered)


# ---------------------------------------------------------------------------
# Critical-point sweep

@dataclass(frozen=True)
class SweepResult:
    p_values: list[float]
    s_values: list[int]
    rho: float
    h: float
    trials: int
    seed: int
    table: list[list[Estimate]]  # indexed [s][p]
    crossing_points: dict[int, float | None]


def crossing_point(p_values, p_hats) -> float | None:
    """p at which the monotone-enforced curve reaches 1/2, by interpolation."""
    mono = np.maximum.accumulate(np.asarray(p_hats, float))
    if mono.min() > 0.5 or mono.max() < 0.5:
        return None
    return float(np.interp(0.5, mono, np.asarray(p_values, float)))


def critical_scan(p_list, s_list, trials: int, h: float = DEFAULT_RESOLUTION,
                  seed: int = 0, workers: int = 1) -> SweepResult:
    """Full table of square-crossing estimates over p and s with the per-s
    half-crossing point."""
    p_list = list(p_list)
    s_list = list(s_list)
    if sorted(p_list) != p_list:
        raise ValueError("p_list must be sorted ascending")
    table = []
    points: dict[int, float | None] = {}
    for si, s in enumerate(s_list):
        row = []
        for pi, p in enumerate(p_list):
            cell_seed = derived_seed(seed, STREAM_SWEEP, si * len(p_list) + pi)
            row.append(estimate_crossing(p, 1.0, s, trials, h, cell_seed, workers))
        table.append(row)
        points[s] = crossing_point(p_list, [e.p_hat for e in row])
    return SweepResult(p_values=p_list, s_values=s_list, rho=1.0, h=h, trials=trials,
                       seed=seed, table=table, crossing_points=points)


SWEEP_CSV_HEADER = "p,s,rho,h,trials,successes,p_hat,ci_low,ci_high,seed,uncovered_count"


def sweep_csv_rows(sweep: SweepResult) -> list[str]:
    rows = [SWEEP_CSV_HEADER]
    for si, s in enumerate(sweep.s_values):
        for pi, p in enumerate(sweep.p_values):
            e = sweep.table[si][pi]
            rows.append(f"{p!r},{s},{sweep.rho!r},{sweep.h!r},{e.trials},"
                        f"{e.params['successes']},{e.p_hat!r},{e.ci_low!r},"
                        f"{e.ci_high!r},{e.seed},{e.params['uncovered_count']}")
    return rows


def sweep_to_json(sweep: SweepResult) -> str:
    doc = {
        "p_values": sweep.p_values,
        "s_values": sweep.s_values,
        "rho": sweep.rho,
        "h": sweep.h,
        "trials": sweep.trials,
        "seed": sweep.seed,
        "crossing_points": {str(k): v for k, v in sweep.crossing_points.items()},
        "table": [[asdict(e) for e in row] for row in sweep.table],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def sweep_plot_data(sweep: SweepResult) -> str:
    """Two columns (p, p_hat) per s, in gnuplot-style blocks."""
    blocks = []
    for si, s in enumerate(sweep.s_values):
        lines = [f"# s={s}"]
        for pi, p in enumerate(sweep.p_values):
            lines.append(f"{p!r} {sweep.table[si][pi].p_hat!r}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------------------
# Wide-box crossing floor

@dataclass(frozen=True)
class RswReport:
    rho: float
    estimates: list[Estimate]
    flagged: list[bool]  # true when an estimate's CI lies below the floor
    floor: float


def rsw_check(rho: float, s_list, trials: int, seed: int = 0, p: float = 0.5,
              h: float = DEFAULT_RESOLUTION, workers: int = 1,
              floor: float = 0.02) -> RswReport:
    """Crossing estimates for rho-wide boxes at p; flags evidence against a
    uniform positive lower bound."""
    if not rho > 1.0:
        raise ValueError(f"rho must exceed 1, got {rho}")
    estimates = []
    for i, s in enumerate(s_list):
        cell_seed = derived_seed(seed, STREAM_RSW, i)
        estimates.append(estimate_crossing(p, rho, s, trials, h, cell_seed, workers))
    flagged = [e.ci_high < floor for e in estimates]
    return RswReport(rho=rho, estimates=estimates, flagged=flagged, floor=floor)


# ---------------------------------------------------------------------------
# Positive correlation of overlapping crossings

@dataclass(frozen=True)
class FkgReport:
    p_joint: float
    p_product: float
    sigma: float
    p_a: float
    p_b: float
    trials: int
    seed: int
    params: dict


def _fkg_trial(args) -> tuple[bool, bool]:
    p, s, h, xa, xb, trial_seed, cap = args
    window = WindowSpec.rectangle(0.0, s, 0.0, s)
    _, values = _sample_adaptive(window, p, AdaptiveHorizon(cap, h), trial_seed,
                                 margin=0.5, want_field=True)
    nx = values.shape[0]
    ia0, ia1 = round(xa[0] / h), min(nx, round(xa[1] / h))
    ib0, ib1 = round(xb[0] / h), min(nx, round(xb[1] / h))
    a = connectivity.horizontal_crossing(values[ia0:ia1, :], 1)
    b = connectivity.horizontal_crossing(values[ib0:ib1, :], 1)
    return a, b


def joint_crossing(s: float, interval_a, interval_b, trials: int, p: float = 0.5,
                   h: float = DEFAULT_RESOLUTION, seed: int = 0, workers: int = 1,
                   cap: float = DEFAULT_TIME_CAP):
    """Joint law of two horizontal-crossing events of x-subintervals of one
    sampled field on [0, s]^2; returns per-trial indicator arrays."""
    args = [(p, s, h, tuple(interval_a), tuple(interval_b),
             derived_seed(seed, STREAM_FKG, i), cap) for i in range(trials)]
    results = _map_trials(_fkg_trial, args, workers)
    a = np.array([r[0] for r in results], bool)
    b = np.array([r[1] for r in results], bool)
    return a, b


def fkg_check(s: float, trials: int, seed: int = 0, p: float = 0.5,
              h: float = DEFAULT_RESOLUTION, workers: int = 1) -> FkgReport:
    """Compare P(A and B) with P(A) P(B) for the overlapping crossings
    A of [0, 2s/3] x [0, s] and B of [s/3, s] x [0, s].

    sigma is the standard error of the difference estimator, from the
    linearized per-trial influence values.
    """
    xa = (0.0, 2.0 * s / 3.0)
    xb = (s / 3.0, s)
    a, b = joint_crossing(s, xa, xb, trials, p, h, seed, workers)
    pa = float(a.mean())
    pb = float(b.mean())
    pab = float((a & b).mean())
    infl = (a & b).astype(float) - pb * a.astype(float) - pa * b.astype(float)
    sigma = float(infl.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return FkgReport(p_joint=pab, p_product=pa * pb, sigma=sigma, p_a=pa, p_b=pb,
                     trials=trials, seed=seed,
                     params={"p": p, "s": s, "h": h, "interval_a": xa, "interval_b": xb})


# ---------------------------------------------------------------------------
# Cube-coloring domination chain

@dataclass(frozen=True)
class DominationReport:
    configs_requested: int
    configs_checked: int
    configs_skipped: int
    points_per_config: int
    violations_phi_omega: int
    violations_omega_pert: int
    zero_colors: int
    params: dict

    @property
    def violations(self) -> int:
        return self.violations_phi_omega + self.violations_omega_pert

    @property
    def passed(self) -> bool:
        return self.configs_checked > 0 and self.violations == 0


def _generic_points(rng, n, period, procs, delta, min_gap=1e-9, max_rounds=64):
    """Uniform torus points bounded away from all leaf edges and cube lines."""
    hashes = [build_cell_hash(pr) for pr in procs]
    pts = np.empty((0, 2))
    rounds = 0
    while pts.shape[0] < n and rounds < max_rounds:
        cand = rng.random((2 * (n - pts.shape[0]) + 16, 2)) * period
        ok = np.ones(cand.shape[0], bool)
        for pr, hsh in zip(procs, hashes):
            ok &= boundary_gap(pr, cand, hsh) > min_gap
        grid = cand / delta - 0.5
        gap_grid = np.abs(grid - np.round(grid)) * delta
        ok &= gap_grid.min(axis=1) > min_gap
        pts = np.vstack([pts, cand[ok]])
        rounds += 1
    if pts.shape[0] < n:
        raise RuntimeError("could not draw enough generic sample points")
    return pts[:n]


def domination_check(s: int, gamma: float, configs: int, sample_points: int,
                     seed: int = 0, p: float = 0.5,
                     h: float = DEFAULT_RESOLUTION) -> DominationReport:
    """Verify, at generic points of covered torus configurations, that the
    coloring dominates its cube coloring, which dominates the 2-delta
    perturbation.  Uncovered configurations are skipped and counted.
    """
    if s < 3:
        raise ValueError(f"torus runs need s >= 3, got {s}")
    mesh = mesh_params(s, gamma)
    lam = economical_horizon(s, "torus")
    period = 10.0 * s
    window = WindowSpec.torus(period)
    checked = skipped = v1 = v2 = zeros = 0
    for k in range(configs):
        cfg_seed = derived_seed(seed, STREAM_DOMINATION, k)
        proc = sample_process(window, p, FixedHorizon(lam), cfg_seed)
        if not coverage(proc, window.extent(), h).covered:
            skipped += 1
            continue
        cube_cfg = discretize(proc, mesh, lam)
        omega = omega_process(cube_cfg)
        # Tolerance 2*delta may reach 1/2, where black leaves degenerate to points.
        pert = perturb(proc, 2.0 * mesh.delta, limit=0.5 + 1e-12)
        rng = rng_for(seed, STREAM_POINTS, k)
        pts = _generic_points(rng, sample_points, period, (proc, omega, pert), mesh.delta)
        c_phi = color_many(proc, pts).astype(np.int16)
        c_omega = color_many(omega, pts).astype(np.int16)
        c_pert = color_many(pert, pts).astype(np.int16)
        v1 += int(np.count_nonzero(c_phi < c_omega))
        v2 += int(np.count_nonzero(c_omega < c_pert))
        zeros += int(np.count_nonzero(c_phi == 0) + np.count_nonzero(c_omega == 0)
                     + np.count_nonzero(c_pert == 0))
        checked += 1
    return DominationReport(configs_requested=configs, configs_checked=checked,
                            configs_skipped=skipped, points_per_config=sample_points,
                            violations_phi_omega=v1, violations_omega_pert=v2,
                            zero_colors=zeros,
                            params={"s": s, "gamma": gamma, "p": p, "h": h,
                                    "delta": mesh.delta, "lambda": lam,
                                    "period": period, "seed": seed})
