"""Command-line front end: sampling, rendering, crossing experiments, sweeps,
diagnostics and a self-test over the documented example cases.

Configuration precedence is flags > config file > defaults; every subcommand
echoes its fully resolved configuration (including derived quantities) into
the output metadata, and all randomness flows from the single --seed value.
Exit codes: 0 success, 2 validation error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import connectivity, diagnostics, experiments, process as proc_mod
from .coloring import coverage, rasterize, write_ppm, write_svg, write_text_matrix
from .geometry import WindowSpec
from .process import (AdaptiveHorizon, FixedHorizon, DEFAULT_RESOLUTION,
                      derived_seed, economical_horizon, mesh_params,
                      sample_process, save_process_binary, save_process_text)


class ValidationError(ValueError):
    pass


DEFAULTS = {
    "p": 0.5,
    "s": 16,
    "rho": 1.0,
    "gamma": 0.5,
    "h": DEFAULT_RESOLUTION,
    "trials": 1000,
    "seed": 0,
    "workers": None,  # resolved from CONFETTI_WORKERS, else 1
    "format": "csv",
}


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"bad config line: {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return values


_COERCE = {"p": float, "rho": float, "gamma": float, "h": float, "s": int,
           "trials": int, "seed": int, "workers": int, "format": str,
           "m": int, "lam": float, "configs": int, "points": int, "seeds": int}


def _resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in _COERCE:
                raise ValidationError(f"unknown config key {key!r}")
            cfg[key] = _COERCE[key](raw)
    for key in vars(args):
        val = getattr(args, key)
        if val is not None and key in _COERCE:
            cfg[key] = val
    if cfg.get("workers") is None:
        cfg["workers"] = int(os.environ.get("CONFETTI_WORKERS", "1"))
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if not 0.0 <= cfg["p"] <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {cfg['p']}")
    if cfg["s"] < 1:
        raise ValidationError(f"s must be >= 1, got {cfg['s']}")
    if not cfg["h"] > 0:
        raise ValidationError(f"h must be positive, got {cfg['h']}")
    if cfg["trials"] < 1:
        raise ValidationError(f"trials must be >= 1, got {cfg['trials']}")
    if cfg["seed"] < 0:
        raise ValidationError(f"seed must be non-negative, got {cfg['seed']}")
    if cfg["workers"] < 1:
        raise ValidationError(f"workers must be >= 1, got {cfg['workers']}")
    if cfg["format"] not in ("csv", "json"):
        raise ValidationError(f"format must be csv or json, got {cfg['format']}")


def _derived_meta(cfg: dict) -> dict:
    s = cfg["s"]
    meta = dict(cfg)
    meta["lambda_torus"] = economical_horizon(s, "torus") if s >= 3 else None
    mesh = mesh_params(s, cfg["gamma"]) if s >= 2 else None
    if mesh is not None:
        meta.update(delta=mesh.delta, delta1=mesh.delta1, delta2=mesh.delta2)
    return meta


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {key}={meta[key]!r}" for key in sorted(meta)]


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _out(cfg, args, default_name: str) -> str:
    return getattr(args, "out", None) or default_name


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_sample(args) -> int:
    cfg = _resolve(args)
    s, p, seed = cfg["s"], cfg["p"], cfg["seed"]
    if args.torus:
        if s < 3:
            raise ValidationError("torus runs need s >= 3")
        window = WindowSpec.torus(10.0 * s)
        horizon = FixedHorizon(economical_horizon(s, "torus"))
    else:
        window = WindowSpec.rectangle(0.0, float(s), 0.0, float(s))
        horizon = AdaptiveHorizon(experiments.DEFAULT_TIME_CAP, cfg["h"])
    proc = sample_process(window, p, horizon, seed)
    out = _out(cfg, args, "process.txt")
    if out.endswith(".bin"):
        save_process_binary(proc, out)
    else:
        save_process_text(proc, out)
    print(f"sample: n={len(proc)} window={window.kind} p={p} seed={seed} -> {out}")
    return 0


def _cmd_render(args) -> int:
    cfg = _resolve(args)
    s, p, h, seed = cfg["s"], cfg["p"], cfg["h"], cfg["seed"]
    window = WindowSpec.rectangle(0.0, float(s), 0.0, float(s))
    proc = sample_process(window, p, AdaptiveHorizon(experiments.DEFAULT_TIME_CAP, h), seed)
    field = rasterize(proc, window.extent(), h)
    out = _out(cfg, args, "field.ppm")
    write_ppm(field, out)
    extras = []
    if args.txt:
        write_text_matrix(field, args.txt)
        extras.append(args.txt)
    if args.svg:
        write_svg(proc, window.extent(), args.svg)
        extras.append(args.svg)
    nx, ny = field.shape
    print(f"render: {nx}x{ny} pixels p={p} s={s} seed={seed} -> {out}"
          + (f" (+ {', '.join(extras)})" if extras else ""))
    return 0


def _estimate_csv(est, meta) -> list[str]:
    lines = _meta_lines(meta)
    lines.append(experiments.SWEEP_CSV_HEADER)
    pr = est.params
    lines.append(f"{pr.get('p')!r},{pr.get('s', pr.get('m'))},{pr.get('rho', 1.0)!r},"
                 f"{pr.get('h')!r},{est.trials},{pr['successes']},{est.p_hat!r},"
                 f"{est.ci_low!r},{est.ci_high!r},{est.seed},{pr.get('uncovered_count', 0)}")
    return lines


def _emit_estimate(est, meta, cfg, args, stem: str, summary: str) -> None:
    if cfg["format"] == "json":
        out = _out(cfg, args, f"{stem}.json")
        doc = {"meta": meta, "estimate": {"p_hat": est.p_hat, "trials": est.trials,
                                          "ci_low": est.ci_low, "ci_high": est.ci_high,
                                          "seed": est.seed, "params": est.params}}
        _write_lines(out, [json.dumps(doc, indent=2, sort_keys=True, default=repr)])
    else:
        out = _out(cfg, args, f"{stem}.csv")
        _write_lines(out, _estimate_csv(est, meta))
    print(f"{summary} -> {out}")


def _cmd_cross(args) -> int:
    cfg = _resolve(args)
    est = experiments.estimate_crossing(cfg["p"], cfg["rho"], cfg["s"], cfg["trials"],
                                        cfg["h"], cfg["seed"], cfg["workers"])
    meta = _derived_meta(cfg)
    _emit_estimate(est, meta, cfg, args, "cross",
                   f"cross: p_hat={est.p_hat:.4f} ci=[{est.ci_low:.4f},{est.ci_high:.4f}]"
                   f" p={cfg['p']} rho={cfg['rho']} s={cfg['s']} trials={est.trials}")
    return 0


def _cmd_theta(args) -> int:
    cfg = _resolve(args)
    m = args.m if args.m is not None else cfg["s"]
    if m < 2:
        raise ValidationError("theta proxy needs m >= 2")
    est = experiments.estimate_theta_proxy(cfg["p"], m, cfg["trials"], cfg["h"],
                                           cfg["seed"], cfg["workers"])
    meta = _derived_meta(cfg)
    meta["m"] = m
    _emit_estimate(est, meta, cfg, args, "theta",
                   f"theta: p_hat={est.p_hat:.4f} p={cfg['p']} m={m} trials={est.trials}")
    return 0


def _parse_grid(spec: str, coerce) -> list:
    # "a:b:step" ranges or comma lists
    if ":" in spec:
        lo, hi, step = (float(v) for v in spec.split(":"))
        n = int(round((hi - lo) / step)) + 1
        return [coerce(lo + i * step) for i in range(n)]
    return [coerce(v) for v in spec.split(",")]


def _cmd_sweep(args) -> int:
    cfg = _resolve(args)
    p_list = _parse_grid(args.p_list, float) if args.p_list else \
        [round(0.40 + 0.02 * i, 2) for i in range(11)]
    s_list = _parse_grid(args.s_list, int) if args.s_list else [cfg["s"]]
    sweep = experiments.critical_scan(p_list, s_list, cfg["trials"], cfg["h"],
                                      cfg["seed"], cfg["workers"])
    meta = _derived_meta(cfg)
    meta.update(p_list=p_list, s_list=s_list)
    out = _out(cfg, args, "sweep.csv")
    _write_lines(out, _meta_lines(meta) + sweep_rows(sweep))
    json_out = os.path.splitext(out)[0] + ".json"
    _write_lines(json_out, [experiments.sweep_to_json(sweep)])
    plot_out = os.path.splitext(out)[0] + ".dat"
    with open(plot_out, "w") as f:
        f.write(experiments.sweep_plot_data(sweep))
    pts = {s: sweep.crossing_points[s] for s in s_list}
    print(f"sweep: crossing points {pts} -> {out}, {json_out}, {plot_out}")
    return 0


def sweep_rows(sweep) -> list[str]:
    return experiments.sweep_csv_rows(sweep)


def _cmd_rsw(args) -> int:
    cfg = _resolve(args)
    s_list = _parse_grid(args.s_list, int) if args.s_list else [8, 16, 32]
    rho = cfg["rho"] if cfg["rho"] > 1.0 else 3.0
    report = experiments.rsw_check(rho, s_list, cfg["trials"], cfg["seed"],
                                   cfg["p"], cfg["h"], cfg["workers"])
    meta = _derived_meta(cfg)
    meta.update(rho=rho, s_list=s_list)
    lines = _meta_lines(meta) + [experiments.SWEEP_CSV_HEADER]
    for s, est in zip(s_list, report.estimates):
        pr = est.params
        lines.append(f"{cfg['p']!r},{s},{rho!r},{cfg['h']!r},{est.trials},"
                     f"{pr['successes']},{est.p_hat!r},{est.ci_low!r},{est.ci_high!r},"
                     f"{est.seed},{pr['uncovered_count']}")
    out = _out(cfg, args, "rsw.csv")
    _write_lines(out, lines)
    hats = [round(e.p_hat, 4) for e in report.estimates]
    print(f"rsw: rho={rho} p_hats={hats} flagged={report.flagged} -> {out}")
    return 0


def _cmd_fkg(args) -> int:
    cfg = _resolve(args)
    rep = experiments.fkg_check(cfg["s"], cfg["trials"], cfg["seed"], cfg["p"],
                                cfg["h"], cfg["workers"])
    meta = _derived_meta(cfg)
    out = _out(cfg, args, "fkg.csv")
    lines = _meta_lines(meta)
    lines.append("p_joint,p_product,sigma,p_a,p_b,trials,seed")
    lines.append(f"{rep.p_joint!r},{rep.p_product!r},{rep.sigma!r},{rep.p_a!r},"
                 f"{rep.p_b!r},{rep.trials},{rep.seed}")
    _write_lines(out, lines)
    print(f"fkg: P(A&B)={rep.p_joint:.4f} P(A)P(B)={rep.p_product:.4f} "
          f"sigma={rep.sigma:.4f} -> {out}")
    return 0


def _cmd_coverage(args) -> int:
    cfg = _resolve(args)
    s = cfg["s"]
    if s < 3:
        raise ValidationError("torus coverage runs need s >= 3")
    lam = args.lam if args.lam is not None else economical_horizon(s, "torus")
    seeds = args.seeds or 100
    window = WindowSpec.torus(10.0 * s)
    n_cov = 0
    worst = 0
    for i in range(seeds):
        proc = sample_process(window, cfg["p"], FixedHorizon(lam),
                              derived_seed(cfg["seed"], proc_mod.STREAM_COVERAGE, i))
        rep = coverage(proc, window.extent(), cfg["h"])
        n_cov += rep.covered
        worst = max(worst, rep.uncovered_pixel_count)
    meta = _derived_meta(cfg)
    meta.update(lam=lam, seeds=seeds)
    out = _out(cfg, args, "coverage.csv")
    _write_lines(out, _meta_lines(meta) + ["covered,seeds,worst_uncovered_pixels",
                                           f"{n_cov},{seeds},{worst}"])
    print(f"coverage: {n_cov}/{seeds} seeds fully covered (s={s}, lambda={lam}) -> {out}")
    return 0


def _cmd_diagnose(args) -> int:
    cfg = _resolve(args)
    lam = args.lam if args.lam is not None else 1.0
    tail = diagnostics.boundary_visible_tail(lam, cfg["trials"], cfg["seed"])
    window = WindowSpec.rectangle(-2.0, 2.0, -2.0, 2.0)
    pairs = diagnostics.pair_count_stats(window, 2.0, 0.05, max(100, cfg["trials"] // 10),
                                         cfg["seed"])
    meta = _derived_meta(cfg)
    meta.update(lam=lam)
    out = _out(cfg, args, "diagnose.csv")
    _write_lines(out, _meta_lines(meta) + tail.csv_rows() + pairs.csv_rows())
    print(f"diagnose: tail P(N>=7)={tail.empirical_tail[6] if len(tail.empirical_tail) > 6 else 0.0}"
          f" pair mean={pairs.empirical_mean:.3f} (analytic {pairs.analytic_mean:.3f}) -> {out}")
    return 0


def _cmd_selftest(args) -> int:
    from . import selftest
    failures = selftest.run(verbose=True)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="confetti",
                                 description="Confetti percolation simulation laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, trials=True):
        sp.add_argument("--p", type=float, help="black probability")
        sp.add_argument("--s", type=int, help="box scale")
        sp.add_argument("--rho", type=float, help="aspect ratio of the crossing box")
        sp.add_argument("--gamma", type=float, help="mesh exponent")
        sp.add_argument("--h", type=float, help="raster resolution")
        if trials:
            sp.add_argument("--trials", type=int, help="Monte Carlo trials")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--workers", type=int, help="parallel trial workers")
        sp.add_argument("--format", choices=("csv", "json"), help="output format")
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--out", help="output path")

    sp = sub.add_parser("sample", help="sample a leaf process and save it")
    common(sp, trials=False)
    sp.add_argument("--torus", action="store_true", help="torus of period 10s")
    sp.set_defaults(fn=_cmd_sample)

    sp = sub.add_parser("render", help="rasterize a field to a P6 pixmap")
    common(sp, trials=False)
    sp.add_argument("--txt", help="also dump a text matrix here")
    sp.add_argument("--svg", help="also draw leaf rectangles here")
    sp.set_defaults(fn=_cmd_render)

    sp = sub.add_parser("cross", help="estimate a box-crossing probability")
    common(sp)
    sp.set_defaults(fn=_cmd_cross)

    sp = sub.add_parser("sweep", help="crossing-probability sweep over p and s")
    common(sp)
    sp.add_argument("--p-list", help="comma list or lo:hi:step")
    sp.add_argument("--s-list", help="comma list of box scales")
    sp.set_defaults(fn=_cmd_sweep)

    sp = sub.add_parser("theta", help="finite-box cluster probability proxy")
    common(sp)
    sp.add_argument("--m", type=int, help="box size for the origin cluster")
    sp.set_defaults(fn=_cmd_theta)

    sp = sub.add_parser("rsw", help="wide-box crossing floor check")
    common(sp)
    sp.add_argument("--s-list", help="comma list of box scales")
    sp.set_defaults(fn=_cmd_rsw)

    sp = sub.add_parser("fkg", help="positive correlation of overlapping crossings")
    common(sp)
    sp.set_defaults(fn=_cmd_fkg)

    sp = sub.add_parser("coverage", help="torus coverage check over seeds")
    common(sp, trials=False)
    sp.add_argument("--lam", type=float, help="fixed horizon (default 50*floor(log s))")
    sp.add_argument("--seeds", type=int, help="number of seeds to test")
    sp.set_defaults(fn=_cmd_coverage)

    sp = sub.add_parser("diagnose", help="instability statistics and tail bound")
    common(sp)
    sp.add_argument("--lam", type=float, help="horizon for the tail statistic")
    sp.set_defaults(fn=_cmd_diagnose)

    sp = sub.add_parser("selftest", help="run the documented example checks")
    sp.set_defaults(fn=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
