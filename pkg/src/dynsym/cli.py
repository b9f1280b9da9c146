"""Command-line entry point: ``dynsym <command> --config FILE --out FILE``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .collision3d import rho3d_mc
from .config import ConfigError, ScenarioConfig, load_config
from .jump_sim import ensemble_summary
from .quantum_arrival import collision_probability_curve, collision_probability_total, rho_quantum
from .semiclassical import default_time_grid, forward_time_grid, rho_cl
from .measurement import signal_curve
from .specfun import DivergenceError, QuadratureError
from .wavepacket import Scenario

COMMANDS = ("density", "pc", "signal", "trajectories", "density3d")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def write_csv(path: Path, header, columns):
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    if not np.all(np.isfinite(data)):
        raise ArithmeticError(f"non-finite value in output for {path.name}")
    np.savetxt(path, data, fmt="%.12g", delimiter=",", header=",".join(header), comments="")


def _window(cfg: ScenarioConfig, sc: Scenario, forward: bool = False):
    """Emission grid; ``forward`` clips it to t >= 0 for cumulative quantities."""
    g = cfg.grid
    auto = default_time_grid(sc, 3)
    lo = g.t_min if g.t_min is not None else auto[0]
    if forward:
        lo = max(lo, 0.0)
    hi = g.t_max if g.t_max is not None else auto[-1]
    if not lo < hi:
        raise ConfigError(f"empty time window [{lo}, {hi}]", path="grid")
    return np.linspace(lo, hi, g.points)


def _forward_curve(cfg, sc, t_hi):
    grid = forward_time_grid(sc, cfg.grid.points, t_far=max(1e4, 2 * t_hi))
    return rho_quantum(sc, grid, with_total=False).curve


def run_density(cfg, out):
    sc = cfg.scenario()
    t = _window(cfg, sc)
    cl = rho_cl(sc, t)
    qu = rho_quantum(sc, t, with_total=False).curve.values
    write_csv(out, ("t_c", "rho_cl", "rho_quantum"), (t, cl, qu))
    return {"integral_rho_cl": float(np.trapezoid(cl, t)),
            "integral_rho_quantum": float(np.trapezoid(qu, t)),
            "sup_diff_over_peak": float(np.max(np.abs(qu - cl)) / np.max(qu)) if qu.max() > 0 else None}


def run_pc(cfg, out):
    sc = cfg.scenario()
    t = _window(cfg, sc, forward=True)
    pc = collision_probability_curve(_forward_curve(cfg, sc, t[-1]), t)
    write_csv(out, ("t", "p_c"), (t, pc))
    return {"p_c_total": collision_probability_total(sc), "p_c_at_t_max": float(pc[-1])}


def run_signal(cfg, out):
    det = cfg.detector_obj()
    if det is None:
        raise ConfigError("the signal command needs a 'detector' section", path="detector")
    sc = cfg.scenario()
    t = _window(cfg, sc, forward=True)
    direct, corr = signal_curve(sc, det, _forward_curve(cfg, sc, t[-1]), t)
    write_csv(out, ("t", "direct_term", "correlation_term"), (t, direct, corr))
    i, j = int(np.argmax(direct)), int(np.argmax(corr))
    return {"direct_peak_t": float(t[i]), "correlation_peak_t": float(t[j]),
            "direct_over_correlation_at_correlation_peak": float(direct[j] / corr[j]) if corr[j] > 0 else None}


def run_trajectories(cfg, out):
    sc = cfg.scenario()
    t = _window(cfg, sc, forward=True)
    curve = _forward_curve(cfg, sc, t[-1])
    pc = collision_probability_curve(curve, t)
    summ = ensemble_summary(sc, curve, cfg.mc.trajectories, cfg.mc.seed, t, cfg.mc.workers)
    write_csv(out, ("t", "jumped_fraction", "p_c"), (t, summ.jumped_fraction, pc))
    jumps = out.with_suffix(".jumps.csv")
    with open(jumps, "w") as fh:
        fh.write("index,jump_time\n")
        for i, jt in enumerate(summ.jump_times):
            fh.write(f"{i},{'never' if np.isnan(jt) else format(jt, '.12g')}\n")
    return {"trajectories": summ.n_trajectories, "never_jumped_fraction": summ.never_jumped_fraction,
            "jump_listing": jumps.name}


def run_density3d(cfg, out):
    if cfg.range_l is None:
        raise ConfigError("the density3d command needs 'range_l'", path="range_l")
    left, right = cfg.packets3d()
    base = cfg.scenario()
    # the window is centred on the 1D flight time to contact at distance l
    shifted = Scenario(base.left, dataclasses.replace(base.right, c=base.right.c - cfg.range_l), base.eta)
    t = _window(cfg, shifted)
    res = rho3d_mc(left, right, cfg.range_l, cfg.mc.samples, cfg.mc.seed, t, cfg.mc.workers)
    write_csv(out, ("t_c", "rho_mc"), (res.curve.grid, res.curve.values))
    return {"collision_fraction": res.collision_fraction, "samples": cfg.mc.samples,
            "max_range_residual": res.max_residual}


RUNNERS = {"density": run_density, "pc": run_pc, "signal": run_signal,
           "trajectories": run_trajectories, "density3d": run_density3d}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynsym", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, type=Path, help="YAML scenario file")
    ap.add_argument("--out", required=True, type=Path, help="CSV output path")
    ap.add_argument("--seed", type=int, default=None, help="override mc.seed")
    ap.add_argument("--grid-points", type=int, default=None, help="override grid.points")
    return ap


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        cfg = dataclasses.replace(cfg, mc=dataclasses.replace(cfg.mc, seed=args.seed))
    if args.grid_points is not None:
        if args.grid_points < 2:
            raise ConfigError("--grid-points must be >= 2")
        cfg = dataclasses.replace(cfg, grid=dataclasses.replace(cfg.grid, points=args.grid_points))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except (OSError, ConfigError) as exc:
        print(f"config error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        results = RUNNERS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, DivergenceError, OverflowError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    summary = {
        "command": args.command,
        "fingerprint": cfg.fingerprint(args.command),
        "version": __version__,
        "config": cfg.to_dict(),
        "results": results,
        "tolerances": {"quadrature": cfg.quadrature, "csv_significant_digits": 12},
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    Path(str(args.out) + ".summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
