"""Jumped fraction of simulated trajectories against p_c(t), over several master seeds."""

import argparse

import numpy as np

from dynsym.jump_sim import ensemble_summary
from dynsym.quantum_arrival import collision_probability_curve, rho_quantum
from dynsym.semiclassical import forward_time_grid
from dynsym.wavepacket import Scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-M", type=int, default=10_000)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    sc = Scenario.symmetric(0.1, 0.333, 5.0)
    curve = rho_quantum(sc, forward_time_grid(sc), with_total=False).curve
    t = curve.grid
    pc = collision_probability_curve(curve, t)
    band = 3 * np.sqrt(pc * (1 - pc) / args.M)
    for seed in range(args.seeds):
        s = ensemble_summary(sc, curve, args.M, seed, t)
        dev = np.abs(s.jumped_fraction - pc)
        inside = bool(np.all(dev <= band))
        print(f"seed {seed:3d}: never-jumped {s.never_jumped_fraction:.4f}  "
              f"max dev {dev.max():.4f}  inside 3-sigma band everywhere: {inside}")


if __name__ == "__main__":
    main()
