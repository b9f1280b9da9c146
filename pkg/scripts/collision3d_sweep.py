"""3D collision fraction as the interaction range shrinks."""

import argparse

from dynsym.collision3d import Gaussian3DPacket, rho3d_mc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    L = Gaussian3DPacket.from_arrays([0.5] * 3, [1.5, 0, 0], [-2.5, 0, 0])
    R = Gaussian3DPacket.from_arrays([0.5] * 3, [-1.5, 0, 0], [2.5, 0, 0])
    for l in (1.0, 0.5, 0.1, 0.05, 0.01, 0.001):
        res = rho3d_mc(L, R, l, args.samples, 0, (0.0, 10.0, 100), args.workers)
        print(f"l = {l:<6} collision fraction = {res.collision_fraction:.6f}  max residual = {res.max_residual:.1e}")


if __name__ == "__main__":
    main()
