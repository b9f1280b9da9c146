"""Total collision probability and its slow t^(-1/2) approach for narrow packets."""

import numpy as np

from dynsym.quantum_arrival import collision_probability_curve, collision_probability_total, rho_quantum
from dynsym.semiclassical import forward_time_grid, rho_cl
from dynsym.wavepacket import Scenario
from scipy import integrate


def main():
    sc = Scenario.symmetric(0.1, 0.333, 5.0)
    total = collision_probability_total(sc)
    cl, _ = integrate.quad(lambda t: rho_cl(sc, t), 0, np.inf, limit=500)
    curve = rho_quantum(sc, forward_time_grid(sc, t_far=1e6, tail_points=1200), with_total=False).curve
    print(f"quantum p_c(inf) = {total:.6f}   semiclassical = {cl:.6f}")
    for t in (1, 10, 100, 1e3, 1e4, 1e5, 1e6):
        pc = collision_probability_curve(curve, [t])[0]
        print(f"  p_c({t:g}) = {pc:.6f}   deficit = {total - pc:.2e}")


if __name__ == "__main__":
    main()
