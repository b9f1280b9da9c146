"""Quantum-jump unravelling of the symmetrisation transition.

Each trajectory draws gamma ~ U(0, 1) and jumps from the product state to
the symmetrised state at the first time where p_c(t) reaches gamma.
Trajectories with gamma above the final collision probability never jump.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .measurement import Detector, TwoParticleState, pair_detection_probability
from .quantum_arrival import collision_probability_curve
from .semiclassical import DensityCurve
from .wavepacket import Scenario


def trajectory_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for trajectory ``index`` under master ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _pc_table(pcurve: DensityCurve):
    g = pcurve.grid
    if g[0] > 0:
        raise ValueError("collision-time curve must cover t = 0")
    t = np.concatenate(([0.0], g[g > 0]))
    return t, collision_probability_curve(pcurve, t)


def _invert(t, pc, gamma: float) -> Optional[float]:
    if gamma >= pc[-1]:
        return None
    i = int(np.searchsorted(pc, gamma, side="right" if gamma == 0.0 else "left"))
    if i == 0:
        return float(t[0])
    lo, hi = pc[i - 1], pc[i]
    return float(t[i - 1] + (gamma - lo) / (hi - lo) * (t[i] - t[i - 1]))


def sample_jump_time(pcurve: DensityCurve, gamma: float) -> Optional[float]:
    """Smallest t with p_c(t) >= gamma, or None when gamma >= p_c(t_max)."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    t, pc = _pc_table(pcurve)
    return _invert(t, pc, gamma)


@dataclass(frozen=True)
class Trajectory:
    jump_time: Optional[float]
    gamma: float
    seed: int
    index: int = 0

    @property
    def jumped(self) -> bool:
        return self.jump_time is not None

    def state_kind(self, t: float) -> str:
        return "symmetrized" if self.jumped and t >= self.jump_time else "product"

    def state_at(self, sc: Scenario, t: float) -> TwoParticleState:
        return TwoParticleState(self.state_kind(t), sc)


def symmetrize(state: TwoParticleState) -> TwoParticleState:
    """Apply the projector (1 + eta pi)/2 and renormalise; idempotent."""
    if state.kind == "mixed":
        raise ValueError("the jump acts on pure trajectory states")
    return TwoParticleState("symmetrized", state.scenario)


def simulate_trajectory(sc: Scenario, pcurve: DensityCurve, seed: int, index: int = 0) -> Trajectory:
    gamma = float(trajectory_generator(seed, index).random())
    return Trajectory(sample_jump_time(pcurve, gamma), gamma, seed, index)


@dataclass(frozen=True)
class EnsembleSummary:
    t_grid: np.ndarray
    jumped_fraction: np.ndarray
    n_trajectories: int
    seed: int
    jump_times: np.ndarray  # nan marks a trajectory that never jumps

    @property
    def never_jumped_fraction(self) -> float:
        return float(np.mean(np.isnan(self.jump_times)))


def _gammas(seed: int, indices) -> np.ndarray:
    return np.array([trajectory_generator(seed, int(i)).random() for i in indices])


def ensemble_summary(sc: Scenario, pcurve: DensityCurve, M: int, seed: int, t_grid,
                     workers: int = 1) -> EnsembleSummary:
    """Jumped fraction of M independent trajectories on ``t_grid``."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    t_grid = np.asarray(t_grid, dtype=float)
    blocks = np.array_split(np.arange(M), max(1, min(workers, M)))
    if workers <= 1:
        gammas = _gammas(seed, blocks[0])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            gammas = np.concatenate(list(pool.map(lambda b: _gammas(seed, b), blocks)))
    t, pc = _pc_table(pcurve)
    jumps = np.array([_invert(t, pc, g) for g in gammas], dtype=float)  # None -> nan
    finite = np.sort(jumps[~np.isnan(jumps)])
    fraction = np.searchsorted(finite, t_grid, side="right") / M
    return EnsembleSummary(t_grid, fraction, M, seed, jumps)


def ensemble_both_signal(sc: Scenario, det: Detector, summary: EnsembleSummary,
                         method: str = "auto") -> np.ndarray:
    """Trajectory average of the 'both detected' probability along the summary grid."""
    out = np.empty_like(summary.t_grid)
    for i, t in enumerate(summary.t_grid):
        prod = pair_detection_probability(TwoParticleState("product", sc), det, t, method).both
        sym = pair_detection_probability(TwoParticleState("symmetrized", sc), det, t, method).both
        f = summary.jumped_fraction[i]
        out[i] = (1.0 - f) * prod + f * sym
    return out
