"""Collision-time statistics and symmetrisation dynamics of two identical particles."""

__version__ = "0.1.0"

from .wavepacket import GaussianPacket, Scenario
from .semiclassical import DensityCurve, rho_cl, rho_cl_mc
from .quantum_arrival import collision_probability, rho_quantum
from .measurement import Detector, TwoParticleState, pair_detection_probability

__all__ = [
    "GaussianPacket", "Scenario", "DensityCurve", "rho_cl", "rho_cl_mc",
    "collision_probability", "rho_quantum", "Detector", "TwoParticleState",
    "pair_detection_probability",
]
