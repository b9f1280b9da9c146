"""Gaussian single-particle states under free evolution (hbar = 1)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .specfun import DEFAULT_QUAD, QuadratureControl

_PI_QUARTER = np.pi ** 0.25


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian packet with momentum amplitude

        chi(p) = sqrt(a) pi^(-1/4) exp(-b^2/2 + p (b a - i c) - a^2 p^2 / 2)

    ``a`` is the inverse momentum width, ``b / a`` the mean momentum and
    ``c`` the initial centre.
    """

    a: float
    b: float = 0.0
    c: float = 0.0
    m: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "c", "m"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))
        if self.a <= 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if self.m <= 0:
            raise ValueError(f"m must be > 0, got {self.m}")

    @property
    def mean_momentum(self) -> float:
        return self.b / self.a

    @property
    def momentum_variance(self) -> float:
        return 0.5 / self.a ** 2

    @property
    def velocity(self) -> float:
        return self.b / (self.a * self.m)

    def tau(self, t):
        """Dimensionless time t / (m a^2)."""
        return np.asarray(t) / (self.m * self.a ** 2)

    def position_spread(self, t) -> np.ndarray:
        """Standard deviation of |psi(x, t)|^2."""
        return self.a / np.sqrt(2.0) * np.sqrt(1.0 + self.tau(t) ** 2)

    def center(self, t):
        return self.c + self.velocity * np.asarray(t)

    def mirrored(self) -> "GaussianPacket":
        """Reflection x -> -x."""
        return GaussianPacket(self.a, -self.b, -self.c, self.m)


@dataclass(frozen=True)
class Scenario:
    """Two packets, the statistics sign and numerical controls."""

    left: GaussianPacket
    right: GaussianPacket
    eta: int = 1
    quad: QuadratureControl = field(default_factory=lambda: DEFAULT_QUAD)

    def __post_init__(self):
        if self.eta not in (1, -1):
            raise ValueError(f"eta must be +1 or -1, got {self.eta}")
        if self.left.m != self.right.m:
            raise ValueError("identical particles need equal masses "
                             f"(left.m={self.left.m}, right.m={self.right.m})")

    @property
    def m(self) -> float:
        return self.left.m

    @property
    def separation(self) -> float:
        """d = c_R - c_L."""
        return self.right.c - self.left.c

    @property
    def equal_widths(self) -> bool:
        return self.left.a == self.right.a

    def swapped(self) -> "Scenario":
        """Exchange the roles of the packets (mirror image of the pair)."""
        return Scenario(self.right.mirrored(), self.left.mirrored(), self.eta, self.quad)

    @classmethod
    def symmetric(cls, a: float, b: float, d: float, m: float = 1.0, eta: int = 1,
                  quad: QuadratureControl = DEFAULT_QUAD) -> "Scenario":
        """Equal widths, b_L = -b_R = b, centres at -d/2 and d/2."""
        return cls(GaussianPacket(a, b, -0.5 * d, m), GaussianPacket(a, -b, 0.5 * d, m), eta, quad)


def momentum_amplitude(pkt: GaussianPacket, p, t=0.0):
    """psi(p, t) = exp(-i t p^2 / (2m)) chi(p)."""
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    expo = (-0.5 * pkt.b ** 2 + p * (pkt.b * pkt.a - 1j * pkt.c)
            - 0.5 * (pkt.a * p) ** 2 - 0.5j * t * p * p / pkt.m)
    return np.sqrt(pkt.a) / _PI_QUARTER * np.exp(expo)


def position_amplitude(pkt: GaussianPacket, x, t=0.0):
    """Coordinate wavefunction psi(x, t) of the freely evolved packet."""
    xi = (np.asarray(x, dtype=float) - pkt.c) / pkt.a
    one_it = 1.0 + 1j * pkt.tau(t)
    expo = -0.5 * pkt.b ** 2 - (xi - 1j * pkt.b) ** 2 / (2.0 * one_it)
    return np.exp(expo) / (_PI_QUARTER * np.sqrt(pkt.a * one_it))


def overlap(left: GaussianPacket, right: GaussianPacket) -> complex:
    """<L|R>, conserved by the common free evolution."""
    aL, bL, cL = left.a, left.b, left.c
    aR, bR, cR = right.a, right.b, right.c
    s = aL ** 2 + aR ** 2
    expo = (-((aL * bR - aR * bL) ** 2 + (cR - cL) ** 2) / (2.0 * s)
            + 1j * (cL - cR) * (aR * bR + aL * bL) / s)
    return complex(np.sqrt(2.0 * aL * aR / s) * np.exp(expo))


def wigner(pkt: GaussianPacket, x, p, t=0.0):
    # Free flight shears the t = 0 product Gaussian: W(x, p, t) = W0(x - p t / m, p)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    x0 = x - p * np.asarray(t) / pkt.m
    return np.exp(-((x0 - pkt.c) / pkt.a) ** 2 - (pkt.a * p - pkt.b) ** 2) / np.pi


def wigner_sample(pkt: GaussianPacket, n: int, rng: np.random.Generator):
    """Draw (x, p) at t = 0 from the Wigner density, which factorises."""
    x = rng.normal(pkt.c, pkt.a / np.sqrt(2.0), n)
    p = rng.normal(pkt.b / pkt.a, 1.0 / (np.sqrt(2.0) * pkt.a), n)
    return x, p
