"""Classical collisions in three dimensions with a finite interaction range.

Two free particles collide when their separation first shrinks to the
range l.  With x = x1 - x2 and p = p1 - p2 (relative velocity p / m), this
requires -x.p > |p| sqrt(x^2 - l^2) > 0 and happens at

    t_c = m (x^2 - l^2) / (-x.p + sqrt((x.p)^2 - p^2 (x^2 - l^2))),

the smaller root of |x + p t / m| = l written without cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .semiclassical import DensityCurve, _edges, run_chunked
from .wavepacket import GaussianPacket, wigner_sample


def _vec(v, name):
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class PhasePoint3D:
    x1: np.ndarray
    x2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    m: float = 1.0
    l: float = 0.0

    def __post_init__(self):
        for name in ("x1", "x2", "p1", "p2"):
            object.__setattr__(self, name, _vec(getattr(self, name), name))
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError("m must be > 0")
        if not (np.isfinite(self.l) and self.l >= 0):
            raise ValueError("l must be >= 0")
        if np.linalg.norm(self.x12) <= self.l:
            raise ValueError("particles must start farther apart than the interaction range")

    @property
    def x12(self) -> np.ndarray:
        return self.x1 - self.x2

    @property
    def p12(self) -> np.ndarray:
        return self.p1 - self.p2


def _condition(x, p, l):
    xp = np.einsum("...i,...i->...", x, p)
    p2 = np.einsum("...i,...i->...", p, p)
    gap = np.einsum("...i,...i->...", x, x) - l * l
    rhs = np.sqrt(p2 * np.maximum(gap, 0.0))
    # rhs > 0 already excludes l = 0 unless x and p are exactly (anti)parallel
    return (-xp > rhs) & (rhs > 0)


def _times(x, p, m, l):
    xp = np.einsum("...i,...i->...", x, p)
    p2 = np.einsum("...i,...i->...", p, p)
    gap = np.einsum("...i,...i->...", x, x) - l * l
    disc = np.maximum(xp * xp - p2 * gap, 0.0)
    return m * gap / (-xp + np.sqrt(disc))


def collision_condition_3d(pt: PhasePoint3D) -> bool:
    return bool(_condition(pt.x12, pt.p12, pt.l))


def collision_time_3d(pt: PhasePoint3D) -> Optional[float]:
    """First time at which |x12(t)| = l, or None if the particles never come that close.

    A grazing approach (closest distance exactly l, l > 0) counts as contact.
    """
    if collision_condition_3d(pt) or _grazing(pt):
        return float(_times(pt.x12, pt.p12, pt.m, pt.l))
    return None


def _grazing(pt: PhasePoint3D) -> bool:
    # tangential touch of the range sphere: the discriminant vanishes
    x, p, l = pt.x12, pt.p12, pt.l
    xp = float(x @ p)
    scale = float((x @ x) * (p @ p))
    disc = xp * xp - float(p @ p) * (float(x @ x) - l * l)
    return l > 0 and xp < 0 and abs(disc) <= 1e-12 * scale


def separation_at(pt: PhasePoint3D, t: float) -> float:
    return float(np.linalg.norm(pt.x12 + pt.p12 * t / pt.m))


@dataclass(frozen=True)
class Gaussian3DPacket:
    """Product of three one-dimensional Gaussian packets sharing one mass."""

    axes: Sequence[GaussianPacket]

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) != 3:
            raise ValueError("a 3D packet needs exactly three axes")
        if len({ax.m for ax in axes}) != 1:
            raise ValueError("all axes must share the same mass")
        object.__setattr__(self, "axes", axes)

    @property
    def m(self) -> float:
        return self.axes[0].m

    @classmethod
    def from_arrays(cls, a, b, c, m: float = 1.0) -> "Gaussian3DPacket":
        return cls(tuple(GaussianPacket(float(ai), float(bi), float(ci), m) for ai, bi, ci in zip(a, b, c)))


def sample_phase_points(pkt: Gaussian3DPacket, n: int, rng: np.random.Generator):
    """(x, p) arrays of shape (n, 3) from the product Wigner density."""
    xs, ps = zip(*(wigner_sample(ax, n, rng) for ax in pkt.axes))
    return np.stack(xs, axis=1), np.stack(ps, axis=1)


@dataclass(frozen=True)
class Collision3DResult:
    curve: DensityCurve
    collision_fraction: float
    max_residual: float


def rho3d_mc(left: Gaussian3DPacket, right: Gaussian3DPacket, l: float, n_samples: int,
             seed: int, bins, workers: int = 1) -> Collision3DResult:
    """Histogram of 3D collision times over Wigner-sampled initial conditions.

    Samples that start inside the range are counted as non-colliding.
    ``max_residual`` is the worst relative miss | |x12(t_c)| - l | / l over
    accepted samples.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not l > 0:
        raise ValueError("interaction range l must be > 0")
    if left.m != right.m:
        raise ValueError("identical particles need equal masses")
    edges = _edges(bins)
    m = left.m

    def job(rng, n):
        x1, p1 = sample_phase_points(left, n, rng)
        x2, p2 = sample_phase_points(right, n, rng)
        x, p = x1 - x2, p1 - p2
        ok = _condition(x, p, l) & (np.einsum("ij,ij->i", x, x) > l * l)
        t = _times(x[ok], p[ok], m, l)
        miss = np.linalg.norm(x[ok] + p[ok] * t[:, None] / m, axis=1)
        resid = float(np.max(np.abs(miss - l)) / l) if len(t) else 0.0
        counts, _ = np.histogram(t, bins=edges)
        return counts, int(ok.sum()), resid

    parts = run_chunked(n_samples, seed, job, workers)
    counts = np.sum([c for c, _, _ in parts], axis=0)
    accepted = sum(k for _, k, _ in parts)
    resid = max(r for _, _, r in parts)
    curve = DensityCurve(
        grid=0.5 * (edges[1:] + edges[:-1]),
        values=counts / (n_samples * np.diff(edges)),
        method="monte-carlo",
        meta={"edges": edges, "counts": counts, "n_samples": n_samples, "seed": seed,
              "accepted": accepted, "l": l},
    )
    return Collision3DResult(curve, accepted / n_samples, resid)
