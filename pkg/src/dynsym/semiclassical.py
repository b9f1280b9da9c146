"""Classical and Wigner-averaged collision-time densities."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .specfun import erf
from .wavepacket import Scenario, wigner_sample

METHODS = ("semiclassical", "quantum", "monte-carlo")
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class DensityCurve:
    """A density sampled on an increasing (possibly non-uniform) time grid."""

    grid: np.ndarray
    values: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if len(grid) < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing with >= 2 points")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("density values must be finite and non-negative")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid))

    def cumulative(self) -> np.ndarray:
        """Running trapezoid integral from the first grid point."""
        steps = 0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid)
        return np.concatenate(([0.0], np.cumsum(steps)))

    def argmax(self) -> float:
        return float(self.grid[np.argmax(self.values)])


@dataclass(frozen=True)
class PhaseSpacePoint:
    x1: float
    p1: float
    x2: float
    p2: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.x1, self.p1, self.x2, self.p2)):
            raise ValueError("phase-space coordinates must be finite")


def classical_collision_time(pt: PhaseSpacePoint, m: float) -> Optional[float]:
    """Meeting time of two free point particles, or None if they move in parallel."""
    if not m > 0:
        raise ValueError(f"mass must be > 0, got {m}")
    dp = pt.p2 - pt.p1
    if abs(dp) <= 1e-14 * max(abs(pt.p1), abs(pt.p2), 1e-300):
        return None
    return m * (pt.x1 - pt.x2) / dp


def _collision_times(x1, p1, x2, p2, m):
    dp = p2 - p1
    ok = np.abs(dp) > 1e-14 * np.maximum(np.maximum(np.abs(p1), np.abs(p2)), 1e-300)
    t = np.full(np.shape(dp), np.inf)
    t[ok] = m * (x1[ok] - x2[ok]) / dp[ok]
    return t, ok


def rho_cl(sc: Scenario, t_c):
    """Wigner-averaged collision-time density.

    The relative-momentum integrand is |u| times two Gaussians in u; after
    completing the square the first absolute moment of a normal variable
    gives

        rho = K [exp(-R)/P + exp(Q^2/P - R) mu sqrt(pi/P) erf(mu sqrt(P))]

    with P, Q, R the coefficients of the combined quadratic and mu = Q/P.
    """
    L, Rp = sc.left, sc.right
    m = sc.m
    s = L.a ** 2 + Rp.a ** 2
    k = L.a * Rp.a / (np.pi * m * s)
    A = (L.a * Rp.a) ** 2 / s
    B = 1.0 / s
    u0 = L.b / L.a - Rp.b / Rp.a
    d = sc.separation
    tm = np.asarray(t_c, dtype=float) / m
    P = A + B * tm * tm
    Q = A * u0 + B * tm * d
    R = A * u0 * u0 + B * d * d
    mu = Q / P
    # Q^2/P - R = -A B (tm u0 - d)^2 / P <= 0
    gauss = np.exp(-A * B * (tm * u0 - d) ** 2 / P)
    out = k * (np.exp(-R) / P + gauss * mu * np.sqrt(np.pi / P) * erf(mu * np.sqrt(P)))
    return np.maximum(out, 0.0)


def _edges(bins) -> np.ndarray:
    if isinstance(bins, tuple) and len(bins) == 3:
        lo, hi, n = bins
        edges = np.linspace(float(lo), float(hi), int(n) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    if edges.ndim != 1 or len(edges) < 2:
        raise ValueError("histogram needs at least two edges")
    if np.any(np.diff(edges) <= 0):
        raise ValueError("degenerate histogram: bin widths must be positive")
    return edges


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Counter-style substream: the stream for chunk k depends only on (seed, k)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def run_chunked(n_samples: int, seed: int, job, workers: int = 1):
    """Split ``n_samples`` into fixed chunks, run ``job(rng, n)`` on each, return the list.

    The partition and the per-chunk streams do not depend on ``workers``.
    """
    sizes = [MC_CHUNK] * (n_samples // MC_CHUNK)
    if n_samples % MC_CHUNK:
        sizes.append(n_samples % MC_CHUNK)
    tasks = [(chunk_generator(seed, k), n) for k, n in enumerate(sizes)]
    if workers <= 1:
        return [job(rng, n) for rng, n in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda rn: job(*rn), tasks))


def rho_cl_mc(sc: Scenario, n_samples: int, seed: int, bins, workers: int = 1) -> DensityCurve:
    """Histogram of classical collision times over Wigner-sampled initial conditions.

    ``bins`` is an array of edges or a ``(lo, hi, n)`` tuple.  Densities are
    normalised by the total sample count, so mass outside the edges is lost.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    edges = _edges(bins)
    m = sc.m

    def job(rng, n):
        x1, p1 = wigner_sample(sc.left, n, rng)
        x2, p2 = wigner_sample(sc.right, n, rng)
        t, ok = _collision_times(x1, p1, x2, p2, m)
        counts, _ = np.histogram(t[ok], bins=edges)
        return counts, int((~ok).sum())

    parts = run_chunked(n_samples, seed, job, workers)
    counts = np.sum([c for c, _ in parts], axis=0)
    parallel = sum(k for _, k in parts)
    widths = np.diff(edges)
    return DensityCurve(
        grid=0.5 * (edges[1:] + edges[:-1]),
        values=counts / (n_samples * widths),
        method="monte-carlo",
        meta={"edges": edges, "counts": counts, "n_samples": n_samples, "seed": seed,
              "no_collision": parallel, "outside": n_samples - parallel - int(counts.sum())},
    )


def default_time_grid(sc: Scenario, points: int = 2001, n_widths: float = 8.0) -> np.ndarray:
    """Grid of mean +- n_widths spreads of the classical collision time."""
    L, R = sc.left, sc.right
    d = sc.separation
    u_rel = L.mean_momentum - R.mean_momentum
    sigma_d = np.sqrt(0.5 * (L.a ** 2 + R.a ** 2))
    sigma_u = np.sqrt(L.momentum_variance + R.momentum_variance)
    if u_rel > 0 and d > 0:
        t0 = sc.m * d / u_rel
        dt = t0 * np.hypot(sigma_d / d, sigma_u / u_rel)
    else:
        t0 = 0.0
        dt = sc.m * (abs(d) + sigma_d) / max(abs(u_rel), sigma_u)
    return np.linspace(t0 - n_widths * dt, t0 + n_widths * dt, points)


def forward_time_grid(sc: Scenario, points: int = 2001, t_far: float = 1e4,
                      tail_points: int = 600) -> np.ndarray:
    """Grid on [0, t_far]: uniform over the collision window, geometric beyond.

    Quantum densities decay like t^(-3/2), so cumulative quantities need the
    far tail that a window-only grid would cut off.
    """
    window = default_time_grid(sc, points=3)
    t_hi = max(window[-1], 1e-6)
    near = np.linspace(0.0, t_hi, points)
    if t_far <= t_hi:
        return near
    far = np.geomspace(t_hi, t_far, tail_points + 1)[1:]
    return np.concatenate((near, far))
