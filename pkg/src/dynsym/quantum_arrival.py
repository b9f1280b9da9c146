"""Quantum collision-time density from the time-of-arrival POVM."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .semiclassical import DensityCurve, default_time_grid
from .specfun import (QuadratureControl, QuadratureError, adaptive_gk15, half_line_moment_integral,
                      steepest_descent_angle)
from .wavepacket import Scenario, momentum_amplitude

NEGATIVE_CLIP = 1e-12


@dataclass(frozen=True)
class ArrivalEigenstate:
    t_c: float
    sign: str  # "plus" (u > 0) or "minus" (u < 0)
    m: float = 1.0

    def __post_init__(self):
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if not self.m > 0:
            raise ValueError("m must be > 0")


def arrival_eigenfunction(st: ArrivalEigenstate, u):
    """<u | t_c, +-> = theta(+-u) sqrt(|u|) exp(i t_c u^2 / 4m) / sqrt(4 pi m)."""
    u = np.asarray(u, dtype=float)
    support = u > 0 if st.sign == "plus" else u < 0
    val = np.sqrt(np.abs(u)) * np.exp(1j * st.t_c * u * u / (4.0 * st.m)) / np.sqrt(4.0 * np.pi * st.m)
    return np.where(support, val, 0.0)


def arrival_operator_fd(phi, u, m: float, rel_step: float = 1e-4):
    """Apply -i m (2/u d/du - 1/u^2) to the callable ``phi`` by central differences.

    The step is ``rel_step * |u|`` so the 1/u^2 cancellation stays resolved near 0.
    """
    u = np.asarray(u, dtype=float)
    h = rel_step * np.abs(u)
    dphi = (phi(u + h) - phi(u - h)) / (2.0 * h)
    return -1j * m * (2.0 * dphi / u - phi(u) / u ** 2)


@dataclass(frozen=True)
class QuantumDensityResult:
    curve: DensityCurve
    A0: float
    A1: float
    A2: float
    p_c_total: float
    meta: dict = field(default_factory=dict)


def gaussian_coefficients(sc: Scenario):
    """(A0, A1, A2) of the double-integral representation."""
    aL, aR = sc.left.a, sc.right.a
    bL, bR = sc.left.b, sc.right.b
    s = aL ** 2 + aR ** 2
    A0 = aL * aR * (aL * bR - aR * bL) / s
    A1 = (aR ** 2 - aL ** 2) ** 2 / (8.0 * s)
    A2 = (aR ** 4 + 6.0 * aR ** 2 * aL ** 2 + aL ** 4) / (16.0 * s)
    return A0, A1, A2


def _rho_equal_widths(sc: Scenario, t_c: float) -> float:
    a = sc.left.a
    m = sc.m
    db = sc.right.b - sc.left.b
    alpha = (1j * t_c / m - a * a) / 4.0
    beta = 0.5j * sc.separation + 0.5 * a * db
    # exp(-db^2/2) is split between the two squared factors
    scale = -db * db / 4.0
    i_plus = half_line_moment_integral(alpha, beta, sc.quad, log_scale=scale)
    i_minus = half_line_moment_integral(alpha, -beta, sc.quad, log_scale=scale)
    pref = a / (4.0 * np.pi * m * np.sqrt(2.0 * np.pi))
    return pref * (abs(i_plus) ** 2 + abs(i_minus) ** 2)


def _rho_general(sc: Scenario, t_c: float) -> float:
    aL, aR = sc.left.a, sc.right.a
    bL, bR = sc.left.b, sc.right.b
    m = sc.m
    d = sc.separation
    s = aL ** 2 + aR ** 2
    A0, A1, A2 = gaussian_coefficients(sc)
    log_pref = -(aL * bR - aR * bL) ** 2 / s
    pref = aL * aR / (2.0 * np.pi ** 1.5 * m * np.sqrt(s))
    alpha_out = 1j * t_c / (4.0 * m) - A2
    alpha_in = -1j * t_c / (4.0 * m) - A2
    # Gaussian envelope left in u' once the inner integral is done
    alpha_eff = alpha_out - A1 * A1 / (4.0 * alpha_in)
    rot = np.exp(1j * steepest_descent_angle(alpha_eff))
    g = abs(alpha_eff)
    width = np.sqrt(60.0 / g)
    total = 0.0
    for sgn in (1.0, -1.0):
        b_out = sgn * (0.5j * d + A0)
        b_in0 = sgn * (-0.5j * d + A0)
        saddle = -(b_out - A1 * b_in0 / (2.0 * alpha_in)) / (2.0 * alpha_eff)

        def outer(up):
            inner = np.array([half_line_moment_integral(alpha_in, A1 * x + b_in0, sc.quad,
                                                        log_scale=0.5 * log_pref) for x in up])
            return np.sqrt(up) * np.exp(alpha_out * up * up + b_out * up + 0.5 * log_pref) * inner

        # the inner integral is entire in u', so the outer path may leave the real axis
        r_proj = (saddle * np.conj(rot)).real
        if r_proj <= 0 or g * r_proj ** 2 <= 2.0:
            reach = max(r_proj, 0.0) + width
            val, _ = adaptive_gk15(lambda r: 2.0 * r * rot * outer(rot * r * r),
                                   0.0, np.sqrt(reach), sc.quad, initial=16)
        else:
            seg, _ = adaptive_gk15(lambda x: 2.0 * x * saddle * outer(saddle * x * x),
                                   0.0, 1.0, sc.quad, initial=16)
            ray, _ = adaptive_gk15(lambda r: rot * outer(saddle + rot * r),
                                   0.0, width, sc.quad, initial=16)
            val = seg + ray
        total += 0.5 * val.real
    return pref * total


def rho_quantum_at(sc: Scenario, t_c, general: Optional[bool] = None) -> np.ndarray:
    """Pointwise quantum density; equal widths use the factorised form unless ``general``."""
    use_general = (not sc.equal_widths) if general is None else general
    ts = np.atleast_1d(np.asarray(t_c, dtype=float))
    f = _rho_general if use_general else _rho_equal_widths
    vals = np.empty(len(ts))
    for i, t in enumerate(ts):
        try:
            vals[i] = f(sc, float(t))
        except (QuadratureError, OverflowError) as exc:
            raise type(exc)(f"t_c={t:.12g}: {exc}") from exc
    if np.any(vals < -NEGATIVE_CLIP):
        bad = ts[np.argmin(vals)]
        raise QuadratureError(f"negative density {vals.min():.3e} at t_c={bad}")
    vals = np.maximum(vals, 0.0)
    return vals if np.ndim(t_c) else vals[0]


def _half_line_time_integral(sc: Scenario, sign: float, t_scale: float,
                             ctl: QuadratureControl, general: Optional[bool]) -> float:
    # t = t_scale s^2 / (1 - s)^2 keeps the t^(-3/2) tail finite at s -> 1
    def integrand(s):
        w = 1.0 - s
        t = t_scale * s * s / (w * w)
        jac = 2.0 * t_scale * s / w ** 3
        return rho_quantum_at(sc, sign * t, general) * jac

    val, _ = adaptive_gk15(integrand, 0.0, 1.0, ctl, initial=16)
    return float(val.real)


def collision_probability_total(sc: Scenario, ctl: Optional[QuadratureControl] = None,
                                general: Optional[bool] = None) -> float:
    """p_c(infinity): integral of rho over t_c > 0."""
    ctl = ctl or QuadratureControl(rel_tol=1e-8, abs_tol=1e-10, max_subdivisions=4000)
    return _half_line_time_integral(sc, 1.0, _time_scale(sc), ctl, general)


def total_probability(sc: Scenario, ctl: Optional[QuadratureControl] = None) -> float:
    """Integral of rho over the whole real line (1 by completeness)."""
    ctl = ctl or QuadratureControl(rel_tol=1e-8, abs_tol=1e-10, max_subdivisions=4000)
    ts = _time_scale(sc)
    return (_half_line_time_integral(sc, 1.0, ts, ctl, None)
            + _half_line_time_integral(sc, -1.0, ts, ctl, None))


def _time_scale(sc: Scenario) -> float:
    grid = default_time_grid(sc, points=3)
    return max(abs(grid[1]), 0.5 * (grid[2] - grid[0]) / 8.0, 1e-3)


def rho_quantum(sc: Scenario, grid=None, points: int = 2001, with_total: bool = True,
                general: Optional[bool] = None) -> QuantumDensityResult:
    """Quantum collision-time density on ``grid`` (default: automatic 2001-point grid)."""
    grid = default_time_grid(sc, points) if grid is None else np.asarray(grid, dtype=float)
    values = rho_quantum_at(sc, grid, general)
    A0, A1, A2 = gaussian_coefficients(sc)
    p_total = collision_probability_total(sc, general=general) if with_total else float("nan")
    curve = DensityCurve(grid, values, "quantum",
                         {"rel_tol": sc.quad.rel_tol, "abs_tol": sc.quad.abs_tol,
                          "path": "general" if (general or not sc.equal_widths) else "equal-width"})
    return QuantumDensityResult(curve, A0, A1, A2, p_total, {"p_c_total_rel_tol": 1e-8})


def collision_probability(curve: DensityCurve, t: float) -> float:
    """p_c(t) = integral of the density over [0, t], trapezoid rule on the grid."""
    if t < 0:
        raise ValueError("t must be >= 0")
    g = curve.grid
    if g[0] > 0 or t > g[-1]:
        raise ValueError(f"curve grid [{g[0]}, {g[-1]}] does not cover [0, {t}]")
    cum = curve.cumulative()
    return float(max(np.interp(t, g, cum) - np.interp(0.0, g, cum), 0.0))


def collision_probability_curve(curve: DensityCurve, ts) -> np.ndarray:
    """Vectorised collision_probability on an increasing set of times."""
    ts = np.asarray(ts, dtype=float)
    g = curve.grid
    if np.any(ts < 0) or g[0] > 0 or np.any(ts > g[-1]):
        raise ValueError(f"curve grid [{g[0]}, {g[-1]}] does not cover the requested times")
    cum = curve.cumulative()
    return np.maximum(np.interp(ts, g, cum) - np.interp(0.0, g, cum), 0.0)


def rho_prepared(sc: Scenario, t_c, t_prep: float, n_v: int = 241, n_w: Optional[int] = None):
    """Density for the pair prepared at time ``t_prep``, by brute-force quadrature.

    Evaluates the POVM expectation directly from the evolved momentum
    amplitudes: sum over the two branches of int dv |F(v)|^2 with
    F(v) = int du <t_c|u> psi_L(v - u/2, t) psi_R(v + u/2, t), using
    composite Simpson rules in v and in w = sqrt(|u|).
    """
    L, R = sc.left, sc.right
    m = sc.m
    u_c = R.mean_momentum - L.mean_momentum
    sig_u = np.sqrt(L.momentum_variance + R.momentum_variance)
    v_c = 0.5 * (L.mean_momentum + R.mean_momentum)
    u_lo, u_hi = u_c - 12 * sig_u, u_c + 12 * sig_u
    v = np.linspace(v_c - 6 * sig_u, v_c + 6 * sig_u, n_v | 1)
    wv = _simpson_weights(v)
    out = []
    for tc in np.atleast_1d(t_c):
        total = 0.0
        for sgn in (1.0, -1.0):
            a, b = (max(u_lo, 0.0), u_hi) if sgn > 0 else (max(-u_hi, 0.0), -u_lo)
            if b <= a:
                continue
            w_max = np.sqrt(b)
            phase = (abs(tc) + abs(t_prep)) * b * b / (4 * m) + (abs(L.c) + abs(R.c) + 1) * b
            n = n_w or int(min(16 * phase / np.pi + 401, 200001))
            w = np.linspace(np.sqrt(a), w_max, n | 1)
            ww = _simpson_weights(w)
            u = sgn * w * w
            kern = 2.0 * w * w * np.exp(-1j * tc * u * u / (4 * m)) / np.sqrt(4 * np.pi * m)
            amp = (momentum_amplitude(L, v[:, None] - 0.5 * u[None, :], t_prep)
                   * momentum_amplitude(R, v[:, None] + 0.5 * u[None, :], t_prep))
            F = amp @ (kern * ww)
            total += float(wv @ np.abs(F) ** 2)
        out.append(total)
    out = np.array(out)
    return out if np.ndim(t_c) else out[0]


def _simpson_weights(x):
    n = len(x)
    h = (x[-1] - x[0]) / (n - 1)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def time_translation_check(sc: Scenario, t: float, shifts, **kw) -> float:
    """max |rho_t(t_c) - rho_0(t_c + t)| over ``shifts`` (the t_c values)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    shifts = np.asarray(shifts, dtype=float)
    lhs = rho_prepared(sc, shifts, t, **kw)
    rhs = rho_quantum_at(sc, shifts + t)
    return float(np.max(np.abs(lhs - rhs)))
