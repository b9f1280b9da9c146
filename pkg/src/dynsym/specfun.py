"""Special-function and quadrature kernels.

``erf`` evaluates the complex error function, ``half_line_moment_integral``
evaluates ``I(alpha, beta) = int_0^inf sqrt(u) exp(alpha u^2 + beta u) du``.
Both accept scalars or numpy arrays where noted and never return NaN
silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ERF_MAX_ABS = 50.0
_SERIES_RADIUS = 3.0
_WEIDEMAN_N = 40
_TWO_OVER_SQRT_PI = 2.0 / np.sqrt(np.pi)
# ln(1e16): envelope drop below which the integrand is negligible
_LOG_CUTOFF = 36.85
_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not meet its tolerance."""


class DivergenceError(ValueError):
    """The requested integral does not converge."""


@dataclass(frozen=True)
class QuadratureControl:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if int(self.max_subdivisions) < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUAD = QuadratureControl()


# --------------------------------------------------------------------------
# complex error function
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _weideman_coefficients(n: int = _WEIDEMAN_N):
    """Polynomial coefficients of Weideman's rational Faddeeva approximation."""
    m = 2 * n
    k = np.arange(-m + 1, m)
    L = np.sqrt(n / np.sqrt(2.0))
    t = L * np.tan(0.5 * k * np.pi / m)
    f = np.concatenate(([0.0], np.exp(-t * t) * (L * L + t * t)))
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return np.flipud(a[1:n + 1]), L


def faddeeva_upper(z):
    """w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0."""
    coeffs, L = _weideman_coefficients()
    z = np.asarray(z, dtype=complex)
    denom = L - 1j * z
    poly = np.polyval(coeffs, (L + 1j * z) / denom)
    return 2.0 * poly / denom ** 2 + (1.0 / np.sqrt(np.pi)) / denom


def _erf_series(z):
    # Maclaurin series; |z| < 3 keeps the cancellation below ~1e-12 of the sum
    z = np.asarray(z, dtype=complex)
    z2 = z * z
    term = z.copy()
    total = z.copy()
    for n in range(1, 200):
        term = term * (-z2) / n
        add = term / (2 * n + 1)
        total = total + add
        if np.all(np.abs(add) <= 1e-17 * np.abs(total)):
            break
    return _TWO_OVER_SQRT_PI * total


def erf(z):
    """Complex error function, erf(z) = 2/sqrt(pi) int_0^z exp(-s^2) ds.

    Works on scalars and arrays.  Complex arguments with ``|z| > 50`` raise
    ``ValueError``; results that overflow raise ``OverflowError``.  Real
    arguments saturate to +-1 beyond that range.
    """
    scalar = np.ndim(z) == 0
    real_input = not np.iscomplexobj(z)
    z = np.asarray(z, dtype=complex)
    if np.any(~np.isfinite(z)):
        raise ValueError("erf: non-finite argument")
    if real_input:
        # erf(50) == 1 to double precision
        z = np.clip(z.real, -ERF_MAX_ABS, ERF_MAX_ABS).astype(complex)
    elif np.any(np.abs(z) > ERF_MAX_ABS):
        raise ValueError(f"erf: |z| exceeds the supported range {ERF_MAX_ABS}")

    # fold into the first quadrant; odd symmetry and conjugation restore the rest
    neg_re = z.real < 0
    neg_im = z.imag < 0
    q = np.abs(z.real) + 1j * np.abs(z.imag)
    out = np.empty_like(q)
    small = np.abs(q) < _SERIES_RADIUS
    if np.any(small):
        out[small] = _erf_series(q[small])
    big = ~small
    if np.any(big):
        zb = q[big]
        with np.errstate(over="raise", invalid="raise"):
            try:
                out[big] = 1.0 - np.exp(-zb * zb) * faddeeva_upper(1j * zb)
            except FloatingPointError as exc:
                raise OverflowError("erf: result overflows double precision") from exc
    out = np.where(neg_im ^ neg_re, np.conj(out), out)
    out = np.where(neg_re, -out, out)
    if real_input:
        out = out.real
    return out[()] if scalar else out


# --------------------------------------------------------------------------
# half-line Gaussian moment integral
# --------------------------------------------------------------------------

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))
_KW = np.concatenate((_WGK[:-1], _WGK[::-1]))
_GW = np.zeros(15)
_GW[1::2] = np.concatenate((_WG[:-1], _WG[::-1]))


def adaptive_gk15(f, lo: float, hi: float, ctl: QuadratureControl = DEFAULT_QUAD,
                  initial: int = 8, abs_tol: float | None = None):
    """Globally adaptive Gauss-Kronrod 7/15 quadrature of a vectorised f.

    ``f`` maps a 1-d array of nodes to an array of (complex) values.  All
    intervals whose local error estimate exceeds their share of the
    tolerance are halved together on each sweep.
    """
    if int(initial) < 1:
        raise ValueError(f"initial mesh needs >= 1 interval, got {initial}")
    edges = np.linspace(lo, hi, int(initial) + 1)
    a, b = edges[:-1], edges[1:]
    done_val = 0.0 + 0.0j
    done_err = 0.0
    l1_norm = None
    abs_tol = ctl.abs_tol if abs_tol is None else abs_tol
    n_intervals = len(a)
    while True:
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = np.asarray(f(x.ravel())).reshape(x.shape)
        if not np.all(np.isfinite(fx)):
            raise QuadratureError("non-finite integrand encountered")
        kron = half * (fx @ _KW)
        gauss = half * (fx @ _GW)
        err = np.abs(kron - gauss)
        total = done_val + kron.sum()
        if l1_norm is None:
            l1_norm = float((half * (np.abs(fx) @ _KW)).sum())
        # roundoff floor: cancellation below eps * int|f| is unresolvable
        tol = max(abs_tol, ctl.rel_tol * abs(total), 64 * _EPS * l1_norm)
        if done_err + err.sum() <= tol:
            return total, done_err + err.sum()
        # accept intervals already well inside their proportional share
        share = tol * half / (0.5 * (hi - lo))
        good = err <= 0.5 * share
        done_val += kron[good].sum()
        done_err += err[good].sum()
        bad = ~good
        n_intervals += int(bad.sum())
        if n_intervals > ctl.max_subdivisions:
            raise QuadratureError(
                f"max_subdivisions={ctl.max_subdivisions} exhausted "
                f"(error estimate {done_err + err.sum():.3e}, tolerance {tol:.3e})")
        a_bad, b_bad, m_bad = a[bad], b[bad], mid[bad]
        a = np.concatenate((a_bad, m_bad))
        b = np.concatenate((m_bad, b_bad))


def steepest_descent_angle(alpha: complex) -> float:
    """Ray angle theta with alpha * exp(2i theta) real and negative."""
    arg = np.angle(alpha)
    return 0.5 * (np.pi - arg) if arg >= 0 else -0.5 * (np.pi + arg)


def half_line_moment_integral(alpha, beta, ctl: QuadratureControl = DEFAULT_QUAD,
                              log_scale: complex = 0.0) -> complex:
    """``exp(log_scale) * int_0^inf sqrt(u) exp(alpha u^2 + beta u) du``.

    The integrand is analytic off the negative real axis, so the half-line
    is deformed onto a steepest-descent path of ``phi(u) = alpha u^2 +
    beta u``: either a single ray from the origin, or (when the saddle
    ``u_s = -beta / (2 alpha)`` projects far along that ray) the segment
    0 -> u_s followed by the descent ray through u_s.  On the ray the
    quadratic phase is gone and the integrand is a real Gaussian times a
    slowly varying factor; the Gaussian envelope fixes a finite window that
    is integrated adaptively.  ``log_scale`` is folded into the exponent so
    that large prefactors do not overflow.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise ValueError("alpha and beta must be finite")
    if alpha.real >= 0:
        raise DivergenceError(f"Re(alpha) must be < 0, got alpha={alpha}")
    theta = steepest_descent_angle(alpha)
    rot = np.exp(1j * theta)
    g = abs(alpha)
    u_s = -beta / (2.0 * alpha)
    r_proj = (u_s / rot).real
    half_width = np.sqrt((_LOG_CUTOFF + 4.0) / g)

    if g * r_proj ** 2 <= 2.0 or r_proj <= 0:
        # single ray from the origin; envelope -g r^2 + Re(bp) r
        bp = beta * rot
        r_star = max(r_proj, 0.0)
        peak_log = -g * r_star ** 2 + bp.real * r_star
        r_lo = max(r_star - half_width, 0.0)
        r_hi = r_star + half_width + 1.0 / np.sqrt(g)

        def on_ray(sv):
            s2 = sv * sv
            return 2.0 * s2 * np.exp(-g * s2 * s2 + bp * s2 - peak_log)

        pieces = [(on_ray, np.sqrt(r_lo), np.sqrt(r_hi), abs(bp.imag) * (r_hi - r_lo))]
        lead = 1.5j * theta
    else:
        phi_s = alpha * u_s * u_s + beta * u_s
        peak_log = max(phi_s.real, 0.0)
        c_seg = alpha * u_s * u_s
        sqrt_us = np.sqrt(u_s)

        def on_segment(sv):
            # u = u_s sv^2, sv in [0, 1]
            s2 = sv * sv
            return 2.0 * s2 * np.exp(c_seg * (s2 * s2 - 2.0 * s2) - peak_log)

        def on_descent(r):
            return np.sqrt(u_s + r * rot) * np.exp(phi_s - g * r * r - peak_log)

        seg_scale = u_s * sqrt_us
        pieces = [
            (lambda sv: seg_scale * on_segment(sv), 0.0, 1.0, abs(c_seg.imag)),
            (lambda r: rot * on_descent(r), 0.0, half_width + 1.0 / np.sqrt(g), 0.0),
        ]
        lead = 0.0j

    shift = (log_scale + lead).real + peak_log
    if shift > 700:
        raise OverflowError("half_line_moment_integral: result overflows")
    # abs_tol refers to the unscaled integral
    scaled_abs = ctl.abs_tol * np.exp(-shift) if shift > -700 else np.inf
    total = 0.0j
    for f, lo, hi, phase_span in pieces:
        n0 = max(1, int(min(max(8, phase_span / np.pi), ctl.max_subdivisions // 2)))
        val, _ = adaptive_gk15(f, lo, hi, ctl, initial=n0,
                               abs_tol=scaled_abs / len(pieces))
        total += val
    return complex(total * np.exp(shift + 1j * (log_scale + lead).imag))
