"""Symmetric two-particle measurements: coordinate densities, interval
detectors and projectors onto coordinate superpositions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .quantum_arrival import collision_probability_curve
from .semiclassical import DensityCurve
from .specfun import QuadratureControl, adaptive_gk15, erf
from .wavepacket import GaussianPacket, Scenario, overlap, position_amplitude

KINDS = ("product", "symmetrized", "mixed")
MODES = ("flat-window", "two-branch")
# detector quadrature is the reference for the closed forms, so it runs tight
DETECTOR_QUAD = QuadratureControl(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=4000)


class ConventionError(ValueError):
    """Closed form requested for packets outside its symmetry conventions."""


@dataclass(frozen=True)
class Detector:
    """Projector onto the coordinate interval [center - half_width, center + half_width]."""

    center: float
    half_width: float

    def __post_init__(self):
        if not np.isfinite(self.center):
            raise ValueError("detector center must be finite")
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be finite and > 0, got {self.half_width}")

    @property
    def window(self):
        return self.center - self.half_width, self.center + self.half_width


@dataclass(frozen=True)
class TwoParticleState:
    kind: str
    scenario: Scenario
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "mixed":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"mixed state needs p in [0, 1], got {self.p}")
        elif self.p is not None:
            raise ValueError("p is only meaningful for mixed states")
        if self.kind != "product" and self.norm_factor() <= 1e-14:
            raise ValueError("symmetrized state vanishes (identical packets with eta = -1)")

    @property
    def eta(self) -> int:
        return self.scenario.eta

    @property
    def weight_symmetrized(self) -> float:
        return {"product": 0.0, "symmetrized": 1.0}.get(self.kind, self.p)

    def norm_factor(self) -> float:
        """1 + eta |<L|R>|^2, half the squared norm of |LR> + eta |RL>."""
        sc = self.scenario
        return 1.0 + sc.eta * abs(overlap(sc.left, sc.right)) ** 2

    def mix(self, product_value, symmetrized_value):
        w = self.weight_symmetrized
        if w == 0.0:
            return product_value
        if w == 1.0:
            return symmetrized_value
        return (1.0 - w) * product_value + w * symmetrized_value


def joint_coordinate_density(state: TwoParticleState, x1, x2, t: float = 0.0):
    """D(x1, x2) = <Psi| P_{x1 x2} |Psi> for the symmetrised coordinate projector."""
    sc = state.scenario
    pl1 = position_amplitude(sc.left, x1, t)
    pl2 = position_amplitude(sc.left, x2, t)
    pr1 = position_amplitude(sc.right, x1, t)
    pr2 = position_amplitude(sc.right, x2, t)
    d_prod = np.abs(pl1 * pr2) ** 2 + np.abs(pl2 * pr1) ** 2
    if state.kind == "product":
        return d_prod
    exchange = 2.0 * np.real(np.conj(pl1) * pl2 * pr1 * np.conj(pr2))
    d_sym = (d_prod + sc.eta * exchange) / state.norm_factor()
    return state.mix(d_prod, d_sym)


def _window_integral(f, lo: float, hi: float, ctl: QuadratureControl) -> complex:
    val, _ = adaptive_gk15(f, lo, hi, ctl, initial=32)
    return complex(val)


def window_matrix_element(bra: GaussianPacket, ket: GaussianPacket, lo: float, hi: float,
                          t: float = 0.0, ctl: QuadratureControl = DETECTOR_QUAD) -> complex:
    """<bra(t)| P |ket(t)> for P the projector on [lo, hi], by adaptive quadrature."""
    return _window_integral(lambda x: np.conj(position_amplitude(bra, x, t))
                            * position_amplitude(ket, x, t), lo, hi, ctl)


def _check_conventions(sc: Scenario, det: Detector):
    L, R = sc.left, sc.right
    scale = max(abs(L.c), abs(R.c), L.a, 1.0)
    if L.a != R.a or abs(L.b + R.b) > 1e-14 * max(abs(L.b), 1.0):
        raise ConventionError("closed form needs a_L = a_R and b_L = -b_R")
    if abs(det.center - 0.5 * (L.c + R.c)) > 1e-12 * scale:
        raise ConventionError("closed form needs the detector at the midpoint (c_L + c_R) / 2")


def _closed_form_elements(sc: Scenario, det: Detector, t: float):
    a, b, m = sc.left.a, sc.left.b, sc.m
    d, ell = sc.separation, det.half_width
    tau = t / (m * a * a)
    sp = a * np.sqrt(1.0 + tau * tau)
    abt = a * b * tau
    pll = 0.5 * (erf((ell - abt + 0.5 * d) / sp) - erf((-ell - abt + 0.5 * d) / sp))
    prr = 0.5 * (erf((ell + abt - 0.5 * d) / sp) - erf((-ell + abt - 0.5 * d) / sp))
    kappa = a * b + 0.5 * tau * d
    prl = 0.5 * np.exp(-b * b - d * d / (4.0 * a * a)) * (
        erf((ell - 1j * kappa) / sp) - erf(-(ell + 1j * kappa) / sp))
    return float(np.real(pll)), float(np.real(prr)), complex(prl)


def detector_matrix_elements(sc: Scenario, det: Detector, t: float = 0.0, method: str = "auto"):
    """(<L|P|L>, <R|P|R>, <R|P|L>) at time t.

    ``method``: "closed" (equal widths, opposite momenta, midpoint detector),
    "quadrature", or "auto" (closed form when its conventions hold).
    """
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method != "quadrature":
        try:
            _check_conventions(sc, det)
            return _closed_form_elements(sc, det, t)
        except ConventionError:
            if method == "closed":
                raise
    lo, hi = det.window
    pll = window_matrix_element(sc.left, sc.left, lo, hi, t).real
    prr = window_matrix_element(sc.right, sc.right, lo, hi, t).real
    prl = window_matrix_element(sc.right, sc.left, lo, hi, t)
    return pll, prr, prl


@dataclass(frozen=True)
class PairOutcome:
    both: float
    none: float
    one: float

    def as_tuple(self):
        return self.both, self.none, self.one


def pair_detection_probability(state: TwoParticleState, det: Detector, t: float = 0.0,
                               method: str = "auto") -> PairOutcome:
    """Probabilities that the detector fires on both, none or one of the particles."""
    sc = state.scenario
    pll, prr, prl = detector_matrix_elements(sc, det, t, method)
    both_p = pll * prr
    none_p = (1.0 - pll) * (1.0 - prr)
    if state.kind == "product":
        both, none = both_p, none_p
    else:
        nf = state.norm_factor()
        lr = overlap(sc.left, sc.right)
        # P' = 1 - P, so <L|P'|R> = <L|R> - <L|P|R>
        plr_c = lr - np.conj(prl)
        both_s = (both_p + sc.eta * abs(prl) ** 2) / nf
        none_s = (none_p + sc.eta * abs(plr_c) ** 2) / nf
        both, none = state.mix(both_p, both_s), state.mix(none_p, none_s)
    return PairOutcome(float(both), float(none), float(1.0 - both - none))


def signal_curve(sc: Scenario, det: Detector, pcurve: DensityCurve, t_grid, method: str = "auto"):
    """Direct term <L|P|L><R|P|R> and correlation term p_c(t) |<R|P|L>|^2 along ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    pc = collision_probability_curve(pcurve, t_grid)
    direct = np.empty_like(t_grid)
    corr = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        pll, prr, prl = detector_matrix_elements(sc, det, t, method)
        direct[i] = pll * prr
        corr[i] = pc[i] * abs(prl) ** 2
    return direct, corr


@dataclass(frozen=True)
class SuperpositionProjector:
    """P_C = |C><C| described by its overlaps with the two packets.

    flat-window: amp_L = <C|L>, amp_R = <C|R>.
    two-branch: |C> = (|A1> + |A2>)/sqrt(2) with amp_L = <A1|L>,
    amp_R = <A2|R> and <A1|R> = <A2|L> = 0.
    """

    amp_L: complex
    amp_R: complex
    mode: str = "flat-window"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("amp_L", "amp_R"):
            if abs(getattr(self, name)) > 1.0 + 1e-12:
                raise ValueError(f"|{name}| must be <= 1")

    def overlaps(self):
        """(<C|L>, <C|R>)."""
        if self.mode == "flat-window":
            return self.amp_L, self.amp_R
        return self.amp_L / np.sqrt(2.0), self.amp_R / np.sqrt(2.0)


def superposition_detection(state: TwoParticleState, proj: SuperpositionProjector) -> float:
    """<P_C (x) P_C> for the given state."""
    cl, cr = proj.overlaps()
    prod = abs(cl * cr) ** 2
    if state.kind == "product":
        return float(prod)
    # <LR|P_C x P_C|RL> = |<C|L>|^2 |<C|R>|^2, so the exchange term doubles or cancels
    sym = (1.0 + state.eta) * prod / state.norm_factor()
    return float(state.mix(prod, sym))


def flat_window_amplitude(pkt: GaussianPacket, r: float, t: float = 0.0, center: float = 0.0,
                          ctl: QuadratureControl = DETECTOR_QUAD) -> complex:
    """<C|psi> for the normalised flat window of length r around ``center``."""
    if not r > 0:
        raise ValueError("window length r must be > 0")
    lo, hi = center - 0.5 * r, center + 0.5 * r
    return _window_integral(lambda x: position_amplitude(pkt, x, t), lo, hi, ctl) / np.sqrt(r)


def reduced_states(state: TwoParticleState):
    """Single-particle assignments as ((weight, packet), ...) for particles 1 and 2."""
    sc = state.scenario
    if state.kind == "mixed":
        raise ValueError("reduced states are assigned only for product or symmetrized states")
    if state.kind == "product":
        return ((1.0, sc.left),), ((1.0, sc.right),)
    half = ((0.5, sc.left), (0.5, sc.right))
    return half, half


def expectation_sum(reduced, observable: Callable, t: float = 0.0, span: float = 12.0,
                    ctl: QuadratureControl = DETECTOR_QUAD) -> float:
    """tr(sigma_1 O) + tr(sigma_2 O) for a multiplicative observable O(x)."""
    total = 0.0
    for marginal in reduced:
        for w, pkt in marginal:
            centre = float(pkt.center(t))
            half = span * float(pkt.position_spread(t))
            f = lambda x, pk=pkt: observable(x) * np.abs(position_amplitude(pk, x, t)) ** 2
            total += w * _window_integral(f, centre - half, centre + half, ctl).real
    return total
