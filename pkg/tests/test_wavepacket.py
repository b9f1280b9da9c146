import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynsym.wavepacket import (
    GaussianPacket, Scenario, momentum_amplitude, overlap, position_amplitude, wigner, wigner_sample,
)

packets = st.builds(
    GaussianPacket,
    a=st.floats(0.2, 2.0),
    b=st.floats(-2.0, 2.0),
    c=st.floats(-3.0, 3.0),
)


def _grid(pkt, t, n=8001, span=12.0):
    s = float(pkt.position_spread(t))
    return np.linspace(float(pkt.center(t)) - span * s, float(pkt.center(t)) + span * s, n)


@settings(max_examples=30, deadline=None)
@given(packets, st.floats(0.0, 3.0))
def test_position_density_is_normalised(pkt, t):
    x = _grid(pkt, t)
    assert np.trapezoid(np.abs(position_amplitude(pkt, x, t)) ** 2, x) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(packets, st.floats(0.0, 2.0))
def test_mean_and_spread(pkt, t):
    x = _grid(pkt, t)
    rho = np.abs(position_amplitude(pkt, x, t)) ** 2
    mean = np.trapezoid(x * rho, x)
    var = np.trapezoid((x - mean) ** 2 * rho, x)
    assert mean == pytest.approx(float(pkt.center(t)), abs=1e-8)
    assert np.sqrt(var) == pytest.approx(float(pkt.position_spread(t)), rel=1e-8)


def test_position_amplitude_is_fourier_transform_of_momentum_amplitude():
    pkt = GaussianPacket(0.7, 0.9, -0.4, m=1.3)
    t = 0.8
    p = np.linspace(pkt.mean_momentum - 14 / pkt.a, pkt.mean_momentum + 14 / pkt.a, 6001)
    for x in (-1.0, 0.2, 1.5):
        ft = np.trapezoid(np.exp(1j * p * x) * momentum_amplitude(pkt, p, t), p) / np.sqrt(2 * np.pi)
        assert ft == pytest.approx(position_amplitude(pkt, x, t), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(packets, packets)
def test_overlap_matches_quadrature(left, right):
    lo = min(left.c, right.c) - 12 * max(left.a, right.a)
    hi = max(left.c, right.c) + 12 * max(left.a, right.a)
    x = np.linspace(lo, hi, 20001)
    ref = np.trapezoid(np.conj(position_amplitude(left, x)) * position_amplitude(right, x), x)
    assert overlap(left, right) == pytest.approx(ref, abs=1e-10)


def test_overlap_is_time_independent():
    L, R = GaussianPacket(0.5, 0.4, -0.3), GaussianPacket(0.8, -0.2, 0.6)
    x = np.linspace(-40, 40, 40001)
    for t in (0.0, 1.0, 3.0):
        val = np.trapezoid(np.conj(position_amplitude(L, x, t)) * position_amplitude(R, x, t), x)
        assert val == pytest.approx(overlap(L, R), abs=1e-10)


def test_wigner_marginal_is_position_density():
    pkt = GaussianPacket(0.6, 1.1, 0.3)
    t = 1.2
    p = np.linspace(-15, 20, 7001)
    for x in (-0.5, 0.8, 2.0):
        marg = np.trapezoid(wigner(pkt, x, p, t), p)
        assert marg == pytest.approx(abs(position_amplitude(pkt, x, t)) ** 2, abs=1e-10)


def test_wigner_sampler_moments():
    pkt = GaussianPacket(0.4, -0.8, 1.0)
    x, p = wigner_sample(pkt, 200_000, np.random.default_rng(5))
    assert x.mean() == pytest.approx(pkt.c, abs=0.01)
    assert p.mean() == pytest.approx(pkt.mean_momentum, abs=0.02)
    assert p.var() == pytest.approx(pkt.momentum_variance, rel=0.02)


@pytest.mark.parametrize("kw", [{"a": 0.0}, {"a": -1.0}, {"a": 1.0, "m": 0.0}, {"a": np.nan}])
def test_packet_validation(kw):
    with pytest.raises(ValueError):
        GaussianPacket(**kw)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(GaussianPacket(1.0), GaussianPacket(1.0), eta=0)
    with pytest.raises(ValueError):
        Scenario(GaussianPacket(1.0, m=1.0), GaussianPacket(1.0, m=2.0))


def test_swap_mirrors_the_pair():
    sc = Scenario(GaussianPacket(0.3, 1.0, -2.0), GaussianPacket(0.5, -0.7, 2.5))
    sw = sc.swapped()
    assert sw.separation == sc.separation
    assert sw.left.a == sc.right.a and sw.left.b == -sc.right.b
