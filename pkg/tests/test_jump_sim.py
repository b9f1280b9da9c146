import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynsym.jump_sim import (
    Trajectory, ensemble_both_signal, ensemble_summary, sample_jump_time, simulate_trajectory, symmetrize,
)
from dynsym.measurement import Detector, TwoParticleState, pair_detection_probability
from dynsym.quantum_arrival import collision_probability, collision_probability_curve, rho_quantum
from dynsym.semiclassical import DensityCurve, forward_time_grid
from dynsym.wavepacket import Scenario


@pytest.fixture(scope="module")
def red_curve():
    sc = Scenario.symmetric(0.1, 0.333, 5.0)
    return sc, rho_quantum(sc, forward_time_grid(sc), with_total=False).curve


def test_gamma_zero_hits_left_edge_of_support():
    grid = np.linspace(0, 4, 41)
    vals = np.where((grid > 1.0) & (grid < 3.0), 1.0, 0.0)
    curve = DensityCurve(grid, vals, "quantum")
    assert sample_jump_time(curve, 0.0) == pytest.approx(1.0)


def test_never_jumps_above_final_probability(red_curve):
    _, curve = red_curve
    assert sample_jump_time(curve, 0.9) is None
    pmax = collision_probability(curve, curve.grid[-1])
    assert sample_jump_time(curve, pmax) is None


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 0.74))
def test_inverse_cdf_round_trip(red_curve, gamma):
    _, curve = red_curve
    t = sample_jump_time(curve, gamma)
    assert collision_probability(curve, t) == pytest.approx(gamma, abs=1e-10)


def test_invalid_gamma(red_curve):
    with pytest.raises(ValueError):
        sample_jump_time(red_curve[1], 1.2)


def test_state_switches_at_jump(red_curve):
    sc, curve = red_curve
    tr = simulate_trajectory(sc, curve, seed=4, index=2)
    assert tr == simulate_trajectory(sc, curve, seed=4, index=2)
    if tr.jumped:
        assert tr.state_at(sc, tr.jump_time - 1e-6).kind == "product"
        assert tr.state_at(sc, tr.jump_time + 1e-6).kind == "symmetrized"
    never = Trajectory(None, 0.99, 0)
    assert never.state_kind(1e9) == "product"


def test_symmetrizer_idempotent():
    sc = Scenario.symmetric(0.5, 1.5, 2.5)
    det = Detector(0.0, 0.25)
    once = symmetrize(TwoParticleState("product", sc))
    twice = symmetrize(once)
    a = pair_detection_probability(once, det, 0.4).as_tuple()
    b = pair_detection_probability(twice, det, 0.4).as_tuple()
    assert np.max(np.abs(np.subtract(a, b))) < 1e-12


def test_ensemble_follows_collision_probability(red_curve):
    sc, curve = red_curve
    t = np.linspace(0, 20, 201)
    M = 10_000
    summ = ensemble_summary(sc, curve, M, seed=11, t_grid=t)
    pc = collision_probability_curve(curve, t)
    assert np.all(np.abs(summ.jumped_fraction - pc) <= 3 * np.sqrt(pc * (1 - pc) / M))
    assert np.all(np.diff(summ.jumped_fraction) >= 0)


def test_single_trajectory_is_a_step(red_curve):
    sc, curve = red_curve
    t = np.linspace(0, 20, 201)
    summ = ensemble_summary(sc, curve, 1, seed=3, t_grid=t)
    assert set(np.unique(summ.jumped_fraction)) <= {0.0, 1.0}
    assert np.all(np.diff(summ.jumped_fraction) >= 0)


def test_workers_do_not_change_results(red_curve):
    sc, curve = red_curve
    t = np.linspace(0, 5, 11)
    a = ensemble_summary(sc, curve, 500, 2, t, workers=1)
    b = ensemble_summary(sc, curve, 500, 2, t, workers=4)
    np.testing.assert_array_equal(a.jump_times, b.jump_times)


def test_ensemble_signal_matches_mixed_state_formula():
    sc = Scenario.symmetric(0.5, 1.5, 2.5)
    curve = rho_quantum(sc, forward_time_grid(sc, 801), with_total=False).curve
    det = Detector(0.0, 0.25)
    t = np.linspace(0.1, 2.0, 12)
    M = 4000
    summ = ensemble_summary(sc, curve, M, seed=5, t_grid=t)
    got = ensemble_both_signal(sc, det, summ)
    pc = collision_probability_curve(curve, t)
    for i, ti in enumerate(t):
        prod = pair_detection_probability(TwoParticleState("product", sc), det, ti).both
        sym = pair_detection_probability(TwoParticleState("symmetrized", sc), det, ti).both
        expect = (1 - pc[i]) * prod + pc[i] * sym
        tol = 3 * np.sqrt(pc[i] * (1 - pc[i]) / M) * abs(sym - prod) + 1e-15
        assert abs(got[i] - expect) <= tol


def test_ensemble_rejects_empty(red_curve):
    sc, curve = red_curve
    with pytest.raises(ValueError):
        ensemble_summary(sc, curve, 0, 1, [0.0, 1.0])


def test_substreams_are_calibrated():
    # the never-jumped count over independent master seeds is binomial
    from dynsym.jump_sim import trajectory_generator
    p, M = 0.7469, 2000
    z = []
    for seed in range(60):
        g = np.array([trajectory_generator(seed, i).random() for i in range(M)])
        z.append(((g < p).mean() - p) / np.sqrt(p * (1 - p) / M))
    z = np.array(z)
    assert abs(z.mean()) < 4 / np.sqrt(len(z))
    assert 0.7 < z.std() < 1.3
