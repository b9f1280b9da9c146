import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynsym.collision3d import (
    Gaussian3DPacket, PhasePoint3D, collision_condition_3d, collision_time_3d, rho3d_mc, separation_at,
)
from dynsym.semiclassical import rho_cl
from dynsym.wavepacket import Scenario

vec = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)


def point(x12, p12, m=1.0, l=0.5):
    return PhasePoint3D(np.asarray(x12, float), np.zeros(3), np.asarray(p12, float), np.zeros(3), m, l)


def test_head_on():
    pt = point([5, 0, 0], [-2, 0, 0], 1.0, 0.5)
    assert collision_condition_3d(pt)
    assert collision_time_3d(pt) == pytest.approx(2.25, rel=1e-14)


def test_receding():
    pt = point([5, 0, 0], [2, 0, 0])
    assert not collision_condition_3d(pt)
    assert collision_time_3d(pt) is None


def test_grazing():
    # impact parameter exactly l: discriminant vanishes
    pt = point([4.0, 0.5, 0.0], [-1.0, 0.0, 0.0], 2.0, 0.5)
    assert collision_time_3d(pt) == pytest.approx(8.0, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(vec, vec)
def test_point_particles_never_collide(x, p):
    if np.linalg.norm(x) == 0:
        return
    assert not collision_condition_3d(point(x, p, l=0.0))


@settings(max_examples=200, deadline=None)
@given(vec, vec, st.floats(0.1, 2.0), st.floats(0.05, 1.0))
def test_collision_time_lands_on_the_sphere(x, p, m, l):
    if np.linalg.norm(x) <= l * 1.01:
        return
    pt = point(x, p, m, l)
    t = collision_time_3d(pt)
    if t is not None:
        assert t > 0
        assert abs(separation_at(pt, t) - l) <= 1e-9 * l


@settings(max_examples=50, deadline=None)
@given(vec, vec, st.floats(0, 2 * np.pi), vec)
def test_rotation_and_boost_invariance(x, p, angle, boost):
    if np.linalg.norm(x) <= 0.6:
        return
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    a = collision_time_3d(point(x, p))
    b = collision_time_3d(point(rot @ x, rot @ p))
    boosted = PhasePoint3D(x, np.zeros(3), p + boost, boost, 1.0, 0.5)
    c_ = collision_time_3d(boosted)
    if a is None:
        assert b is None and c_ is None
    else:
        assert b == pytest.approx(a, rel=1e-12) and c_ == pytest.approx(a, rel=1e-12)


def test_point_validation():
    with pytest.raises(ValueError):
        point([0.1, 0, 0], [1, 0, 0], l=0.5)
    with pytest.raises(ValueError):
        point([1, 0], [1, 0, 0])


def _packets(a_perp=0.5):
    L = Gaussian3DPacket.from_arrays([0.5, a_perp, a_perp], [1.5, 0, 0], [-2.5, 0, 0])
    R = Gaussian3DPacket.from_arrays([0.5, a_perp, a_perp], [-1.5, 0, 0], [2.5, 0, 0])
    return L, R


def test_fraction_shrinks_with_range():
    L, R = _packets()
    fr = [rho3d_mc(L, R, l, 200_000, 1, (0, 10, 50)).collision_fraction for l in (0.5, 0.1, 0.01)]
    assert fr[0] > fr[1] > fr[2]


def test_accepted_samples_hit_the_sphere():
    L, R = _packets()
    res = rho3d_mc(L, R, 0.5, 100_000, 2, (0, 10, 50))
    assert res.max_residual < 1e-9
    assert res.curve.meta["accepted"] > 0


def test_deterministic_across_workers():
    L, R = _packets()
    a = rho3d_mc(L, R, 0.5, 140_000, 4, (0, 10, 40), workers=1)
    b = rho3d_mc(L, R, 0.5, 140_000, 4, (0, 10, 40), workers=3)
    np.testing.assert_array_equal(a.curve.values, b.curve.values)


def test_one_dimensional_limit():
    # heavy, fast, transversally narrow packets: the 3D histogram is the 1D density with d -> d - l
    m, a, b, d, l = 100.0, 1.0, 333.0, 5.0, 1.0
    L = Gaussian3DPacket.from_arrays([a, 0.05, 0.05], [b, 0, 0], [-d / 2, 0, 0], m)
    R = Gaussian3DPacket.from_arrays([a, 0.05, 0.05], [-b, 0, 0], [d / 2, 0, 0], m)
    sc = Scenario.symmetric(a, b, d - l, m)
    edges = np.linspace(0.0, 2.0 * d * m * a / (2 * b), 201)
    res = rho3d_mc(L, R, l, 1_000_000, 3, edges)
    ref = rho_cl(sc, res.curve.grid)
    assert np.sum(np.abs(res.curve.values - ref) * np.diff(edges)) < 0.05


def test_range_must_be_positive():
    L, R = _packets()
    with pytest.raises(ValueError):
        rho3d_mc(L, R, 0.0, 10, 0, (0, 1, 2))
