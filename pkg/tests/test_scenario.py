import numpy as np
import pytest
from numpy.testing import assert_allclose

from fdabeam import (
    ArrayGeometry,
    ChannelPair,
    FrequencyPlan,
    NodePlacement,
    RfParams,
    Scenario,
    SPEED_OF_LIGHT,
    channel_pair,
    channel_vector,
    element_positions,
    propagation_distances,
)

from helpers import half_wave_scenario, random_plan, random_scenario, reference_rf

HALF_WAVE = 0.06245676208333333  # c / 2.4e9 / 2


def test_wavelength_derived():
    rf = reference_rf()
    assert rf.wavelength * rf.carrier_frequency == rf.wave_speed
    assert_allclose(rf.wavelength, 0.12491352416666666, rtol=1e-15)


def test_element_positions_on_x_axis():
    pos = element_positions(ArrayGeometry(4, 0.0, 0.0625))
    assert_allclose(pos[:, 0], [0.0, 0.0625, 0.125, 0.1875], rtol=0, atol=0)
    assert np.all(pos[:, 1] == 0.0)
    pos = element_positions(ArrayGeometry(2, -1.0, 0.5))
    assert_allclose(pos[:, 0], [-1.0, -0.5])


def test_distances_broadside_and_endfire():
    scn = half_wave_scenario(2, 100.0, np.pi / 2, 120.0, np.pi / 2)
    rb = propagation_distances(scn, "bob")
    assert rb[0] == 100.0
    # second element sits HALF_WAVE off the perpendicular through the origin
    assert_allclose(rb[1], 100.00001950423375, rtol=1e-15)
    assert_allclose(rb[1], np.hypot(HALF_WAVE, 100.0), rtol=1e-15)

    scn = half_wave_scenario(2, 100.0, 0.0, 120.0, 0.0)
    rb = propagation_distances(scn, "bob")
    assert_allclose(rb, [100.0, 100.0 - HALF_WAVE], rtol=1e-15)


def test_scenario_rejects_node_on_element():
    rf = reference_rf()
    with pytest.raises(ValueError, match="coincides"):
        Scenario(rf=rf, array=ArrayGeometry(3, 0.0, 1.0),
                 bob=NodePlacement(2.0, 0.0), eve=NodePlacement(50.0, 0.1))


def test_placement_validation():
    with pytest.raises(ValueError):
        NodePlacement(-5.0, 0.5)
    with pytest.raises(ValueError):
        NodePlacement(10.0, 3.5)
    with pytest.raises(ValueError):
        ArrayGeometry(0, 0.0, 0.1)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 0.0, -0.1)
    with pytest.raises(ValueError):
        RfParams(2.4e9, 3e6, -1e-13, 1e-13)


def test_frequency_plan_validation():
    with pytest.raises(ValueError):
        FrequencyPlan(np.array([-1.0, 0.0]))
    with pytest.raises(ValueError):
        FrequencyPlan(np.array([[0.0, 1.0]]))
    plan = FrequencyPlan(np.array([0.0, 1e6]))
    with pytest.raises(ValueError):
        plan.offsets[0] = 5.0  # frozen after construction


def test_channel_entry_is_real_at_aligned_time():
    scn = half_wave_scenario(1, 100.0, np.pi / 2, 120.0, np.pi / 2)
    r = propagation_distances(scn, "bob")[0]
    h = channel_vector(scn, "bob", FrequencyPlan(np.zeros(1)), t=r / SPEED_OF_LIGHT)
    expected = scn.rf.wavelength / (4 * np.pi * r)
    assert_allclose(h[0].real, expected, rtol=1e-10)
    assert abs(h[0].imag) < 1e-10 * expected


def test_channel_magnitude_law():
    rng = np.random.default_rng(11)
    for _ in range(20):
        scn = random_scenario(rng)
        plan = random_plan(rng, scn.array.element_count)
        for node in ("bob", "eve"):
            h = channel_vector(scn, node, plan, t=float(rng.uniform(0, 2e-5)))
            r = propagation_distances(scn, node)
            assert_allclose(np.abs(h) * 4 * np.pi * r / scn.rf.wavelength,
                            np.ones_like(r), rtol=1e-12)


def test_phase_difference_identity():
    # arg(conj(h_eve_n) h_bob_n) == omega_n f_n modulo 2 pi
    rng = np.random.default_rng(12)
    for _ in range(10):
        scn = random_scenario(rng)
        plan = random_plan(rng, scn.array.element_count)
        t = float(rng.uniform(0, 2e-5))
        hb = channel_vector(scn, "bob", plan, t)
        he = channel_vector(scn, "eve", plan, t)
        rb = propagation_distances(scn, "bob")
        re = propagation_distances(scn, "eve")
        omega = 2 * np.pi * (re - rb) / scn.rf.wave_speed
        freqs = scn.rf.carrier_frequency + plan.offsets
        measured = np.angle(np.conj(he) * hb)
        mismatch = np.exp(1j * (measured - omega * freqs))
        assert_allclose(mismatch, np.ones_like(mismatch), atol=1e-9)


def test_channel_pair_normalization():
    scn = half_wave_scenario(3, 90.0, 1.0, 110.0, 1.0)
    plan = FrequencyPlan(np.array([0.0, 1e6, 3e6]))
    pair = channel_pair(scn, plan, 0.0)
    raw = channel_vector(scn, "bob", plan, 0.0)
    assert_allclose(pair.h_bob, raw / np.sqrt(scn.rf.noise_power_bob), rtol=1e-15)
    assert pair.time_instant == 0.0


def test_norm_identity_reference_setup():
    # sum_n lambda^2 / ((4 pi r_n)^2 sigma^2) at r=100, theta=pi/4, N=4,
    # computed by direct summation of the amplitude law
    scn = half_wave_scenario(4, 100.0, np.pi / 4, 120.0, np.pi / 4)
    pair = channel_pair(scn, FrequencyPlan(np.zeros(4)), 0.0)
    b = np.vdot(pair.h_bob, pair.h_bob).real
    assert_allclose(b, 395762.6426111416, rtol=1e-12)
    r = propagation_distances(scn, "bob")
    direct = np.sum(scn.rf.wavelength**2 / ((4 * np.pi * r) ** 2 * 1e-13))
    assert_allclose(b, direct, rtol=1e-13)


def test_norms_invariant_in_time_and_plan():
    rng = np.random.default_rng(13)
    for _ in range(10):
        scn = random_scenario(rng)
        n = scn.array.element_count
        ref = channel_pair(scn, FrequencyPlan(np.zeros(n)), 0.0)
        b0 = np.vdot(ref.h_bob, ref.h_bob).real
        e0 = np.vdot(ref.h_eve, ref.h_eve).real
        for _ in range(3):
            pair = channel_pair(scn, random_plan(rng, n), float(rng.uniform(0, 2e-5)))
            assert_allclose(np.vdot(pair.h_bob, pair.h_bob).real, b0, rtol=1e-12)
            assert_allclose(np.vdot(pair.h_eve, pair.h_eve).real, e0, rtol=1e-12)


def test_plan_bounds_checked():
    scn = half_wave_scenario(2, 100.0, 1.0, 120.0, 1.0)
    with pytest.raises(ValueError, match="max_offset"):
        channel_vector(scn, "bob", FrequencyPlan(np.array([0.0, 4e6])), 0.0)
    with pytest.raises(ValueError, match="length"):
        channel_vector(scn, "bob", FrequencyPlan(np.zeros(3)), 0.0)
    with pytest.raises(ValueError, match="node"):
        channel_vector(scn, "carol", FrequencyPlan(np.zeros(2)), 0.0)


def test_channel_pair_type_checks():
    with pytest.raises(ValueError):
        ChannelPair(h_bob=np.zeros(3, complex), h_eve=np.zeros(4, complex))
