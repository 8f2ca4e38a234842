"""Shared builders for randomized tests."""

import numpy as np

from fdabeam import (
    ArrayGeometry,
    FrequencyPlan,
    NodePlacement,
    RfParams,
    Scenario,
    channel_pair,
)

CARRIER = 2.4e9
MAX_OFFSET = 3e6
NOISE = 1e-13


def reference_rf(max_offset=MAX_OFFSET):
    return RfParams(carrier_frequency=CARRIER, max_offset=max_offset,
                    noise_power_bob=NOISE, noise_power_eve=NOISE)


def half_wave_scenario(n, r_bob, theta_bob, r_eve, theta_eve, rf=None):
    rf = rf or reference_rf()
    return Scenario(rf=rf,
                    array=ArrayGeometry(n, 0.0, rf.wavelength / 2.0),
                    bob=NodePlacement(r_bob, theta_bob),
                    eve=NodePlacement(r_eve, theta_eve))


def random_scenario(rng, n=None, shared_bearing=False):
    """Random layout under the reference RF constants.

    ``shared_bearing`` pins Eve a fixed 20 m behind Bob on the same angle;
    otherwise both nodes are drawn independently, which spreads the channel
    inner products over a much wider range.
    """
    if n is None:
        n = int(rng.integers(2, 9))
    r_b = float(rng.uniform(50.0, 150.0))
    th_b = float(rng.uniform(0.0, np.pi))
    if shared_bearing:
        r_e, th_e = r_b + 20.0, th_b
    else:
        r_e = float(rng.uniform(70.0, 170.0))
        th_e = float(rng.uniform(0.0, np.pi))
    return half_wave_scenario(n, r_b, th_b, r_e, th_e)


def random_plan(rng, n, max_offset=MAX_OFFSET):
    return FrequencyPlan(rng.uniform(0.0, max_offset, n))


def random_pair(rng, n=None, shared_bearing=False, min_separation=0.0):
    """Random channel pair; ``min_separation`` rejects draws whose channels
    are numerically parallel (1 - x/(B*E) below the threshold), where both
    the closed forms and any dense oracle lose relative accuracy."""
    while True:
        scn = random_scenario(rng, n, shared_bearing)
        plan = random_plan(rng, scn.array.element_count)
        t = float(rng.uniform(0.0, 20e-6))
        pair = channel_pair(scn, plan, t)
        if min_separation == 0.0:
            return pair
        hb, he = pair.h_bob, pair.h_eve
        b = np.vdot(hb, hb).real
        e = np.vdot(he, he).real
        x = abs(np.vdot(he, hb)) ** 2
        if 1.0 - x / (b * e) >= min_separation:
            return pair
