"""Wiretap geometry and free-space channel synthesis for frequency diverse arrays.

A linear array sits on the x axis and radiates toward a legitimate receiver
(Bob) and an eavesdropper (Eve), both described in polar coordinates around
the array origin.  Each element n transmits at its own frequency
``f_n = f_c + offset_n``, which makes the narrowband channel vectors depend
on range as well as direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
"""Propagation speed used by default, m/s."""

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RfParams:
    """RF constants shared by every solver.

    Parameters
    ----------
    carrier_frequency : float
        Common carrier f_c in Hz.
    max_offset : float
        Upper bound f_m of the per-element frequency offsets, Hz.  Offsets
        live in [0, max_offset].
    noise_power_bob, noise_power_eve : float
        Receiver noise variances sigma^2 in W (linear scale).
    wave_speed : float
        Propagation speed in m/s.

    The carrier wavelength is always derived as ``wave_speed /
    carrier_frequency`` and never stored.
    """

    carrier_frequency: float
    max_offset: float
    noise_power_bob: float
    noise_power_eve: float
    wave_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be positive")
        if self.max_offset < 0:
            raise ValueError("max_offset must be non-negative")
        if not self.noise_power_bob > 0 or not self.noise_power_eve > 0:
            raise ValueError("noise powers must be positive")
        if not self.wave_speed > 0:
            raise ValueError("wave_speed must be positive")

    @property
    def wavelength(self) -> float:
        """Carrier wavelength in m."""
        return self.wave_speed / self.carrier_frequency


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array on the x axis.

    Element n (0-based) sits at ``(first_element_x + n * spacing, 0)``.
    """

    element_count: int
    first_element_x: float = 0.0
    spacing: float = 0.0625

    def __post_init__(self):
        if int(self.element_count) != self.element_count or self.element_count < 1:
            raise ValueError("element_count must be a positive integer")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")


@dataclass(frozen=True)
class NodePlacement:
    """Receiver position in polar form: range from the origin and the angle
    measured from the positive x axis, restricted to the upper half plane."""

    range_m: float
    angle_rad: float

    def __post_init__(self):
        if not self.range_m > 0:
            raise ValueError("range_m must be positive")
        if not 0.0 <= self.angle_rad <= np.pi:
            raise ValueError("angle_rad must lie in [0, pi]")


@dataclass(frozen=True)
class Scenario:
    """One wiretap layout: RF constants, array geometry and both receivers."""

    rf: RfParams
    array: ArrayGeometry
    bob: NodePlacement
    eve: NodePlacement

    def __post_init__(self):
        for node in ("bob", "eve"):
            if np.any(propagation_distances(self, node) <= 0.0):
                raise ValueError(f"{node} coincides with an array element")


@dataclass(frozen=True)
class FrequencyPlan:
    """Per-element frequency offsets in Hz (element n radiates at
    ``f_c + offsets[n]``)."""

    offsets: np.ndarray

    def __post_init__(self):
        arr = np.array(self.offsets, dtype=float, copy=True)
        if arr.ndim != 1:
            raise ValueError("offsets must be a 1-D array")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("offsets must be finite and non-negative")
        arr.flags.writeable = False
        object.__setattr__(self, "offsets", arr)


@dataclass(frozen=True)
class ChannelPair:
    """Noise-normalized channel vectors of Bob and Eve at one time instant."""

    h_bob: np.ndarray
    h_eve: np.ndarray
    time_instant: float = 0.0

    def __post_init__(self):
        hb = np.array(self.h_bob, dtype=complex, copy=True)
        he = np.array(self.h_eve, dtype=complex, copy=True)
        if hb.shape != he.shape or hb.ndim != 1:
            raise ValueError("channel vectors must be 1-D and equally sized")
        hb.flags.writeable = False
        he.flags.writeable = False
        object.__setattr__(self, "h_bob", hb)
        object.__setattr__(self, "h_eve", he)


def element_positions(array: ArrayGeometry) -> np.ndarray:
    """(N, 2) Cartesian element coordinates; the array lies on the x axis."""
    x = array.first_element_x + array.spacing * np.arange(array.element_count)
    return np.column_stack([x, np.zeros(array.element_count)])


def propagation_distances(scenario: Scenario, node: str) -> np.ndarray:
    """Exact element-to-receiver distances in m for ``node`` ("bob" or "eve")."""
    placement = _placement(scenario, node)
    pos = element_positions(scenario.array)
    rx = placement.range_m * np.cos(placement.angle_rad)
    ry = placement.range_m * np.sin(placement.angle_rad)
    return np.hypot(pos[:, 0] - rx, ry)


def channel_vector(scenario: Scenario, node: str, plan: FrequencyPlan,
                   t: float = 0.0) -> np.ndarray:
    """Free-space channel of ``node`` under ``plan`` at time ``t``.

    Entry n is ``wavelength / (4 pi r_n) * exp(j 2 pi f_n (t - r_n / c))``
    with ``f_n = f_c + offsets[n]``.  Not noise-normalized; see
    :func:`channel_pair` for that.
    """
    rf = scenario.rf
    _check_plan(scenario, plan)
    dist = propagation_distances(scenario, node)
    freqs = rf.carrier_frequency + plan.offsets
    amp = rf.wavelength / (4.0 * np.pi * dist)
    # Phases reach ~1e5 rad at t = 20 us; reduce modulo one cycle in extended
    # precision so that the t terms cancel to ~1e-14 rad in later conjugate
    # products instead of ~1e-10.
    delay = np.longdouble(t) - dist.astype(np.longdouble) / np.longdouble(rf.wave_speed)
    cycles = freqs.astype(np.longdouble) * delay
    frac = (cycles - np.floor(cycles)).astype(float)
    return amp * np.exp(1j * _TWO_PI * frac)


def channel_pair(scenario: Scenario, plan: FrequencyPlan,
                 t: float = 0.0) -> ChannelPair:
    """Noise-normalized channels ``h_i / sigma_i`` for Bob and Eve at ``t``."""
    hb = channel_vector(scenario, "bob", plan, t) / np.sqrt(scenario.rf.noise_power_bob)
    he = channel_vector(scenario, "eve", plan, t) / np.sqrt(scenario.rf.noise_power_eve)
    return ChannelPair(h_bob=hb, h_eve=he, time_instant=t)


def _placement(scenario: Scenario, node: str) -> NodePlacement:
    if node == "bob":
        return scenario.bob
    if node == "eve":
        return scenario.eve
    raise ValueError(f"unknown node {node!r}, expected 'bob' or 'eve'")


def _check_plan(scenario: Scenario, plan: FrequencyPlan) -> None:
    if plan.offsets.shape[0] != scenario.array.element_count:
        raise ValueError("plan length does not match element count")
    if np.any(plan.offsets > scenario.rf.max_offset * (1.0 + 1e-12)):
        raise ValueError("offsets exceed max_offset")
