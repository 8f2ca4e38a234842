"""Secrecy-rate beamformer design against a single eavesdropper.

All solvers work on noise-normalized channels, so SNRs are plain squared
inner products.  Two problems are covered:

* minimum transmit power subject to a secrecy-rate target, solved through
  the principal eigenvalue ``lambda1`` of the rank-2 matrix
  ``h_b h_b^H - 2^R h_e h_e^H``;
* maximum secrecy rate under a power budget, solved through the principal
  eigenvalue ``lambda_delta`` of a whitened rank-2 pencil.

Both eigenvalues have closed forms in the three scalars
``B = ||h_b||^2``, ``E = ||h_e||^2`` and the coupling ``x = |h_e^H h_b|^2``;
eigenvectors come from a 2x2 problem in the span of the two channels, never
from a dense decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ChannelPair


@dataclass(frozen=True)
class SecrecyTarget:
    """Required secrecy rate in bits/s/Hz."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("target rate must be positive")


@dataclass(frozen=True)
class PowerBudget:
    """Total transmit power ||w||^2 in W."""

    power: float

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power budget must be non-negative")


@dataclass
class PowerMinSolution:
    """Result of :func:`min_power_beamformer`.

    ``feasible`` is False when the target rate cannot be met at any power
    (lambda1 <= 0); the offending lambda1 is still reported and ``power`` is
    infinite.
    """

    beamformer: np.ndarray | None
    power: float
    lambda1: float
    feasible: bool


@dataclass
class RateMaxSolution:
    """Result of :func:`max_rate_beamformer`; ``rate = log2(lambda_delta)``."""

    beamformer: np.ndarray
    rate: float
    lambda_delta: float


def snr(w: np.ndarray, h_normalized: np.ndarray) -> float:
    """Receive SNR |h^H w|^2 for a noise-normalized channel."""
    return float(abs(np.vdot(h_normalized, w)) ** 2)


def secrecy_rate(w: np.ndarray, pair: ChannelPair) -> float:
    """Achievable secrecy rate of beamformer ``w`` in bits/s/Hz (clamped at 0)."""
    gamma_b = snr(w, pair.h_bob)
    gamma_e = snr(w, pair.h_eve)
    return max(math.log2((1.0 + gamma_b) / (1.0 + gamma_e)), 0.0)


def channel_stats(pair: ChannelPair) -> tuple[float, float, float]:
    """The three scalars (B, E, x) every closed form depends on."""
    b = float(np.vdot(pair.h_bob, pair.h_bob).real)
    e = float(np.vdot(pair.h_eve, pair.h_eve).real)
    x = float(abs(np.vdot(pair.h_eve, pair.h_bob)) ** 2)
    return b, e, x


def lambda1_closed_form(bob_gain: float, eve_gain: float, coupling: float,
                        rate: float) -> float:
    """Principal eigenvalue of ``h_b h_b^H - 2^R h_e h_e^H``.

    Parameters are ``B = ||h_b||^2``, ``E = ||h_e||^2``, the coupling
    ``x = |h_e^H h_b|^2`` and the target rate R.  Always non-negative; zero
    exactly when the channels are parallel and ``2^R E >= B``.
    """
    limit = bob_gain * eve_gain
    if coupling > limit * (1.0 + 1e-9):
        raise ValueError("coupling exceeds the Cauchy-Schwarz bound B*E")
    if coupling == 0.0:
        # Orthogonal channels: the eigenvalue is exactly B.
        return bob_gain
    t = 2.0**rate
    w1 = t * eve_gain - bob_gain
    w2 = max(limit - coupling, 0.0)
    return 0.5 * (-w1 + math.sqrt(w1 * w1 + 4.0 * t * w2))


def lambda_delta_closed_form(bob_gain: float, eve_gain: float, coupling: float,
                             power: float) -> float:
    """Principal eigenvalue of the whitened pencil; the best ratio
    ``(1 + snr_bob) / (1 + snr_eve)`` achievable with ``||w||^2 = power``.

    Always >= 1; equals ``1 + power * B`` exactly for orthogonal channels
    and 1 for identical channels or zero power.
    """
    limit = bob_gain * eve_gain
    if coupling > limit * (1.0 + 1e-9):
        raise ValueError("coupling exceeds the Cauchy-Schwarz bound B*E")
    if power == 0.0:
        return 1.0
    if coupling == 0.0:
        return 1.0 + power * bob_gain
    f1 = power * (limit - coupling) + bob_gain - eve_gain
    f2 = 4.0 * (1.0 + power * eve_gain) * max(limit - coupling, 0.0)
    return 1.0 + 0.5 * power * (f1 + math.sqrt(f1 * f1 + f2)) / (1.0 + power * eve_gain)


def principal_eigvec_span2(a: float, u: np.ndarray, b: float,
                           v: np.ndarray) -> tuple[float, np.ndarray]:
    """Principal eigenpair of ``a u u^H + b v v^H`` restricted to span{u, v}.

    Orthonormalizes the span (1-D when the vectors are parallel or one is
    zero), solves the projected problem of size <= 2 and maps the winner
    back.  The returned vector has unit norm.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 and nv == 0.0:
        raise ValueError("both defining vectors are zero")
    first, second = (u, v) if nu >= nv else (v, u)
    u1 = first / np.linalg.norm(first)
    resid = second - np.vdot(u1, second) * u1
    nr = float(np.linalg.norm(resid))
    if nr > 1e-12 * max(float(np.linalg.norm(second)), nu, nv):
        basis = np.column_stack([u1, resid / nr])
    else:
        basis = u1[:, None]
    cu = basis.conj().T @ u
    cv = basis.conj().T @ v
    s = a * np.outer(cu, cu.conj()) + b * np.outer(cv, cv.conj())
    vals, vecs = np.linalg.eigh(s)
    top = int(np.argmax(vals))
    return float(vals[top]), basis @ vecs[:, top]


def power_lower_bound(pair: ChannelPair, target: SecrecyTarget) -> float:
    """Eavesdropper-free power floor ``(2^R - 1) / ||h_b||^2``."""
    b, _, _ = channel_stats(pair)
    return (2.0**target.rate - 1.0) / b


def min_power_beamformer(pair: ChannelPair, target: SecrecyTarget) -> PowerMinSolution:
    """Minimum-power beamformer meeting the secrecy target exactly.

    The optimal direction is the principal eigenvector of
    ``h_b h_b^H - 2^R h_e h_e^H`` and the power is ``(2^R - 1) / lambda1``.
    Infeasibility (lambda1 <= 0) is reported in the result, not raised.
    """
    b, e, x = channel_stats(pair)
    lam1 = lambda1_closed_form(b, e, x, target.rate)
    if lam1 <= 0.0:
        return PowerMinSolution(beamformer=None, power=math.inf,
                                lambda1=lam1, feasible=False)
    power = (2.0**target.rate - 1.0) / lam1
    _, direction = principal_eigvec_span2(1.0, pair.h_bob,
                                          -(2.0**target.rate), pair.h_eve)
    return PowerMinSolution(beamformer=math.sqrt(power) * direction,
                            power=power, lambda1=lam1, feasible=True)


def max_rate_beamformer(pair: ChannelPair, budget: PowerBudget) -> RateMaxSolution:
    """Maximum-secrecy-rate beamformer with ``||w||^2 = power``.

    Whitens Eve's side through the rank-1 closed form of
    ``(I/P + h_e h_e^H)^(-1/2)``, takes the principal direction of the
    whitened rank-2 matrix and maps it back; no dense matrix square root is
    ever formed.
    """
    p = budget.power
    n = pair.h_bob.shape[0]
    if p == 0.0:
        return RateMaxSolution(beamformer=np.zeros(n, dtype=complex),
                               rate=0.0, lambda_delta=1.0)
    b, e, x = channel_stats(pair)
    lam = lambda_delta_closed_form(b, e, x, p)
    a = 1.0 / p
    if e > 0.0:
        c2 = (1.0 / math.sqrt(a + e) - 1.0 / math.sqrt(a)) / e
    else:
        c2 = 0.0
    # v = (I/P + h_e h_e^H)^(-1/2) h_b via the rank-1 update formula.
    v = pair.h_bob / math.sqrt(a) + c2 * np.vdot(pair.h_eve, pair.h_bob) * pair.h_eve
    _, direction = principal_eigvec_span2(1.0, v, -1.0 / (a + e), pair.h_eve)
    y = direction / math.sqrt(a) + c2 * np.vdot(pair.h_eve, direction) * pair.h_eve
    w = math.sqrt(p) * y / np.linalg.norm(y)
    return RateMaxSolution(beamformer=w, rate=math.log2(lam), lambda_delta=lam)


def mrt_beamformer(h_bob: np.ndarray, budget: PowerBudget) -> np.ndarray:
    """Maximum-ratio transmission: all power along Bob's channel."""
    norm = float(np.linalg.norm(h_bob))
    if norm == 0.0:
        raise ValueError("cannot steer toward a zero channel")
    return math.sqrt(budget.power) * np.asarray(h_bob, dtype=complex) / norm


def mrt_rate(pair: ChannelPair, budget: PowerBudget, coupling: float) -> float:
    """Secrecy rate of MRT given the coupling ``x = |h_e^H h_b|^2``."""
    b, _, _ = channel_stats(pair)
    p = budget.power
    val = math.log2((1.0 + p * b) / (1.0 + p * coupling / b))
    return max(val, 0.0)


def mrt_required_power(pair: ChannelPair, target: SecrecyTarget,
                       coupling: float) -> float:
    """Power at which MRT meets the secrecy target, or inf when it never does.

    Finite exactly when ``||h_b||^4 > 2^R x``; always an upper bound for the
    optimal (eigenvector-based) minimum power.
    """
    b, _, _ = channel_stats(pair)
    t = 2.0**target.rate
    denom = b - t * coupling / b
    if denom <= 0.0:
        return math.inf
    return (t - 1.0) / denom
