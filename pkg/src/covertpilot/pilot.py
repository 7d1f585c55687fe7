"""Estimation-phase analysis: pilot-scaling covertness and the corrupted MMSE estimate.

With the fading gain marginalized, the received pilot vector is a
zero-mean complex Gaussian whose covariance is a rank-one update of the
identity,

    Sigma_0 = alpha_w^2 sigma_h^2 s s^H + sigma_w^2 I          (clean pilot)
    Sigma_1 = alpha_w^2 sigma_h^2 (1+eps)^2 s s^H + sigma_w^2 I (scaled pilot)

so the divergence between the two hypotheses and the linear-MMSE channel
estimate both reduce to scalar closed forms in ``||s||^2``.  The dense
L x L covariances are only ever materialized for small pilots (Monte
Carlo density evaluation and test oracles); the scalar path is exact for
any length.

Units: divergences are in nats; rates elsewhere in the package are in
bits/channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (AttackParams, ChannelParams, ParameterError, Phase,
                      PilotHypothesis, SignalBlock, _require)

# Dense covariances above this length serve no purpose: the scalar closed
# forms are exact and O(1).
DENSE_PILOT_MAX_LEN = 256


@dataclass(frozen=True)
class PilotCovariances:
    """Dense received-pilot covariances under the clean and scaled hypotheses."""

    sigma0: np.ndarray
    sigma1: np.ndarray

    def __post_init__(self):
        for name in ("sigma0", "sigma1"):
            m = np.asarray(getattr(self, name), dtype=np.complex128)
            m.setflags(write=False)
            object.__setattr__(self, name, m)


@dataclass(frozen=True)
class EstimateReport:
    """MMSE channel estimate and its noise-free decomposition.

    ``bias_factor`` is the real multiplier of the true gain in the
    noiseless part of the estimate; it tends to 1 under the clean-pilot
    hypothesis and to ``1 + eps`` under the scaled one as ``||s||^2``
    grows.
    """

    h_hat: complex
    bias_factor: float
    hypothesis: PilotHypothesis


@dataclass(frozen=True)
class CovertnessMargin:
    covert: bool
    kl_bound: float


def _pilot_energy(pilot: SignalBlock) -> float:
    _require(pilot.phase is Phase.ESTIMATION, "expected an estimation-phase block")
    return float(np.vdot(pilot.samples, pilot.samples).real)


def pilot_covariances(channel: ChannelParams, attack: AttackParams,
                      pilot: SignalBlock) -> PilotCovariances:
    """Materialize Sigma_0 and Sigma_1 for a short pilot (length <= 256)."""
    L = len(pilot)
    _require(L <= DENSE_PILOT_MAX_LEN,
             f"dense covariances are limited to length {DENSE_PILOT_MAX_LEN}")
    s = pilot.samples
    outer = np.outer(s, s.conj())
    kappa = channel.alpha_w_sq * channel.sigma_h_sq
    eye = channel.sigma_w_sq * np.eye(L)
    return PilotCovariances(kappa * outer + eye,
                            kappa * (1 + attack.epsilon) ** 2 * outer + eye)


def kl_pilot_exact(channel: ChannelParams, attack: AttackParams,
                   pilot: SignalBlock) -> float:
    """Divergence (nats) between the two pilot hypotheses at finite length.

    Evaluates ``-log|Sigma_1^{-1} Sigma_0| - L + tr(Sigma_1^{-1} Sigma_0)``
    through the rank-one closed forms: with ``a = alpha_w^2 sigma_h^2 /
    sigma_w^2`` and ``S = ||s||^2``, both the log-determinant and trace
    corrections equal

        q = a * eps * (2 + eps) * S / (1 + a * (1+eps)^2 * S)

    so the divergence is ``-log(1 - q) - q``.  No L x L matrix is ever
    built; exact for any pilot length.
    """
    _require(attack.epsilon >= 0, "epsilon must be >= 0")
    S = _pilot_energy(pilot)
    a = channel.alpha_w_sq * channel.sigma_h_sq / channel.sigma_w_sq
    eps = attack.epsilon
    q = a * eps * (2 + eps) * S / (1 + a * (1 + eps) ** 2 * S)
    return -math.log1p(-q) - q


def kl_pilot_limit(epsilon: float) -> float:
    """Long-pilot limit of :func:`kl_pilot_exact`, in nats.

    Equals ``2 log(1+eps) - 1 + (1+eps)^{-2}`` and is bounded above by
    ``2 eps^2`` for all eps >= 0 (the covertness bound).
    """
    if epsilon < 0:
        raise ParameterError("epsilon must be >= 0")
    return 2 * math.log1p(epsilon) - 1 + (1 + epsilon) ** -2


def covertness_margin(epsilon: float, delta_1: float) -> CovertnessMargin:
    """Estimation-phase covertness test: eps <= delta_1 / sqrt(2).

    ``kl_bound = 2 eps^2`` dominates the limiting divergence, so the
    condition keeps the detector within ``delta_1`` of a blind test.
    With ``delta_1 = 0`` only ``epsilon = 0`` is covert.
    """
    _require(0 <= delta_1 < 1, "delta_1 must lie in [0, 1)")
    _require(epsilon >= 0, "epsilon must be >= 0")
    kl_bound = 2 * epsilon ** 2
    assert kl_pilot_limit(epsilon) <= kl_bound + 1e-15
    return CovertnessMargin(covert=epsilon <= delta_1 / math.sqrt(2),
                            kl_bound=kl_bound)


def _estimator_coefficient(channel: ChannelParams, pilot_energy: float) -> float:
    """Scalar c with h_hat = c * s^H y (the linear-MMSE weight)."""
    num = math.sqrt(channel.alpha_w_sq) * channel.sigma_h_sq
    den = channel.sigma_w_sq + channel.alpha_w_sq * channel.sigma_h_sq * pilot_energy
    return num / den


def mmse_estimate(channel: ChannelParams, pilot: SignalBlock,
                  received: SignalBlock,
                  attack: AttackParams | None = None) -> EstimateReport:
    """MMSE estimate of the fading gain from a received pilot block.

    The estimator is built under the clean-pilot model (the receiver is
    unaware of any scaling), so when the received block was actually
    scaled the estimate is biased toward ``(1+eps) h_w``:

        h_hat = c s^H y,   noiseless part = (1 + eps 1{H1}) g h_w,
        g = a S / (1 + a S),  a = alpha_w^2 sigma_h^2 / sigma_w^2.

    ``attack`` supplies eps for the bias decomposition and is required
    when the received block carries the scaled hypothesis.
    """
    _require(len(received) == len(pilot), "received/pilot length mismatch")
    _require(received.phase is Phase.ESTIMATION,
             "mmse_estimate expects an estimation-phase block")
    S = _pilot_energy(pilot)
    c = _estimator_coefficient(channel, S)
    h_hat = complex(c * np.vdot(pilot.samples, received.samples))

    hyp = received.pilot_hypothesis or PilotHypothesis.H0
    if hyp is PilotHypothesis.H1 and attack is None:
        raise ParameterError("scaled-pilot block needs attack parameters for "
                             "the bias decomposition")
    eps = attack.epsilon if (attack is not None and hyp is PilotHypothesis.H1) else 0.0
    a = channel.alpha_w_sq * channel.sigma_h_sq / channel.sigma_w_sq
    g = a * S / (1 + a * S)
    return EstimateReport(h_hat=h_hat, bias_factor=(1 + eps) * g, hypothesis=hyp)


def mmse_limit(channel: ChannelParams, attack: AttackParams,
               hypothesis: PilotHypothesis) -> complex:
    """Long-pilot limit of the estimate: h_w, or (1+eps) h_w when scaled."""
    if hypothesis is PilotHypothesis.H1:
        return (1 + attack.epsilon) * channel.h_w
    return channel.h_w
