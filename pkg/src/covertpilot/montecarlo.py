"""Monte Carlo estimation of every analytic quantity in the package.

Each estimator simulates actual signal vectors (no distributional
shortcuts) and is the independent cross-check for the corresponding
closed form.  Reproducibility contract:

* trial ``i`` of a run with ``base_seed`` draws all of its randomness
  from streams ``derive_rng(base_seed, i, STREAM_*)``;
* trials are processed in fixed chunks of :data:`CHUNK` regardless of
  ``threads``, and per-chunk results are reduced in chunk order,

so results are bit-identical for any worker count and a run split across
workers merges to exactly the serial answer.  Binomial tallies report
``sqrt(p (1-p) / trials)`` standard errors; mean estimates report the
sample standard deviation over trials divided by ``sqrt(trials)``.
Standard errors are reported as NaN below 100 trials, where a normal
confidence interval is not meaningful.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import (STREAM_ALICE, STREAM_FADING_W, STREAM_NOISE,
                      STREAM_PILOT_NOISE, STREAM_TROJAN, AttackParams,
                      ChannelParams, Phase, PilotHypothesis, SignalBlock,
                      SystemConfig, _require, complex_normal, derive_rng,
                      gaussian_input, make_pilot)
from .detection import (Conditioning, DetectionPhase, ErrorProbabilities,
                        ProbKind, analytic_error_probs, sqrt_law_bound,
                        tau_dagger, tau_eps)
from .pilot import (DENSE_PILOT_MAX_LEN, kl_pilot_exact, mmse_estimate,
                    mmse_limit, pilot_covariances)

CHUNK = 512


class McTarget(Enum):
    PILOT_KL = "pilot_kl"
    COMM_DETECTION = "comm_detection"
    ESTIMATOR_ERROR = "estimator_error"
    SQRT_LAW = "sqrt_law"


@dataclass(frozen=True)
class McConfig:
    """Trial budget and seeding for one Monte Carlo run.

    ``n`` and ``l`` override the block and pilot lengths where relevant;
    when None the lengths come from the system configuration.
    """

    trials: int
    base_seed: int
    n: int | None = None
    l: int | None = None
    target: McTarget | None = None

    def __post_init__(self):
        _require(self.trials >= 1, "trials must be >= 1")


@dataclass(frozen=True)
class McResult:
    point_estimate: float
    std_error: float
    trials_used: int
    analytic_reference: float | None = None


@dataclass(frozen=True)
class EstimatorErrorRow:
    """Mean-squared estimator error against the long-pilot limit, per pilot length."""

    l: int
    mse_clean: float
    mse_scaled: float


@dataclass(frozen=True)
class SqrtLawRow:
    n: int
    lambda_t: float
    p_f: float
    p_m: float
    one_minus_sum: float
    std_error: float
    bound: float
    bound_limit: float


def _std_error_binomial(p: float, trials: int) -> float:
    if trials < 100:
        return float("nan")
    return math.sqrt(p * (1 - p) / trials)


def _chunks(trials: int) -> list[range]:
    return [range(lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]


def _run_chunked(trials: int, threads: int, worker: Callable[[range], object]) -> list:
    """Apply worker to fixed trial chunks; results come back in chunk order."""
    chunks = _chunks(trials)
    if threads <= 1 or len(chunks) == 1:
        return [worker(ch) for ch in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks))


def mc_comm_error_probs(channel: ChannelParams, attack: AttackParams,
                        config: SystemConfig, mc: McConfig,
                        tau: float | None = None, threads: int = 1,
                        two_phase_pilot_len: int | None = None,
                        ) -> tuple[ErrorProbabilities, tuple[McResult, McResult]]:
    """Empirical communication-phase error probabilities by full simulation.

    Default conditioning is the attack's intended chain: the pilot attack
    went undetected, the receiver cancels with the corrupted estimate
    ``h_hat = (1+eps) h_w``, and the threshold is ``tau(eps)``.  Each trial
    draws fresh exact-power inputs and noise, forms the radiometer
    residual under both communication hypotheses (sharing draws across
    the two, which leaves each marginal untouched), and tallies false
    alarms and missed detections.

    ``two_phase_pilot_len`` switches to a full two-phase simulation: the
    estimation phase is re-simulated per trial at that finite pilot
    length, and the receiver's estimate and threshold come from its own
    noisy pilot observation instead of the injected limit.
    """
    n = mc.n if mc.n is not None else config.block_len
    a_w = math.sqrt(channel.alpha_w_sq)
    h = channel.h_w
    h_hat_limit = (1 + attack.epsilon) * h
    tau_fixed = tau if tau is not None else tau_eps(channel, attack)
    pilot = (make_pilot(two_phase_pilot_len)
             if two_phase_pilot_len is not None else None)

    def worker(chunk: range) -> tuple[int, int]:
        fa = md = 0
        for i in chunk:
            x_a = gaussian_input(n, config.lambda_a,
                                 derive_rng(mc.base_seed, i, STREAM_ALICE))
            x_t = gaussian_input(n, attack.lambda_t,
                                 derive_rng(mc.base_seed, i, STREAM_TROJAN))
            z = complex_normal(derive_rng(mc.base_seed, i, STREAM_NOISE),
                               n, channel.sigma_w_sq)
            if pilot is None:
                h_hat, thr = h_hat_limit, tau_fixed
            else:
                zp = complex_normal(derive_rng(mc.base_seed, i, STREAM_PILOT_NOISE),
                                    len(pilot), channel.sigma_w_sq)
                y_p = a_w * h * (1 + attack.epsilon) * pilot.samples + zp
                rec = SignalBlock(y_p, Phase.ESTIMATION,
                                  pilot_hypothesis=PilotHypothesis.H1)
                h_hat = mmse_estimate(channel, pilot, rec, attack).h_hat
                thr = tau if tau is not None else \
                    tau_dagger(channel, h_hat, attack.lambda_t, n)
            v0 = a_w * (h - h_hat) * x_a + z
            t0 = np.mean(np.abs(v0) ** 2)
            t1 = np.mean(np.abs(v0 + a_w * h * x_t) ** 2)
            fa += t0 > thr
            md += t1 < thr
        return fa, md

    parts = _run_chunked(mc.trials, threads, worker)
    fa = sum(p[0] for p in parts)
    md = sum(p[1] for p in parts)
    p_f, p_m = fa / mc.trials, md / mc.trials

    ref = analytic_error_probs(channel, attack, _with_block_len(config, n),
                               tau_fixed, Conditioning.H1_TRUE)
    probs = ErrorProbabilities(p_f, p_m, DetectionPhase.COMMUNICATION,
                               ProbKind.MONTE_CARLO)
    results = (McResult(p_f, _std_error_binomial(p_f, mc.trials), mc.trials, ref.p_f),
               McResult(p_m, _std_error_binomial(p_m, mc.trials), mc.trials, ref.p_m))
    return probs, results


def _with_block_len(config: SystemConfig, n: int) -> SystemConfig:
    return config if config.block_len == n else replace(config, block_len=n)


def mc_pilot_kl(channel: ChannelParams, attack: AttackParams, l: int,
                mc: McConfig, pilot_power: float = 1.0,
                threads: int = 1) -> McResult:
    """Estimate the pilot-phase divergence as an average log-likelihood ratio.

    The closed form :func:`~covertpilot.pilot.kl_pilot_exact` is the
    expectation of ``log(p_clean / p_scaled)`` under the clean-pilot
    observation law, so each trial draws a fading gain and noise, forms
    ``y = alpha_w h s + z``, and evaluates both Gaussian densities through
    dense Cholesky factorizations (pilot length capped at 256); no
    rank-one algebra is shared with the closed-form path.
    """
    _require(l <= DENSE_PILOT_MAX_LEN,
             f"dense density evaluation is limited to length {DENSE_PILOT_MAX_LEN}")
    pilot = make_pilot(l, pilot_power)
    covs = pilot_covariances(channel, attack, pilot)
    c0 = cho_factor(covs.sigma0, lower=True)
    c1 = cho_factor(covs.sigma1, lower=True)
    logdet0 = 2 * float(np.sum(np.log(np.diag(c0[0]).real)))
    logdet1 = 2 * float(np.sum(np.log(np.diag(c1[0]).real)))
    a_w = math.sqrt(channel.alpha_w_sq)

    def worker(chunk: range) -> np.ndarray:
        rows = np.empty((len(chunk), l), dtype=np.complex128)
        for k, i in enumerate(chunk):
            h = complex_normal(derive_rng(mc.base_seed, i, STREAM_FADING_W),
                               1, channel.sigma_h_sq)[0]
            z = complex_normal(derive_rng(mc.base_seed, i, STREAM_NOISE),
                               l, channel.sigma_w_sq)
            rows[k] = a_w * h * pilot.samples + z
        q0 = np.einsum("ij,ji->i", rows.conj(), cho_solve(c0, rows.T)).real
        q1 = np.einsum("ij,ji->i", rows.conj(), cho_solve(c1, rows.T)).real
        return (logdet1 - logdet0) + (q1 - q0)

    llr = np.concatenate(_run_chunked(mc.trials, threads, worker))
    point = float(np.mean(llr))
    se = float(np.std(llr, ddof=1) / math.sqrt(mc.trials)) if mc.trials >= 100 \
        else float("nan")
    return McResult(point, se, mc.trials,
                    kl_pilot_exact(channel, attack, pilot))


def mc_estimator_error(channel: ChannelParams, attack: AttackParams,
                       l_grid: Sequence[int], mc: McConfig,
                       pilot_power: float = 1.0) -> list[EstimatorErrorRow]:
    """Mean-squared distance of the finite-length estimate to its limit.

    For each pilot length, trials draw fresh noise and run the estimator
    on clean and scaled pilot observations (same noise for both), then
    average ``|h_hat(L) - h_hat_inf|^2`` against the respective limits.
    The noise term of the estimate has variance proportional to
    ``S / (1 + a S)^2 ~ 1/S``, so the MSE halves when the pilot energy
    doubles (log-log slope -1).
    """
    a_w = math.sqrt(channel.alpha_w_sq)
    lim0 = mmse_limit(channel, attack, PilotHypothesis.H0)
    lim1 = mmse_limit(channel, attack, PilotHypothesis.H1)
    rows = []
    for l in l_grid:
        pilot = make_pilot(int(l), pilot_power)
        err0 = np.empty(mc.trials)
        err1 = np.empty(mc.trials)
        for i in range(mc.trials):
            z = complex_normal(derive_rng(mc.base_seed, i, STREAM_NOISE),
                               int(l), channel.sigma_w_sq)
            y0 = a_w * channel.h_w * pilot.samples + z
            y1 = a_w * channel.h_w * (1 + attack.epsilon) * pilot.samples + z
            rec0 = SignalBlock(y0, Phase.ESTIMATION,
                               pilot_hypothesis=PilotHypothesis.H0)
            rec1 = SignalBlock(y1, Phase.ESTIMATION,
                               pilot_hypothesis=PilotHypothesis.H1)
            err0[i] = abs(mmse_estimate(channel, pilot, rec0).h_hat - lim0) ** 2
            err1[i] = abs(mmse_estimate(channel, pilot, rec1, attack).h_hat
                          - lim1) ** 2
        rows.append(EstimatorErrorRow(int(l), float(np.mean(err0)),
                                      float(np.mean(err1))))
    return rows


def mc_sqrt_law(channel: ChannelParams, config: SystemConfig, c: float,
                n_grid: Sequence[int], mc: McConfig,
                threads: int = 1) -> list[SqrtLawRow]:
    """Empirical detectability of a silent pilot attack at power c/sqrt(n).

    Per blocklength: simulate the optimal test with a perfect channel
    estimate (epsilon 0) and tally the error probabilities; the row also
    carries the square-root-law bound the empirical ``1 - P_F - P_M`` must
    stay under.  A power schedule decaying slower than 1/sqrt(n) sends the
    error sum to 0, faster sends it to 1, and exactly 1/sqrt(n) pins
    ``1 - P_F - P_M`` near a constant controlled by c.
    """
    _require(c > 0, "c must be > 0")
    a_w = math.sqrt(channel.alpha_w_sq)
    h = channel.h_w
    rows = []
    for n in n_grid:
        n = int(n)
        lt = c / math.sqrt(n)
        tau = tau_dagger(channel, h, lt, n)

        def worker(chunk: range) -> tuple[int, int]:
            fa = md = 0
            for i in chunk:
                z = complex_normal(derive_rng(mc.base_seed, i, STREAM_NOISE),
                                   n, channel.sigma_w_sq)
                x_t = gaussian_input(n, lt,
                                     derive_rng(mc.base_seed, i, STREAM_TROJAN))
                t0 = np.mean(np.abs(z) ** 2)
                t1 = np.mean(np.abs(a_w * h * x_t + z) ** 2)
                fa += t0 > tau
                md += t1 < tau
            return fa, md

        parts = _run_chunked(mc.trials, threads, worker)
        fa = sum(p[0] for p in parts)
        md = sum(p[1] for p in parts)
        p_f, p_m = fa / mc.trials, md / mc.trials
        se = math.hypot(_std_error_binomial(p_f, mc.trials),
                        _std_error_binomial(p_m, mc.trials))
        bound = sqrt_law_bound(channel, c, n)
        rows.append(SqrtLawRow(n=n, lambda_t=lt, p_f=p_f, p_m=p_m,
                               one_minus_sum=1 - p_f - p_m, std_error=se,
                               bound=bound.finite_n, bound_limit=bound.limit))
    return rows
