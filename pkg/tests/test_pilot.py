import math

import numpy as np
import pytest

from covertpilot import (AttackParams, ChannelParams, ParameterError, Phase,
                         PilotHypothesis, SignalBlock, covertness_margin,
                         kl_pilot_exact, kl_pilot_limit, make_pilot,
                         mmse_estimate, mmse_limit, pilot_covariances,
                         synthesize_received)


def dense_kl(channel, attack, pilot):
    """Dense-matrix oracle: -log|S1^-1 S0| - L + tr(S1^-1 S0) by direct linalg."""
    covs = pilot_covariances(channel, attack, pilot)
    L = len(pilot)
    _, ld0 = np.linalg.slogdet(covs.sigma0)
    _, ld1 = np.linalg.slogdet(covs.sigma1)
    tr = np.trace(np.linalg.solve(covs.sigma1, covs.sigma0)).real
    return (ld1 - ld0) - L + tr


def dense_lmmse(channel, pilot, received):
    """Generic linear-MMSE oracle: r_{h y} Sigma_0^{-1} y with full inversion."""
    covs = pilot_covariances(channel, AttackParams(0.0, 0.0), pilot)
    r = math.sqrt(channel.alpha_w_sq) * channel.sigma_h_sq * pilot.samples.conj()
    return complex(r @ np.linalg.inv(covs.sigma0) @ received.samples)


class TestKlExact:
    def test_zero_at_eps_zero(self, channel):
        assert kl_pilot_exact(channel, AttackParams(0.0, 0.3),
                              make_pilot(32)) == 0.0

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(1)
        for L in (1, 2, 8, 32, 64):
            channel = ChannelParams(
                alpha_w_sq=rng.uniform(0.05, 1.0), alpha_e_sq=0.1,
                sigma_w_sq=rng.uniform(0.05, 1.0), sigma_e_sq=0.1,
                sigma_h_sq=rng.uniform(0.2, 2.0), h_w=1 + 0j, h_e=1 + 0j)
            attack = AttackParams(rng.uniform(0.0, 0.8), 0.3)
            pilot = make_pilot(L, rng.uniform(0.5, 2.0))
            assert kl_pilot_exact(channel, attack, pilot) == pytest.approx(
                dense_kl(channel, attack, pilot), abs=1e-9)

    def test_approaches_limit(self, channel):
        attack = AttackParams(0.1, 0.3)
        val = kl_pilot_exact(channel, attack, make_pilot(10_000))
        assert val == pytest.approx(kl_pilot_limit(0.1), abs=3e-5)
        val5 = kl_pilot_exact(channel, attack, make_pilot(100_000))
        assert abs(val5 - kl_pilot_limit(0.1)) <= 1e-3

    def test_monotone_in_length(self, channel):
        attack = AttackParams(0.2, 0.3)
        vals = [kl_pilot_exact(channel, attack, make_pilot(L))
                for L in (2, 8, 32, 128, 512, 2048)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_complex_pilot_supported(self, channel):
        # formulas depend on the pilot only through its energy
        phases = np.exp(2j * np.pi * np.arange(16) / 16)
        rotated = SignalBlock(phases, Phase.ESTIMATION)
        flat = make_pilot(16, 1.0)
        attack = AttackParams(0.3, 0.3)
        assert kl_pilot_exact(channel, attack, rotated) == pytest.approx(
            kl_pilot_exact(channel, attack, flat), rel=1e-12)
        assert kl_pilot_exact(channel, attack, rotated) == pytest.approx(
            dense_kl(channel, attack, rotated), abs=1e-9)


class TestKlLimit:
    def test_values(self):
        assert kl_pilot_limit(0.0) == 0.0
        assert kl_pilot_limit(0.1) == pytest.approx(0.017066640600385208,
                                                    rel=1e-12)

    def test_below_quadratic_bound_at_budget_edge(self):
        eps = 1 / math.sqrt(20)
        assert kl_pilot_limit(eps) <= 2 * eps ** 2

    def test_quadratic_bound_on_grid(self):
        eps = np.linspace(0.0, 2.0, 1000)
        vals = np.array([kl_pilot_limit(e) for e in eps])
        assert np.all(vals <= 2 * eps ** 2 + 1e-15)
        assert np.all(vals[1:] < 2 * eps[1:] ** 2)   # equality only at 0

    def test_rejects_negative(self):
        with pytest.raises(ParameterError):
            kl_pilot_limit(-0.01)


class TestCovertnessMargin:
    def test_examples(self):
        assert covertness_margin(0.2, 1 / math.sqrt(10)).covert
        assert not covertness_margin(0.3, 1 / math.sqrt(10)).covert
        assert covertness_margin(0.0, 0.0).covert

    def test_zero_budget_needs_zero_eps(self):
        assert not covertness_margin(1e-9, 0.0).covert

    def test_bound_value(self):
        assert covertness_margin(0.2, 0.5).kl_bound == pytest.approx(0.08)


class TestMmse:
    def _noiseless_received(self, channel, pilot, eps, hyp):
        scale = (1 + eps) if hyp is PilotHypothesis.H1 else 1.0
        y = math.sqrt(channel.alpha_w_sq) * channel.h_w * scale * pilot.samples
        return SignalBlock(y, Phase.ESTIMATION, pilot_hypothesis=hyp)

    def test_noiseless_bias_clean(self, channel):
        pilot = make_pilot(32)
        rec = self._noiseless_received(channel, pilot, 0.0, PilotHypothesis.H0)
        rep = mmse_estimate(channel, pilot, rec)
        a = channel.alpha_w_sq * channel.sigma_h_sq / channel.sigma_w_sq
        g = a * 32 / (1 + a * 32)
        assert rep.h_hat == pytest.approx(g * channel.h_w, rel=1e-12)
        assert rep.bias_factor == pytest.approx(g, rel=1e-12)

    def test_noiseless_bias_scaled(self, channel):
        attack = AttackParams(0.25, 0.3)
        pilot = make_pilot(64)
        rec = self._noiseless_received(channel, pilot, 0.25, PilotHypothesis.H1)
        rep = mmse_estimate(channel, pilot, rec, attack)
        a = channel.alpha_w_sq * channel.sigma_h_sq / channel.sigma_w_sq
        g = a * 64 / (1 + a * 64)
        # extra attack term on top of the clean bias
        assert rep.bias_factor - g == pytest.approx(0.25 * g, rel=1e-12)
        assert rep.h_hat == pytest.approx(1.25 * g * channel.h_w, rel=1e-12)

    def test_matches_dense_lmmse_oracle(self, channel, config, attack):
        for seed in range(5):
            rec = synthesize_received(config, channel, attack, Phase.ESTIMATION,
                                      pilot_hypothesis=PilotHypothesis.H1,
                                      seed=seed)
            pilot = make_pilot(config.pilot_len)
            mine = mmse_estimate(channel, pilot, rec, attack).h_hat
            assert mine == pytest.approx(dense_lmmse(channel, pilot, rec),
                                         abs=1e-9)

    def test_requires_attack_for_scaled_block(self, channel):
        pilot = make_pilot(8)
        rec = self._noiseless_received(channel, pilot, 0.1, PilotHypothesis.H1)
        with pytest.raises(ParameterError):
            mmse_estimate(channel, pilot, rec)

    def test_length_mismatch(self, channel):
        pilot = make_pilot(8)
        rec = self._noiseless_received(channel, make_pilot(9), 0.0,
                                       PilotHypothesis.H0)
        with pytest.raises(ParameterError):
            mmse_estimate(channel, pilot, rec)

    def test_limit_values(self, channel):
        assert mmse_limit(channel, AttackParams(0.2, 0.3),
                          PilotHypothesis.H0) == channel.h_w
        assert mmse_limit(channel, AttackParams(0.2, 0.3),
                          PilotHypothesis.H1) == pytest.approx(1.2 + 0j)
        assert mmse_limit(channel, AttackParams(0.0, 0.3),
                          PilotHypothesis.H1) == channel.h_w

    def test_noiseless_error_halves_when_energy_doubles(self, channel):
        attack = AttackParams(0.1, 0.3)
        errs = []
        for L in (64, 128, 256, 512):
            pilot = make_pilot(L)
            rec = self._noiseless_received(channel, pilot, 0.1,
                                           PilotHypothesis.H1)
            h_hat = mmse_estimate(channel, pilot, rec, attack).h_hat
            errs.append(abs(h_hat - mmse_limit(channel, attack,
                                               PilotHypothesis.H1)))
        for a, b in zip(errs, errs[1:]):
            assert a / b == pytest.approx(2.0, rel=0.03)


class TestPilotCovariances:
    def test_positive_definite_and_rank_one_gap(self, channel):
        covs = pilot_covariances(channel, AttackParams(0.3, 0.1), make_pilot(16))
        assert np.all(np.linalg.eigvalsh(covs.sigma0) > 0)
        assert np.all(np.linalg.eigvalsh(covs.sigma1) > 0)
        gap_eigs = np.linalg.eigvalsh(covs.sigma1 - covs.sigma0)
        assert np.sum(gap_eigs > 1e-12) == 1
        assert np.all(gap_eigs > -1e-12)

    def test_dense_path_length_guard(self, channel):
        with pytest.raises(ParameterError):
            pilot_covariances(channel, AttackParams(0.1, 0.3), make_pilot(257))
