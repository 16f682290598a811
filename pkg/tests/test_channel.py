import numpy as np
import pytest

from divsched.channel import (EPS, ChannelConfig, ChannelState, effective_throughput, expected_delay,
                              sample_channel_conditions, sample_packet_service)
from divsched.errors import ConfigError, DomainError


def test_sampling_is_deterministic_under_seed():
    cfg = ChannelConfig(beta_a=2, beta_b=5)
    a = sample_channel_conditions(np.random.default_rng(7), cfg, 3)
    b = sample_channel_conditions(np.random.default_rng(7), cfg, 3)
    assert np.array_equal(a.beta, b.beta) and np.array_equal(a.lam, b.lam)
    assert np.all((a.beta > 0) & (a.beta < 1))


@pytest.mark.parametrize("a, b, mean", [(1, 1, 0.5), (2, 5, 2 / 7)])
def test_beta_draws_match_distribution_mean(a, b, mean):
    state = sample_channel_conditions(np.random.default_rng(0), ChannelConfig(beta_a=a, beta_b=b), 100_000)
    assert abs(state.beta.mean() - mean) < 0.01


def test_draws_are_clamped():
    state = sample_channel_conditions(np.random.default_rng(1), ChannelConfig(beta_a=0.01, beta_b=0.01), 2000)
    assert state.beta.min() >= EPS and state.beta.max() <= 1 - EPS
    assert ChannelState.fixed([0.0, 1.0], [0.0, 1.0]).lam[0] == EPS


@pytest.mark.parametrize("field", ["beta_a", "beta_b", "gamma_shape", "gamma_scale", "channel_rate"])
def test_invalid_config_rejected(field):
    with pytest.raises(ConfigError):
        ChannelConfig(**{field: 0.0})
    with pytest.raises(ConfigError):
        ChannelConfig(fixed_tx_delay=-1)


def test_expected_delay_examples():
    assert expected_delay(0.1, 1.3) == pytest.approx(0.8547, abs=1e-4)
    assert expected_delay(EPS, 2.0) == pytest.approx(0.5, rel=1e-5)
    assert expected_delay(0.5, 1.0) == 2.0
    # fixed per-attempt delay is paid once per expected attempt
    assert expected_delay(0.5, 1.0, fixed_tx_delay=0.25) == pytest.approx(2.5)


@pytest.mark.parametrize("beta, lam", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (-0.1, 1.0)])
def test_expected_delay_domain(beta, lam):
    with pytest.raises(DomainError):
        expected_delay(beta, lam)


def test_expected_delay_monotone_on_grid():
    betas = np.linspace(0.05, 0.95, 19)
    lams = np.linspace(0.2, 3.0, 15)
    grid = expected_delay(betas[:, None], lams[None, :])
    assert np.all(np.diff(grid, axis=0) > 0)
    assert np.all(np.diff(grid, axis=1) < 0)


def test_attempts_mean_is_geometric(rng):
    attempts, _ = sample_packet_service(rng, 0.5, 1.0, size=100_000)
    assert attempts.min() >= 1
    assert abs(attempts.mean() - 2.0) / 2.0 < 0.02


def test_delay_mean_matches_closed_form(rng):
    _, delay = sample_packet_service(rng, 0.1, 1.3, size=100_000)
    assert abs(delay.mean() - 0.8547) / 0.8547 < 0.02


def test_near_zero_drop_rate_single_attempt(rng):
    attempts, _ = sample_packet_service(rng, EPS, 1.0, size=100_000)
    assert np.mean(attempts == 1) >= 0.999


def test_scalar_draw_and_fixed_delay_floor(rng):
    r, d = sample_packet_service(rng, 0.3, 1.0)
    assert isinstance(r, int) and r >= 1
    attempts, delay = sample_packet_service(rng, 0.3, 1.0, fixed_tx_delay=0.5, size=1000)
    assert np.all(delay >= attempts * 0.5)


def test_effective_throughput_examples():
    assert effective_throughput(0.5, 0.2, 1) == pytest.approx(0.4)
    assert effective_throughput(0.0, 0.3) == 0.0
    assert effective_throughput(1.0, EPS, 1) == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(DomainError):
        effective_throughput(1.5, 0.2)


def test_effective_throughput_additive_in_alpha():
    for a1, a2, b in [(0.2, 0.3, 0.4), (0.5, 0.5, 0.1), (0.0, 0.7, 0.9)]:
        assert effective_throughput(a1, b) + effective_throughput(a2, b) == pytest.approx(
            effective_throughput(a1 + a2, b))


def test_with_drop_rate_mean_keeps_concentration():
    cfg = ChannelConfig(beta_a=2, beta_b=8).with_drop_rate_mean(0.4)
    assert cfg.beta_a + cfg.beta_b == pytest.approx(10)
    assert cfg.drop_rate_mean == pytest.approx(0.4)
