"""Channel conditions and the stochastic packet-service model.

Time is measured in timeslots.  Each RSU ``i`` has a per-attempt drop rate
``beta[i]`` and a delay rate ``lam[i]``; a single attempt takes an
Exponential(lam) delay, and the number of attempts until success is
geometric with success probability ``1 - beta``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError

EPS = 1e-6


@dataclass(frozen=True)
class ChannelConfig:
    """Distributions of per-interval channel draws.

    ``beta ~ Beta(beta_a, beta_b)`` and ``lam ~ Gamma(gamma_shape, gamma_scale)``.
    ``fixed_tx_delay`` is the constant per-attempt transmission delay
    ``L / b_w`` expressed in timeslots; the bit length and bandwidth are kept
    only for bookkeeping.
    """

    beta_a: float = 2.0
    beta_b: float = 8.0
    gamma_shape: float = 5.0
    gamma_scale: float = 0.26
    channel_rate: float = 1.0
    fixed_tx_delay: float = 0.0
    packet_length_bits: Optional[float] = None
    bandwidth_hz: Optional[float] = None

    def __post_init__(self):
        for name in ("beta_a", "beta_b", "gamma_shape", "gamma_scale"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"channel.{name} must be > 0, got {value!r}")
        if not self.channel_rate > 0:
            raise ConfigError(f"channel.channel_rate must be > 0, got {self.channel_rate!r}")
        if not self.fixed_tx_delay >= 0:
            raise ConfigError(f"channel.fixed_tx_delay must be >= 0, got {self.fixed_tx_delay!r}")

    @property
    def drop_rate_mean(self) -> float:
        return self.beta_a / (self.beta_a + self.beta_b)

    def with_drop_rate_mean(self, mean: float) -> "ChannelConfig":
        """Same Beta concentration ``a + b``, shifted to the requested mean."""
        if not 0 < mean < 1:
            raise ConfigError(f"drop-rate mean must lie in (0, 1), got {mean!r}")
        total = self.beta_a + self.beta_b
        return replace(self, beta_a=mean * total, beta_b=(1 - mean) * total)


@dataclass(frozen=True)
class ChannelState:
    beta: np.ndarray
    lam: np.ndarray
    interval: int = 0

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if beta.shape != lam.shape or beta.ndim != 1:
            raise ConfigError("beta and lam must be 1-d arrays of equal length")
        if np.any(beta <= 0) or np.any(beta >= 1):
            raise DomainError("every drop rate must lie strictly inside (0, 1)")
        if np.any(lam <= 0):
            raise DomainError("every delay rate must be > 0")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return len(self.beta)

    @classmethod
    def fixed(cls, beta, lam, interval: int = 0) -> "ChannelState":
        """Build a state from given values, clamped like sampled ones."""
        beta = np.clip(np.asarray(beta, dtype=float), EPS, 1 - EPS)
        lam = np.maximum(np.asarray(lam, dtype=float), EPS)
        return cls(beta, lam, interval)


@dataclass
class PacketRecord:
    rsu: int
    attempts: int
    delay: float
    label: int
    first_interval: int
    sample_id: int = -1


def sample_channel_conditions(rng: np.random.Generator, config: ChannelConfig, n: int,
                              interval: int = 0) -> ChannelState:
    if n < 1:
        raise ConfigError(f"need at least one RSU, got n={n}")
    beta = rng.beta(config.beta_a, config.beta_b, size=n)
    lam = rng.gamma(config.gamma_shape, config.gamma_scale, size=n)
    return ChannelState.fixed(beta, lam, interval)


def _check_domain(beta, lam=None):
    b = np.asarray(beta, dtype=float)
    if np.any(~(b > 0)) or np.any(~(b < 1)):
        raise DomainError(f"drop rate must lie in (0, 1), got {beta!r}")
    if lam is not None:
        lm = np.asarray(lam, dtype=float)
        if np.any(~(lm > 0)):
            raise DomainError(f"delay rate must be > 0, got {lam!r}")


def expected_delay(beta, lam, fixed_tx_delay: float = 0.0):
    """Mean end-to-end delay of one delivered packet: ``(1/lam + D_tr) / (1 - beta)``.

    Works elementwise on arrays.
    """
    _check_domain(beta, lam)
    beta = np.asarray(beta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    out = (1.0 / lam) * (1.0 / (1.0 - beta))
    if fixed_tx_delay > 0:
        out = out + fixed_tx_delay / (1.0 - beta)
    return out if out.ndim else float(out)


def sample_packet_service(rng: np.random.Generator, beta: float, lam: float,
                          fixed_tx_delay: float = 0.0, size=None):
    """Draw ``(attempts, delay)`` for one packet, or arrays of them when ``size`` is given.

    The sum of ``R`` independent Exponential(lam) draws is Gamma(R, 1/lam),
    which is what gets sampled.
    """
    _check_domain(beta, lam)
    attempts = rng.geometric(1.0 - beta, size=size)
    delay = rng.gamma(attempts, 1.0 / lam) + attempts * fixed_tx_delay
    if size is None:
        return int(attempts), float(delay)
    return attempts, delay


def effective_throughput(alpha, beta, channel_rate: float = 1.0):
    a = np.asarray(alpha, dtype=float)
    if np.any(a < 0) or np.any(a > 1):
        raise DomainError(f"attempt probability must lie in [0, 1], got {alpha!r}")
    _check_domain(beta)
    out = a * channel_rate * (1.0 - np.asarray(beta, dtype=float))
    return out if out.ndim else float(out)
