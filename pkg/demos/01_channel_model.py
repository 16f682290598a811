"""
Lossy uplinks: retransmissions and their cost
=============================================

Every RSU sees a per-attempt drop rate beta and an exponential
per-attempt delay with rate lam.  Failed attempts are retried, so the
attempt count is geometric and the delay of a packet is the sum of its
attempt delays.
"""
import numpy as np

from divsched.channel import ChannelConfig, expected_delay, sample_channel_conditions, sample_packet_service

rng = np.random.default_rng(0)

# one interval's channel draw for ten RSUs
state = sample_channel_conditions(rng, ChannelConfig(), 10)
print("drop rates   ", np.round(state.beta, 3))
print("service rates", np.round(state.lam, 3))

# closed-form expected delay against a Monte Carlo estimate
for beta, lam in [(0.1, 1.3), (0.22, 1.5), (0.44, 1.1)]:
    attempts, delay = sample_packet_service(rng, beta, lam, size=100_000)
    print(f"beta={beta:.2f} lam={lam:.1f}  E[R]={attempts.mean():.3f} (1/(1-beta)={1 / (1 - beta):.3f})"
          f"  E[D]={delay.mean():.4f} (formula {expected_delay(beta, lam):.4f})")

# goodput of a saturated RSU falls linearly with the drop rate
for beta in (0.1, 0.3, 0.5):
    attempts, _ = sample_packet_service(rng, beta, 1.0, size=20_000)
    delivered = np.searchsorted(np.cumsum(attempts), 10_000, side="right")
    print(f"beta={beta:.1f}  packets delivered in 10000 slots: {delivered}  (expected {10_000 * (1 - beta):.0f})")
