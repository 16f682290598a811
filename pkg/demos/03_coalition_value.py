"""
Picking a coalition of RSUs
===========================

Each size-K coalition splits the M channels equally.  Its score mixes
inverse delay with total goodput plus the Jain index of the class counts
the server would hold afterwards.  Each score is standardized across all
candidates before the policy weights combine them.
"""
import itertools

import numpy as np

from divsched import PolicyWeights
from divsched.coalition import enumerate_best_coalition, greedy_coalition, shapley_ranking
from divsched.channel import ChannelState
from divsched.metrics import IntervalSnapshot, candidate_stats
from divsched.oracles import brute_force_best_coalition

rng = np.random.default_rng(5)
N, M, K = 8, 2, 4
state = ChannelState.fixed(rng.beta(2, 5, N), rng.gamma(5, 0.26, N))
inventory = rng.integers(0, 40, (N, 4))
ledger = np.array([120.0, 30.0, 80.0, 5.0])  # class 3 is scarce on the server
snap = IntervalSnapshot(state, inventory, ledger, M)

for name, w in [("with fairness", PolicyWeights.fair()), ("without fairness", PolicyWeights.nofair())]:
    exact = enumerate_best_coalition(snap, K, w)
    greedy = greedy_coalition(snap, K, w, candidate_stats(snap, K))
    oracle, _ = brute_force_best_coalition(state.beta, state.lam, inventory, ledger, M, K, w.as_tuple())
    print(f"{name:17s} exact {exact.members} value {exact.value:.3f}  greedy {greedy.members}"
          f"  oracle agrees: {oracle == exact.members}")
    print(" " * 18 + "raw (1/delay, goodput, jain) =", tuple(round(x, 3) for x in exact.raw))

# who holds the scarce class?
print("\nclass-3 stock per RSU:", inventory[:, 3].tolist())

# Shapley values as a diagnostic ranking of individual RSUs
phi = shapley_ranking(snap, PolicyWeights.fair())
print("Shapley ranking:", phi.ranking())
print("phi:", np.round(phi.phi, 3).tolist())
print("sum of phi = v(all RSUs):", round(phi.phi.sum(), 6))
