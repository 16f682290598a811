"""The five compared scheduling policies behind one ``plan_interval`` call."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .channel import expected_delay
from .coalition import best_coalition
from .errors import ConfigError
from .metrics import IntervalSnapshot, PolicyWeights, equal_split_alpha

KINDS = ("optimized_fair", "optimized_nofair", "uniform", "random", "delay_min")
ALIASES = {
    "fair": "optimized_fair",
    "nofair": "optimized_nofair",
    "uniform": "uniform",
    "random": "random",
    "delaymin": "delay_min",
}
SHORT = {v: k for k, v in ALIASES.items()}


def canonical(name: str) -> str:
    if name in KINDS:
        return name
    if name in ALIASES:
        return ALIASES[name]
    raise ConfigError(f"unknown policy {name!r}; choose from {sorted(ALIASES)}")


@dataclass(frozen=True)
class PolicyKind:
    name: str
    weights: PolicyWeights
    K: int

    def __post_init__(self):
        object.__setattr__(self, "name", canonical(self.name))
        if self.name == "optimized_fair" and not self.weights.w3 > 0:
            raise ConfigError("optimized_fair needs w3 > 0")
        if self.name == "optimized_nofair" and self.weights.w3 != 0:
            raise ConfigError("optimized_nofair needs w3 = 0")
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")

    @classmethod
    def make(cls, name: str, K: int, weights: PolicyWeights = None) -> "PolicyKind":
        """Build a kind; the no-fairness variant zeroes ``w3`` of the given weights."""
        name = canonical(name)
        weights = weights or PolicyWeights.fair()
        if name == "optimized_nofair":
            weights = PolicyWeights(weights.w1, weights.w2, 0.0)
        return cls(name, weights, K)

    @property
    def short(self) -> str:
        return SHORT[self.name]


def _delay_order(snap: IntervalSnapshot) -> list:
    """RSU ids by expected delay; near-equal delays fall back to 1/lambda, then id."""
    ed = expected_delay(snap.state.beta, snap.state.lam, snap.fixed_tx_delay)
    ed = np.atleast_1d(ed)
    inv_lam = 1.0 / snap.state.lam

    def cmp(i, j):
        if not math.isclose(ed[i], ed[j], rel_tol=1e-9):
            return -1 if ed[i] < ed[j] else 1
        if not math.isclose(inv_lam[i], inv_lam[j], rel_tol=1e-12):
            return -1 if inv_lam[i] < inv_lam[j] else 1
        return i - j

    return sorted(range(snap.N), key=functools.cmp_to_key(cmp))


def plan_interval(kind: PolicyKind, snap: IntervalSnapshot, rng: np.random.Generator):
    """Active RSU ids (sorted) and the attempt vector for this interval."""
    N, M, K = snap.N, snap.M, kind.K
    if kind.name == "uniform":
        members = tuple(range(N))
        return members, np.full(N, M / N)
    if not M <= K <= N:
        raise ConfigError(f"policy {kind.name} needs M={M} <= K={K} <= N={N}")
    if kind.name in ("optimized_fair", "optimized_nofair"):
        members = best_coalition(snap, K, kind.weights).members
    elif kind.name == "random":
        members = tuple(sorted(int(i) for i in rng.choice(N, size=K, replace=False)))
    elif kind.name == "delay_min":
        members = tuple(sorted(_delay_order(snap)[:K]))
    else:  # pragma: no cover - guarded by canonical()
        raise ConfigError(kind.name)
    return members, equal_split_alpha(members, N, M)
