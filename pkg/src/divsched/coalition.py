"""Active-set selection: exhaustive fixed-size enumeration, greedy growth, Shapley ranking."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, LimitExceededError
from .metrics import (CoalitionValue, IntervalSnapshot, NormalizationStats, PolicyWeights,
                      candidate_stats, coalition_value, raw_components, weighted)

EXACT_SHAPLEY_LIMIT = 12


def _check_size(snap: IntervalSnapshot, K: int) -> None:
    if not snap.M <= K <= snap.N:
        raise ConfigError(f"coalition size K={K} must satisfy M={snap.M} <= K <= N={snap.N}")


def enumerate_best_coalition(snap: IntervalSnapshot, K: int, weights: PolicyWeights,
                             norm: Optional[NormalizationStats] = None) -> CoalitionValue:
    """Score every size-``K`` coalition and return the best.

    Candidates are visited in lexicographic order and only a strictly larger
    value replaces the incumbent, so ties resolve to the smallest id list.
    """
    _check_size(snap, K)
    if math.comb(snap.N, K) > snap.enumeration_limit:
        raise LimitExceededError(
            f"C({snap.N},{K}) = {math.comb(snap.N, K)} exceeds enumeration limit "
            f"{snap.enumeration_limit}; use greedy_coalition")
    combos = list(itertools.combinations(range(snap.N), K))
    raws = [raw_components(c, snap) for c in combos]
    if norm is None:
        norm = NormalizationStats.from_components(raws)
    best, best_value = None, -math.inf
    for c, raw in zip(combos, raws):
        value = weighted(norm.apply(raw), weights)
        if value > best_value:
            best, best_value = c, value
    return coalition_value(best, snap, weights, norm)


def greedy_coalition(snap: IntervalSnapshot, K: int, weights: PolicyWeights,
                     norm: Optional[NormalizationStats] = None) -> CoalitionValue:
    """Grow a coalition from the best size-``M`` seed by largest marginal value."""
    _check_size(snap, K)
    if norm is None:
        norm = candidate_stats(snap, K)

    def score(members):
        return coalition_value(members, snap, weights, norm).value

    M, N = snap.M, snap.N
    if math.comb(N, M) <= snap.enumeration_limit:
        members, best = None, -math.inf
        for c in itertools.combinations(range(N), M):
            v = score(c)
            if v > best:
                members, best = c, v
        members = list(members)
    else:
        singles = [weighted(norm.apply(raw_components((i,), snap, alpha_each=1.0)), weights)
                   for i in range(N)]
        members = sorted(sorted(range(N), key=lambda i: (-singles[i], i))[:M])

    while len(members) < K:
        pick, best = None, -math.inf
        for n in range(N):
            if n in members:
                continue
            v = score(members + [n])
            if v > best:
                pick, best = n, v
        members.append(pick)
    return coalition_value(members, snap, weights, norm)


def best_coalition(snap: IntervalSnapshot, K: int, weights: PolicyWeights) -> CoalitionValue:
    """Exact search when it fits under the enumeration limit, greedy otherwise."""
    if math.comb(snap.N, K) <= snap.enumeration_limit:
        return enumerate_best_coalition(snap, K, weights)
    return greedy_coalition(snap, K, weights)


@dataclass(frozen=True)
class ShapleyResult:
    phi: np.ndarray
    mode: str
    samples: Optional[int] = None

    def ranking(self) -> list:
        """RSU ids by decreasing Shapley value (ties: lower id first)."""
        return sorted(range(len(self.phi)), key=lambda i: (-self.phi[i], i))


def shapley_values(value: Callable[[tuple], float], n: int, mode: str = "exact",
                   samples: int = 10_000, rng: Optional[np.random.Generator] = None,
                   exact_limit: int = EXACT_SHAPLEY_LIMIT) -> ShapleyResult:
    """Shapley values of an ``n``-player game.

    ``value`` maps a sorted tuple of player ids to a number; the empty
    coalition should be worth 0.  Exact mode weighs every subset; sampled
    mode averages marginal contributions along random join orders.
    """
    cache: dict = {}

    def v(mask: int) -> float:
        if mask not in cache:
            cache[mask] = float(value(tuple(i for i in range(n) if mask >> i & 1)))
        return cache[mask]

    if mode == "exact":
        if n > exact_limit:
            raise LimitExceededError(
                f"exact Shapley needs 2^{n} coalitions (limit n <= {exact_limit}); use mode='sampled'")
        fact = [math.factorial(k) for k in range(n + 1)]
        coef = [fact[s] * fact[n - s - 1] / fact[n] for s in range(n)]
        phi = np.zeros(n)
        for i in range(n):
            bit = 1 << i
            terms = []
            for mask in range(1 << n):
                if mask & bit:
                    continue
                terms.append(coef[bin(mask).count("1")] * (v(mask | bit) - v(mask)))
            phi[i] = math.fsum(terms)
        return ShapleyResult(phi, "exact")

    if mode == "sampled":
        if samples < 1:
            raise ConfigError("sampled Shapley needs at least one permutation")
        rng = rng if rng is not None else np.random.default_rng(0)
        totals = np.zeros(n)
        for _ in range(samples):
            mask, prev = 0, v(0)
            for i in rng.permutation(n):
                mask |= 1 << int(i)
                cur = v(mask)
                totals[i] += cur - prev
                prev = cur
        return ShapleyResult(totals / samples, "sampled", samples)

    raise ConfigError(f"unknown Shapley mode {mode!r}")


def shapley_ranking(snap: IntervalSnapshot, weights: PolicyWeights, mode: str = "exact",
                    samples: int = 10_000, rng: Optional[np.random.Generator] = None,
                    norm: Optional[NormalizationStats] = None,
                    exact_limit: int = EXACT_SHAPLEY_LIMIT) -> ShapleyResult:
    """Shapley values of the RSUs under the coalition value function.

    Coalitions smaller than ``M`` are infeasible and worth 0.  Values are
    raw weighted objectives unless ``norm`` is supplied.
    """
    def value(members: tuple) -> float:
        if len(members) < snap.M:
            return 0.0
        return coalition_value(members, snap, weights, norm).value

    return shapley_values(value, snap.N, mode, samples, rng, exact_limit)
