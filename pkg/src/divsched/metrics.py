"""Objective components and the coalition value function.

All reductions inside coalition scoring use ``math.fsum``.  Exact summation
makes every score independent of summation order, so coalitions scored in a
different order (or in parallel) produce bit-identical values.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .channel import ChannelState
from .errors import ConfigError, DomainError, InfeasibleError

# components are (inverse delay, throughput, fairness)
N_COMPONENTS = 3


@dataclass(frozen=True)
class PolicyWeights:
    w1: float = 1 / 3
    w2: float = 1 / 3
    w3: float = 1 / 3

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3)
        if any(not np.isfinite(w) or w < 0 for w in ws):
            raise ConfigError(f"weights must be nonnegative, got {ws}")
        if sum(ws) <= 0:
            raise ConfigError("weights must not all be zero")

    @classmethod
    def fair(cls) -> "PolicyWeights":
        return cls(1 / 3, 1 / 3, 1 / 3)

    @classmethod
    def nofair(cls) -> "PolicyWeights":
        return cls(0.5, 0.5, 0.0)

    def scaled(self, c: float) -> "PolicyWeights":
        return PolicyWeights(self.w1 * c, self.w2 * c, self.w3 * c)

    def as_tuple(self):
        return (self.w1, self.w2, self.w3)


@dataclass
class AccumulatorState:
    """Received class counts.

    ``expected`` is the planning ledger (inventory counts times effective
    throughput, summed over intervals); ``delivered`` counts samples that
    actually arrived.
    """

    expected: np.ndarray
    delivered: np.ndarray
    interval: int = 0

    @classmethod
    def empty(cls, n_classes: int) -> "AccumulatorState":
        return cls(np.zeros(n_classes), np.zeros(n_classes, dtype=np.int64), 0)

    def add_expected(self, inventory: np.ndarray, zeta: np.ndarray) -> None:
        self.expected = self.expected + np.asarray(inventory, float).T @ np.asarray(zeta, float)

    def add_delivered(self, labels: Iterable[int]) -> None:
        labels = np.asarray(list(labels), dtype=np.int64)
        if labels.size:
            self.delivered = self.delivered + np.bincount(labels, minlength=len(self.delivered))


@dataclass(frozen=True)
class IntervalSnapshot:
    """Immutable view of everything the planner may look at in one interval."""

    state: ChannelState
    inventory: np.ndarray  # (N, C) class counts per RSU
    ledger: np.ndarray  # (C,) expected received counts so far
    M: int
    channel_rate: float = 1.0
    fixed_tx_delay: float = 0.0
    enumeration_limit: int = 2_000_000
    stats_samples: int = 1024
    seed: int = 0

    def __post_init__(self):
        inv = np.asarray(self.inventory, dtype=float)
        ledger = np.asarray(self.ledger, dtype=float)
        if inv.ndim != 2 or inv.shape[0] != self.state.n:
            raise ConfigError(f"inventory must be shaped (N={self.state.n}, C), got {inv.shape}")
        if ledger.shape != (inv.shape[1],):
            raise ConfigError(f"ledger length {ledger.shape} does not match C={inv.shape[1]}")
        if np.any(inv < 0) or np.any(ledger < 0):
            raise ConfigError("inventory and ledger entries must be nonnegative")
        if not 1 <= self.M:
            raise ConfigError(f"M must be >= 1, got {self.M}")
        object.__setattr__(self, "inventory", inv)
        object.__setattr__(self, "ledger", ledger)
        # plain-float copies; scoring loops index these far faster than arrays
        object.__setattr__(self, "_beta", self.state.beta.tolist())
        object.__setattr__(self, "_lam", self.state.lam.tolist())
        object.__setattr__(self, "_inv", inv.tolist())
        object.__setattr__(self, "_ledger", ledger.tolist())

    @property
    def N(self) -> int:
        return self.state.n

    @property
    def C(self) -> int:
        return self.inventory.shape[1]


@dataclass(frozen=True)
class NormalizationStats:
    mean: tuple
    std: tuple

    @classmethod
    def identity(cls) -> "NormalizationStats":
        return cls((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))

    @classmethod
    def from_components(cls, rows: Sequence[Sequence[float]]) -> "NormalizationStats":
        """Population mean and standard deviation of each component column."""
        if not rows:
            raise ValueError("need at least one row")
        n = len(rows)
        means, stds = [], []
        for k in range(N_COMPONENTS):
            col = [r[k] for r in rows]
            mu = math.fsum(col) / n
            sd = math.sqrt(math.fsum((x - mu) ** 2 for x in col) / n)
            if sd <= 1e-12 * max(1.0, abs(mu)):
                sd = 0.0
            means.append(mu)
            stds.append(sd)
        return cls(tuple(means), tuple(stds))

    def apply(self, raw: Sequence[float]) -> tuple:
        return tuple(0.0 if s == 0.0 else (x - m) / s for x, m, s in zip(raw, self.mean, self.std))


@dataclass(frozen=True)
class CoalitionValue:
    members: tuple
    raw: tuple
    normalized: tuple
    value: float

    @property
    def K(self) -> int:
        return len(self.members)


def jain_index(x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("Jain index of an empty vector is undefined")
    if np.any(x < 0):
        raise DomainError("Jain index needs nonnegative entries")
    top = x.max()
    if top == 0.0:
        return 0.0
    vals = x.tolist()
    sq = math.fsum(v * v for v in vals)
    if sq == 0.0:
        # squares underflowed; the index is scale invariant, so rescale
        vals = (x / top).tolist()
        sq = math.fsum(v * v for v in vals)
    total = math.fsum(vals)
    return min(1.0, total * total / (len(vals) * sq))


def check_attempt_vector(alpha, M: Optional[float] = None) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 1:
        raise ConfigError("attempt vector must be 1-d")
    if np.any(a < 0) or np.any(a > 1):
        raise DomainError(f"attempt probabilities must lie in [0, 1], got {a}")
    if M is not None and a.sum() > M + 1e-9:
        raise InfeasibleError(f"sum of attempt probabilities {a.sum():.6g} exceeds M={M}")
    return a


def delay_objective(alpha, state: ChannelState, fixed_tx_delay: float = 0.0) -> float:
    """Inverse of the attempt-weighted expected delay."""
    a = check_attempt_vector(alpha)
    if not np.any(a > 0):
        raise DomainError("delay objective is undefined when every RSU is silent")
    terms = [_delay_term(ai, b, lm, fixed_tx_delay)
             for ai, b, lm in zip(a.tolist(), state.beta.tolist(), state.lam.tolist()) if ai > 0]
    return 1.0 / math.fsum(terms)


def _delay_term(alpha, beta, lam, fixed_tx_delay):
    term = alpha / (lam * (1.0 - beta))
    if fixed_tx_delay > 0:
        term = term + alpha * fixed_tx_delay / (1.0 - beta)
    return term


def throughput_objective(alpha, state: ChannelState, channel_rate: float = 1.0) -> float:
    a = check_attempt_vector(alpha)
    return math.fsum(ai * channel_rate * (1.0 - b) for ai, b in zip(a.tolist(), state.beta.tolist()))


def fairness_objective(acc, alpha, inventories, state: ChannelState,
                       channel_rate: float = 1.0) -> float:
    """Jain index of the class counts the server would hold after this interval.

    ``acc`` is an :class:`AccumulatorState` (its expected ledger is used) or
    the ledger vector itself.
    """
    ledger = acc.expected if isinstance(acc, AccumulatorState) else acc
    ledger = np.asarray(ledger, dtype=float)
    inv = np.asarray(inventories, dtype=float)
    a = check_attempt_vector(alpha)
    if inv.ndim != 2 or inv.shape != (len(a), len(ledger)):
        raise ConfigError(f"inventory shape {inv.shape} does not match "
                          f"(N={len(a)}, C={len(ledger)})")
    zeta = [ai * channel_rate * (1.0 - b) for ai, b in zip(a.tolist(), state.beta.tolist())]
    counts = [math.fsum([ledger[j]] + [inv[i, j] * zeta[i] for i in range(len(a)) if a[i] > 0])
              for j in range(len(ledger))]
    return jain_index(counts)


def equal_split_alpha(members: Sequence[int], N: int, M: int) -> np.ndarray:
    members = tuple(members)
    if len(members) < M:
        raise InfeasibleError(f"coalition of size {len(members)} < M={M} would need alpha > 1")
    alpha = np.zeros(N)
    alpha[list(members)] = M / len(members)
    return alpha


def _check_members(members, N: int, M: int) -> tuple:
    members = tuple(sorted(int(m) for m in members))
    if len(set(members)) != len(members):
        raise ConfigError(f"duplicate RSU ids in coalition {members}")
    if members and (members[0] < 0 or members[-1] >= N):
        raise ConfigError(f"RSU ids must lie in [0, {N}), got {members}")
    if len(members) < M:
        raise InfeasibleError(f"coalition of size {len(members)} < M={M} would need alpha > 1")
    return members


def raw_components(members: Sequence[int], snap: IntervalSnapshot, alpha_each: Optional[float] = None) -> tuple:
    """``(f1, f2, f3)`` for a coalition splitting ``M`` channels equally.

    ``alpha_each`` overrides the equal-split share (used only for scoring
    singletons when the candidate pool cannot be enumerated).
    """
    if alpha_each is None:
        members = _check_members(members, snap.N, snap.M)
        alpha_each = snap.M / len(members)
    beta, lam, inv, ledger = snap._beta, snap._lam, snap._inv, snap._ledger
    f1 = 1.0 / math.fsum(_delay_term(alpha_each, beta[i], lam[i], snap.fixed_tx_delay) for i in members)
    zeta = {i: alpha_each * snap.channel_rate * (1.0 - beta[i]) for i in members}
    f2 = math.fsum(zeta.values())
    counts = [math.fsum([ledger[j]] + [inv[i][j] * zeta[i] for i in members])
              for j in range(snap.C)]
    f3 = jain_index(counts)
    return (f1, f2, f3)


def weighted(normalized: Sequence[float], weights: PolicyWeights) -> float:
    z1, z2, z3 = normalized
    return weights.w1 * z1 + weights.w2 * z2 + weights.w3 * z3


def coalition_value(members: Sequence[int], snap: IntervalSnapshot, weights: PolicyWeights,
                    norm: Optional[NormalizationStats] = None) -> CoalitionValue:
    members = _check_members(members, snap.N, snap.M)
    raw = raw_components(members, snap)
    normalized = (norm or NormalizationStats.identity()).apply(raw)
    return CoalitionValue(members, raw, normalized, weighted(normalized, weights))


def candidate_stats(snap: IntervalSnapshot, K: int) -> NormalizationStats:
    """Normalization over the size-``K`` candidates of this interval.

    Every size-``K`` coalition is used when their number is within the
    enumeration limit; otherwise ``stats_samples`` coalitions are drawn with
    a generator seeded from the snapshot.
    """
    if math.comb(snap.N, K) <= snap.enumeration_limit:
        combos: Iterable = itertools.combinations(range(snap.N), K)
    else:
        rng = np.random.default_rng(snap.seed)
        combos = [tuple(sorted(rng.choice(snap.N, size=K, replace=False).tolist()))
                  for _ in range(snap.stats_samples)]
    return NormalizationStats.from_components([raw_components(c, snap) for c in combos])
