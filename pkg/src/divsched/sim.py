"""Interval-by-interval simulation of RSU uplink scheduling.

One interval: draw channels, let the policy pick an active set and attempt
vector, lay it out as a slot matrix, pick samples for the free slots, play
out retransmissions head-of-line, then retrain the server-side model on
everything delivered so far.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional, Union

import numpy as np

from . import data as datamod
from .channel import ChannelConfig, ChannelState, effective_throughput, sample_channel_conditions
from .errors import ConfigError, LimitExceededError
from .metrics import (AccumulatorState, IntervalSnapshot, PolicyWeights, delay_objective,
                      fairness_objective, jain_index, throughput_objective)
from .policies import PolicyKind, plan_interval
from .schedule import build_matrix
from .selection import class_quota, macro_f1, min_margin_select, train_proxy_classifier


@dataclass(frozen=True)
class SimConfig:
    N: int = 10
    M: int = 5
    K: int = 5
    T: int = 100
    intervals: int = 10
    C: int = 10
    d: int = 8
    seed: int = 0
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    weights: PolicyWeights = field(default_factory=PolicyWeights.fair)
    partition: Union[str, list] = "pairs"
    classes_per_rsu: int = 2
    samples_per_class: int = 300
    samples_per_packet: int = 1
    separation: float = 4.0
    test_per_class: int = 100
    redraw_channels: bool = True
    fixed_beta: Optional[tuple] = None
    fixed_lam: Optional[tuple] = None
    dataset: Optional[str] = None
    enumeration_limit: int = 2_000_000
    stats_samples: int = 1024
    max_iters: int = 10_000
    lr: float = 0.5
    epochs: int = 200
    l2: float = 1e-4

    def __post_init__(self):
        for name in ("N", "M", "K", "T", "C", "d", "samples_per_packet", "test_per_class",
                     "enumeration_limit", "stats_samples", "epochs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.intervals < 0:
            raise ConfigError(f"intervals must be >= 0, got {self.intervals}")
        if not self.M < self.N:
            raise ConfigError(f"invariant M < N violated: M={self.M}, N={self.N}")
        if not self.M <= self.K <= self.N:
            raise ConfigError(f"invariant M <= K <= N violated: M={self.M}, K={self.K}, N={self.N}")
        if self.C < 2:
            raise ConfigError(f"need at least two classes, got C={self.C}")
        if self.max_iters < 0 or self.samples_per_class < 0:
            raise ConfigError("max_iters and samples_per_class must be >= 0")
        if (self.fixed_beta is None) != (self.fixed_lam is None):
            raise ConfigError("fixed_beta and fixed_lam must be given together")
        if self.fixed_beta is not None:
            if len(self.fixed_beta) != self.N or len(self.fixed_lam) != self.N:
                raise ConfigError(f"fixed_beta and fixed_lam need N={self.N} entries")
            ChannelState.fixed(self.fixed_beta, self.fixed_lam)
        datamod.class_partition(self.N, self.C, self.partition, self.classes_per_rsu,
                                self.samples_per_class)

    def replace(self, **changes) -> "SimConfig":
        return replace(self, **changes)


@dataclass
class Packet:
    rsu: int
    samples: tuple
    label: int
    first_interval: int
    attempts: int = 0
    delay: float = 0.0


@dataclass
class IntervalRecord:
    interval: int
    coalition: tuple
    alpha: list
    attempted: int
    delivered: int
    delay_mean: float
    goodput: float
    jain_delivered: float
    class_counts: list
    delivered_per_rsu: list
    f1_online: float
    used_fallback: bool = False
    schedule: Optional[list] = None


@dataclass
class RunSummary:
    policy: str
    seed: int
    records: List[IntervalRecord]
    final_counts: list
    f1: float
    total_delivered: int
    delivered_per_rsu: list

    @property
    def utilization(self) -> np.ndarray:
        """Each RSU's share of all delivered packets."""
        d = np.asarray(self.delivered_per_rsu, dtype=float)
        return d / d.sum() if d.sum() > 0 else d

    @property
    def jain_final(self) -> float:
        return jain_index(self.final_counts)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["jain_final"] = self.jain_final
        return out


class SimState:
    """Mutable state of one run; all randomness comes from per-purpose streams."""

    STREAMS = ("data", "test", "channel", "policy", "schedule", "service", "select")

    def __init__(self, config: SimConfig):
        self.config = config
        seqs = np.random.SeedSequence(config.seed).spawn(len(self.STREAMS))
        self.rng = {name: np.random.default_rng(s) for name, s in zip(self.STREAMS, seqs)}
        self._init_data()
        self.queues = [deque() for _ in range(config.N)]
        self.inflight = np.zeros(config.C, dtype=np.int64)
        self.acc = AccumulatorState.empty(config.C)
        self.delivered_ids: List[int] = []
        self.delivered_per_rsu = np.zeros(config.N, dtype=np.int64)
        self.model = None
        self.channel: Optional[ChannelState] = None
        self.interval = 0
        self.records: List[IntervalRecord] = []

    def _init_data(self):
        cfg = self.config
        counts = datamod.class_partition(cfg.N, cfg.C, cfg.partition, cfg.classes_per_rsu,
                                         cfg.samples_per_class)
        rng = self.rng["data"]
        if cfg.dataset is None:
            means = datamod.blob_means(cfg.C, cfg.d, cfg.separation, rng)
            X, y = datamod.sample_blobs(rng, means, counts.sum(axis=0))
            self.X_test, self.y_test = datamod.sample_blobs(self.rng["test"], means,
                                                            [cfg.test_per_class] * cfg.C)
        else:
            X_all, y_all = datamod.load_delimited(cfg.dataset, cfg.d)
            if y_all.max() >= cfg.C:
                raise ConfigError(f"dataset has label {y_all.max()} but C={cfg.C}")
            order = rng.permutation(len(y_all))
            X_all, y_all = X_all[order], y_all[order]
            test_idx, train_idx = [], []
            for j in range(cfg.C):
                idx = np.flatnonzero(y_all == j)
                test_idx.extend(idx[:cfg.test_per_class])
                train_idx.extend(idx[cfg.test_per_class:])
            test_idx = np.sort(np.asarray(test_idx, dtype=np.int64))
            self.X_test, self.y_test = X_all[test_idx], y_all[test_idx]
            X, y = X_all[train_idx], y_all[train_idx]
        self.X, self.y = X, y
        # pools[i][j]: ids of class-j samples still held by RSU i
        self.pools = [[np.zeros(0, dtype=np.int64) for _ in range(cfg.C)] for _ in range(cfg.N)]
        for j in range(cfg.C):
            ids = np.flatnonzero(y == j)
            start = 0
            for i in range(cfg.N):
                take = int(min(counts[i, j], len(ids) - start))
                self.pools[i][j] = ids[start:start + take]
                start += take

    def inventory(self) -> np.ndarray:
        return np.array([[len(p) for p in row] for row in self.pools], dtype=np.int64)

    def pending(self) -> int:
        return sum(len(q) for q in self.queues)

    def snapshot(self) -> IntervalSnapshot:
        cfg = self.config
        return IntervalSnapshot(
            state=self.channel, inventory=self.inventory(), ledger=self.acc.expected, M=cfg.M,
            channel_rate=cfg.channel.channel_rate, fixed_tx_delay=cfg.channel.fixed_tx_delay,
            enumeration_limit=cfg.enumeration_limit, stats_samples=cfg.stats_samples,
            seed=int(np.random.SeedSequence([cfg.seed, self.interval]).generate_state(1)[0]))


def serve_row(queue: deque, n_slots: int, beta: float, lam: float, fixed_tx_delay: float,
              rng: np.random.Generator):
    """Play ``n_slots`` scheduled slots against a FCFS queue.

    The head packet makes one attempt per slot; it leaves on success (prob.
    ``1 - beta``) and otherwise retries in the next slot.  Each attempt adds
    an Exponential(lam) delay plus the fixed transmission delay.  Returns the
    delivered packets and the number of attempts made.
    """
    success = rng.random(n_slots) >= beta
    waits = rng.exponential(1.0 / lam, n_slots)
    delivered, attempts = [], 0
    for s in range(n_slots):
        if not queue:
            break
        pkt = queue[0]
        pkt.attempts += 1
        pkt.delay += waits[s] + fixed_tx_delay
        attempts += 1
        if success[s]:
            delivered.append(queue.popleft())
    return delivered, attempts


def _interleave(groups: List[np.ndarray]) -> list:
    """Round-robin over per-class id lists so no class is always queued last."""
    out = []
    for batch in itertools.zip_longest(*groups):
        out.extend(int(x) for x in batch if x is not None)
    return out


def step_interval(state: SimState, kind: PolicyKind, dump_schedule: bool = False) -> IntervalRecord:
    cfg = state.config
    t = state.interval
    if cfg.fixed_beta is not None:
        state.channel = ChannelState.fixed(cfg.fixed_beta, cfg.fixed_lam, t)
    elif state.channel is None or cfg.redraw_channels:
        state.channel = sample_channel_conditions(state.rng["channel"], cfg.channel, cfg.N, t)
    ch = state.channel

    snap = state.snapshot()
    members, alpha = plan_interval(kind, snap, state.rng["policy"])
    sched = build_matrix(alpha, cfg.T, cfg.M, state.rng["schedule"], cfg.max_iters)
    slots = sched.row_targets

    # pending packets take their slots first; new samples fill the rest
    free = np.maximum(0, slots - np.array([len(q) for q in state.queues])) * cfg.samples_per_packet
    quota = class_quota(snap.inventory, state.acc.delivered + state.inflight, free)
    rng_sel = state.rng["select"]
    for i in np.flatnonzero(quota.sum(axis=1)):
        picked = []
        for j in range(cfg.C):
            q = quota[i, j]
            if q == 0:
                picked.append(np.zeros(0, dtype=np.int64))
                continue
            pool = state.pools[i][j]
            chosen = min_margin_select(pool, state.X[pool], state.model, q, rng_sel)
            state.pools[i][j] = np.setdiff1d(pool, chosen, assume_unique=True)
            picked.append(chosen)
        ids = _interleave(picked)
        for k in range(0, len(ids), cfg.samples_per_packet):
            chunk = tuple(ids[k:k + cfg.samples_per_packet])
            state.queues[i].append(Packet(int(i), chunk, int(state.y[chunk[0]]), t))
            state.inflight += np.bincount(state.y[list(chunk)], minlength=cfg.C)

    attempted, delays, delivered_now = 0, [], np.zeros(cfg.N, dtype=np.int64)
    rng_srv = state.rng["service"]
    for i in range(cfg.N):
        if slots[i] == 0:
            continue
        got, n_att = serve_row(state.queues[i], int(slots[i]), ch.beta[i], ch.lam[i],
                               cfg.channel.fixed_tx_delay, rng_srv)
        attempted += n_att
        delivered_now[i] = len(got)
        for pkt in got:
            labels = state.y[list(pkt.samples)]
            state.inflight -= np.bincount(labels, minlength=cfg.C)
            state.acc.add_delivered(labels)
            state.delivered_ids.extend(pkt.samples)
            delays.append(pkt.delay)
    state.delivered_per_rsu += delivered_now
    zeta = effective_throughput(alpha, ch.beta, cfg.channel.channel_rate)
    state.acc.add_expected(snap.inventory, zeta)
    state.acc.interval = t + 1

    ids = np.asarray(state.delivered_ids, dtype=np.int64)
    state.model = train_proxy_classifier(state.X[ids], state.y[ids], cfg.C, cfg.d,
                                         lr=cfg.lr, epochs=cfg.epochs, l2=cfg.l2)
    f1 = macro_f1(state.y_test, state.model.predict(state.X_test), cfg.C)

    n_deliv = int(delivered_now.sum())
    rec = IntervalRecord(
        interval=t, coalition=tuple(int(m) for m in members), alpha=alpha.tolist(),
        attempted=attempted, delivered=n_deliv,
        delay_mean=float(np.mean(delays)) if delays else float("nan"),
        goodput=n_deliv / cfg.T, jain_delivered=jain_index(state.acc.delivered),
        class_counts=state.acc.delivered.tolist(), delivered_per_rsu=delivered_now.tolist(),
        f1_online=f1, used_fallback=sched.used_fallback,
        schedule=sched.to_grid() if dump_schedule else None)
    state.records.append(rec)
    state.interval += 1
    return rec


def run_simulation(config: SimConfig, kind: Union[str, PolicyKind],
                   dump_schedule: bool = False) -> RunSummary:
    if isinstance(kind, str):
        kind = PolicyKind.make(kind, config.K, config.weights)
    state = SimState(config)
    for _ in range(config.intervals):
        step_interval(state, kind, dump_schedule)
    if state.model is None:
        state.model = train_proxy_classifier(np.zeros((0, config.d)), np.zeros(0, int), config.C, config.d)
    f1 = macro_f1(state.y_test, state.model.predict(state.X_test), config.C)
    return RunSummary(kind.name, config.seed, state.records, state.acc.delivered.tolist(), f1,
                      int(state.acc.delivered.sum()), state.delivered_per_rsu.tolist())


def grid_search_alpha(snap: IntervalSnapshot, n_alpha: int, weights: PolicyWeights):
    """Exhaustive search of ``{0, 1/n_alpha, ..., 1}^N`` under ``sum(alpha) <= M``.

    Maximizes the raw weighted objective of one interval.  Meant as a
    validation oracle, so the sizes are capped.
    """
    N = snap.N
    if N > 4 or n_alpha > 20 or n_alpha < 1:
        raise LimitExceededError(f"grid search needs N <= 4 and 1 <= n_alpha <= 20, got N={N}, n_alpha={n_alpha}")
    best_alpha, best = None, -math.inf
    for ks in itertools.product(range(n_alpha + 1), repeat=N):
        if sum(ks) == 0 or sum(ks) > snap.M * n_alpha:
            continue
        alpha = np.array(ks, dtype=float) / n_alpha
        value = (weights.w1 * delay_objective(alpha, snap.state, snap.fixed_tx_delay)
                 + weights.w2 * throughput_objective(alpha, snap.state, snap.channel_rate)
                 + weights.w3 * fairness_objective(snap.ledger, alpha, snap.inventory, snap.state,
                                                   snap.channel_rate))
        if value > best:
            best_alpha, best = alpha, value
    return best_alpha, best
