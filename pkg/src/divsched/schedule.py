"""Binary slot schedules realizing an attempt-probability vector.

Row ``i`` of the ``N x T`` matrix carries exactly ``floor(alpha_i * T)`` ones
and no column may hold more than ``M`` ones.  Placement is found by
min-conflicts local search; a deterministic wrap-around construction takes
over if the search runs out of iterations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import InfeasibleError

# alpha * T is floored; this slack keeps e.g. 0.29 * 100 from landing on 28
_FLOOR_SLACK = 1e-9


@dataclass
class ScheduleMatrix:
    Q: np.ndarray
    row_targets: np.ndarray
    M: int
    used_fallback: bool = False
    iterations: int = 0

    @property
    def N(self) -> int:
        return self.Q.shape[0]

    @property
    def T(self) -> int:
        return self.Q.shape[1]

    def slots(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.Q[i])

    def to_grid(self) -> list:
        return self.Q.astype(int).tolist()


@dataclass(frozen=True)
class Violation:
    kind: str  # "row", "column" or "entry"
    index: int
    actual: int
    allowed: int

    def __str__(self):
        if self.kind == "row":
            return f"row {self.index}: sum {self.actual} != target {self.allowed}"
        if self.kind == "column":
            return f"column {self.index}: sum {self.actual} > capacity {self.allowed}"
        return f"row {self.index}: non-binary entry {self.actual}"


def row_targets(alpha, T: int) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    return np.floor(a * T + _FLOOR_SLACK).astype(np.int64)


def staircase(targets: np.ndarray, T: int) -> np.ndarray:
    """Wrap-around placement: rows by descending target fill consecutive columns cyclically.

    Column loads never differ by more than one, so the maximum load is
    ``ceil(sum(targets) / T)``.
    """
    N = len(targets)
    Q = np.zeros((N, T), dtype=bool)
    pos = 0
    for i in sorted(range(N), key=lambda i: (-targets[i], i)):
        r = int(targets[i])
        Q[i, (pos + np.arange(r)) % T] = True
        pos = (pos + r) % T
    return Q


def build_matrix(alpha, T: int, M: int, rng: Optional[np.random.Generator] = None,
                 max_iters: int = 10_000) -> ScheduleMatrix:
    targets = row_targets(alpha, T)
    if T < 1 or M < 1:
        raise InfeasibleError(f"need T >= 1 and M >= 1, got T={T}, M={M}")
    if np.any(targets < 0) or np.any(targets > T):
        bad = int(np.flatnonzero((targets < 0) | (targets > T))[0])
        raise InfeasibleError(f"row {bad} needs {targets[bad]} ones but 0 <= floor(alpha*T) <= T={T} is required")
    if targets.sum() > M * T:
        raise InfeasibleError(f"sum of row targets {targets.sum()} exceeds capacity M*T={M * T}")
    rng = rng if rng is not None else np.random.default_rng(0)

    N = len(targets)
    Q = np.zeros((N, T), dtype=bool)
    for i, r in enumerate(targets):
        if r:
            Q[i, rng.choice(T, size=int(r), replace=False)] = True
    loads = Q.sum(axis=0)

    for it in range(max_iters):
        over = np.flatnonzero(loads > M)
        if over.size == 0:
            return ScheduleMatrix(Q.astype(np.uint8), targets, M, False, it)
        # random inconsistent variable: a row sitting in some overloaded column
        # full rows (target == T) have nowhere to move
        rows = np.flatnonzero(Q[:, over].any(axis=1) & (targets < T))
        i = int(rng.choice(rows))
        src_cols = over[Q[i, over]]
        src = int(rng.choice(src_cols))
        free = np.flatnonzero(~Q[i])
        free_loads = loads[free]
        # min-conflicts value: relocate the one to the least-loaded free column
        best = free[free_loads == free_loads.min()]
        dst = int(rng.choice(best))
        Q[i, src], Q[i, dst] = False, True
        loads[src] -= 1
        loads[dst] += 1
    else:
        it = max_iters
    if not np.any(loads > M):
        return ScheduleMatrix(Q.astype(np.uint8), targets, M, False, it)
    return ScheduleMatrix(staircase(targets, T).astype(np.uint8), targets, M, True, it)


def verify_matrix(sched: ScheduleMatrix) -> List[Violation]:
    """Every broken row target or column capacity; empty when the schedule is valid."""
    Q = np.asarray(sched.Q)
    out: List[Violation] = []
    bad = np.argwhere((Q != 0) & (Q != 1))
    for i, t in bad:
        out.append(Violation("entry", int(i), int(Q[i, t]), 1))
    rows = Q.sum(axis=1)
    for i in np.flatnonzero(rows != sched.row_targets):
        out.append(Violation("row", int(i), int(rows[i]), int(sched.row_targets[i])))
    cols = Q.sum(axis=0)
    for t in np.flatnonzero(cols > sched.M):
        out.append(Violation("column", int(t), int(cols[t]), int(sched.M)))
    return out
