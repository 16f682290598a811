"""Brute-force reference implementations used to cross-check the fast paths.

Nothing here imports the scoring helpers it checks: the coalition scorer is
rewritten from the formulas on plain Python floats.
"""
from __future__ import annotations

import itertools
import math


def _score_parts(members, beta, lam, inventory, ledger, M, rate, fixed):
    share = M / len(members)
    delay_sum = []
    tput = {}
    for i in members:
        term = share / (lam[i] * (1.0 - beta[i]))
        if fixed > 0:
            term = term + share * fixed / (1.0 - beta[i])
        delay_sum.append(term)
        tput[i] = share * rate * (1.0 - beta[i])
    inv_delay = 1.0 / math.fsum(delay_sum)
    total_tput = math.fsum(tput[i] for i in members)
    classes = []
    for j in range(len(ledger)):
        parts = [ledger[j]]
        for i in members:
            parts.append(inventory[i][j] * tput[i])
        classes.append(math.fsum(parts))
    sq = math.fsum(c * c for c in classes)
    if sq == 0.0:
        jain = 0.0
    else:
        s = math.fsum(classes)
        jain = min(1.0, s * s / (len(classes) * sq))
    return inv_delay, total_tput, jain


def brute_force_best_coalition(beta, lam, inventory, ledger, M, K, weights,
                               channel_rate=1.0, fixed_tx_delay=0.0):
    """Best size-``K`` subset as ``(members, value)``.

    ``weights`` is a 3-sequence.  Each component is standardized over all
    size-``K`` subsets; ties keep the lexicographically first subset.
    """
    beta = [float(b) for b in beta]
    lam = [float(x) for x in lam]
    inventory = [[float(x) for x in row] for row in inventory]
    ledger = [float(x) for x in ledger]
    subsets = list(itertools.combinations(range(len(beta)), K))
    parts = [_score_parts(s, beta, lam, inventory, ledger, M, channel_rate, fixed_tx_delay)
             for s in subsets]
    n = len(parts)
    centers, scales = [], []
    for k in range(3):
        column = [p[k] for p in parts]
        mu = math.fsum(column) / n
        sd = math.sqrt(math.fsum((x - mu) ** 2 for x in column) / n)
        centers.append(mu)
        scales.append(0.0 if sd <= 1e-12 * max(1.0, abs(mu)) else sd)
    w1, w2, w3 = (float(w) for w in weights)
    best, best_value = None, -math.inf
    for s, p in zip(subsets, parts):
        z = [0.0 if scales[k] == 0.0 else (p[k] - centers[k]) / scales[k] for k in range(3)]
        value = w1 * z[0] + w2 * z[1] + w3 * z[2]
        if value > best_value:
            best, best_value = s, value
    return best, best_value
