"""Which samples an active RSU transmits.

Class quotas come first (water-filling toward the scarcest class at the
server); inside each class the samples the current model is least sure
about go first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError


def class_quota(stock, counts, budget) -> np.ndarray:
    """Integer per-RSU, per-class send counts.

    Each unit of budget goes to the class with the smallest running count
    among classes still in stock somewhere (ties: lowest class), drawn from
    the RSU holding the most of that class (ties: lowest RSU).  ``budget``
    is either one pooled total or an array of per-RSU capacities.
    """
    stock = np.array(stock, dtype=np.int64)
    counts = np.array(counts, dtype=float)
    n, C = stock.shape
    if counts.shape != (C,):
        raise ValueError(f"counts has shape {counts.shape}, expected ({C},)")
    quota = np.zeros_like(stock)
    pooled = np.ndim(budget) == 0
    if pooled:
        remaining = int(budget)
        cap = np.ones(n, dtype=bool)
    else:
        caps = np.array(budget, dtype=np.int64)
        if caps.shape != (n,):
            raise ValueError(f"per-RSU budget has shape {caps.shape}, expected ({n},)")
        remaining = int(caps.sum())
        cap = caps > 0
    if remaining < 0 or (not pooled and np.any(caps < 0)):
        raise ValueError("budget must be nonnegative")

    while remaining > 0:
        live = stock * cap[:, None]
        in_stock = live.any(axis=0)
        if not in_stock.any():
            break
        j = int(np.argmin(np.where(in_stock, counts, np.inf)))
        i = int(np.argmax(live[:, j]))
        quota[i, j] += 1
        stock[i, j] -= 1
        counts[j] += 1
        remaining -= 1
        if not pooled:
            caps[i] -= 1
            cap[i] = caps[i] > 0
    return quota


def margin(scores) -> float:
    """Gap between the largest and second-largest class probability."""
    s = np.asarray(scores, dtype=float).ravel()
    if s.size < 2:
        raise DomainError("margin needs at least two classes")
    top2 = np.partition(s, -2)[-2:]
    return float(top2[1] - top2[0])


def margins(probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if probs.shape[1] < 2:
        raise DomainError("margin needs at least two classes")
    top2 = np.partition(probs, -2, axis=1)[:, -2:]
    return top2[:, 1] - top2[:, 0]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class ProxyClassifier:
    """Multinomial logistic regression standing in for the server-side model."""

    W: np.ndarray
    b: np.ndarray
    lr: float = 0.5
    epochs: int = 200
    l2: float = 1e-4
    trained: bool = False

    @classmethod
    def untrained(cls, n_classes: int, dim: int, **hyper) -> "ProxyClassifier":
        return cls(np.zeros((n_classes, dim)), np.zeros(n_classes), **hyper)

    @property
    def n_classes(self) -> int:
        return self.W.shape[0]

    def predict_proba(self, X) -> np.ndarray:
        return softmax(np.asarray(X, float) @ self.W.T + self.b)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def loss_and_grad(W, b, X, y, l2: float = 0.0):
    """Mean cross-entropy (plus ``l2/2 * |W|^2``) and its gradient in ``W`` and ``b``."""
    X = np.asarray(X, float)
    n = len(y)
    P = softmax(X @ W.T + b)
    loss = -np.mean(np.log(np.clip(P[np.arange(n), y], 1e-300, None))) + 0.5 * l2 * np.sum(W * W)
    G = P.copy()
    G[np.arange(n), y] -= 1.0
    G /= n
    return loss, G.T @ X + l2 * W, G.sum(axis=0)


def train_proxy_classifier(X, y, n_classes: int, dim: Optional[int] = None, lr: float = 0.5,
                           epochs: int = 200, l2: float = 1e-4) -> ProxyClassifier:
    """Full-batch gradient descent from zero weights.

    An empty sample store yields the untrained model, whose scores are uniform.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    dim = X.shape[1] if dim is None else dim
    model = ProxyClassifier.untrained(n_classes, dim, lr=lr, epochs=epochs, l2=l2)
    if len(y) == 0:
        return model
    W, b = model.W, model.b
    for _ in range(epochs):
        _, gW, gb = loss_and_grad(W, b, X, y, l2)
        W -= lr * gW
        b -= lr * gb
    model.trained = True
    return model


def min_margin_select(pool_ids, features, model: Optional[ProxyClassifier], k: int,
                      rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """The ``k`` pool samples with the smallest margin (ties: lower id).

    ``features`` holds one row per entry of ``pool_ids``.  Without a trained
    model the pick is uniform at random.
    """
    pool_ids = np.asarray(pool_ids, dtype=np.int64)
    k = min(int(k), len(pool_ids))
    if k <= 0:
        return pool_ids[:0]
    if k == len(pool_ids):
        return np.sort(pool_ids)
    if model is None or not model.trained:
        rng = rng if rng is not None else np.random.default_rng(0)
        return np.sort(rng.choice(pool_ids, size=k, replace=False))
    m = margins(model.predict_proba(features))
    order = np.lexsort((pool_ids, m))
    return pool_ids[order[:k]]


def macro_f1(y_true, y_pred, n_classes: int) -> float:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    scores = []
    for c in range(n_classes):
        tp = np.sum((y_pred == c) & (y_true == c))
        fp = np.sum((y_pred == c) & (y_true != c))
        fn = np.sum((y_pred != c) & (y_true == c))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(scores))
