"""Labeled feature data: synthetic Gaussian blobs or a delimited text file."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigError


def blob_means(n_classes: int, dim: int, separation: float = 4.0, rng=None) -> np.ndarray:
    """Class centers whose nearest neighbours sit ``separation`` standard deviations apart.

    With ``n_classes <= 2 * dim`` the centers are signed coordinate axes, so
    almost every pair is at exactly the nominal separation.  Otherwise random
    directions are rescaled so the closest pair hits it.
    """
    if n_classes <= 2 * dim:
        a = separation / np.sqrt(2.0)
        means = np.zeros((n_classes, dim))
        for j in range(n_classes):
            means[j, j % dim] = a if j < dim else -a
        return means
    rng = rng if rng is not None else np.random.default_rng(0)
    means = rng.normal(size=(n_classes, dim))
    diff = means[:, None, :] - means[None, :, :]
    dist = np.sqrt((diff ** 2).sum(-1))
    dist[np.diag_indices(n_classes)] = np.inf
    return means * (separation / dist.min())


def sample_blobs(rng: np.random.Generator, means: np.ndarray, counts) -> tuple:
    counts = np.asarray(counts, dtype=np.int64)
    labels = np.repeat(np.arange(len(means)), counts)
    X = means[labels] + rng.normal(size=(len(labels), means.shape[1]))
    return X, labels


def class_partition(N: int, C: int, partition="pairs", classes_per_rsu: int = 2,
                    samples_per_class: int = 200) -> np.ndarray:
    """``(N, C)`` matrix of how many samples of each class every RSU holds.

    ``"pairs"`` hands out consecutive groups of ``classes_per_rsu`` classes
    round-robin, ``"iid"`` gives every RSU every class, and an explicit
    nested list is taken as the matrix itself.
    """
    if isinstance(partition, str):
        counts = np.zeros((N, C), dtype=np.int64)
        if partition == "iid":
            counts[:] = samples_per_class
        elif partition == "pairs":
            if not 1 <= classes_per_rsu <= C:
                raise ConfigError(f"classes_per_rsu must lie in [1, C={C}]")
            for i in range(N):
                for m in range(classes_per_rsu):
                    counts[i, (classes_per_rsu * i + m) % C] = samples_per_class
        else:
            raise ConfigError(f"unknown partition {partition!r}; expected 'pairs', 'iid' or a matrix")
        return counts
    counts = np.asarray(partition, dtype=np.int64)
    if counts.shape != (N, C):
        raise ConfigError(f"partition matrix must be shaped (N={N}, C={C}), got {counts.shape}")
    if np.any(counts < 0):
        raise ConfigError("partition counts must be nonnegative")
    return counts


def load_delimited(path, dim: int = None, delimiter=None) -> tuple:
    """Rows of ``d`` floats followed by an integer label; commas or whitespace."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"dataset file {path} does not exist")
    text = path.read_text()
    if delimiter is None:
        delimiter = "," if "," in text.splitlines()[0] else None
    try:
        arr = np.loadtxt(path, delimiter=delimiter, ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"cannot parse dataset {path}: {exc}") from exc
    X, y = arr[:, :-1], arr[:, -1]
    if np.any(y != np.round(y)) or np.any(y < 0):
        raise ConfigError(f"{path}: last column must hold nonnegative integer labels")
    if dim is not None and X.shape[1] != dim:
        raise ConfigError(f"{path}: expected {dim} feature columns, found {X.shape[1]}")
    return X, y.astype(np.int64)
