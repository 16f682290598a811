import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divsched.data import blob_means, sample_blobs
from divsched.errors import DomainError
from divsched.selection import (ProxyClassifier, class_quota, loss_and_grad, macro_f1, margin,
                                margins, min_margin_select, softmax, train_proxy_classifier)

STOCK = [[10, 0], [0, 10]]


def test_quota_symmetric():
    assert class_quota(STOCK, [0, 0], 4).sum(axis=0).tolist() == [2, 2]


def test_quota_fills_the_trailing_class():
    assert class_quota(STOCK, [5, 0], 4).sum(axis=0).tolist() == [0, 4]


def test_quota_zero_budget():
    assert class_quota(STOCK, [0, 0], 0).sum() == 0


def test_quota_per_rsu_capacity():
    q = class_quota(STOCK, [0, 0], np.array([3, 0]))
    assert q.tolist() == [[3, 0], [0, 0]]


def test_quota_never_exceeds_stock():
    q = class_quota([[1, 0], [0, 2]], [0, 0], 10)
    assert q.tolist() == [[1, 0], [0, 2]]


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(0, 40))
def test_quota_spread_property(seed, budget):
    rng = np.random.default_rng(seed)
    stock = rng.integers(0, 8, (3, 4))
    counts = rng.integers(0, 10, 4)
    q = class_quota(stock, counts, budget)
    assert np.all(q <= stock) and q.sum() == min(budget, stock.sum())
    after = counts + q.sum(axis=0)
    left = (stock - q).sum(axis=0) > 0
    if left.any():
        spread_before = counts[left].max() - counts[left].min()
        assert after[left].max() - after[left].min() <= spread_before + 1


@pytest.mark.parametrize("scores, want", [((0.5, 0.5), 0.0), ((1 - 1e-6, 1e-6), 1 - 2e-6),
                                          ((0.5, 0.3, 0.2), 0.2)])
def test_margin_examples(scores, want):
    assert margin(scores) == pytest.approx(want, abs=1e-12)


def test_margin_needs_two_classes():
    with pytest.raises(DomainError):
        margin([1.0])


@given(st.lists(st.floats(-20, 20), min_size=3, max_size=8), st.randoms())
def test_margin_range_and_permutation_invariance(logits, rnd):
    p = softmax(np.array(logits)[None, :])[0]
    m = margin(p)
    assert 0.0 <= m < 1.0
    order = np.argsort(-p)
    rest = order[2:].tolist()
    rnd.shuffle(rest)
    q = p.copy()
    q[order[2:]] = p[rest]
    assert margin(q) == m


@given(st.lists(st.floats(-15, 15), min_size=2, max_size=10))
def test_softmax_is_a_distribution(z):
    p = softmax(np.array(z)[None, :])[0]
    assert np.all((p > 0) & (p < 1))
    assert abs(p.sum() - 1) < 1e-9


class _FixedModel(ProxyClassifier):
    def __init__(self, probs):
        super().__init__(np.zeros((1, 2)), np.zeros(2), trained=True)
        self._p = np.asarray(probs)

    def predict_proba(self, X):
        return self._p[np.asarray(X, dtype=int).ravel()]


def test_min_margin_select_examples():
    probs = [[0.55, 0.45], [0.95, 0.05], [0.75, 0.25]]  # margins 0.1, 0.9, 0.5
    model = _FixedModel(probs)
    ids, feats = np.array([10, 11, 12]), np.array([[0], [1], [2]])
    assert min_margin_select(ids, feats, model, 1).tolist() == [10]
    assert sorted(min_margin_select(ids, feats, model, 2).tolist()) == [10, 12]
    assert sorted(min_margin_select(ids, feats, model, 3).tolist()) == [10, 11, 12]


@given(st.integers(0, 30), st.integers(0, 40), st.integers(0, 2**32 - 1))
def test_min_margin_select_subset(n, k, seed):
    rng = np.random.default_rng(seed)
    ids = rng.permutation(100)[:n]
    X = rng.normal(size=(n, 3))
    model = train_proxy_classifier(rng.normal(size=(20, 3)), rng.integers(0, 3, 20), 3, epochs=5)
    out = min_margin_select(ids, X, model, k, rng)
    assert len(out) == min(k, n) and set(out.tolist()) <= set(ids.tolist())
    assert len(min_margin_select(ids, X, None, k, rng)) == min(k, n)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    X, y = rng.normal(size=(10, 4)), rng.integers(0, 3, 10)
    W, b = rng.normal(size=(3, 4)), rng.normal(size=3)
    _, dW, db = loss_and_grad(W, b, X, y, l2=1e-3)
    h = 1e-6
    num = np.zeros_like(W)
    for idx in np.ndindex(W.shape):
        Wp, Wm = W.copy(), W.copy()
        Wp[idx] += h
        Wm[idx] -= h
        num[idx] = (loss_and_grad(Wp, b, X, y, 1e-3)[0] - loss_and_grad(Wm, b, X, y, 1e-3)[0]) / (2 * h)
    assert np.linalg.norm(num - dW) / np.linalg.norm(dW) < 1e-5
    numb = np.array([(loss_and_grad(W, b + h * e, X, y, 1e-3)[0] - loss_and_grad(W, b - h * e, X, y, 1e-3)[0])
                     / (2 * h) for e in np.eye(3)])
    assert np.linalg.norm(numb - db) / np.linalg.norm(db) < 1e-5


def test_separable_blobs_are_learned():
    rng = np.random.default_rng(0)
    X, y = sample_blobs(rng, blob_means(2, 2, separation=4.0), [100, 100])
    model = train_proxy_classifier(X, y, 2)
    assert np.mean(model.predict(X) == y) >= 0.95


def test_single_class_store():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(30, 4))
    model = train_proxy_classifier(X, np.full(30, 2), 4)
    assert np.all(model.predict(rng.normal(size=(50, 4))) == 2)


def test_empty_store_gives_uniform_scores():
    model = train_proxy_classifier(np.zeros((0, 3)), np.zeros(0, int), 4)
    np.testing.assert_allclose(model.predict_proba(np.ones((2, 3))), 0.25)
    assert not model.trained


def test_macro_f1():
    assert macro_f1([0, 1, 1, 0], [0, 1, 1, 0], 2) == 1.0
    assert macro_f1([0, 0, 1, 1], [0, 0, 0, 0], 2) == pytest.approx((2 / 3) / 2)
    assert margins(np.array([[0.2, 0.8], [0.5, 0.5]])).tolist() == pytest.approx([0.6, 0.0])
