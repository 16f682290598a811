import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divsched.coalition import enumerate_best_coalition
from divsched.errors import ConfigError
from divsched.metrics import PolicyWeights, candidate_stats, coalition_value
from divsched.policies import KINDS, PolicyKind, canonical, plan_interval
from divsched.scenarios import TABLE2_BETA, TABLE2_INVENTORY, TABLE2_LAM

from conftest import make_snapshot, random_snapshot


def test_uniform_splits_channels_evenly(rng):
    snap = random_snapshot(rng, 10, 5)
    members, alpha = plan_interval(PolicyKind.make("uniform", 5), snap, rng)
    assert members == tuple(range(10))
    np.testing.assert_allclose(alpha, 0.5)


def test_delay_min_prefers_rsu2_on_table_channels(rng):
    snap = make_snapshot(TABLE2_BETA, TABLE2_LAM, TABLE2_INVENTORY, M=1)
    members, alpha = plan_interval(PolicyKind.make("delaymin", 1), snap, rng)
    assert members == (1,) and alpha.tolist() == [0.0, 1.0, 0.0]


def test_delay_min_ignores_inventory(rng):
    snap = random_snapshot(rng, 8, 2)
    other = make_snapshot(snap.state.beta, snap.state.lam, rng.integers(0, 99, (8, 4)), M=2)
    kind = PolicyKind.make("delay_min", 3)
    assert plan_interval(kind, snap, rng)[0] == plan_interval(kind, other, rng)[0]


def test_random_is_reproducible():
    snap = random_snapshot(np.random.default_rng(0), 10, 5)
    kind = PolicyKind.make("random", 6)
    a = [plan_interval(kind, snap, r)[0] for r in [np.random.default_rng(5)] * 3]
    b = [plan_interval(kind, snap, r)[0] for r in [np.random.default_rng(5)] * 3]
    assert a == b and all(len(m) == 6 for m in a)


def test_optimized_uses_coalition_search(rng):
    snap = random_snapshot(rng, 7, 2)
    kind = PolicyKind.make("fair", 3)
    members, alpha = plan_interval(kind, snap, rng)
    assert members == enumerate_best_coalition(snap, 3, kind.weights).members
    np.testing.assert_allclose(alpha[list(members)], 2 / 3)


def test_nofair_drops_fairness_weight():
    assert PolicyKind.make("nofair", 2).weights.w3 == 0
    assert PolicyKind.make("optimized_fair", 2).weights == PolicyWeights.fair()


def test_names_and_validation():
    for short in ("fair", "nofair", "uniform", "random", "delaymin"):
        assert canonical(short) in KINDS
    with pytest.raises(ConfigError):
        canonical("bogus")
    with pytest.raises(ConfigError):
        plan_interval(PolicyKind.make("random", 1), random_snapshot(np.random.default_rng(0), 5, 2),
                      np.random.default_rng(0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(KINDS))
def test_every_policy_is_feasible(seed, name):
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng, 8, 3)
    _, alpha = plan_interval(PolicyKind.make(name, 4), snap, rng)
    assert np.all((alpha >= 0) & (alpha <= 1)) and alpha.sum() <= 3 + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nofair_beats_random_coalitions(seed):
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng, 8, 2)
    w = PolicyWeights.nofair()
    best = enumerate_best_coalition(snap, 4, w)
    for _ in range(10):
        other = tuple(sorted(rng.choice(8, 4, replace=False).tolist()))
        assert best.value >= coalition_value(other, snap, w, candidate_stats(snap, 4)).value

