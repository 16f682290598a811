import numpy as np
import pytest

from divsched.channel import ChannelState
from divsched.metrics import IntervalSnapshot

_ACCEPTANCE_LINES = []


def record_criterion(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_snapshot(beta, lam, inventory, ledger=None, M=1, **kw):
    state = ChannelState.fixed(beta, lam)
    inventory = np.asarray(inventory, dtype=float)
    if ledger is None:
        ledger = np.zeros(inventory.shape[1])
    return IntervalSnapshot(state, inventory, ledger, M, **kw)


def random_snapshot(rng, N, M, C=4, zero_ledger=False):
    beta = rng.beta(2, 5, size=N)
    lam = rng.gamma(5, 0.26, size=N)
    inv = rng.integers(0, 50, size=(N, C))
    ledger = np.zeros(C) if zero_ledger else rng.uniform(0, 200, size=C)
    return make_snapshot(beta, lam, inv, ledger, M=M)
