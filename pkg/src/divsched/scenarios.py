"""Ready-made configurations for policy comparisons."""
from __future__ import annotations

from .channel import ChannelConfig
from .policies import PolicyKind
from .sim import SimConfig

# three RSUs with fixed channels; only RSU3 (worst link) holds class 1
TABLE2_BETA = (0.1, 0.22, 0.44)
TABLE2_LAM = (1.3, 1.5, 1.1)
TABLE2_INVENTORY = [[400, 0, 200],
                    [200, 0, 400],
                    [100, 400, 100]]


def table2_config(seed: int = 0, **overrides) -> SimConfig:
    cfg = SimConfig(N=3, M=1, K=2, C=3, d=8, T=100, intervals=10, seed=seed,
                    partition=TABLE2_INVENTORY, fixed_beta=TABLE2_BETA, fixed_lam=TABLE2_LAM)
    return cfg.replace(**overrides) if overrides else cfg


def table2_kinds(cfg: SimConfig) -> dict:
    """Policy set for the three-RSU case.

    The delay-minimizing baseline keeps a single RSU (``K = M``); with two
    members it would split time evenly between RSU1 and RSU2, whose expected
    delays coincide.
    """
    kinds = {name: PolicyKind.make(name, cfg.K, cfg.weights)
             for name in ("fair", "nofair", "uniform", "random")}
    kinds["delaymin"] = PolicyKind.make("delaymin", cfg.M, cfg.weights)
    return kinds


def unbalanced_config(seed: int = 0, drop_rate_mean: float = 0.2, **overrides) -> SimConfig:
    """Ten RSUs holding two of ten classes each; ``M = K = 5``, ``T = 100``, 10 intervals."""
    channel = ChannelConfig().with_drop_rate_mean(drop_rate_mean)
    cfg = SimConfig(N=10, M=5, K=5, T=100, intervals=10, C=10, d=8, seed=seed, channel=channel,
                    partition="pairs", classes_per_rsu=2, separation=4.0)
    return cfg.replace(**overrides) if overrides else cfg
