"""Command-line entry point: ``divsched simulate`` and ``divsched oracle``."""
from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import logging
import sys

import numpy as np

from . import __version__
from .channel import ChannelState, sample_channel_conditions
from .coalition import EXACT_SHAPLEY_LIMIT, enumerate_best_coalition, greedy_coalition, shapley_ranking
from .config import load_config, run_experiment
from .errors import ConfigError, DivschedError
from .metrics import NormalizationStats, coalition_value
from .oracles import brute_force_best_coalition
from .sim import SimState, grid_search_alpha

EXIT_OK, EXIT_RUN_FAILURE, EXIT_CONFIG = 0, 1, 2


def _first_snapshot(cfg):
    state = SimState(cfg)
    if cfg.fixed_beta is not None:
        state.channel = ChannelState.fixed(cfg.fixed_beta, cfg.fixed_lam)
    else:
        state.channel = sample_channel_conditions(state.rng["channel"], cfg.channel, cfg.N)
    return state.snapshot()


def _cmd_simulate(args) -> int:
    spec = load_config(args.config)
    changes = {}
    if args.policy:
        changes["policies"] = list(args.policy)
    if args.seed is not None:
        changes["seeds"] = [args.seed]
    if args.out:
        changes["out_dir"] = args.out
    if args.dump_schedule:
        changes["dump_schedule"] = True
    spec = dataclasses.replace(spec, **changes)
    status = run_experiment(spec, jobs=args.jobs)
    print(f"wrote results to {spec.out_dir}")
    return status


def _cmd_oracle(args) -> int:
    spec = load_config(args.config)
    cfg = spec.base
    snap = _first_snapshot(cfg)
    w = cfg.weights
    out = {"N": cfg.N, "M": cfg.M, "K": cfg.K, "beta": snap.state.beta.tolist(),
           "lam": snap.state.lam.tolist()}
    if args.which == "coalition":
        members, value = brute_force_best_coalition(snap.state.beta, snap.state.lam, snap.inventory,
                                                    snap.ledger, cfg.M, cfg.K, w.as_tuple(),
                                                    snap.channel_rate, snap.fixed_tx_delay)
        exact = enumerate_best_coalition(snap, cfg.K, w)
        greedy = greedy_coalition(snap, cfg.K, w)
        out.update(brute_force={"members": list(members), "value": value},
                   enumerate={"members": list(exact.members), "value": exact.value},
                   greedy={"members": list(greedy.members), "value": greedy.value},
                   agree=tuple(members) == exact.members and value == exact.value)
    elif args.which == "grid":
        alpha, value = grid_search_alpha(snap, args.n_alpha, w)
        ident = NormalizationStats.identity()
        best = max((coalition_value(c, snap, w, ident) for c in itertools.combinations(range(cfg.N), cfg.K)),
                   key=lambda cv: cv.value)
        out.update(grid={"alpha": alpha.tolist(), "value": value},
                   equal_split={"members": list(best.members), "value": best.value})
    else:
        mode = "exact" if cfg.N <= EXACT_SHAPLEY_LIMIT else "sampled"
        res = shapley_ranking(snap, w, mode=mode, samples=args.samples,
                              rng=np.random.default_rng(cfg.seed))
        out.update(mode=res.mode, phi=res.phi.tolist(), ranking=res.ranking())
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="divsched", description="Diversity-aware RSU uplink scheduling simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run the policy x seed x sweep grid of a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--policy", action="append", choices=["fair", "nofair", "uniform", "random", "delaymin"],
                   help="restrict to this policy (repeatable)")
    s.add_argument("--seed", type=int, help="run only this seed")
    s.add_argument("--dump-schedule", action="store_true", help="store each interval's slot matrix in the run JSON")
    s.add_argument("--out", help="output directory (overrides the config)")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.set_defaults(func=_cmd_simulate)

    o = sub.add_parser("oracle", help="evaluate a validation oracle on the config's first interval")
    o.add_argument("which", choices=["coalition", "grid", "shapley"])
    o.add_argument("--config", required=True)
    o.add_argument("--n-alpha", type=int, default=10)
    o.add_argument("--samples", type=int, default=10_000)
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivschedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE


if __name__ == "__main__":
    sys.exit(main())
