"""Experiment specification files and the policy x seed x sweep runner."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .channel import ChannelConfig
from .errors import ConfigError
from .metrics import PolicyWeights
from .policies import SHORT, PolicyKind, canonical
from .sim import SimConfig, run_simulation

log = logging.getLogger(__name__)

SWEEP_AXES = ("none", "drop_rate_mean", "intervals")
INTERVAL_COLUMNS = ["run_id", "policy", "seed", "sweep_value", "interval", "delay_mean", "goodput",
                    "jain_delivered", "delivered_total", "f1_online"]
RUN_COLUMNS = ["run_id", "policy", "seed", "sweep_value", "run_seed", "f1", "total_delivered",
               "goodput", "delay_mean", "jain_final"]
SUMMARY_METRICS = ["f1", "goodput", "delay_mean", "jain_final", "total_delivered"]

_SPEC_KEYS = {"policies", "seeds", "sweep", "out", "policy_K", "dump_schedule"}


@dataclass
class ExperimentSpec:
    base: SimConfig
    policies: List[str] = field(default_factory=lambda: ["fair", "nofair", "uniform", "random", "delaymin"])
    seeds: List[int] = field(default_factory=lambda: [0])
    sweep_axis: str = "none"
    sweep_values: List[float] = field(default_factory=list)
    out_dir: str = "results"
    policy_K: Dict[str, int] = field(default_factory=dict)
    dump_schedule: bool = False

    def __post_init__(self):
        if not self.policies:
            raise ConfigError("policies: need at least one policy")
        self.policies = [SHORT[canonical(p)] for p in self.policies]
        if not self.seeds:
            raise ConfigError("seeds: need at least one seed")
        for s in self.seeds:
            if isinstance(s, bool) or not isinstance(s, int) or s < 0:
                raise ConfigError(f"seeds: every seed must be a nonnegative integer, got {s!r}")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if self.sweep_axis != "none" and not self.sweep_values:
            raise ConfigError("sweep.values: need at least one value")
        for v in self.sweep_values:
            if self.sweep_axis == "drop_rate_mean" and not 0 < v < 1:
                raise ConfigError(f"sweep.values: drop-rate mean {v!r} must lie in (0, 1)")
            if self.sweep_axis == "intervals" and (v != int(v) or v < 0):
                raise ConfigError(f"sweep.values: interval count {v!r} must be a nonnegative integer")
        self.policy_K = {SHORT[canonical(k)]: v for k, v in self.policy_K.items()}
        for p in self.policies:
            self.kind(p)

    def kind(self, policy: str) -> PolicyKind:
        K = self.policy_K.get(policy, self.base.K)
        if policy != "uniform" and not self.base.M <= K <= self.base.N:
            raise ConfigError(f"policy_K.{policy}: need M={self.base.M} <= K={K} <= N={self.base.N}")
        return PolicyKind.make(policy, K, self.base.weights)

    def sweep_points(self) -> list:
        return [None] if self.sweep_axis == "none" else list(self.sweep_values)

    def config_for(self, seed: int, sweep_index: int) -> SimConfig:
        """Config of one grid cell.

        The run seed hashes (base seed, seed, sweep index) through a
        ``SeedSequence``.  It does not depend on the policy, so every policy
        sees the same data and channel draws.
        """
        run_seed = int(np.random.SeedSequence([self.base.seed, seed, sweep_index]).generate_state(1)[0])
        cfg = self.base.replace(seed=run_seed)
        value = self.sweep_points()[sweep_index]
        if self.sweep_axis == "drop_rate_mean":
            cfg = cfg.replace(channel=cfg.channel.with_drop_rate_mean(value))
        elif self.sweep_axis == "intervals":
            cfg = cfg.replace(intervals=int(value))
        return cfg


def _typecheck(name: str, value, annotation: str):
    ann = str(annotation)
    if ann in ("int",):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif ann in ("float",):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif ann in ("bool",):
        ok = isinstance(value, bool)
    elif "Optional[str]" in ann:
        ok = value is None or isinstance(value, str)
    elif "Optional[tuple]" in ann:
        ok = value is None or (isinstance(value, list) and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value))
    elif "Union[str, list]" in ann:
        ok = isinstance(value, (str, list))
    else:
        ok = True
    if not ok:
        raise ConfigError(f"{name}: expected {ann}, got {type(value).__name__} {value!r}")


def _strict_fields(cls, data: dict, prefix: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix.rstrip('.') or 'config'}: expected an object")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    out = {}
    for key, value in data.items():
        if key not in fields:
            raise ConfigError(f"unknown field {prefix}{key!r}")
        _typecheck(prefix + key, value, fields[key].type)
        out[key] = tuple(value) if isinstance(value, list) and "tuple" in str(fields[key].type) else value
    return out


def spec_from_dict(data: dict, base_dir: Optional[Path] = None) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    sim_fields = {f.name for f in dataclasses.fields(SimConfig)}
    sim_data, spec_data = {}, {}
    for key, value in data.items():
        if key in _SPEC_KEYS:
            spec_data[key] = value
        elif key in sim_fields:
            sim_data[key] = value
        else:
            raise ConfigError(f"unknown field {key!r}")
    if "channel" in sim_data:
        sim_data["channel"] = ChannelConfig(**_strict_fields(ChannelConfig, sim_data["channel"], "channel."))
    if "weights" in sim_data:
        sim_data["weights"] = PolicyWeights(**_strict_fields(PolicyWeights, sim_data["weights"], "weights."))
    plain = {k: v for k, v in sim_data.items() if k not in ("channel", "weights")}
    sim_data.update(_strict_fields(SimConfig, plain, ""))
    if sim_data.get("dataset") and base_dir is not None and not Path(sim_data["dataset"]).is_absolute():
        sim_data["dataset"] = str(base_dir / sim_data["dataset"])
    base = SimConfig(**sim_data)

    sweep = spec_data.get("sweep", {"axis": "none"})
    if not isinstance(sweep, dict) or set(sweep) - {"axis", "values"}:
        raise ConfigError(f"sweep: expected {{'axis', 'values'}}, got {sweep!r}")
    for key, kind in (("policies", list), ("seeds", list), ("policy_K", dict)):
        if key in spec_data and not isinstance(spec_data[key], kind):
            raise ConfigError(f"{key}: expected a {kind.__name__}")
    return ExperimentSpec(
        base=base,
        policies=spec_data.get("policies", ["fair", "nofair", "uniform", "random", "delaymin"]),
        seeds=spec_data.get("seeds", [0]),
        sweep_axis=sweep.get("axis", "none"),
        sweep_values=list(sweep.get("values", [])),
        out_dir=spec_data.get("out", "results"),
        policy_K=spec_data.get("policy_K", {}),
        dump_schedule=bool(spec_data.get("dump_schedule", False)),
    )


def load_config(path) -> ExperimentSpec:
    """Read and validate a JSON experiment file; unknown keys are rejected."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return spec_from_dict(data, path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".6g")


def _jsonable(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) else obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


@dataclass
class _Cell:
    run_id: str
    policy: str
    seed: int
    sweep_value: Optional[float]
    config: SimConfig
    kind: PolicyKind
    dump_schedule: bool


def _run_cell(cell: _Cell):
    try:
        return cell, run_simulation(cell.config, cell.kind, cell.dump_schedule), None
    except Exception:  # noqa: BLE001 - reported per cell
        return cell, None, traceback.format_exc()


def _cells(spec: ExperimentSpec) -> List[_Cell]:
    cells = []
    for vi, value in enumerate(spec.sweep_points()):
        for seed in spec.seeds:
            cfg = spec.config_for(seed, vi)
            for policy in spec.policies:
                run_id = f"{policy}-s{seed}-v{vi}"
                cells.append(_Cell(run_id, policy, seed, value, cfg, spec.kind(policy), spec.dump_schedule))
    return cells


def _run_row(cell: _Cell, summary) -> dict:
    recs = summary.records
    delivered = sum(r.delivered for r in recs)
    delay = (math.fsum(r.delay_mean * r.delivered for r in recs if r.delivered) / delivered
             if delivered else float("nan"))
    goodput = float(np.mean([r.goodput for r in recs])) if recs else 0.0
    return {"run_id": cell.run_id, "policy": cell.policy, "seed": cell.seed,
            "sweep_value": cell.sweep_value, "run_seed": cell.config.seed, "f1": summary.f1,
            "total_delivered": summary.total_delivered, "goodput": goodput, "delay_mean": delay,
            "jain_final": summary.jain_final}


def _write_csv(path: Path, columns: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row[c]) for c in columns])


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> int:
    """Run every grid cell, then write all outputs.  Returns the exit status."""
    cells = _cells(spec)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    out = Path(spec.out_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    interval_rows, run_rows, failed = [], [], []
    for cell, summary, err in results:
        if summary is None:
            log.error("run %s failed:\n%s", cell.run_id, err)
            failed.append(cell.run_id)
            continue
        total = 0
        for r in summary.records:
            total += r.delivered
            interval_rows.append({"run_id": cell.run_id, "policy": cell.policy, "seed": cell.seed,
                                  "sweep_value": cell.sweep_value, "interval": r.interval,
                                  "delay_mean": r.delay_mean, "goodput": r.goodput,
                                  "jain_delivered": r.jain_delivered, "delivered_total": total,
                                  "f1_online": r.f1_online})
        run_rows.append(_run_row(cell, summary))
        payload = summary.to_dict()
        payload.update(run_id=cell.run_id, seed=cell.seed, run_seed=cell.config.seed,
                       sweep_axis=spec.sweep_axis, sweep_value=cell.sweep_value, K=cell.kind.K)
        with open(out / "runs" / f"{cell.run_id}.json", "w") as fh:
            json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
            fh.write("\n")

    _write_csv(out / "intervals.csv", INTERVAL_COLUMNS, interval_rows)
    _write_csv(out / "runs.csv", RUN_COLUMNS, run_rows)
    summary_rows = []
    for value in spec.sweep_points():
        for policy in spec.policies:
            group = [r for r in run_rows if r["policy"] == policy and r["sweep_value"] == value]
            if not group:
                continue
            row = {"policy": policy, "sweep_value": value, "n_runs": len(group)}
            for m in SUMMARY_METRICS:
                vals = np.array([g[m] for g in group], dtype=float)
                row[f"{m}_mean"] = float(np.mean(vals))
                row[f"{m}_std"] = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
            summary_rows.append(row)
    columns = ["policy", "sweep_value", "n_runs"] + [f"{m}_{s}" for m in SUMMARY_METRICS for s in ("mean", "std")]
    _write_csv(out / "summary.csv", columns, summary_rows)
    if failed:
        log.error("%d of %d runs failed: %s", len(failed), len(cells), ", ".join(failed))
        return 1
    return 0
