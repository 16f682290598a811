import csv
import json
import subprocess
import sys

import pytest

from divsched import __version__
from divsched.cli import main
from divsched.config import load_config, run_experiment, spec_from_dict
from divsched.errors import ConfigError
from divsched.sim import SimConfig

TINY = {"N": 4, "M": 2, "K": 2, "T": 10, "intervals": 1, "C": 2, "d": 2,
        "samples_per_class": 10, "test_per_class": 5, "epochs": 5}


def _write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_minimal_config_fills_defaults(tmp_path):
    spec = load_config(_write(tmp_path, {"N": 10, "M": 5, "K": 5}))
    assert spec.base == SimConfig(N=10, M=5, K=5)
    assert spec.policies == ["fair", "nofair", "uniform", "random", "delaymin"]
    assert spec.seeds == [0] and spec.sweep_axis == "none"


def test_m_equal_n_names_invariant():
    with pytest.raises(ConfigError, match="M < N"):
        spec_from_dict({"N": 5, "M": 5, "K": 5})


@pytest.mark.parametrize("data, name", [({"N": 4, "bogus": 1}, "bogus"),
                                        ({"channel": {"beta_q": 1}}, "channel.'beta_q'"),
                                        ({"sweep": {"axis": "none", "step": 1}}, "sweep")])
def test_unknown_fields_rejected(data, name):
    with pytest.raises(ConfigError, match=name.replace(".", r"\.")):
        spec_from_dict(data)


@pytest.mark.parametrize("data", [{"N": "10"}, {"seeds": [-1]}, {"policies": ["best"]},
                                  {"sweep": {"axis": "drop_rate_mean", "values": [1.5]}},
                                  {"policy_K": {"random": 11}}])
def test_bad_values_rejected(data):
    with pytest.raises(ConfigError):
        spec_from_dict(data)


def test_grid_arithmetic(tmp_path):
    spec = spec_from_dict({**TINY, "seeds": list(range(10)),
                           "sweep": {"axis": "drop_rate_mean", "values": [0.1, 0.2, 0.3, 0.4, 0.5]},
                           "out": str(tmp_path / "out")})
    assert run_experiment(spec) == 0
    assert len(_rows(tmp_path / "out" / "runs.csv")) == 250
    summary = _rows(tmp_path / "out" / "summary.csv")
    assert len(summary) == 25 and all(r["n_runs"] == "10" for r in summary)
    assert len(list((tmp_path / "out" / "runs").iterdir())) == 250


def test_rows_respect_bounds(tmp_path):
    spec = spec_from_dict({**TINY, "intervals": 3, "seeds": [0, 1], "out": str(tmp_path)})
    run_experiment(spec)
    for r in _rows(tmp_path / "intervals.csv"):
        assert float(r["goodput"]) <= 2
        assert 0 <= float(r["jain_delivered"]) <= 1 and 0 <= float(r["f1_online"]) <= 1
    header = (tmp_path / "runs.csv").read_text().splitlines()[0]
    assert header.startswith("run_id,policy,seed,sweep_value,run_seed,f1")


def test_rerun_is_byte_identical(tmp_path):
    data = {**TINY, "intervals": 2, "seeds": [0, 1], "sweep": {"axis": "intervals", "values": [1, 2]}}
    for name in ("a", "b"):
        run_experiment(spec_from_dict({**data, "out": str(tmp_path / name)}))
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    assert files
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_adding_a_policy_keeps_other_runs(tmp_path):
    base = {**TINY, "seeds": [3]}
    run_experiment(spec_from_dict({**base, "policies": ["fair"], "out": str(tmp_path / "a")}))
    run_experiment(spec_from_dict({**base, "policies": ["random", "fair"], "out": str(tmp_path / "b")}))
    a = (tmp_path / "a" / "runs" / "fair-s3-v0.json").read_bytes()
    assert a == (tmp_path / "b" / "runs" / "fair-s3-v0.json").read_bytes()


@pytest.mark.slow
def test_goodput_declines_with_drop_rate(tmp_path):
    spec = spec_from_dict({"N": 10, "M": 5, "K": 5, "T": 100, "intervals": 3, "C": 10, "d": 8,
                           "epochs": 20, "test_per_class": 10, "seeds": list(range(10)),
                           "sweep": {"axis": "drop_rate_mean", "values": [0.1, 0.2, 0.3, 0.4, 0.5]},
                           "out": str(tmp_path)})
    assert run_experiment(spec) == 0
    summary = _rows(tmp_path / "summary.csv")
    for policy in spec.policies:
        g = [float(r["goodput_mean"]) for r in summary if r["policy"] == policy]
        assert all(x >= y for x, y in zip(g, g[1:])), (policy, g)


def test_cli_simulate(tmp_path, capsys):
    cfg = _write(tmp_path, {**TINY, "policies": ["fair", "uniform"]})
    out = tmp_path / "res"
    assert main(["simulate", "--config", str(cfg), "--policy", "fair", "--seed", "4",
                 "--dump-schedule", "--out", str(out)]) == 0
    run = json.loads((out / "runs" / "fair-s4-v0.json").read_text())
    assert len(run["records"][0]["schedule"]) == 4
    assert len(_rows(out / "runs.csv")) == 1


def test_cli_config_errors_exit_2(tmp_path, capsys):
    assert main(["simulate", "--config", str(_write(tmp_path, {"N": 4, "bogus": 1}))]) == 2
    assert "bogus" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  N: 4}')
    assert main(["simulate", "--config", str(bad)]) == 2
    assert "bad.json:2:3" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_run_failure_exit_1(tmp_path):
    cfg = _write(tmp_path, {**TINY, "policies": ["fair"], "dataset": "absent.csv", "out": str(tmp_path / "o")})
    assert main(["simulate", "--config", str(cfg)]) == 1


@pytest.mark.parametrize("which", ["coalition", "grid", "shapley"])
def test_cli_oracles(tmp_path, capsys, which):
    cfg = _write(tmp_path, {"N": 3, "M": 1, "K": 2, "C": 3})
    assert main(["oracle", which, "--config", str(cfg), "--samples", "200"]) == 0
    out = json.loads(capsys.readouterr().out)
    if which == "coalition":
        assert out["agree"] is True
    elif which == "grid":
        assert out["grid"]["value"] >= out["equal_split"]["value"]
    else:
        assert sorted(out["ranking"]) == [0, 1, 2]


def test_version_and_help():
    res = subprocess.run([sys.executable, "-m", "divsched", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
    res = subprocess.run([sys.executable, "-m", "divsched", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout
    res = subprocess.run([sys.executable, "-m", "divsched", "simulate"], capture_output=True, text=True)
    assert res.returncode == 2
