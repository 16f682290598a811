"""
Sweeping the mean drop rate
===========================

A small experiment grid run through the same harness the CLI uses:
policies x seeds x drop-rate means, written as CSV and JSON under a
temporary directory.
"""
import csv
import tempfile
from pathlib import Path

from divsched.config import run_experiment, spec_from_dict

out = Path(tempfile.mkdtemp(prefix="divsched-sweep-"))
spec = spec_from_dict({
    "N": 10, "M": 5, "K": 5, "T": 100, "intervals": 4, "C": 10, "d": 8, "epochs": 60,
    "policies": ["fair", "nofair", "uniform", "delaymin"],
    "seeds": [0, 1, 2],
    "sweep": {"axis": "drop_rate_mean", "values": [0.1, 0.3, 0.5]},
    "out": str(out),
})
status = run_experiment(spec)
print("exit status", status, "; outputs in", out)

with open(out / "summary.csv") as fh:
    rows = list(csv.DictReader(fh))
print(f"\n{'policy':9s} {'PDR':>4s} {'goodput':>8s} {'delay':>7s} {'jain':>6s} {'F1':>6s}")
for r in rows:
    print(f"{r['policy']:9s} {r['sweep_value']:>4s} {float(r['goodput_mean']):8.3f} {float(r['delay_mean_mean']):7.3f}"
          f" {float(r['jain_final_mean']):6.3f} {float(r['f1_mean']):6.3f}")
