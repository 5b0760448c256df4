"""
A small Monte-Carlo benchmark
=============================

The harness repeats trials under a master seed, writes per-trial JSON
lines and a summary CSV, and reports the lower bounds alongside.
"""

import tempfile
from pathlib import Path

from mode_quest import bench as B

inst = B.get_instance("I1")
summary = B.bench(B.BenchConfig(inst, B.standard_algorithms(0.1), runs=30, seed=1))
print(B.summary_csv(summary))

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run"
    B.bench(B.BenchConfig(inst, B.standard_algorithms(0.1), runs=5, seed=1, output=out))
    print(sorted(p.name for p in out.iterdir()))
    lines = (out / "trials.jsonl").read_text().splitlines()
    print(lines[0])
    print("means recomputed from JSON lines:", B.means_from_jsonl(lines))
