"""Monte-Carlo benchmark harness.

Trial ``i`` of a benchmark always uses the random stream derived from
(seed, i), for every algorithm, so all algorithms in a trial see the same
trace and results do not depend on the number of worker processes.
Per-trial JSON lines are the source of truth; the summary CSV is derived
from them.  Wall-clock timings go to a separate file so the other outputs
are byte-identical across reruns.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .algorithms import Rule, TrialResult, run
from .bounds import bound_ratio_check, lb_identity_based, lb_identityless
from .model import Algorithm, GeometricPrior, Instance, RunConfig, make_instance
from .sampler import trial_rng

_DATASETS = {
    "I1": [20, 12, 8, 5, 5],
    "I2": [20, 16, 6, 4, 4],
    "dataset1": [41, 16, 3, 14, 31, 29, 5, 5, 11, 7, 2, 3, 9, 3],
    "dataset2": [19, 39, 14, 44, 18, 139, 13, 12, 39, 25, 20, 118],
    "dataset3": [172, 72, 82, 88, 155, 107, 289, 2, 2, 3, 11, 12, 1, 4],
}
_I3_BASE = [20, 18, 6, 3, 3]


def builtin_instances(omega: int = 1) -> dict[str, Instance]:
    """Named instances; ``I3`` is scaled by ``omega``."""
    out = {name: make_instance(sizes, name) for name, sizes in _DATASETS.items()}
    out["I3"] = make_instance([omega * s for s in _I3_BASE], "I3" if omega == 1 else f"I3x{omega}")
    return out


def get_instance(spec, omega: int = 1) -> Instance:
    """Resolve a builtin name, a size list, or a JSON-style dict."""
    if isinstance(spec, Instance):
        return spec
    if isinstance(spec, str):
        insts = builtin_instances(omega)
        if spec not in insts:
            raise KeyError(f"unknown instance {spec!r}; choose from {sorted(insts)}")
        return insts[spec]
    if isinstance(spec, dict):
        if "builtin" in spec:
            return get_instance(spec["builtin"], int(spec.get("omega", omega)))
        return Instance.from_json(spec)
    return make_instance(spec)


def ib(q: float = 0.1, alpha: int = 1, one_v_one: bool = False, delta: float = 0.1) -> RunConfig:
    algo = Algorithm.IB_CME_1V1 if one_v_one else Algorithm.IB_CME
    return RunConfig(delta, algo, alpha, GeometricPrior(q))


def standard_algorithms(delta: float = 0.1) -> list[RunConfig]:
    """The four columns of the population-scaling and dataset tables."""
    return [
        ib(0.1, 1, True, delta),
        ib(0.1, 1, False, delta),
        RunConfig(delta, Algorithm.NI_ME_1V1),
        RunConfig(delta, Algorithm.NI_ME),
    ]


def table1_algorithms(delta: float = 0.1) -> list[RunConfig]:
    return [
        ib(0.1, 1, False, delta),
        ib(0.9, 1, False, delta),
        ib(0.1, 1, True, delta),
        RunConfig(delta, Algorithm.NI_ME),
        RunConfig(delta, Algorithm.NI_ME_1V1),
        ib(0.1, 3, False, delta),
    ]


@dataclass
class BenchConfig:
    instance: Instance
    algorithms: list[RunConfig]
    runs: int = 100
    seed: int = 0
    output: Optional[Path] = None
    jobs: int = 1
    check_every: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")


@dataclass
class AlgoSummary:
    label: str
    config: RunConfig
    taus: np.ndarray
    errors: int
    capped: int
    rules: dict
    lower_bound: float
    wall_clock: float = 0.0

    @property
    def runs(self) -> int:
        return len(self.taus)

    @property
    def mean(self) -> float:
        return float(np.mean(self.taus))

    @property
    def std(self) -> float:
        return float(np.std(self.taus, ddof=1)) if self.runs > 1 else 0.0

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.runs)

    @property
    def error_rate(self) -> float:
        decided = self.runs - self.capped
        return self.errors / decided if decided else 0.0


@dataclass
class BenchSummary:
    instance: Instance
    rows: list[AlgoSummary]
    bounds: dict = field(default_factory=dict)

    def row(self, label: str) -> AlgoSummary:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def means(self) -> dict[str, float]:
        return {r.label: r.mean for r in self.rows}


SUMMARY_COLUMNS = [
    "instance", "algorithm", "delta", "alpha", "q", "runs", "mean_tau", "std_tau",
    "stderr", "min_tau", "max_tau", "error_rate", "capped",
    "fired_identityless", "fired_identity_based", "lower_bound",
]


def _lower_bound(instance: Instance, config: RunConfig) -> float:
    if config.algorithm.identity_based:
        return lb_identity_based(instance, config.delta)
    return lb_identityless(instance, config.delta)


def _trial_job(args):
    instance, configs, seed, trial, check_every, stream = args
    out = []
    for c in configs:
        start = time.perf_counter()
        res = run(instance, c, trial_rng(seed, trial, stream), check_every)
        out.append((res, time.perf_counter() - start))
    return out


def run_trials(instance: Instance, configs: Sequence[RunConfig], runs: int, seed: int,
               jobs: int = 1, check_every: int = 1,
               stream: tuple = ()) -> list[list[tuple[TrialResult, float]]]:
    """Results indexed [trial][config]; independent of ``jobs``."""
    tasks = [(instance, list(configs), seed, i, check_every, stream) for i in range(runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_trial_job, tasks, chunksize=max(1, runs // (4 * jobs))))
    return [_trial_job(t) for t in tasks]


def summarize(instance: Instance, configs: Sequence[RunConfig], results) -> BenchSummary:
    rows = []
    for k, c in enumerate(configs):
        col = [trial[k][0] for trial in results]
        rows.append(AlgoSummary(
            label=c.label,
            config=c,
            taus=np.array([r.stopping_time for r in col], dtype=float),
            errors=sum(1 for r in col if r.error),
            capped=sum(1 for r in col if r.rule_fired is Rule.MAX_EPOCHS),
            rules={rule.value: sum(1 for r in col if r.rule_fired is rule) for rule in Rule},
            lower_bound=_lower_bound(instance, c),
            wall_clock=sum(trial[k][1] for trial in results),
        ))
    bounds = bound_ratio_check(instance, configs[0].delta).to_dict()
    return BenchSummary(instance, rows, bounds)


def bench(config: BenchConfig) -> BenchSummary:
    results = run_trials(config.instance, config.algorithms, config.runs, config.seed,
                         config.jobs, config.check_every)
    summary = summarize(config.instance, config.algorithms, results)
    if config.output is not None:
        write_outputs(Path(config.output), config, results, summary)
    return summary


def trial_lines(instance: Instance, configs, results, seed: int) -> list[str]:
    lines = []
    for i, trial in enumerate(results):
        for c, (res, _) in zip(configs, trial):
            rec = {"trial": i, "seed": seed, "instance": instance.name or list(instance.sizes),
                   "algorithm": c.label, "config": {**c.to_dict(), "seed": seed},
                   **res.to_dict()}
            lines.append(json.dumps(rec, sort_keys=True))
    return lines


def summary_csv(summary: BenchSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    name = summary.instance.name or "-".join(map(str, summary.instance.sizes))
    for r in summary.rows:
        c = r.config
        ident = c.algorithm.identity_based
        w.writerow([
            name, r.label, c.delta, c.alpha if ident else "", c.prior.q if ident else "",
            r.runs, repr(r.mean), repr(r.std), repr(r.stderr), int(r.taus.min()),
            int(r.taus.max()), repr(r.error_rate), r.capped,
            r.rules[Rule.IDENTITYLESS.value], r.rules[Rule.IDENTITY_BASED.value],
            repr(r.lower_bound),
        ])
    return buf.getvalue()


def write_outputs(out: Path, config: BenchConfig, results, summary: BenchSummary):
    out.mkdir(parents=True, exist_ok=True)
    lines = trial_lines(config.instance, config.algorithms, results, config.seed)
    (out / "trials.jsonl").write_text("\n".join(lines) + "\n")
    (out / "summary.csv").write_text(summary_csv(summary))
    (out / "bounds.json").write_text(json.dumps(summary.bounds, indent=2, sort_keys=True) + "\n")
    timings = {r.label: r.wall_clock for r in summary.rows}
    (out / "timings.json").write_text(json.dumps(timings, indent=2) + "\n")


def means_from_jsonl(lines) -> dict[str, float]:
    """Recompute per-algorithm mean stopping times from trial records."""
    taus: dict[str, list] = {}
    for line in lines:
        if not line.strip():
            continue
        rec = json.loads(line)
        taus.setdefault(rec["algorithm"], []).append(rec["stopping_time"])
    return {k: float(np.mean(np.array(v, dtype=float))) for k, v in taus.items()}


# ---------------------------------------------------------------------------
# sweeps


def affine_fit(x, y) -> tuple[float, float, float]:
    """Least-squares y = slope x + intercept; returns (slope, intercept, R^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def scan_delta(instance: Instance, deltas: Sequence[float], algorithms: Sequence[RunConfig],
               runs: int = 100, seed: int = 0, jobs: int = 1) -> list[dict]:
    """Mean stopping time per (algorithm, delta); columns
    algorithm, delta, mean_tau, stderr."""
    rows = []
    for delta in deltas:
        if not 0 < delta < 1:
            raise ValueError("deltas must lie in (0, 1)")
        configs = [RunConfig.from_dict({**c.to_dict(), "delta": delta}) for c in algorithms]
        summary = summarize(instance, configs, run_trials(instance, configs, runs, seed, jobs))
        for base, r in zip(algorithms, summary.rows):
            rows.append({"algorithm": base.label, "delta": delta,
                         "mean_tau": r.mean, "stderr": r.stderr})
    return rows


def scan_scale(base: Instance, omegas: Sequence[int], algorithms: Sequence[RunConfig],
               runs: int = 100, seed: int = 0, jobs: int = 1) -> list[dict]:
    """Mean stopping time as the population is scaled by omega; columns
    omega, N, algorithm, mean_tau."""
    rows = []
    for omega in omegas:
        if int(omega) != omega or omega < 1:
            raise ValueError("omega must be a positive integer")
        inst = base.scaled(int(omega))
        # a shared stream would make identityless traces identical across
        # scales (bounded draws are floor(U * N)); keep rows independent
        results = run_trials(inst, algorithms, runs, seed, jobs, stream=(int(omega),))
        summary = summarize(inst, algorithms, results)
        for r in summary.rows:
            rows.append({"omega": int(omega), "N": inst.N, "algorithm": r.label,
                         "mean_tau": r.mean})
    return rows


def rows_to_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n",
                       extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


DELTA_COLUMNS = ["algorithm", "delta", "mean_tau", "stderr"]
SCALE_COLUMNS = ["omega", "N", "algorithm", "mean_tau"]


PRESETS = {
    "table1": {"instances": ["I1", "I2"], "algorithms": "table1", "runs": 100},
    "table2": {"instance": "I3", "omegas": [1, 5, 10, 15, 20, 25, 30, 35, 40],
               "algorithms": "standard", "runs": 100},
    "table3": {"instances": ["dataset1", "dataset2", "dataset3"], "algorithms": "standard",
               "runs": 100},
    "figure1": {"instance": "I2", "deltas": [0.1, 0.01, 0.001, 0.0001],
                "algorithms": "standard", "runs": 100},
}


def algorithms_from(spec, delta: float = 0.1) -> list[RunConfig]:
    if spec == "table1":
        return table1_algorithms(delta)
    if spec == "standard":
        return standard_algorithms(delta)
    return [RunConfig.from_dict(c, delta=delta) for c in spec]
