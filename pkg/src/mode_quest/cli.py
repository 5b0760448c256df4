"""Command-line harness: ``mode-quest run|bench|bounds|scan-delta|scan-scale|stat``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as B
from .algorithms import run
from .bounds import bound_ratio_check
from .identity import box_size, y_ab, y_stat
from .identityless import z_ab, z_stat
from .model import GeometricPrior, ObservationState, RunConfig
from .oracle import brute_max_min
from .sampler import generate_trace, read_trace_csv, running_counts, trial_rng, write_trace_csv


def _seed(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in cfg:
        return int(cfg["seed"])
    env = os.environ.get("MODE_QUEST_SEED")
    return int(env) if env is not None else 0


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "preset", None):
        cfg.update(B.PRESETS[args.preset])
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text()))
    for key in ("instance", "delta", "runs"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _emit(text: str, out: Path | None, name: str):
    if out is None:
        sys.stdout.write(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _instances(cfg) -> list:
    if "instances" in cfg:
        return [B.get_instance(s) for s in cfg["instances"]]
    return [B.get_instance(cfg.get("instance", "I1"), int(cfg.get("omega", 1)))]


def cmd_run(args):
    cfg = _load_config(args)
    inst = _instances(cfg)[0]
    algo = {"algorithm": args.algorithm, "alpha": args.alpha, "prior": {"q": args.q}}
    seed = _seed(args, cfg)
    config = RunConfig.from_dict(algo, delta=float(cfg.get("delta", 0.1)),
                                 max_epochs=args.max_epochs, seed=seed)
    res = run(inst, config, trial_rng(seed, args.trial), args.check_every)
    if args.trace_out:
        comm, fresh = generate_trace(inst, trial_rng(seed, args.trial), res.stopping_time)
        keep = fresh if config.algorithm.identity_based else None
        Path(args.trace_out).write_text(write_trace_csv(comm, keep))
    print(json.dumps({"instance": list(inst.sizes), "config": config.to_dict(),
                      "seed": seed, "trial": args.trial, **res.to_dict()}, sort_keys=True))


def cmd_bench(args):
    cfg = _load_config(args)
    seed = _seed(args, cfg)
    delta = float(cfg.get("delta", 0.1))
    algos = B.algorithms_from(cfg.get("algorithms", "standard"), delta)
    out = Path(args.out) if args.out else None
    for inst in _instances(cfg):
        target = out / (inst.name or "instance") if out and "instances" in cfg else out
        summary = B.bench(B.BenchConfig(inst, algos, int(cfg.get("runs", 100)), seed,
                                        target, args.jobs, int(cfg.get("check_every", 1))))
        sys.stdout.write(B.summary_csv(summary))


def cmd_bounds(args):
    cfg = _load_config(args)
    inst = _instances(cfg)[0]
    report = bound_ratio_check(inst, float(cfg.get("delta", 0.1)))
    print(json.dumps({"instance": list(inst.sizes), **report.to_dict()}, indent=2, sort_keys=True))


def cmd_scan_delta(args):
    cfg = _load_config(args)
    seed = _seed(args, cfg)
    inst = _instances(cfg)[0]
    algos = B.algorithms_from(cfg.get("algorithms", "standard"))
    rows = B.scan_delta(inst, cfg.get("deltas", [0.1, 0.01, 0.001]), algos,
                        int(cfg.get("runs", 100)), seed, args.jobs)
    _emit(B.rows_to_csv(rows, B.DELTA_COLUMNS), Path(args.out) if args.out else None,
          "scan_delta.csv")


def cmd_scan_scale(args):
    cfg = _load_config(args)
    seed = _seed(args, cfg)
    base = B.get_instance(cfg.get("instance", "I3"))
    algos = B.algorithms_from(cfg.get("algorithms", "standard"))
    rows = B.scan_scale(base, cfg.get("omegas", [1, 5, 10]), algos,
                        int(cfg.get("runs", 100)), seed, args.jobs)
    _emit(B.rows_to_csv(rows, B.SCALE_COLUMNS), Path(args.out) if args.out else None,
          "scan_scale.csv")


def stat_rows(comm, fresh, K: int, alpha: int = 1, q: float = 0.1, oracle: bool = False):
    """Per-epoch statistics for a trace (communities 0-indexed)."""
    counts, distinct = running_counts(comm, fresh, K)
    prior = GeometricPrior(q)
    rows = []
    for i in range(len(comm)):
        t = i + 1
        st = ObservationState.from_counts(counts[i], distinct[i])
        z = z_stat(st)
        row = {"t": t, "Z": z.z, "Z_tilde": z.z_tilde, "a_hat": z.a_hat + 1, "b_hat": z.b_hat + 1}
        if oracle:
            ref = brute_max_min(lambda a, b: z_ab(counts[i], a, b), K)
            if not np.isclose(ref, z.z, rtol=0, atol=1e-9):
                raise AssertionError(f"Z mismatch at t={t}: {z.z} vs {ref}")
        if fresh is not None:
            y = y_stat((distinct[i], t), alpha, prior)
            row.update({"active": int(y.active), "Y": y.y if y.active else "",
                        "a_tilde": y.a_tilde + 1, "b_tilde": y.b_tilde + 1,
                        "gamma0": y.gamma0 if y.active else "",
                        "box_size": box_size(distinct[i], alpha)})
            if oracle and y.active:
                ref = brute_max_min(lambda a, b: y_ab((distinct[i], t), a, b, alpha, prior), K)
                if not np.isclose(ref, y.y, rtol=0, atol=1e-9):
                    raise AssertionError(f"Y mismatch at t={t}: {y.y} vs {ref}")
        rows.append(row)
    return rows


STAT_COLUMNS = ["t", "Z", "Z_tilde", "a_hat", "b_hat"]
STAT_IB_COLUMNS = ["active", "Y", "a_tilde", "b_tilde", "gamma0", "box_size"]


def cmd_stat(args):
    with open(args.trace) as fh:
        comm, fresh = read_trace_csv(fh)
    K = args.K or int(comm.max()) + 1
    if K < 2:
        raise SystemExit("need K >= 2 (pass --K)")
    rows = stat_rows(comm, fresh, K, args.alpha, args.q, args.oracle)
    cols = STAT_COLUMNS + (STAT_IB_COLUMNS if fresh is not None else [])
    _emit(B.rows_to_csv(rows, cols), Path(args.out) if args.out else None, "stat.csv")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mode-quest", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_jobs=True):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, default=None,
                        help="master seed (falls back to $MODE_QUEST_SEED, then 0)")
        sp.add_argument("--out", help="output directory")
        if with_jobs:
            sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--instance", help="builtin name (I1, I2, I3, dataset1..3)")
        sp.add_argument("--delta", type=float)

    sp = sub.add_parser("run", help="one trial of one algorithm")
    common(sp, with_jobs=False)
    sp.add_argument("--algorithm", default="NiMe", choices=["NiMe", "NiMe1v1", "IbCme", "IbCme1v1"])
    sp.add_argument("--alpha", type=int, default=1)
    sp.add_argument("--q", type=float, default=0.1)
    sp.add_argument("--trial", type=int, default=0)
    sp.add_argument("--max-epochs", type=int, default=10_000_000)
    sp.add_argument("--check-every", type=int, default=1)
    sp.add_argument("--trace-out", help="write the trial's trace as CSV")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("bench", help="Monte-Carlo benchmark")
    common(sp)
    sp.add_argument("--preset", choices=["table1", "table3"])
    sp.add_argument("--runs", type=int)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("bounds", help="lower-bound report as JSON")
    common(sp, with_jobs=False)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("scan-delta", help="mean stopping time versus delta")
    common(sp)
    sp.add_argument("--preset", choices=["figure1"])
    sp.add_argument("--runs", type=int)
    sp.set_defaults(func=cmd_scan_delta)

    sp = sub.add_parser("scan-scale", help="mean stopping time versus population scale")
    common(sp)
    sp.add_argument("--preset", choices=["table2"])
    sp.add_argument("--runs", type=int)
    sp.set_defaults(func=cmd_scan_scale)

    sp = sub.add_parser("stat", help="per-epoch statistics of a trace CSV")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--K", type=int, help="number of communities")
    sp.add_argument("--alpha", type=int, default=1)
    sp.add_argument("--q", type=float, default=0.1)
    sp.add_argument("--out")
    sp.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_stat)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
