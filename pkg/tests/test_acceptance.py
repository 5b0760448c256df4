"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python3 tests/test_acceptance.py``.  Seeds are fixed in advance; the
Monte-Carlo tolerances are the published ones, not tuned to these seeds.
"""

import math
import sys

import numpy as np
import pytest

from mode_quest import (constrained_mle, log_integral_term, make_instance, solve_gamma0, y_ab,
                        y_stat, z_ab, z_stat)
from mode_quest import bench as B
from mode_quest.bounds import bound_ratio_check, lb_identity_based, lb_identityless
from mode_quest.identity import relaxed_sup
from mode_quest.identityless import z_path, z_tilde_path
from mode_quest.oracle import (brute_max_min, dense_gamma_scan, enumerate_discrete_sup,
                               grid_constrained_mle, loglik, quad_integral_term, z_ab_reference)
from mode_quest.sampler import generate_trace, running_counts, trial_rng

from conftest import ACCEPTANCE_LINES

SEED = 1
RUNS = 100

IB1 = "IbCme(alpha=1,q=0.1)"
IB1_Q9 = "IbCme(alpha=1,q=0.9)"
IB3 = "IbCme(alpha=3,q=0.1)"
IB1V1 = "IbCme1v1(alpha=1,q=0.1)"

REFERENCE_MEANS = {
    "I1": {"NiMe": 669.85, "NiMe1v1": 275.9, IB1: 239.4, IB1V1: 209.15},
    "I2": {"NiMe": 3968.5, "NiMe1v1": 1410.3, IB1: 413.65, IB1V1: 396.49},
}


def report(name, ok, detail=""):
    line = f"criterion {name}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def rel(x, ref):
    return abs(x - ref) / ref


@pytest.fixture(scope="module")
def table1():
    """Both reference instances, all six configurations, shared traces."""
    algos = B.table1_algorithms(0.1)
    return {name: B.bench(B.BenchConfig(B.get_instance(name), algos, RUNS, SEED))
            for name in ("I1", "I2")}


@pytest.fixture(scope="module")
def scale_rows():
    return B.scan_scale(B.get_instance("I3"), [1, 5, 10], B.standard_algorithms(), RUNS, SEED)


@pytest.fixture(scope="module")
def delta_rows():
    return B.scan_delta(B.get_instance("I2"), [0.1, 0.01, 0.001], B.standard_algorithms(),
                        RUNS, SEED)


@pytest.fixture(scope="module")
def soundness():
    return B.bench(B.BenchConfig(B.get_instance("I2"), B.standard_algorithms(0.1), 1000, SEED))


def random_small_counts(rng):
    K = int(rng.integers(2, 4))
    t = int(rng.integers(1, 21))
    return rng.multinomial(t, rng.dirichlet(np.ones(K))), K


def random_active(rng, K_max, S_max=12, t_extra=40):
    K = int(rng.integers(2, K_max + 1))
    S = rng.integers(0, S_max + 1, size=K)
    if not S.any():
        S[0] = 1
    t = int(S.sum() + np.count_nonzero(S) + rng.integers(1, t_extra + 1))
    return S, t


@pytest.mark.slow
def test_criterion_1_table1(table1):
    lines, ok = [], True
    for inst, ref in REFERENCE_MEANS.items():
        means = table1[inst].means()
        for label, target in ref.items():
            good = rel(means[label], target) <= 0.20
            ok &= good
            lines.append(f"{inst}/{label}={means[label]:.1f} (reference {target})")
    m = table1["I2"].means()
    order = m[IB1V1] <= m[IB1] < m["NiMe1v1"] < m["NiMe"]
    ok &= order
    assert report("1", ok, "; ".join(lines) + f"; I2 ordering {'ok' if order else 'broken'}")


@pytest.mark.slow
def test_criterion_2_prior_tail(table1):
    m = table1["I1"].means()
    ok = rel(m[IB1_Q9], 626.08) <= 0.20 and m[IB1_Q9] > m[IB1]
    assert report("2", ok, f"q=0.9 {m[IB1_Q9]:.1f} (reference 626.08) vs q=0.1 {m[IB1]:.1f}")


@pytest.mark.slow
def test_criterion_3_alpha(table1):
    parts, ok = [], True
    for inst in ("I1", "I2"):
        m = table1[inst].means()
        r = rel(m[IB3], m[IB1])
        ok &= r <= 0.05
        parts.append(f"{inst}: alpha=3 {m[IB3]:.2f} vs alpha=1 {m[IB1]:.2f} ({100 * r:.2f}%)")
    assert report("3", ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_4_scaling(scale_rows):
    by = {}
    for r in scale_rows:
        by.setdefault(r["algorithm"], {})[r["omega"]] = r["mean_tau"]
    ok, parts = True, []
    for label in ("NiMe", "NiMe1v1"):
        vals = np.array([by[label][w] for w in (1, 5, 10)])
        spread = float(np.max(np.abs(vals / vals.mean() - 1)))
        ok &= spread <= 0.10
        parts.append(f"{label} {np.round(vals, 1).tolist()} (max dev {100 * spread:.1f}%)")
    ib = [by[IB1V1][w] for w in (1, 5, 10)]
    inc = ib[0] < ib[1] < ib[2]
    ok &= inc
    parts.append(f"{IB1V1} {np.round(ib, 1).tolist()} increasing={inc}")
    ok &= rel(ib[0], 710.5) <= 0.20 and rel(by["NiMe1v1"][1], 6353.5) <= 0.20
    parts.append(f"omega=1 {ib[0]:.1f} / {by['NiMe1v1'][1]:.1f} vs reference 710.5 / 6353.5")
    assert report("4", ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_5_linearity(delta_rows):
    ok, parts = True, []
    labels = dict.fromkeys(r["algorithm"] for r in delta_rows)
    for label in labels:
        rows = [r for r in delta_rows if r["algorithm"] == label]
        x = [math.log(1 / r["delta"]) for r in rows]
        y = [r["mean_tau"] for r in rows]
        _, _, r2 = B.affine_fit(x, y)
        ok &= r2 >= 0.95
        parts.append(f"{label} R2={r2:.4f}")
    assert report("5", ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_6_soundness(soundness):
    ok, parts = True, []
    for r in soundness.rows:
        ok &= r.runs >= 1000 and r.capped == 0 and r.error_rate <= 0.1
        parts.append(f"{r.label} err={r.error_rate:.3f} over {r.runs}")
    assert report("6", ok, "; ".join(parts))


def test_criterion_7a_identityless_oracle():
    rng = np.random.default_rng(71)
    worst = 0.0
    for _ in range(100):
        counts, K = random_small_counts(rng)
        a, b = rng.choice(K, size=2, replace=False)
        worst = max(worst, abs(z_ab(counts, a, b) - z_ab_reference(counts, a, b)))
    assert report("7a", worst <= 1e-4, f"max |z_ab - oracle| = {worst:.2e}")


def test_criterion_7b_constrained_mle():
    rng = np.random.default_rng(72)
    worst = -math.inf
    for _ in range(100):
        counts, K = random_small_counts(rng)
        a, b = rng.choice(K, size=2, replace=False)
        p = constrained_mle(counts, a, b)
        _, grid_best = grid_constrained_mle(counts, a, b, step=1e-3)
        worst = max(worst, grid_best - loglik(counts, p))
    assert report("7b", worst <= 1e-9, f"best grid excess = {worst:.2e}")


def test_criterion_7c_gamma_root():
    rng = np.random.default_rng(73)
    worst, outside = 0.0, 0
    for _ in range(1000):
        S, t = random_active(rng, K_max=6, S_max=30, t_extra=120)
        a, b = rng.choice(len(S), size=2, replace=False)
        sol = solve_gamma0((S, t), a, b)
        worst = max(worst, abs(sol.g_value))
        (lo, hi), monotone, changes = dense_gamma_scan(S, a, b, t, points=10_000)
        outside += not (monotone and changes == 1 and lo <= sol.gamma0 <= hi)
    ok = worst <= 1e-8 and outside == 0
    assert report("7c", ok, f"max |g(gamma0)| = {worst:.2e}, outside bracket = {outside}")


def test_criterion_7d_relaxed_dominates_discrete():
    rng = np.random.default_rng(74)
    violations, worst = 0, 0.0
    for _ in range(100):
        S, t = random_active(rng, K_max=3, S_max=6, t_extra=25)
        a, b = rng.choice(len(S), size=2, replace=False)
        gap = enumerate_discrete_sup(S, a, b, t, cap=50) - relaxed_sup((S, t), a, b)
        if gap > 1e-9:
            violations += 1
            worst = max(worst, gap)
    assert report("7d", violations == 0,
                  f"violations = {violations}/100, largest shortfall = {worst:.3f}")


def test_criterion_7e_integral_term():
    rng = np.random.default_rng(75)
    worst = 0.0
    for _ in range(500):
        S = int(rng.integers(0, 50))
        d = S + (float(rng.exponential(5.0)) if rng.random() > 0.1 else 0.0)
        worst = max(worst, abs(float(log_integral_term(d, S)) - quad_integral_term(d, S)))
    assert report("7e", worst <= 1e-9, f"max |closed form - quadrature| = {worst:.2e}")


def test_criterion_8_structure():
    I2 = B.get_instance("I2")
    dominance = 0
    for k in range(100):
        comm, fresh = generate_trace(I2, trial_rng(SEED, k), 4000)
        counts, _ = running_counts(comm, fresh, I2.K)
        z, _, _ = z_path(counts)
        zt, _, _ = z_tilde_path(counts)
        dominance += int(np.sum(zt < z - 1e-10))

    rng = np.random.default_rng(81)
    z_mismatch = 0
    for _ in range(50):
        K = int(rng.integers(2, 6))
        counts = rng.integers(0, 30, size=K)
        counts[0] += 1
        ref = brute_max_min(lambda a, b: z_ab(counts, a, b), K)
        z_mismatch += not math.isclose(z_stat(counts).z, ref, abs_tol=1e-9)

    y_mismatch = 0
    for _ in range(50):
        S, t = random_active(rng, K_max=4)
        ref = brute_max_min(lambda a, b: y_ab((S, t), a, b), len(S))
        y_mismatch += not math.isclose(y_stat((S, t)).y, ref, abs_tol=1e-9)

    swap = 0
    for _ in range(1000):
        S, t = random_active(rng, K_max=5)
        a, b = rng.choice(len(S), size=2, replace=False)
        if S[a] < S[b]:
            a, b = b, a
        swap += y_ab((S, t), b, a) > y_ab((S, t), a, b) + 1e-9

    ok = dominance == z_mismatch == y_mismatch == swap == 0
    assert report("8", ok, f"Z~<Z epochs={dominance}, Z enum mismatches={z_mismatch}, "
                           f"Y enum mismatches={y_mismatch}, Y swap violations={swap}")


@pytest.mark.slow
def test_criterion_9_bounds(table1, scale_rows, delta_rows, soundness):
    rng = np.random.default_rng(91)
    failures = 0
    for _ in range(1000):
        while True:
            sizes = rng.integers(1, 101, size=int(rng.integers(2, 9)))
            top = np.sort(sizes)[::-1]
            if top[0] > top[1]:
                break
        rep = bound_ratio_check(make_instance(sizes), 0.1)
        failures += not (rep.holds and rep.lb_identityless > rep.lb_identity_based)

    below = []
    for summary in [*table1.values(), soundness]:
        for r in summary.rows:
            if r.mean < r.lower_bound:
                below.append(f"{summary.instance.name}/{r.label}")

    def bound_for(inst, label, delta):
        ident = label.startswith("IbCme")
        return (lb_identity_based if ident else lb_identityless)(inst, delta)

    I3 = B.get_instance("I3")
    for r in scale_rows:
        if r["mean_tau"] < bound_for(I3.scaled(r["omega"]), r["algorithm"], 0.1):
            below.append(f"I3x{r['omega']}/{r['algorithm']}")
    I2 = B.get_instance("I2")
    for r in delta_rows:
        if r["mean_tau"] < bound_for(I2, r["algorithm"], r["delta"]):
            below.append(f"I2@{r['delta']}/{r['algorithm']}")

    ok = failures == 0 and not below
    assert report("9", ok, f"chain failures={failures}/1000, means below bound={below or 0}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
