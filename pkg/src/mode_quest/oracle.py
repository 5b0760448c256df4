"""Brute-force references for the test suite.

Slow on purpose, and deliberately independent of the production code
paths: plain loops over ``math.log``, grid search, quadrature and direct
enumeration.  Nothing here is imported by the algorithms.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate


def _loglik_pmf(counts, p) -> np.ndarray:
    """sum_i N_i log p_i over rows of p (0 log 0 = 0, N log 0 = -inf)."""
    p = np.atleast_2d(p)
    out = np.zeros(len(p))
    for i, n in enumerate(counts):
        if n == 0:
            continue
        with np.errstate(divide="ignore"):
            out += n * np.log(p[:, i])
    return out


def simplex_grid(K: int, step: float) -> np.ndarray:
    m = int(round(1 / step))
    if K == 2:
        x = np.arange(m + 1) / m
        return np.column_stack([x, 1 - x])
    if K == 3:
        i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
        keep = i + j <= m
        i, j = i[keep], j[keep]
        return np.column_stack([i, j, m - i - j]) / m
    raise ValueError("grid search supports K <= 3")


def _local_grid(center, width: float, points: int) -> np.ndarray:
    """Simplex points near ``center`` on a square grid over the first K-1
    coordinates (K = 2, 3)."""
    axes = [np.linspace(c - width, c + width, points) for c in center[:-1]]
    free = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    pts = np.column_stack([free, 1 - free.sum(axis=1)])
    return pts[np.all(pts >= 0, axis=1)]


def grid_constrained_mle(counts, a: int, b: int, step: float = 1e-3, zoom: int = 3):
    """Best grid point of the simplex with p_a <= p_b.

    A uniform grid is searched first, then ``zoom`` rounds of finer grids
    around the incumbent.
    """
    counts = list(counts)
    grid = simplex_grid(len(counts), step)
    width = step
    best_p, best = None, -math.inf
    for level in range(zoom + 1):
        if level:
            grid = _local_grid(best_p, 2 * width, 81)
            width /= 20
        grid = grid[grid[:, a] <= grid[:, b] + 1e-15]
        if len(grid) == 0:
            break
        ll = _loglik_pmf(counts, grid)
        k = int(np.argmax(ll))
        if ll[k] >= best:
            best_p, best = grid[k], float(ll[k])
    return best_p, best


def loglik(counts, p) -> float:
    return float(_loglik_pmf(list(counts), np.asarray(p, dtype=float))[0])


def numeric_dirichlet_avg(counts) -> float:
    """E[prod_i p_i^N_i] under the flat Dirichlet, by quadrature (K = 2, 3)."""
    n = list(counts)
    opts = dict(epsabs=0.0, epsrel=1e-12)
    if len(n) == 2:
        val, _ = integrate.quad(lambda x: x ** n[0] * (1 - x) ** n[1], 0, 1, limit=200, **opts)
        return val
    if len(n) == 3:
        def inner(x):
            f = lambda y: x ** n[0] * y ** n[1] * max(1 - x - y, 0.0) ** n[2]
            return integrate.quad(f, 0, 1 - x, limit=200, **opts)[0]
        val, _ = integrate.quad(inner, 0, 1, limit=200, **opts)
        return 2.0 * val
    raise ValueError("quadrature oracle supports K in {2, 3}")


def z_ab_reference(counts, a: int, b: int, step: float = 1e-3) -> float:
    """log(average likelihood) - log(max likelihood over p_a <= p_b), numerically."""
    _, best = grid_constrained_mle(counts, a, b, step)
    return math.log(numeric_dirichlet_avg(counts)) - best


def quad_integral_term(d: float, S: int) -> float:
    """int_{-1}^{S} log(d - v) dv by adaptive quadrature."""
    pts = [S] if d == S else None
    val, _ = integrate.quad(lambda v: math.log(d - v), -1, S, points=pts,
                            epsabs=1e-13, epsrel=1e-13, limit=400)
    return val


def _log_falling(d: int, s: int) -> float:
    """log(d (d-1) ... (d-s+1)); -inf when d < s."""
    if d < s:
        return -math.inf
    return sum(math.log(d - l) for l in range(s))


def enumerate_discrete_sup(S, a: int, b: int, t: int, cap: int = 50) -> float:
    """max over integer d' (S_j <= d'_j <= cap, d'_a <= d'_b) of
    sum_j log falling(d'_j, S_j) - t log(sum d')."""
    S = [int(s) for s in S]
    if len(S) > 3:
        raise ValueError("enumeration oracle supports K <= 3")
    ranges = [np.arange(s, cap + 1) for s in S]
    terms = [np.array([_log_falling(int(d), s) for d in r]) for r, s in zip(ranges, S)]
    grids = np.meshgrid(*ranges, indexing="ij")
    score = sum(np.meshgrid(*terms, indexing="ij"))
    total = sum(grids)
    with np.errstate(divide="ignore"):
        score = score - t * np.log(total)
    score = np.where((grids[a] <= grids[b]) & (total > 0), score, -np.inf)
    return float(score.max())


def enumerate_box_sum(S, t: int, alpha: int, q: float) -> float:
    """T1 by listing every d' in the box, geometric prior q (1-q)^i."""
    S = [int(s) for s in S]
    logs = []
    for d in itertools.product(*[range(s, alpha * s + 1) for s in S]):
        w = sum(_log_falling(dj, sj) for dj, sj in zip(d, S))
        w += sum(math.log(q) + dj * math.log(1 - q) for dj in d)
        w -= t * math.log(sum(d))
        logs.append(w)
    top = max(logs)
    return top + math.log(sum(math.exp(x - top) for x in logs))


def enumerate_box_upto(S, t: int, cap: int, q: float) -> float:
    """T1 over the larger box S_j <= d'_j <= cap (superset of any alpha-box
    that fits under cap)."""
    S = [int(s) for s in S]
    ranges = [np.arange(s, cap + 1) for s in S]
    terms = [np.array([_log_falling(int(d), s) + math.log(q) + d * math.log(1 - q)
                       for d in r]) for r, s in zip(ranges, S)]
    score = sum(np.meshgrid(*terms, indexing="ij"))
    total = sum(np.meshgrid(*ranges, indexing="ij"))
    score = score - t * np.log(total)
    top = score.max()
    return float(top + np.log(np.exp(score - top).sum()))


def g_reference(S, a: int, b: int, t: float, gamma):
    """g(gamma) written out directly in gamma.

    Covers the tied case (a, b both observed), the case of an unobserved
    b (a observed), and the unconstrained case S_a < S_b.
    """
    S = [int(s) for s in S]
    gamma = np.asarray(gamma, dtype=float)
    obs = [j for j, s in enumerate(S) if s > 0]
    Ko = len(obs)
    lg = np.log(1 / gamma)
    if S[a] < S[b] or S[a] == 0:
        return lg * (sum(S) + gamma * Ko) / (1 - gamma) - t
    if S[b] == 0:
        rest = sum(S[j] for j in obs if j != a)
        return lg * ((rest + gamma * (Ko - 1)) / (1 - gamma)
                     + 2 * (S[a] + gamma**2) / (1 - gamma**2)) - t
    rest = sum(S[j] for j in obs if j not in (a, b))
    r = np.sqrt((S[a] - S[b]) ** 2
                + 4 * gamma**2 * (1 + S[a] + S[b] + S[a] * S[b]))
    return lg * ((rest + gamma * (Ko - 2)) / (1 - gamma)
                 + (S[a] + S[b] + 2 * gamma**2 + r) / (1 - gamma**2)) - t


def dense_gamma_scan(S, a: int, b: int, t: float, points: int = 10_000):
    """Scan g on a uniform grid of (0, 1).

    Returns ((lo, hi), monotone, sign_changes).  The endpoints 0 and 1 are
    used as limits: g -> +inf at 0 and g -> sum(S) + K^(t) - t at 1.
    """
    grid = np.linspace(0.0, 1.0, points + 2)[1:-1]
    g = g_reference(S, a, b, t, grid)
    edge = sum(S) + sum(1 for s in S if s > 0) - t
    vals = np.concatenate([[np.inf], g, [edge]])
    xs = np.concatenate([[0.0], grid, [1.0]])
    monotone = bool(np.all(np.diff(g) < 0))
    sign = vals > 0
    # a zero limit at 1 (t on the boundary) is not a root inside (0, 1)
    sign[-1] = edge >= 0
    changes = np.flatnonzero(sign[:-1] != sign[1:])
    if len(changes) == 0:
        return None, monotone, 0
    k = int(changes[0])
    return (float(xs[k]), float(xs[k + 1])), monotone, len(changes)


def brute_max_min(stat, K: int):
    """max_a min_{b != a} stat(a, b) over all ordered pairs."""
    best = -math.inf
    for a in range(K):
        worst = min(stat(a, b) for b in range(K) if b != a)
        best = max(best, worst)
    return best
