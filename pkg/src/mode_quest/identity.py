"""Stopping statistics for identity-based sampling.

Everything here depends on the observations only through the distinct-count
vector S(t) and the epoch t (plus, for the exact likelihood, the positions
of repeated draws).  The statistic Y_{a,b}(t) is

    T1  -  T2

where T1 is the log prior-weighted likelihood summed over the box
S_j <= d'_j <= alpha * S_j, and T2 is the supremum of the relaxed
log-likelihood

    f_t(d) = sum_{j observed} int_{-1}^{S_j} log(d_j - v) dv  -  t log(sum_j d_j)

over real d >= 0 with d_a <= d_b.  The maximizer is parameterized by a
single scalar gamma = exp(-t / sum_j d_j) in (0, 1), found by bisection.

Internally the root is searched in u = -log(gamma) so that tiny gammas
(large t relative to S) and gammas close to 1 (t just past activation)
are both resolved without cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from .identityless import top_two
from .model import GeometricPrior, ObservationState

NEG_INF = -math.inf
RESIDUAL_TOL = 1e-8
MAX_BISECTIONS = 200

# relaxed maximizer layouts, see _maximizer
UNCONSTRAINED, TIED, TIED_UNSEEN_B = 0, 1, 2


@dataclass
class GammaSolve:
    gamma0: float
    g_value: float
    iterations: int
    d_star: np.ndarray


@dataclass
class IbStatReport:
    y: float
    active: bool
    a_tilde: int
    b_tilde: int
    t1: float = math.nan
    t2: float = math.nan
    gamma0: float = math.nan
    box_size: int = 1
    d_star: Optional[np.ndarray] = field(default=None, repr=False)


def _distinct_and_t(state, t=None) -> tuple[np.ndarray, int]:
    if isinstance(state, ObservationState):
        S, t0 = state.distinct, state.t
    else:
        S, t0 = state
    S = np.asarray(S, dtype=np.int64)
    return S, int(t if t is not None else t0)


def is_active(S, t) -> bool:
    """Collisions exceed the number of observed communities."""
    S = np.asarray(S)
    return bool(t > S.sum() + np.count_nonzero(S))


def activation_margin(S, t):
    S = np.atleast_2d(S)
    return np.asarray(t) - S.sum(axis=1) - np.count_nonzero(S, axis=1)


# ---------------------------------------------------------------------------
# exact likelihood and the box term


def log_likelihood_ib(d_prime, communities, fresh) -> float:
    """Exact log-likelihood of an observed (x, sigma) sequence under sizes d'.

    Returns -inf when d' cannot have produced the observations.
    """
    d = np.asarray(d_prime, dtype=float)
    communities = np.asarray(communities)
    fresh = np.asarray(fresh, dtype=bool)
    K = len(d)
    S = np.zeros(K, dtype=np.int64)
    rep = 0.0
    for x, new in zip(communities, fresh):
        if new:
            S[x] += 1
        else:
            if S[x] == 0:
                raise ValueError("a repeat from a community with no prior sighting")
            rep += math.log(S[x])
    total = d.sum()
    if np.any(d < S) or total <= 0:
        return NEG_INF
    new_part = float((gammaln(d + 1) - gammaln(d - S + 1)).sum())
    return new_part + rep - len(communities) * math.log(total)


def box_size(S, alpha: int) -> int:
    return int(np.prod([(alpha - 1) * int(s) + 1 for s in S], dtype=object))


def _log_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """log of the discrete convolution of exp(x) and exp(y)."""
    m = x[:, None] + y[None, :]
    idx = (np.arange(len(x))[:, None] + np.arange(len(y))[None, :]).ravel()
    m = m.ravel()
    top = np.full(len(x) + len(y) - 1, -np.inf)
    np.maximum.at(top, idx, m)
    acc = np.zeros_like(top)
    safe = np.where(np.isfinite(top), top, 0.0)
    np.add.at(acc, idx, np.exp(m - safe[idx]))
    with np.errstate(divide="ignore"):
        return np.where(np.isfinite(top), safe + np.log(acc), -np.inf)


def box_log_weights_by_total(S, alpha: int, prior) -> np.ndarray:
    """log sum over the box of prod_j [d'_j!/(d'_j-S_j)!] theta(d'_j),
    grouped by the total sum_j d'_j = ΣS, ΣS+1, ..., alpha ΣS."""
    S = np.asarray(S, dtype=np.int64)
    out = np.zeros(1)
    for s in S:
        d = np.arange(s, alpha * s + 1)
        lw = gammaln(d + 1) - gammaln(d - s + 1) + prior.logpmf(d)
        out = _log_convolve(out, lw)
    return out


def t1_box_sum(state, alpha: int, prior, t=None) -> float:
    """log sum_{d' in box} prod_j prod_l (d'_j - l) P_D(d') / (sum d')^t."""
    S, t = _distinct_and_t(state, t)
    total = int(S.sum())
    if total < 1:
        raise ValueError("the box term needs at least one distinct sample")
    if alpha == 1:
        return float((gammaln(S + 1) + prior.logpmf(S)).sum() - t * math.log(total))
    logc = box_log_weights_by_total(S, alpha, prior)
    s = np.arange(total, alpha * total + 1)
    return float(logsumexp(logc - t * np.log(s)))


class _BoxCache:
    """T1 with alpha > 1 for many epochs: the grouped weights depend only on
    S(t), which changes at most N times over a trial."""

    def __init__(self, alpha: int, prior):
        self.alpha = alpha
        self.prior = prior
        self._cache: dict = {}

    def __call__(self, S, t) -> float:
        key = tuple(int(s) for s in S)
        hit = self._cache.get(key)
        if hit is None:
            total = sum(key)
            logc = box_log_weights_by_total(np.asarray(key), self.alpha, self.prior)
            hit = (logc, np.log(np.arange(total, self.alpha * total + 1)))
            self._cache[key] = hit
        logc, logs = hit
        return float(logsumexp(logc - t * logs))


def t1_path(S_rows, t, alpha: int, prior, cache: Optional[_BoxCache] = None) -> np.ndarray:
    S_rows = np.atleast_2d(S_rows)
    t = np.asarray(t, dtype=float)
    if alpha == 1:
        head = (gammaln(S_rows + 1) + prior.logpmf(S_rows)).sum(axis=1)
        return head - t * np.log(S_rows.sum(axis=1))
    cache = cache or _BoxCache(alpha, prior)
    return np.array([cache(s, tt) for s, tt in zip(S_rows, t)])


# ---------------------------------------------------------------------------
# the relaxed supremum


def r_of_gamma(S_a, S_b, gamma):
    """sqrt((S_a - S_b)^2 + 4 gamma^2 (1 + S_a)(1 + S_b))."""
    S_a = np.asarray(S_a, dtype=float)
    S_b = np.asarray(S_b, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    return np.sqrt((S_a - S_b) ** 2 + 4 * gamma**2 * (1 + S_a) * (1 + S_b))


def log_integral_term(d, S):
    """int_{-1}^{S} log(d - v) dv, with d = S handled as a limit."""
    d = np.asarray(d, dtype=float)
    if np.any(d < S):
        raise ValueError("need d >= S")
    return _integral(d, d - S)


def _integral(d, gap):
    return xlogy(d + 1, d + 1) - (d + 1) - xlogy(gap, gap) + gap


def _layout(S_rows, a, b) -> np.ndarray:
    rows = np.arange(len(S_rows))
    sa, sb = S_rows[rows, a], S_rows[rows, b]
    layout = np.full(len(S_rows), UNCONSTRAINED)
    layout[(sa >= sb) & (sb > 0)] = TIED
    layout[(sa > 0) & (sb == 0)] = TIED_UNSEEN_B
    return layout


def _maximizer(S_rows, a, b, layout, u):
    """Candidate maximizer d(gamma) and the gaps d_j - S_j, for gamma = e^-u.

    Unobserved communities sit at 0 (f_t only decreases in them) unless they
    are forced up to meet the constraint d_a <= d_b.
    """
    S = S_rows.astype(float)
    n, K = S.shape
    rows = np.arange(n)
    g = np.exp(-u)[:, None]
    one_m = -np.expm1(-u)[:, None]
    one_m2 = -np.expm1(-2 * u)
    observed = S > 0
    gap = np.where(observed, g * (1 + S) / one_m, 0.0)

    sa, sb = S[rows, a], S[rows, b]
    gg = g[:, 0] ** 2

    tied = layout == TIED
    if np.any(tied):
        diff = sa - sb
        r = r_of_gamma(sa, sb, g[:, 0])
        denom = r + diff
        ratio = np.divide(2 * (1 + sb), denom, out=np.zeros_like(denom), where=denom > 0)
        gap_a = gg * (1 + sa) * (1 + ratio) / one_m2
        # equal counts: the tied point coincides with the unconstrained one
        gap_a = np.where(diff == 0, gap[rows, a], gap_a)
        gap[rows[tied], a[tied]] = gap_a[tied]
        gap[rows[tied], b[tied]] = gap_a[tied] + diff[tied]

    unseen_b = layout == TIED_UNSEEN_B
    if np.any(unseen_b):
        gap_a = gg * (1 + sa) / one_m2
        gap[rows[unseen_b], a[unseen_b]] = gap_a[unseen_b]
        gap[rows[unseen_b], b[unseen_b]] = (sa + gap_a)[unseen_b]

    d = S + gap
    return d, gap


def _bisect_u(S_rows, a, b, layout, t):
    """Root of u * sum_j d_j(e^-u) = t, increasing in u."""
    n = len(S_rows)
    t = np.asarray(t, dtype=float)
    lo = np.zeros(n)
    hi = t / S_rows.sum(axis=1)
    iters = np.zeros(n, dtype=int)
    live = np.ones(n, dtype=bool)
    for _ in range(MAX_BISECTIONS):
        if not live.any():
            break
        idx = np.flatnonzero(live)
        mid = 0.5 * (lo[idx] + hi[idx])
        d, _ = _maximizer(S_rows[idx], a[idx], b[idx], layout[idx], mid)
        h = mid * d.sum(axis=1) - t[idx]
        iters[idx] += 1
        up = h < 0
        lo[idx[up]] = mid[up]
        hi[idx[~up]] = mid[~up]
        hit = np.abs(h) <= 1e-3 * RESIDUAL_TOL
        # pin the bracket on the point that met the tolerance
        lo[idx[hit]] = hi[idx[hit]] = mid[hit]
        done = hit | (hi[idx] - lo[idx] <= 2 * np.spacing(hi[idx]))
        live[idx[done]] = False
    u = 0.5 * (lo + hi)
    return u, iters


def relaxed_solve(S_rows, t, a, b):
    """Vectorized maximizer of f_t under d_a <= d_b.

    Returns (u, d, gap, layout, iterations); rows must be active.
    """
    S_rows = np.atleast_2d(np.asarray(S_rows, dtype=np.int64))
    n = len(S_rows)
    a = np.broadcast_to(np.asarray(a), (n,))
    b = np.broadcast_to(np.asarray(b), (n,))
    t = np.broadcast_to(np.asarray(t, dtype=float), (n,))
    if np.any(activation_margin(S_rows, t) <= 0):
        raise ValueError("relaxed supremum requires t > sum_j S_j + K^(t)")
    layout = _layout(S_rows, a, b)
    u, iters = _bisect_u(S_rows, a, b, layout, t)
    d, gap = _maximizer(S_rows, a, b, layout, u)
    return u, d, gap, layout, iters


def relaxed_sup_path(S_rows, t, a, b):
    """T2 = sup f_t over d_a <= d_b, row-wise."""
    u, d, gap, _, _ = relaxed_solve(S_rows, t, a, b)
    S_rows = np.atleast_2d(S_rows)
    integ = np.where(S_rows > 0, _integral(d, gap), 0.0).sum(axis=1)
    return integ - np.asarray(t, dtype=float) * np.log(d.sum(axis=1)), u, d


def g1(S, a, b, gamma, t=None):
    """The left side of the gamma equation, log(1/gamma) * sum_j d_j(gamma)."""
    S = np.asarray(S, dtype=np.int64)
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    rows = np.broadcast_to(S, (len(gamma), len(S)))
    idx_a = np.full(len(gamma), a)
    idx_b = np.full(len(gamma), b)
    u = -np.log(gamma)
    d, _ = _maximizer(rows, idx_a, idx_b, _layout(rows, idx_a, idx_b), u)
    return u * d.sum(axis=1)


def solve_gamma0(state, a: int, b: int, t=None) -> GammaSolve:
    S, t = _distinct_and_t(state, t)
    if a == b:
        raise ValueError("a and b must differ")
    if not is_active(S, t):
        raise ValueError(
            f"t={t} must exceed sum(S)+K^(t)={int(S.sum()) + int(np.count_nonzero(S))}")
    u, d, _, _, iters = relaxed_solve(S[None, :], t, a, b)
    gamma0 = float(np.exp(-u[0]))
    residual = float(u[0] * d[0].sum() - t)
    return GammaSolve(gamma0, residual, int(iters[0]), d[0])


def relaxed_sup(state, a: int, b: int, t=None) -> float:
    S, t = _distinct_and_t(state, t)
    val, _, _ = relaxed_sup_path(S[None, :], t, a, b)
    return float(val[0])


def y_ab(state, a: int, b: int, alpha: int = 1, prior=None, t=None) -> float:
    """Relaxed GLR of "a beats b" (lower bound on the exact GLR)."""
    S, t = _distinct_and_t(state, t)
    if a == b:
        raise ValueError("a and b must differ")
    if not is_active(S, t):
        raise ValueError("Y is only defined once t > sum_j S_j + K^(t)")
    prior = prior or GeometricPrior(0.1)
    return t1_box_sum((S, t), alpha, prior) - relaxed_sup((S, t), a, b)


def y_path(S_rows, t, alpha: int, prior, cache=None):
    """Y(t) for every row; NaN where the statistic is not yet active.

    Returns (y, active, a_tilde, b_tilde, gamma0).
    """
    S_rows = np.atleast_2d(np.asarray(S_rows, dtype=np.int64))
    t = np.asarray(t, dtype=float)
    n = len(S_rows)
    a, b = top_two(S_rows)
    active = activation_margin(S_rows, t) > 0
    y = np.full(n, np.nan)
    gamma0 = np.full(n, np.nan)
    if active.any():
        idx = np.flatnonzero(active)
        t2, u, _ = relaxed_sup_path(S_rows[idx], t[idx], a[idx], b[idx])
        t1 = t1_path(S_rows[idx], t[idx], alpha, prior, cache)
        y[idx] = t1 - t2
        gamma0[idx] = np.exp(-u)
    return y, active, a, b, gamma0


def y_stat(state, alpha: int = 1, prior=None, t=None) -> IbStatReport:
    S, t = _distinct_and_t(state, t)
    prior = prior or GeometricPrior(0.1)
    a, b = top_two(S)
    a, b = int(a), int(b)
    size = box_size(S, alpha)
    if not is_active(S, t):
        return IbStatReport(math.nan, False, a, b, box_size=size)
    t2, u, d = relaxed_sup_path(S[None, :], t, a, b)
    t1 = t1_box_sum((S, t), alpha, prior)
    return IbStatReport(
        y=float(t1 - t2[0]), active=True, a_tilde=a, b_tilde=b,
        t1=t1, t2=float(t2[0]), gamma0=float(np.exp(-u[0])), box_size=size,
        d_star=d[0],
    )
