"""Stopping statistics for identityless sampling.

The averaged likelihood uses a flat Dirichlet over the simplex, so every
statistic reduces to log-gamma sums and ``x log x`` terms (0 log 0 = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln, xlogy

from .model import ObservationState

LOG2 = math.log(2.0)


@dataclass
class IlessStatReport:
    z: float
    z_tilde: float
    a_hat: int
    b_hat: int
    per_pair: Optional[dict] = field(default=None, repr=False)


def _counts(state_or_counts) -> np.ndarray:
    if isinstance(state_or_counts, ObservationState):
        return state_or_counts.counts
    return np.asarray(state_or_counts, dtype=np.int64)


def log_multinomial_beta_ratio(counts):
    """log B(N_1+1, ..., N_K+1) - log B(1, ..., 1).

    Works row-wise on a 2-D array of count vectors.
    """
    counts = np.asarray(counts, dtype=float)
    K = counts.shape[-1]
    if K < 2:
        raise ValueError("need at least two communities")
    t = counts.sum(axis=-1)
    return gammaln(counts + 1).sum(axis=-1) - gammaln(t + K) + gammaln(K)


def top_two(values):
    """Indices of the largest and second largest entries (lowest index wins
    ties), row-wise."""
    values = np.asarray(values)
    a = np.argmax(values, axis=-1)
    masked = values.astype(float).copy()
    np.put_along_axis(masked, np.expand_dims(a, -1), -np.inf, axis=-1)
    b = np.argmax(masked, axis=-1)
    return a, b


def z_ab(state, a: int, b: int) -> float:
    """GLR of "a beats b" against the alternative p_a <= p_b."""
    if a == b:
        raise ValueError("a and b must differ")
    n = _counts(state).astype(float)
    t = n.sum()
    if t < 1:
        raise ValueError("need at least one observation")
    head = float(log_multinomial_beta_ratio(n))
    if n[a] >= n[b]:
        rest = xlogy(n, n / t).sum() - xlogy(n[a], n[a] / t) - xlogy(n[b], n[b] / t)
        pooled = n[a] + n[b]
        return head - rest - float(xlogy(pooled, pooled / (2 * t)))
    return head - float(xlogy(n, n / t).sum())


def z_path(counts):
    """Z(t), its maximizing pair, for every row of a count matrix."""
    n = np.atleast_2d(np.asarray(counts, dtype=float))
    t = n.sum(axis=1)
    a, b = top_two(n)
    rows = np.arange(len(n))
    na, nb = n[rows, a], n[rows, b]
    ent = xlogy(n, n / t[:, None]).sum(axis=1)
    rest = ent - xlogy(na, na / t) - xlogy(nb, nb / t)
    pooled = na + nb
    z = log_multinomial_beta_ratio(n) - rest - xlogy(pooled, pooled / (2 * t))
    return z, a, b


def z_tilde_ab(state_or_na, a_or_nb, b: Optional[int] = None) -> float:
    """Two-community statistic: log B(N_a+1, N_b+1) + (N_a+N_b) log 2.

    Call as ``z_tilde_ab(state, a, b)`` or ``z_tilde_ab(N_a, N_b)``.
    """
    if b is None:
        na, nb = float(state_or_na), float(a_or_nb)
    else:
        if a_or_nb == b:
            raise ValueError("a and b must differ")
        n = _counts(state_or_na)
        na, nb = float(n[a_or_nb]), float(n[b])
    return float(_z_tilde(na, nb))


def _z_tilde(na, nb):
    return gammaln(na + 1) + gammaln(nb + 1) - gammaln(na + nb + 2) + (na + nb) * LOG2


def z_tilde_path(counts):
    n = np.atleast_2d(np.asarray(counts, dtype=float))
    a, b = top_two(n)
    rows = np.arange(len(n))
    return _z_tilde(n[rows, a], n[rows, b]), a, b


def z_stat(state, per_pair: bool = False) -> IlessStatReport:
    n = _counts(state)
    if n.sum() < 1:
        raise ValueError("need at least one observation")
    z, a, b = z_path(n)
    zt, _, _ = z_tilde_path(n)
    pairs = None
    if per_pair:
        K = len(n)
        pairs = {(i, j): z_ab(n, i, j) for i in range(K) for j in range(K) if i != j}
    return IlessStatReport(float(z[0]), float(zt[0]), int(a[0]), int(b[0]), pairs)


def constrained_mle(counts, a: int, b: int) -> np.ndarray:
    """Maximum-likelihood pmf subject to p_a <= p_b."""
    n = np.asarray(counts, dtype=float)
    t = n.sum()
    if t < 1:
        raise ValueError("need at least one observation")
    p = n / t
    if n[a] >= n[b]:
        p[a] = p[b] = (n[a] + n[b]) / (2 * t)
    return p
