"""Information-theoretic lower bounds on the expected stopping time.

Reporting and validation only; the algorithms never look at these (they
would need the true community sizes).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy.special import xlogy

from .model import Instance


@dataclass
class BoundReport:
    lb_identityless: float
    lb_identity_based: float
    ratio_lower: float
    ratio: float
    g_star: float
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def kl_bernoulli(x: float, y: float) -> float:
    """Binary relative entropy kl(x, y), with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    if y in (0.0, 1.0):
        if x == y:
            return 0.0
        raise ValueError("kl(x, y) is infinite for y in {0, 1} unless x == y")
    return float(xlogy(x, x / y) + xlogy(1 - x, (1 - x) / (1 - y)))


def _top(instance: Instance):
    if not instance.has_unique_mode:
        raise ValueError("bounds need a strict unique mode")
    d1, d2 = instance.top_two()
    return d1, d2, d1 / instance.N, d2 / instance.N


def g_star(instance: Instance) -> float:
    """(p1 + p2) kl(p1 / (p1 + p2), 1/2): the identityless information rate."""
    _, _, p1, p2 = _top(instance)
    return (p1 + p2) * kl_bernoulli(p1 / (p1 + p2), 0.5)


def _numerator(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return math.log(1 / (2.4 * delta))


def lb_identityless(instance: Instance, delta: float) -> float:
    return _numerator(delta) / g_star(instance)


def identity_rate(instance: Instance) -> float:
    d1, d2, _, _ = _top(instance)
    N = instance.N
    return math.log((N - d2 + d1 + 1) / N)


def lb_identity_based(instance: Instance, delta: float) -> float:
    return _numerator(delta) / identity_rate(instance)


def bound_ratio_check(instance: Instance, delta: float = 0.1) -> BoundReport:
    """Both bounds plus the ratio inequality between their rates.

    ``holds`` is the full chain
    log((N-d2+d1+1)/N) > log((N-d2+d1)/N) > g*  and
    ratio > (p1+p2) log 2 / (p1-p2).
    """
    d1, d2, p1, p2 = _top(instance)
    N = instance.N
    gs = g_star(instance)
    rate_plus = identity_rate(instance)
    rate = math.log((N - d2 + d1) / N)
    ratio = rate_plus / gs
    ratio_lower = (p1 + p2) * math.log(2) / (p1 - p2)
    holds = rate_plus > rate > gs and ratio > rate / gs > ratio_lower
    return BoundReport(
        lb_identityless=lb_identityless(instance, delta),
        lb_identity_based=lb_identity_based(instance, delta),
        ratio_lower=ratio_lower,
        ratio=ratio,
        g_star=gs,
        holds=holds,
    )
