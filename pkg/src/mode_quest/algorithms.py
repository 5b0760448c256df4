"""The four stopping rules, driven over a shared identity-based trace.

Every trial draws one trace; identityless rules read only the community
labels, identity-based rules also read the "fresh" flags.  Running several
configurations on one trace is therefore the same as running each alone
with the same random stream.  Statistics are evaluated for whole chunks of
epochs at a time, but the stopping epoch is the first epoch at which the
rule fires, exactly as in an epoch-by-epoch loop.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .identity import _BoxCache, y_path
from .identityless import z_path, z_tilde_path
from .model import Algorithm, GeometricPrior, Instance, RunConfig
from .sampler import TraceStream, running_counts


class Rule(str, Enum):
    IDENTITYLESS = "Identityless"
    IDENTITY_BASED = "IdentityBased"
    MAX_EPOCHS = "MaxEpochsCap"


@dataclass
class TrialResult:
    stopping_time: int
    declared_mode: Optional[int]
    rule_fired: Rule
    error: Optional[bool]
    trace_len_distinct: int

    def to_dict(self) -> dict:
        out = asdict(self)
        out["rule_fired"] = self.rule_fired.value
        # 1-indexed for anything leaving the library
        if self.declared_mode is not None:
            out["declared_mode"] = self.declared_mode + 1
        return out


def threshold_beta(K: int, delta: float) -> float:
    """log((K-1)/delta); identity-based rules use delta/2."""
    if K < 2:
        raise ValueError("need K >= 2")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    return math.log((K - 1) / delta)


class _Rule:
    """One pending configuration inside a trial."""

    def __init__(self, config: RunConfig, K: int, check_every: int):
        self.config = config
        algo = config.algorithm
        self.identity = algo.identity_based
        self.one_v_one = algo in (Algorithm.NI_ME_1V1, Algorithm.IB_CME_1V1)
        delta = config.delta / 2 if self.identity else config.delta
        self.beta = threshold_beta(K, delta)
        self.check_every = check_every
        self.cache = _BoxCache(config.alpha, config.prior) if config.alpha > 1 else None
        self.result: Optional[TrialResult] = None

    def scan(self, t, counts, distinct, truth: int) -> Optional[TrialResult]:
        """First epoch of this chunk at which the rule fires, if any."""
        stat, a_hat = self._iless(counts)
        fire = stat > self.beta
        if self.check_every > 1:
            fire &= t % self.check_every == 0
        first_iless = int(np.argmax(fire)) if fire.any() else len(t)
        first_y = len(t)
        if self.identity:
            # Y is only needed before the identityless rule fires
            lim = first_iless + 1
            y, _, a_tilde, _, _ = y_path(distinct[:lim], t[:lim],
                                         self.config.alpha, self.config.prior, self.cache)
            with np.errstate(invalid="ignore"):
                fire_y = y > self.beta
            if self.check_every > 1:
                fire_y &= t[:lim] % self.check_every == 0
            if fire_y.any():
                first_y = int(np.argmax(fire_y))
        if first_iless == len(t) and first_y == len(t):
            return None
        # same-epoch tie credits the identityless rule
        if first_iless <= first_y:
            i, mode, rule = first_iless, int(a_hat[first_iless]), Rule.IDENTITYLESS
        else:
            i, mode, rule = first_y, int(a_tilde[first_y]), Rule.IDENTITY_BASED
        return TrialResult(int(t[i]), mode, rule, mode != truth, int(distinct[i].sum()))

    def _iless(self, counts):
        if self.one_v_one:
            z, a, _ = z_tilde_path(counts)
        else:
            z, a, _ = z_path(counts)
        return z, a


def run_trial(instance: Instance, configs: Sequence[RunConfig], rng,
              max_epochs: Optional[int] = None, check_every: int = 1) -> list[TrialResult]:
    """Run every configuration on one shared trace."""
    K = instance.K
    cap = max_epochs if max_epochs is not None else max(c.max_epochs for c in configs)
    rules = [_Rule(c, K, check_every) for c in configs]
    caps = [min(cap, c.max_epochs) for c in configs]
    truth = instance.mode
    stream = TraceStream(instance, rng)
    counts0 = np.zeros(K, dtype=np.int64)
    distinct0 = np.zeros(K, dtype=np.int64)
    t0 = 0
    while any(r.result is None for r in rules):
        comm, fresh = stream.next_chunk()
        n = min(len(comm), max(caps) - t0)
        comm, fresh = comm[:n], fresh[:n]
        counts, distinct = running_counts(comm, fresh, K, counts0, distinct0)
        t = t0 + np.arange(1, n + 1)
        for r, c in zip(rules, caps):
            if r.result is not None:
                continue
            lim = max(0, min(n, c - t0))
            if lim:
                r.result = r.scan(t[:lim], counts[:lim], distinct[:lim], truth)
            if r.result is None and t0 + lim >= c:
                r.result = TrialResult(c, None, Rule.MAX_EPOCHS, None,
                                       int(distinct[lim - 1].sum()) if lim else int(distinct0.sum()))
        counts0, distinct0 = counts[-1], distinct[-1]
        t0 += n
    return [r.result for r in rules]


def _single(instance, config, rng, check_every=1):
    return run_trial(instance, [config], rng, check_every=check_every)[0]


def run_ni_me(instance: Instance, delta: float, rng, max_epochs: int = 10_000_000,
              check_every: int = 1) -> TrialResult:
    return _single(instance, RunConfig(delta, Algorithm.NI_ME, max_epochs=max_epochs),
                   rng, check_every)


def run_ni_me_1v1(instance: Instance, delta: float, rng, max_epochs: int = 10_000_000,
                  check_every: int = 1) -> TrialResult:
    return _single(instance, RunConfig(delta, Algorithm.NI_ME_1V1, max_epochs=max_epochs),
                   rng, check_every)


def run_ib_cme(instance: Instance, delta: float, alpha: int = 1, prior=None, rng=0,
               max_epochs: int = 10_000_000, piggyback: Algorithm = Algorithm.NI_ME,
               check_every: int = 1) -> TrialResult:
    """Identity-based rule with an identityless rule riding along at delta/2.

    ``piggyback`` picks which identityless statistic rides along (NiMe or
    NiMe1v1).
    """
    piggyback = Algorithm(piggyback)
    if piggyback.identity_based:
        raise ValueError("piggyback must be an identityless rule")
    algo = Algorithm.IB_CME_1V1 if piggyback is Algorithm.NI_ME_1V1 else Algorithm.IB_CME
    config = RunConfig(delta, algo, alpha, prior or GeometricPrior(0.1), max_epochs=max_epochs)
    return _single(instance, config, rng, check_every)


def run(instance: Instance, config: RunConfig, rng, check_every: int = 1) -> TrialResult:
    return _single(instance, config, rng, check_every)
