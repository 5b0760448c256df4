"""Domain types shared across the package.

Communities are 0-indexed internally and 1-indexed in anything shown to a
user (CLI output, JSON summaries).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class Instance:
    """A partitioned population: ``sizes[j]`` individuals in community ``j``."""

    sizes: tuple[int, ...]
    name: Optional[str] = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) < 2:
            raise ValueError("an instance needs at least two communities")
        if min(sizes) < 1:
            raise ValueError("every community needs at least one individual")

    @property
    def K(self) -> int:
        return len(self.sizes)

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.sizes, dtype=float) / self.N

    @property
    def mode(self) -> int:
        """Index of the largest community (lowest index on ties)."""
        return int(np.argmax(self.sizes))

    @property
    def has_unique_mode(self) -> bool:
        top = max(self.sizes)
        return self.sizes.count(top) == 1

    def top_two(self) -> tuple[int, int]:
        """The two largest sizes, largest first."""
        d = sorted(self.sizes, reverse=True)
        return d[0], d[1]

    def scaled(self, omega: int) -> "Instance":
        name = f"{self.name}x{omega}" if self.name else None
        return Instance(tuple(omega * s for s in self.sizes), name)

    def to_json(self) -> str:
        payload = {"sizes": list(self.sizes)}
        if self.name is not None:
            payload["name"] = self.name
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str | dict) -> "Instance":
        obj = json.loads(text) if isinstance(text, str) else text
        return make_instance(obj["sizes"], name=obj.get("name"))


def make_instance(sizes: Sequence[int], name: Optional[str] = None) -> Instance:
    """Build a benchmark instance; rejects a tied largest community."""
    inst = Instance(tuple(sizes), name)
    if not inst.has_unique_mode:
        raise ValueError(f"tied maximum in {list(inst.sizes)}: mode is ambiguous")
    return inst


@dataclass(frozen=True)
class GeometricPrior:
    """theta(i) = q (1-q)^i on i = 0, 1, 2, ...

    Support starts at zero so that an unobserved community (whose only
    admissible size in the averaging box is 0) keeps positive prior mass.
    """

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError("geometric parameter must lie in (0, 1)")

    def logpmf(self, i):
        i = np.asarray(i)
        if np.any(i < 0):
            raise ValueError("prior support is the non-negative integers")
        return math.log(self.q) + i * math.log1p(-self.q)

    def pmf(self, i):
        return np.exp(self.logpmf(i))

    def to_dict(self) -> dict:
        return {"kind": "geometric", "q": self.q}

    @classmethod
    def from_dict(cls, obj: dict) -> "GeometricPrior":
        kind = obj.get("kind", "geometric")
        if kind != "geometric":
            raise ValueError(f"unknown prior kind {kind!r}")
        return cls(float(obj["q"]))


PriorSpec = GeometricPrior


def prior_pmf(spec: PriorSpec, i: int) -> float:
    if i < 0:
        raise ValueError("prior support is the non-negative integers")
    return float(spec.pmf(i))


class Algorithm(str, Enum):
    NI_ME = "NiMe"
    NI_ME_1V1 = "NiMe1v1"
    IB_CME = "IbCme"
    IB_CME_1V1 = "IbCme1v1"

    @property
    def identity_based(self) -> bool:
        return self in (Algorithm.IB_CME, Algorithm.IB_CME_1V1)


@dataclass(frozen=True)
class RunConfig:
    delta: float = 0.1
    algorithm: Algorithm = Algorithm.NI_ME
    alpha: int = 1
    prior: PriorSpec = field(default_factory=lambda: GeometricPrior(0.1))
    seed: int = 0
    max_epochs: int = 10_000_000

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.alpha < 1:
            raise ValueError("alpha must be a positive integer")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be positive")

    @property
    def label(self) -> str:
        if not self.algorithm.identity_based:
            return self.algorithm.value
        return f"{self.algorithm.value}(alpha={self.alpha},q={self.prior.q:g})"

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "algorithm": self.algorithm.value,
            "alpha": self.alpha,
            "prior": self.prior.to_dict(),
            "seed": self.seed,
            "max_epochs": self.max_epochs,
        }

    @classmethod
    def from_dict(cls, obj: dict, **defaults) -> "RunConfig":
        merged = {**defaults, **obj}
        prior = merged.get("prior", {"q": 0.1})
        if not isinstance(prior, GeometricPrior):
            prior = GeometricPrior.from_dict(prior)
        return cls(
            delta=float(merged.get("delta", 0.1)),
            algorithm=Algorithm(merged.get("algorithm", "NiMe")),
            alpha=int(merged.get("alpha", 1)),
            prior=prior,
            seed=int(merged.get("seed", 0)),
            max_epochs=int(merged.get("max_epochs", 10_000_000)),
        )


class ObservationState:
    """Running counts for one observation stream.

    ``counts[j]`` is N_j(t), the number of draws from community j, and
    ``distinct[j]`` is S_j(t), the number of distinct individuals seen from
    it.  ``seen`` is only maintained by the identity-based sampler.
    """

    def __init__(self, K: int, N: Optional[int] = None):
        self.t = 0
        self.counts = np.zeros(K, dtype=np.int64)
        self.distinct = np.zeros(K, dtype=np.int64)
        self.seen = np.zeros(N, dtype=bool) if N is not None else None

    @classmethod
    def from_counts(cls, counts, distinct=None) -> "ObservationState":
        counts = np.asarray(counts, dtype=np.int64)
        st = cls(len(counts))
        st.counts = counts.copy()
        st.t = int(counts.sum())
        if distinct is not None:
            st.distinct = np.asarray(distinct, dtype=np.int64).copy()
        return st

    @classmethod
    def from_distinct(cls, distinct, t: int) -> "ObservationState":
        """A state known only through S(t) and t (all the identity-based
        statistic needs)."""
        distinct = np.asarray(distinct, dtype=np.int64)
        st = cls(len(distinct))
        st.distinct = distinct.copy()
        st.t = int(t)
        return st

    @property
    def K(self) -> int:
        return len(self.counts)

    @property
    def observed(self) -> int:
        """K^(t): number of communities with at least one distinct sample."""
        return int(np.count_nonzero(self.distinct))

    @property
    def p_hat(self) -> np.ndarray:
        return self.counts / self.t

    def record(self, community: int, fresh: Optional[bool] = None):
        self.t += 1
        self.counts[community] += 1
        if fresh:
            self.distinct[community] += 1
        assert self.counts.sum() == self.t
        assert np.all(self.distinct <= self.counts)

    def copy(self) -> "ObservationState":
        st = ObservationState(self.K)
        st.t = self.t
        st.counts = self.counts.copy()
        st.distinct = self.distinct.copy()
        st.seen = None if self.seen is None else self.seen.copy()
        return st
