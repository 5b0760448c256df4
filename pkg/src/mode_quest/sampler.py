"""Observation streams under the identityless and identity-based models.

Both models draw one individual uniformly (with replacement) from the
population per epoch; the identityless model simply discards the
"seen before" flag.  The two models are therefore couplings of the same
draw, and a single trace can drive every algorithm in a trial.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .model import Instance, ObservationState

# chunk sizes for TraceStream: 256, 512, ... capped at 32768
_FIRST_CHUNK = 256
_MAX_CHUNK = 1 << 15


@dataclass(frozen=True)
class Observation:
    community: int
    fresh: Optional[bool] = None


def trial_rng(seed: int, trial: int = 0, stream: tuple = ()) -> np.random.Generator:
    """Independent stream for ``trial`` under master ``seed``.

    Streams depend only on (seed, stream, trial), never on scheduling order.
    ``stream`` separates sweeps that must not share draws (e.g. one key per
    population scale).
    """
    key = tuple(int(k) for k in stream) + (int(trial),)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return trial_rng(int(rng))


def _boundaries(instance: Instance) -> np.ndarray:
    return np.cumsum(instance.sizes)


def community_of(instance: Instance, individual):
    """Community label of an individual index in [0, N)."""
    return np.searchsorted(_boundaries(instance), individual, side="right")


def sample_identityless(instance: Instance, rng) -> Observation:
    rng = _as_rng(rng)
    i = rng.integers(instance.N)
    return Observation(int(community_of(instance, i)))


def sample_identity_based(instance: Instance, state: ObservationState, rng) -> Observation:
    """Draw one individual, flag whether it is new, and update ``state``."""
    rng = _as_rng(rng)
    if state.seen is None:
        state.seen = np.zeros(instance.N, dtype=bool)
    i = int(rng.integers(instance.N))
    j = int(community_of(instance, i))
    fresh = not state.seen[i]
    state.seen[i] = True
    state.record(j, fresh)
    return Observation(j, fresh)


class TraceStream:
    """Chunked identity-based trace generator.

    Yields ``(communities, fresh)`` array pairs.  The chunk schedule is fixed,
    so a given generator state always produces the same trace no matter how
    far it is consumed.
    """

    def __init__(self, instance: Instance, rng):
        self.instance = instance
        self.rng = _as_rng(rng)
        self.seen = np.zeros(instance.N, dtype=bool)
        self._bounds = _boundaries(instance)
        self._next = _FIRST_CHUNK

    def next_chunk(self) -> tuple[np.ndarray, np.ndarray]:
        n = self._next
        self._next = min(2 * n, _MAX_CHUNK)
        idx = self.rng.integers(self.instance.N, size=n)
        comm = np.searchsorted(self._bounds, idx, side="right")
        _, first = np.unique(idx, return_index=True)
        fresh = np.zeros(n, dtype=bool)
        fresh[first] = ~self.seen[idx[first]]
        self.seen[idx] = True
        return comm, fresh

    def __iter__(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        while True:
            yield self.next_chunk()


def generate_trace(instance: Instance, rng, length: int) -> tuple[np.ndarray, np.ndarray]:
    """The first ``length`` epochs of the trace a TraceStream would produce."""
    stream = TraceStream(instance, rng)
    comms, flags, have = [], [], 0
    while have < length:
        c, f = stream.next_chunk()
        comms.append(c)
        flags.append(f)
        have += len(c)
    return np.concatenate(comms)[:length], np.concatenate(flags)[:length]


def write_trace_csv(communities, fresh=None, fh=None) -> str:
    """CSV with header ``t,community,fresh`` (1-indexed communities, fresh
    left empty for identityless traces)."""
    out = fh if fh is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "community", "fresh"])
    for t, c in enumerate(communities, start=1):
        flag = "" if fresh is None else int(bool(fresh[t - 1]))
        w.writerow([t, int(c) + 1, flag])
    return out.getvalue() if fh is None else ""


def read_trace_csv(lines: Iterable[str]) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Inverse of :func:`write_trace_csv`; returns 0-indexed communities."""
    reader = csv.DictReader(lines)
    comm, fresh = [], []
    expected = 1
    for row in reader:
        if int(row["t"]) != expected:
            raise ValueError(f"trace rows out of order at t={row['t']}")
        expected += 1
        comm.append(int(row["community"]) - 1)
        fresh.append(row.get("fresh", "") or "")
    if any(c < 0 for c in comm):
        raise ValueError("communities are 1-indexed in trace files")
    comm = np.asarray(comm, dtype=np.int64)
    if all(f == "" for f in fresh):
        return comm, None
    if any(f == "" for f in fresh):
        raise ValueError("fresh column must be filled on every row or none")
    return comm, np.asarray([f in ("1", "true", "True") for f in fresh], dtype=bool)


def running_counts(communities, fresh, K: int,
                   counts0=None, distinct0=None) -> tuple[np.ndarray, np.ndarray]:
    """Per-epoch N(t) and S(t) matrices (one row per epoch)."""
    communities = np.asarray(communities)
    onehot = np.zeros((len(communities), K), dtype=np.int64)
    onehot[np.arange(len(communities)), communities] = 1
    counts = np.cumsum(onehot, axis=0)
    if fresh is None:
        distinct = np.zeros_like(counts)
    else:
        distinct = np.cumsum(onehot * np.asarray(fresh, dtype=np.int64)[:, None], axis=0)
    if counts0 is not None:
        counts += counts0
    if distinct0 is not None:
        distinct += distinct0
    return counts, distinct
