"""Simon's reinforcement algorithm.

Step 1 is always an innovation.  At each later step ``n + 1`` a Bernoulli(p)
draw decides between a repetition, which copies the item of a uniformly
chosen earlier step ``v in {1, ..., n}``, and an innovation, which opens a new
cluster carrying a fresh uniform value.  Clusters are the blocks of equal
items; ``counts[j]`` is the number of steps that repeated the ``j``-th
innovated value.

Per-step draw order from the SplitMix64 stream (see :mod:`reinforced_ep.rng`):

1. the Bernoulli uniform;
2. on a repetition, the index of the copied step;
   on an innovation, the value of the new cluster.

The initial step draws only the value of cluster 0.  A flat ``step -> cluster``
array (uint32) makes the repetition O(1); cluster ids therefore cap runs at
``2**32 - 1`` steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numba as nb
import numpy as np

from .errors import ParameterError, StateError
from .rng import check_seed, next_index, next_uniform

MAX_STEPS = 2**32 - 1


@dataclass(frozen=True)
class ReinforcementParams:
    """Reinforcement parameter ``p``, run length ``n_max`` and seed."""

    p: float
    n_max: int
    seed: int = 0

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 < p < 1.0) or math.isnan(p):
            raise ParameterError(f"p must lie strictly inside (0, 1), got {self.p!r}")
        if int(self.n_max) != self.n_max or not 1 <= self.n_max <= MAX_STEPS:
            raise ParameterError(f"n_max must be an integer in [1, 2**32-1], got {self.n_max!r}")
        try:
            seed = check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ParameterError(str(exc)) from None
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "seed", seed)


@nb.njit(nogil=True, cache=True)
def _simon_kernel(rng, p, step, target, step_cluster, counts, values, innov, s2):
    capacity = counts.shape[0]
    while step < target:
        if innov == capacity:
            break
        rng, u = next_uniform(rng)
        if u < p:
            rng, idx = next_index(rng, step)
            c = np.int64(step_cluster[idx])
            s2 += np.uint64(2 * counts[c] + 1)
            counts[c] += 1
        else:
            rng, u = next_uniform(rng)
            values[innov] = u
            counts[innov] = 1
            c = innov
            innov += 1
            s2 += np.uint64(1)
        step_cluster[step] = c
        step += 1
    return rng, step, innov, s2


class SimonState:
    """Running state of one reinforced sequence.

    Owned by a single caller; :func:`advance` and :func:`run_to` mutate it in
    place (and return it for chaining).  ``counts`` and ``values`` are views of
    the allocated clusters.
    """

    def __init__(self, params: ReinforcementParams, rng_state: int, value0: float):
        self.params = params
        n_max = params.n_max
        cap = min(n_max, int((1.0 - params.p) * n_max + 6.0 * math.sqrt(n_max)) + 64)
        self.step_cluster = np.empty(n_max, dtype=np.uint32)
        self._counts = np.empty(cap, dtype=np.int64)
        self._values = np.empty(cap, dtype=np.float64)
        self.step_cluster[0] = 0
        self._counts[0] = 1
        self._values[0] = value0
        self.innovations = 1
        self.step = 1
        self.s2 = 1
        self.rng_state = np.uint64(rng_state)

    @property
    def counts(self) -> np.ndarray:
        return self._counts[: self.innovations]

    @property
    def values(self) -> np.ndarray:
        return self._values[: self.innovations]

    @property
    def done(self) -> bool:
        return self.step >= self.params.n_max

    def _grow(self):
        cap = min(self.params.n_max, 2 * self._counts.shape[0])
        counts = np.empty(cap, dtype=np.int64)
        values = np.empty(cap, dtype=np.float64)
        counts[: self.innovations] = self.counts
        values[: self.innovations] = self.values
        self._counts, self._values = counts, values

    def _run_kernel(self, target: int):
        while self.step < target:
            if self.innovations == self._counts.shape[0]:
                self._grow()
            rng, step, innov, s2 = _simon_kernel(
                self.rng_state, self.params.p, self.step, target,
                self.step_cluster, self._counts, self._values,
                self.innovations, np.uint64(self.s2),
            )
            self.rng_state = np.uint64(rng)
            self.step, self.innovations, self.s2 = int(step), int(innov), int(s2)

    def copy(self) -> "SimonState":
        other = object.__new__(SimonState)
        other.params = self.params
        other.step_cluster = self.step_cluster.copy()
        other._counts = self._counts.copy()
        other._values = self._values.copy()
        other.innovations = self.innovations
        other.step = self.step
        other.s2 = self.s2
        other.rng_state = self.rng_state
        return other

    def __repr__(self):
        return (f"SimonState(p={self.params.p}, step={self.step}, "
                f"innovations={self.innovations}, s2={self.s2})")


@dataclass(frozen=True, eq=False)
class ClusterSnapshot:
    """Cluster statistics frozen at one step.

    ``histogram[k]`` is the raw number of clusters of size exactly ``k``
    (index 0 is always 0); divide by ``(1 - p) * step`` for the normalized
    frequencies.
    """

    step: int
    p: float
    counts: np.ndarray = field(repr=False)
    s2: int
    histogram: np.ndarray = field(repr=False)
    max_count: int

    @property
    def innovations(self) -> int:
        return int(self.counts.shape[0])

    def histogram_dict(self) -> dict[int, int]:
        nz = np.flatnonzero(self.histogram)
        return {int(k): int(self.histogram[k]) for k in nz}

    def frequencies(self) -> np.ndarray:
        """``histogram / ((1 - p) * step)``; index k holds the size-k frequency."""
        return self.histogram / ((1.0 - self.p) * self.step)


def init(params: ReinforcementParams) -> SimonState:
    """Start a run: one step taken, one cluster with a uniform value."""
    if not isinstance(params, ReinforcementParams):
        raise ParameterError("init expects ReinforcementParams")
    rng, u = next_uniform(np.uint64(params.seed))
    return SimonState(params, rng, u)


def advance(state: SimonState) -> SimonState:
    """Take a single step of the algorithm."""
    if state.done:
        raise StateError(f"run already completed n_max={state.params.n_max} steps")
    state._run_kernel(state.step + 1)
    return state


def advance_to(state: SimonState, n: int) -> SimonState:
    """Advance until ``state.step == n``."""
    n = int(n)
    if n < state.step:
        raise StateError(f"cannot rewind from step {state.step} to {n}")
    if n > state.params.n_max:
        raise ParameterError(f"target step {n} exceeds n_max={state.params.n_max}")
    state._run_kernel(n)
    return state


def _check_checkpoints(state: SimonState, checkpoints: Iterable[int]) -> list[int]:
    cps = [int(c) for c in checkpoints]
    if not cps:
        raise ParameterError("at least one checkpoint is required")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ParameterError(f"checkpoints must be strictly ascending: {cps}")
    if cps[0] < state.step or cps[-1] > state.params.n_max:
        raise ParameterError(
            f"checkpoints must lie in [{state.step}, {state.params.n_max}], got {cps}")
    return cps


def iter_checkpoints(state: SimonState, checkpoints: Iterable[int]) -> Iterator[SimonState]:
    """Yield the (live, mutable) state at each checkpoint in turn."""
    for n in _check_checkpoints(state, checkpoints):
        advance_to(state, n)
        yield state


def snapshot(state: SimonState) -> ClusterSnapshot:
    counts = np.sort(state.counts)[::-1].copy()
    hist = np.bincount(counts)
    return ClusterSnapshot(step=state.step, p=state.params.p, counts=counts,
                           s2=int(state.s2), histogram=hist, max_count=int(counts[0]))


def run_to(state: SimonState, checkpoints: Iterable[int]) -> list[ClusterSnapshot]:
    """Advance through ascending checkpoints, snapshotting at each."""
    return [snapshot(s) for s in iter_checkpoints(state, checkpoints)]


def cluster_values(state: SimonState) -> list[tuple[float, int]]:
    """Pairs ``(U_j, N_j(n))`` for every allocated cluster."""
    return list(zip(state.values.tolist(), state.counts.tolist()))


def cluster_arrays(state: SimonState) -> tuple[np.ndarray, np.ndarray]:
    """Copies of the cluster values and counts, in cluster order."""
    return state.values.copy(), state.counts.copy()


def simulate(p: float, n: int, seed: int = 0) -> SimonState:
    """Convenience: a fresh run advanced to step ``n``."""
    return advance_to(init(ReinforcementParams(p, n, seed)), n)
