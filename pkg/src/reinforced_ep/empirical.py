"""Reinforced empirical process built from cluster values and sizes.

The path is

    x -> (sum_j N_j 1{U_j <= x} - n x) / norm,

a pure-jump bridge with linear drift.  It is stored as sorted jump locations
with weights, which makes exact evaluation and the exact supremum cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import ConsistencyError, ParameterError

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


def _as_arrays(clusters) -> tuple[np.ndarray, np.ndarray]:
    """Accept a sequence of ``(value, count)`` pairs or a ``(values, counts)`` array pair."""
    if (isinstance(clusters, tuple) and len(clusters) == 2
            and all(isinstance(c, np.ndarray) for c in clusters)):
        values, counts = clusters
    else:
        arr = np.asarray(list(clusters), dtype=np.float64).reshape(-1, 2)
        values, counts = arr[:, 0], arr[:, 1]
    return np.asarray(values, dtype=np.float64), np.asarray(counts, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class EmpiricalPath:
    """Cadlag bridge ``x -> (W(x) - drift * x) / norm`` on [0, 1].

    ``W(x)`` is the total weight of jumps located at or before ``x``.
    Locations are strictly increasing; ``drift`` equals the total weight, so
    the path vanishes at both ends.
    """

    locations: np.ndarray
    weights: np.ndarray
    drift: float
    norm: float

    def __post_init__(self):
        self.locations.flags.writeable = False
        self.weights.flags.writeable = False

    @property
    def total_weight(self) -> float:
        return float(self.drift)

    @property
    def jumps(self) -> list[tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    def _cumulative(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(self.weights)))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        cum = self._cumulative()
        w = cum[np.searchsorted(self.locations, x, side="right")]
        out = (w - self.drift * x) / self.norm
        # Pin the bridge exactly; the cumulative sum can round at x = 1.
        out = np.where((x <= 0.0) | (x >= 1.0), 0.0, out)
        return out if out.ndim else float(out)

    def left_limit(self, x):
        x = np.asarray(x, dtype=np.float64)
        cum = self._cumulative()
        w = cum[np.searchsorted(self.locations, x, side="left")]
        out = np.where(x <= 0.0, 0.0, (w - self.drift * x) / self.norm)
        return out if out.ndim else float(out)


def path_from_arrays(values: np.ndarray, counts: np.ndarray, n: int, norm: float) -> EmpiricalPath:
    """Fast constructor from parallel value/count arrays."""
    if not norm > 0:
        raise ParameterError(f"norm must be positive, got {norm!r}")
    if n < 1:
        raise ParameterError("n must be at least 1")
    values = np.asarray(values, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if values.shape != counts.shape:
        raise ConsistencyError("values and counts differ in length")
    if np.any(counts <= 0):
        raise ConsistencyError("cluster counts must be positive")
    if np.any((values < 0) | (values > 1)):
        raise ConsistencyError("cluster values must lie in [0, 1]")
    if counts.sum() != n:
        raise ConsistencyError(f"counts sum to {counts.sum():g}, expected n={n}")
    order = np.argsort(values, kind="stable")
    loc = values[order]
    w = counts[order]
    if loc.size > 1 and np.any(loc[1:] == loc[:-1]):
        loc, first = np.unique(loc, return_index=True)
        w = np.add.reduceat(w, first)
    return EmpiricalPath(loc, w, float(n), float(norm))


def build_path(clusters, n: int, norm: float = 1.0) -> EmpiricalPath:
    """Path of ``(sum_j count_j 1{value_j <= x} - n x) / norm``.

    ``clusters`` is a sequence of ``(value, count)`` pairs (or a pair of
    arrays); the counts must sum to ``n``.
    """
    values, counts = _as_arrays(clusters)
    return path_from_arrays(values, counts, int(n), norm)


def sup_norm(path: EmpiricalPath) -> float:
    """Exact ``sup_{0<=x<=1} |path(x)|``.

    Between jumps the path is linear, so the extremes sit at jump locations:
    the candidates are the left limit and the value at every jump.
    """
    if path.drift <= 0 or path.locations.size == 0:
        raise ParameterError("sup_norm needs a path with at least one jump")
    cum = np.cumsum(path.weights)
    base = path.drift * path.locations
    right = np.abs(cum - base)
    left = np.abs(cum - path.weights - base)
    return float(max(right.max(), left.max()) / path.norm)


def evaluate_grid(path: EmpiricalPath, grid_size: int) -> list[tuple[float, float]]:
    """Values at ``x = k/(grid_size-1)``; endpoints are exactly zero."""
    xs = uniform_grid(grid_size)
    return list(zip(xs.tolist(), np.asarray(path(xs)).tolist()))


def uniform_grid(grid_size: int) -> np.ndarray:
    if int(grid_size) != grid_size or grid_size < 2:
        raise ParameterError(f"grid_size must be an integer >= 2, got {grid_size!r}")
    xs = np.arange(grid_size, dtype=np.float64) / (grid_size - 1)
    xs[-1] = 1.0
    return xs


@nb.njit(cache=True, nogil=True)
def _bin_weights(values, counts, xs):
    """Total count per first grid index ``k`` with ``values <= xs[k]``."""
    m = xs.shape[0]
    out = np.zeros(m)
    for i in range(values.shape[0]):
        v = values[i]
        k = min(max(int(math.ceil(v * (m - 1))), 0), m - 1)
        while k > 0 and xs[k - 1] >= v:
            k -= 1
        while k < m - 1 and xs[k] < v:
            k += 1
        out[k] += counts[i]
    return out


def grid_values(values: np.ndarray, counts: np.ndarray, norm: float, grid_size: int) -> np.ndarray:
    """Path values on the uniform grid straight from cluster arrays.

    Bins each cluster by the first grid point at or above its value, so no
    sort of the clusters is needed.  Agrees with ``path(uniform_grid(...))``.
    """
    xs = uniform_grid(grid_size)
    values = np.asarray(values, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    n = float(np.sum(counts))
    w = np.cumsum(_bin_weights(values, counts, xs))
    out = (w - n * xs) / norm
    out[0] = 0.0
    out[-1] = 0.0
    return out


def grid_sup(values: np.ndarray, counts: np.ndarray, norm: float, grid_size: int) -> float:
    return float(np.max(np.abs(grid_values(values, counts, norm, grid_size))))


@dataclass(frozen=True)
class RegimeSpec:
    """Normalization dictated by the reinforcement parameter.

    ``sqrt(n)`` below 1/2, ``sqrt(n log n)`` at exactly 1/2, ``n^p`` above.
    """

    p: float

    def __post_init__(self):
        if not 0.0 < float(self.p) < 1.0:
            raise ParameterError(f"p must lie in (0, 1), got {self.p!r}")

    @property
    def regime(self) -> str:
        if self.p < 0.5:
            return SUBCRITICAL
        if self.p == 0.5:
            return CRITICAL
        return SUPERCRITICAL

    def scale(self, n: int) -> float:
        if n < 1:
            raise ParameterError("n must be positive")
        if self.regime == SUBCRITICAL:
            return math.sqrt(n)
        if self.regime == CRITICAL:
            if n < 2:
                raise ParameterError("critical normalization sqrt(n log n) needs n >= 2")
            return math.sqrt(n * math.log(n))
        return float(n) ** self.p


def scaled_path(snapshot, clusters, spec: RegimeSpec) -> EmpiricalPath:
    """The path at ``snapshot.step`` with the regime's normalization."""
    n = int(snapshot.step)
    return build_path(clusters, n, spec.scale(n))
