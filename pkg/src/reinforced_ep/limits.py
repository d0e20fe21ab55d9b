"""Limit objects: the Brownian bridge, its sup law, and the jump bridge B^(p)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .empirical import uniform_grid
from .engine import ReinforcementParams, advance_to, init
from .errors import ParameterError, RegimeError

BROWNIAN = "brownian"
BP = "bp"

# -zeta(1/2) / sqrt(2 pi): first-order gap between the continuous maximum of
# a Brownian path and its maximum over a grid of mesh h, times sqrt(h).
GRID_MAX_GAP = 0.5825971579390108
DEFAULT_XP_TRUNCATION = 1024

_KOLMOGOROV_SWITCH = 1.0
_SERIES_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BridgeSample:
    grid: np.ndarray
    values: np.ndarray
    kind: str
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (BROWNIAN, BP):
            raise ParameterError(f"unknown bridge kind {self.kind!r}")
        if (self.kind == BP) != (self.p is not None):
            raise ParameterError("p is present exactly for kind='bp'")

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def _check_grid(grid_size: int) -> int:
    if int(grid_size) != grid_size or grid_size < 2:
        raise ParameterError(f"grid_size must be an integer >= 2, got {grid_size!r}")
    return int(grid_size)


def brownian_bridge_batch(count: int, grid_size: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` bridges on the uniform grid, one per row.

    Builds a Wiener path from independent N(0, h) increments and subtracts
    ``x W(1)``; both endpoint columns are exactly zero.
    """
    grid_size = _check_grid(grid_size)
    xs = uniform_grid(grid_size)
    h = 1.0 / (grid_size - 1)
    out = np.zeros((count, grid_size))
    if grid_size == 2:
        return out
    w = np.cumsum(rng.standard_normal((count, grid_size - 1)) * math.sqrt(h), axis=1)
    out[:, 1:] = w - xs[1:] * w[:, -1:]
    out[:, -1] = 0.0
    return out


def sample_brownian_bridge(grid_size: int, seed: int) -> BridgeSample:
    rng = np.random.default_rng(seed)
    values = brownian_bridge_batch(1, grid_size, rng)[0]
    return BridgeSample(uniform_grid(grid_size), values, BROWNIAN)


def brownian_bridge_grid_sups(count: int, grid_size: int, seed: int, chunk: int = 1000) -> np.ndarray:
    """Grid suprema of ``count`` independent bridges (deterministic in ``seed``)."""
    rng = np.random.default_rng(seed)
    out = np.empty(count)
    for start in range(0, count, chunk):
        m = min(chunk, count - start)
        out[start:start + m] = np.abs(brownian_bridge_batch(m, grid_size, rng)).max(axis=1)
    return out


def grid_sup_correction(grid_size: int) -> float:
    """Expected shortfall of a grid sup against the continuous sup, to first order."""
    return GRID_MAX_GAP / math.sqrt(_check_grid(grid_size) - 1)


def _kolmogorov_scalar(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x < _KOLMOGOROV_SWITCH:
        # Theta-transformed series: sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2)).
        c = -math.pi**2 / (8.0 * x * x)
        total = 0.0
        k = 1
        while True:
            term = math.exp(c * (2 * k - 1) ** 2)
            total += term
            if term < _SERIES_TOL * max(total, 1e-300) or term == 0.0:
                break
            k += 1
        return min(1.0, math.sqrt(2.0 * math.pi) / x * total)
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        total += term if k % 2 else -term
        if term < _SERIES_TOL:
            break
        k += 1
    return max(0.0, min(1.0, 1.0 - 2.0 * total))


def kolmogorov_cdf(x):
    """``P(sup |G| <= x)`` for a standard Brownian bridge ``G``.

    Uses ``1 - 2 sum (-1)^(k-1) exp(-2 k^2 x^2)`` for ``x >= 1`` and the dual
    theta series below, each truncated once a term drops under 1e-12.
    """
    if np.ndim(x) == 0:
        if x < 0:
            raise ParameterError("kolmogorov_cdf is defined for x >= 0")
        return _kolmogorov_scalar(float(x))
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise ParameterError("kolmogorov_cdf is defined for x >= 0")
    return np.vectorize(_kolmogorov_scalar, otypes=[np.float64])(arr)


def kolmogorov_sf(x):
    """``1 - kolmogorov_cdf(x)`` computed from the alternating series directly."""
    if np.ndim(x) != 0:
        return np.vectorize(kolmogorov_sf, otypes=[np.float64])(x)
    x = float(x)
    if x < _KOLMOGOROV_SWITCH:
        return 1.0 - kolmogorov_cdf(x)
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        total += term if k % 2 else -term
        if term < _SERIES_TOL * total:
            break
        k += 1
    return min(1.0, 2.0 * total)


@dataclass(frozen=True, eq=False)
class XpVector:
    """Largest rescaled cluster sizes ``N_j(n) / n^p`` in nonincreasing order."""

    entries: np.ndarray
    n_used: int
    p: float

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if np.any(e < 0) or np.any(np.diff(e) > 0):
            raise ParameterError("entries must be nonnegative and nonincreasing")
        if not self.p > 0.5:
            raise RegimeError("XpVector is defined for p > 1/2")
        object.__setattr__(self, "entries", e)

    def sum_squares(self) -> float:
        return float(np.sum(self.entries**2))


def xp_from_counts(counts: np.ndarray, n: int, p: float, truncation: Optional[int] = None) -> XpVector:
    counts = np.asarray(counts)
    if truncation is None:
        truncation = min(DEFAULT_XP_TRUNCATION, int(np.count_nonzero(counts >= 2)))
        truncation = max(truncation, 1)
    if truncation < 1:
        raise ParameterError("truncation J must be at least 1")
    top = np.sort(counts)[::-1][:truncation]
    return XpVector(top / float(n) ** p, int(n), float(p))


def estimate_xp(params: ReinforcementParams, n: Optional[int] = None,
                truncation: Optional[int] = None) -> XpVector:
    """Run the engine to step ``n`` and keep the J largest ``N_j(n)/n^p``.

    J defaults to ``min(1024, #{j : N_j(n) >= 2})``.
    """
    if params.p <= 0.5:
        raise RegimeError("the jump sizes X^(p) exist only for p > 1/2")
    n = params.n_max if n is None else int(n)
    if n < 10**4:
        raise ParameterError("estimate_xp needs n >= 10**4")
    state = advance_to(init(params), n)
    return xp_from_counts(state.counts, n, params.p, truncation)


def bp_bridge_values(xp: XpVector, xs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(xp.entries.shape[0])
    if u.size == 0:
        return np.zeros_like(xs)
    order = np.argsort(u)
    cum = np.concatenate(([0.0], np.cumsum(xp.entries[order])))
    w = cum[np.searchsorted(u[order], xs, side="right")]
    out = w - cum[-1] * xs
    out[0] = 0.0
    out[-1] = 0.0
    return out


def sample_bp_bridge(xp: XpVector, grid_size: int, seed: int) -> BridgeSample:
    """``B(x) = sum_j xp_j (1{U_j <= x} - x)`` with fresh uniforms ``U_j``."""
    xs = uniform_grid(_check_grid(grid_size))
    rng = np.random.default_rng(seed)
    return BridgeSample(xs, bp_bridge_values(xp, xs, rng), BP, xp.p)
