"""Closed-form reference values for cluster statistics.

Everything goes through :func:`log_gamma_ratio`, which evaluates
``log(Gamma(x + a) / Gamma(x))`` without forming either gamma value, so the
ratios stay finite and accurate for ``x`` up to 1e9 and beyond.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

import numpy as np
from scipy.special import digamma, gammaln

from .errors import ParameterError, RegimeError

# Above this the Stirling-difference branch is used (truncation error < 1e-17).
_STIRLING_MIN = 30.0
# Bernoulli-number coefficients B_2k / (2k (2k-1)) of the Stirling series.
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188)
# Direct summation limit for expected_s2; beyond it the tail is telescoped.
DIRECT_SUM_LIMIT = 10**6
M3_CONSTANT_FILE = "m3_constant.json"


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p!r}")
    return p


def _check_n(n: int, name: str = "n") -> int:
    if int(n) != n or n < 1:
        raise ParameterError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def log_gamma_ratio(x, a):
    """``log Gamma(x + a) - log Gamma(x)`` for ``x > 0`` and ``x + a > 0``.

    Small arguments use ``gammaln`` directly; large ones use the difference
    of Stirling series written so that no large terms cancel.
    """
    x = np.asarray(x, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    x, a = np.broadcast_arrays(x, a)
    if np.any(x <= 0) or np.any(x + a <= 0):
        raise ParameterError("log_gamma_ratio needs x > 0 and x + a > 0")
    out = np.empty(x.shape, dtype=np.float64)
    small = np.minimum(x, x + a) < _STIRLING_MIN
    if np.any(small):
        xs, as_ = x[small], a[small]
        out[small] = gammaln(xs + as_) - gammaln(xs)
    big = ~small
    if np.any(big):
        xb, ab = x[big], a[big]
        y = xb + ab
        lead = (y - 0.5) * np.log1p(ab / xb) - ab + ab * np.log(xb)
        corr = np.zeros_like(xb)
        for k, c in enumerate(_STIRLING):
            e = 2 * k + 1
            corr += c * (y ** -e - xb ** -e)
        out[big] = lead + corr
    return out if out.ndim else float(out)


# ---------------------------------------------------------------- E[S^2(n)]

def _direct_terms(p: float, n: int) -> np.ndarray:
    """``a(n) / a(i)`` for i = 1..n, where a(m) = Gamma(m + 2p) / Gamma(m)."""
    i = np.arange(1, n + 1, dtype=np.float64)
    return np.exp(log_gamma_ratio(float(n), 2 * p) - log_gamma_ratio(i, 2 * p))


def _telescoped_tail(p: float, lo: int, hi: int) -> float:
    """``sum_{i=lo+1}^{hi} Gamma(i) / Gamma(i + 2p)`` in closed form.

    Uses ``Gamma(i)/Gamma(i+2p) = (r(i-1) - r(i)) / (2p - 1)`` with
    ``r(m) = Gamma(m+1)/Gamma(m+2p)``, and harmonic numbers when p = 1/2.
    """
    if hi <= lo:
        return 0.0
    if p == 0.5:
        return float(digamma(hi + 1.0) - digamma(lo + 1.0))
    b = 1.0 - 2.0 * p
    log_r_lo = log_gamma_ratio(lo + 2.0 * p, b)
    log_r_hi = log_gamma_ratio(hi + 2.0 * p, b)
    return float(math.exp(log_r_lo) * -math.expm1(log_r_hi - log_r_lo) / (2.0 * p - 1.0))


def _expected_s2_recursion(p: float, n: int) -> float:
    e = np.longdouble(1)
    two_p = np.longdouble(2 * p)
    for k in range(1, n):
        e = (1 + two_p / k) * e + 1
    return float(e)


def expected_s2(p: float, n: int, method: str = "closed_form") -> float:
    """Exact mean of the sum of squared cluster sizes after ``n`` steps.

    ``Gamma(n+2p)/Gamma(n) * sum_{i<=n} Gamma(i)/Gamma(i+2p)``.  With
    ``method="recursion"`` the first-moment recursion
    ``E(k+1) = (1 + 2p/k) E(k) + 1`` is iterated in extended precision.
    """
    p = _check_p(p)
    n = _check_n(n)
    if method == "recursion":
        return _expected_s2_recursion(p, n)
    if method != "closed_form":
        raise ParameterError(f"unknown method {method!r}")
    if n <= DIRECT_SUM_LIMIT:
        return float(np.sum(_direct_terms(p, n)))
    m = DIRECT_SUM_LIMIT
    head = float(np.sum(np.exp(-log_gamma_ratio(np.arange(1, m + 1, dtype=np.float64), 2 * p))))
    total = head + _telescoped_tail(p, m, n)
    return float(math.exp(log_gamma_ratio(float(n), 2 * p)) * total)


@dataclass
class MomentTable:
    """Exact ``E[S^2(n)]`` for consecutive ``n = 1..n_max``."""

    p: float
    entries: dict[int, float] = field(repr=False)
    method: str = "closed_form"

    def as_array(self) -> np.ndarray:
        return np.array([self.entries[k] for k in sorted(self.entries)])

    def check_recursion(self, rtol: float = 1e-9) -> bool:
        ns = sorted(self.entries)
        for a, b in zip(ns, ns[1:]):
            if b != a + 1:
                continue
            want = (1 + 2 * self.p / a) * self.entries[a] + 1
            if abs(self.entries[b] - want) > rtol * abs(want):
                return False
        return True


def moment_table(p: float, n_max: int, method: str = "closed_form") -> MomentTable:
    p = _check_p(p)
    n_max = _check_n(n_max, "n_max")
    if method == "closed_form":
        n = np.arange(1, n_max + 1, dtype=np.float64)
        log_a = log_gamma_ratio(n, 2 * p)
        # E(n) = a(n) * cumsum(1/a); scale by a(n) elementwise from a stable cumsum.
        vals = np.exp(log_a) * np.cumsum(np.exp(-log_a))
    elif method == "recursion":
        vals = np.empty(n_max)
        e = np.longdouble(1)
        vals[0] = 1.0
        two_p = np.longdouble(2 * p)
        for k in range(1, n_max):
            e = (1 + two_p / k) * e + 1
            vals[k] = float(e)
    else:
        raise ParameterError(f"unknown method {method!r}")
    return MomentTable(p, {k + 1: float(v) for k, v in enumerate(vals)}, method)


# ------------------------------------------------------------- Yule-Simon

def yule_simon_pmf(k, p: float):
    """``(1/p) B(k, 1 + 1/p)``: limiting frequency of clusters of size ``k``."""
    p = _check_p(p)
    k_arr = np.asarray(k)
    if np.any(k_arr < 1) or np.any(k_arr != np.floor(k_arr)):
        raise ParameterError("k must be a positive integer")
    b = 1.0 + 1.0 / p
    logv = math.lgamma(b) - log_gamma_ratio(k_arr.astype(np.float64), b) - math.log(p)
    return np.exp(logv) if np.ndim(logv) else math.exp(logv)


class SeriesValue(NamedTuple):
    partial: float
    tail: float

    @property
    def total(self) -> float:
        return self.partial + self.tail


def cluster_second_moment_series(p: float, terms: int = 10**7, chunk: int = 2**21) -> SeriesValue:
    """``sum_k k^2 (1-p)/p B(k, 1+1/p)`` for p < 1/2; its limit is 1/(1-2p).

    Sums ``terms`` terms exactly, then adds the midpoint integral of the
    power-law envelope ``t(K) (x/K)^(1-1/p)`` over ``[K + 1/2, inf)``.  The
    envelope's relative error is O(1/K), so the tail estimate is good to
    about ``tail / K``.
    """
    p = _check_p(p)
    if p >= 0.5:
        raise RegimeError("the series diverges for p >= 1/2")
    b = 1.0 + 1.0 / p
    scale = math.lgamma(b) + math.log((1 - p) / p)
    partial = 0.0
    for start in range(1, terms + 1, chunk):
        k = np.arange(start, min(start + chunk, terms + 1), dtype=np.float64)
        partial += float(np.sum(np.exp(2 * np.log(k) + scale - log_gamma_ratio(k, b))))
    K = float(terms)
    t_K = math.exp(2 * math.log(K) + scale - log_gamma_ratio(K, b))
    s = b - 2.0
    tail = t_K * K**s * (K + 0.5) ** (1.0 - s) / (s - 1.0)
    return SeriesValue(partial, tail)


# ------------------------------------------------------ supercritical sums

def sumbeta_constant(p: float) -> float:
    """``sum_i Gamma(i)/Gamma(i+2p) = 1/((2p-1) Gamma(2p))`` for p > 1/2."""
    p = _check_p(p)
    if p <= 0.5:
        raise RegimeError("sum_i Gamma(i)/Gamma(i+2p) diverges for p <= 1/2")
    return 1.0 / ((2 * p - 1) * math.gamma(2 * p))


def sumbeta_partial(p: float, terms: int) -> float:
    """Direct partial sum ``sum_{i<=terms} Gamma(i)/Gamma(i+2p)``."""
    p = _check_p(p)
    i = np.arange(1, _check_n(terms, "terms") + 1, dtype=np.float64)
    return float(np.sum(np.exp(-log_gamma_ratio(i, 2 * p))))


# ------------------------------------------------------------- N_j moments

class ClusterMean(NamedTuple):
    value: float
    exact: bool  # False: an upper bound on the mean, not the mean itself


def expected_nj(j: int, n: int, p: float) -> ClusterMean:
    """Mean size of cluster ``j`` at step ``n`` (exact for j = 1).

    For ``j = 1`` this is ``Gamma(n+p)/(Gamma(n) Gamma(1+p))``.  Cluster ``j``
    is born no earlier than step ``j``, which gives the bound
    ``Gamma(n+p) Gamma(j) / (Gamma(n) Gamma(j+p))`` for ``j > 1``.
    """
    p = _check_p(p)
    j, n = _check_n(j, "j"), _check_n(n)
    if j > n:
        raise ParameterError(f"j={j} exceeds n={n}")
    log_an = log_gamma_ratio(float(n), p)
    if j == 1:
        return ClusterMean(math.exp(log_an - math.lgamma(1 + p)), True)
    return ClusterMean(math.exp(log_an - log_gamma_ratio(float(j), p)), False)


def cluster_moments_from_birth(birth: int, n: int, p: float = 0.5) -> tuple[float, float, float]:
    """Exact first three moments of a cluster born at step ``birth``, at step ``n``.

    Iterates the one-step identities: a cluster of size N grows by one with
    probability ``p N / m`` at step m + 1.
    """
    p = _check_p(p)
    if not 1 <= birth <= n:
        raise ParameterError("need 1 <= birth <= n")
    m1 = m2 = m3 = 1.0
    for m in range(birth, n):
        q = p / m
        m3 = m3 + q * (3 * m3 + 3 * m2 + m1)
        m2 = m2 + q * (2 * m2 + m1)
        m1 = m1 + q * m1
    return m1, m2, m3


def calibrate_m3_constant(j_max: int = 64, n_max: int = 2**20) -> dict:
    """Supremum of ``E[N(n)^3 | born at j] / (n/j)^{3/2}`` at p = 1/2 over a grid.

    The grid is every birth step ``j <= j_max`` and every ``n`` in
    ``[j, n_max]``.  Birth at step ``j`` dominates cluster ``j`` (born at or
    after ``j``), so the returned constant bounds ``E[N_j(n)^3]`` on the grid.
    """
    j_max, n_max = _check_n(j_max, "j_max"), _check_n(n_max, "n_max")
    births = np.arange(1, j_max + 1, dtype=np.float64)
    m1 = np.ones(j_max)
    m2 = np.ones(j_max)
    m3 = np.ones(j_max)
    best = 1.0
    arg = (1, 1)
    for m in range(1, n_max):
        q = 0.5 / m
        alive = births <= m
        m3 = np.where(alive, m3 + q * (3 * m3 + 3 * m2 + m1), m3)
        m2 = np.where(alive, m2 + q * (2 * m2 + m1), m2)
        m1 = np.where(alive, m1 + q * m1, m1)
        ratio = np.where(alive, m3 / ((m + 1) / births) ** 1.5, 0.0)
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best, arg = float(ratio[k]), (k + 1, m + 1)
    return {"b": best, "p": 0.5, "j_max": j_max, "n_max": n_max,
            "argmax_j": arg[0], "argmax_n": arg[1]}


@lru_cache(maxsize=1)
def load_m3_constant() -> dict:
    text = resources.files("reinforced_ep").joinpath("data", M3_CONSTANT_FILE).read_text()
    return json.loads(text)


def moment_bound_m3(j: int, n: int, p: float = 0.5) -> float:
    """``b (n/j)^{3/2}``, an upper bound on ``E[N_j(n)^3]`` at p = 1/2."""
    if float(p) != 0.5:
        raise RegimeError("the third-moment bound is only available at p = 1/2")
    j, n = _check_n(j, "j"), _check_n(n)
    if j > n:
        raise ParameterError(f"j={j} exceeds n={n}")
    return load_m3_constant()["b"] * (n / j) ** 1.5


# ----------------------------------------------------- brute-force small n

def exact_partition_law(n: int, p) -> dict[tuple[int, ...], Fraction]:
    """Law of the sorted cluster sizes after ``n`` steps, by full enumeration.

    Walks every outcome of the repetition flags and copied indices for
    steps 2..n with exact rational probabilities (``p`` is converted with
    ``Fraction``, so pass ``Fraction(1, 2)`` or a string like ``"1/4"`` for
    exact values).  Cost grows like ``(n-1)!``; meant for n <= 6.
    """
    n = _check_n(n)
    p = Fraction(p)
    if not 0 < p < 1:
        raise ParameterError("p must lie in (0, 1)")
    law: dict[tuple[int, ...], Fraction] = {}

    def walk(labels: list[int], n_clusters: int, prob: Fraction):
        step = len(labels)
        if step == n:
            sizes = [0] * n_clusters
            for c in labels:
                sizes[c] += 1
            key = tuple(sorted(sizes, reverse=True))
            law[key] = law.get(key, Fraction(0)) + prob
            return
        for v in range(step):
            walk(labels + [labels[v]], n_clusters, prob * p / step)
        walk(labels + [n_clusters], n_clusters + 1, prob * (1 - p))

    walk([0], 1, Fraction(1))
    return law


def exact_expected_s2(n: int, p) -> Fraction:
    """``E[S^2(n)]`` as a fraction, from ``E(k+1) = (1 + 2p/k) E(k) + 1``."""
    p = Fraction(p)
    e = Fraction(1)
    for k in range(1, _check_n(n)):
        e = (1 + 2 * p / k) * e + 1
    return e
