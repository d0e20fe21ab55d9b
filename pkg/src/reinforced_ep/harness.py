"""Monte Carlo replication and the statistical checks built on it.

Replicate ``r`` of a plan always runs with seed
``replicate_seed(master_seed, r)``; samples are stored in replicate order, so
a summary is a pure function of the plan no matter how replicates were
split across workers.
"""

from __future__ import annotations

import json
import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from . import oracles
from .empirical import RegimeSpec, grid_sup, path_from_arrays, sup_norm
from .engine import ReinforcementParams, init, iter_checkpoints
from .errors import ConsistencyError, ParameterError, RegimeError
from .limits import brownian_bridge_grid_sups, kolmogorov_sf
from .rng import child_seed, replicate_seed

DEFAULT_GRID = 2048
REJECTION_FLOOR = 1e-3

_BASE_STATISTICS = {"s2", "sum_sq_scaled", "max_cluster", "histogram", "sup_scaled",
                    "grid_sup_scaled", "sup_lln", "walk_endpoint", "innovations"}
_REGIME_SCALED = {"sup_scaled", "grid_sup_scaled"}
_MARGINAL = re.compile(r"^marginal\(([0-9.eE+-]+)\)$")


def _parse_statistic(name: str) -> tuple[str, Optional[float]]:
    m = _MARGINAL.match(name)
    if m:
        x = float(m.group(1))
        if not 0.0 <= x <= 1.0:
            raise ParameterError(f"marginal location must lie in [0, 1]: {name}")
        return "marginal", x
    if name not in _BASE_STATISTICS:
        raise ParameterError(f"unknown statistic {name!r}")
    return name, None


@dataclass(frozen=True)
class McPlan:
    """What to simulate and which statistic(s) to record at each checkpoint.

    ``statistic`` is one name or a tuple of names among ``s2``,
    ``sum_sq_scaled`` (S^2 / n^{2p}), ``max_cluster``, ``histogram``
    (frequencies of sizes 1..k_max), ``sup_scaled`` (exact sup with the
    regime norm), ``grid_sup_scaled``, ``sup_lln`` (exact sup with norm n),
    ``marginal(x)``, ``walk_endpoint`` and ``innovations``.
    """

    params: ReinforcementParams
    replicates: int
    checkpoints: tuple[int, ...]
    statistic: Union[str, tuple[str, ...]]
    master_seed: int
    grid_size: int = DEFAULT_GRID
    k_max: int = 10
    step_spec: object = None

    def __post_init__(self):
        cps = tuple(int(c) for c in self.checkpoints)
        object.__setattr__(self, "checkpoints", cps)
        stats = (self.statistic,) if isinstance(self.statistic, str) else tuple(self.statistic)
        object.__setattr__(self, "statistic", stats if len(stats) > 1 else stats[0])
        if self.replicates < 1:
            raise ParameterError("replicates must be positive")
        if not cps or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ParameterError(f"checkpoints must be nonempty and strictly ascending: {cps}")
        if cps[0] < 1 or cps[-1] > self.params.n_max:
            raise ParameterError(f"checkpoints must lie in [1, n_max={self.params.n_max}]")
        for s in stats:
            kind, x = _parse_statistic(s)
            scaled = kind in _REGIME_SCALED or kind == "marginal"
            if scaled and self.params.p == 0.5 and cps[0] < 2:
                raise RegimeError(f"{s}: critical scaling needs n >= 2")

    @property
    def statistics(self) -> tuple[str, ...]:
        return (self.statistic,) if isinstance(self.statistic, str) else self.statistic

    def seed(self, index: int) -> int:
        return replicate_seed(self.master_seed, index)


def _walk_xi(plan: McPlan, values: np.ndarray) -> np.ndarray:
    from .walks import StepSpec

    spec = plan.step_spec if plan.step_spec is not None else StepSpec.plus_minus_one()
    return spec.steps(values)


def _evaluate(plan: McPlan, state) -> dict[str, np.ndarray]:
    n = state.step
    p = plan.params.p
    counts = state.counts
    values = state.values
    out = {}
    for name in plan.statistics:
        kind, x = _parse_statistic(name)
        if kind == "s2":
            v = float(state.s2)
        elif kind == "sum_sq_scaled":
            v = float(state.s2) / float(n) ** (2 * p)
        elif kind == "max_cluster":
            v = float(counts.max())
        elif kind == "innovations":
            v = float(state.innovations)
        elif kind == "histogram":
            h = np.bincount(counts, minlength=plan.k_max + 1)[1:plan.k_max + 1]
            v = h / ((1.0 - p) * n)
        elif kind == "sup_scaled":
            v = sup_norm(path_from_arrays(values, counts, n, RegimeSpec(p).scale(n)))
        elif kind == "grid_sup_scaled":
            v = grid_sup(values, counts, RegimeSpec(p).scale(n), plan.grid_size)
        elif kind == "sup_lln":
            v = sup_norm(path_from_arrays(values, counts, n, float(n)))
        elif kind == "marginal":
            v = (float(np.sum(counts[values <= x])) - n * x) / RegimeSpec(p).scale(n)
        elif kind == "walk_endpoint":
            v = float(np.dot(counts, _walk_xi(plan, values)))
        out[name] = np.atleast_1d(np.asarray(v, dtype=np.float64))
    return out


def run_replicate(plan: McPlan, index: int) -> dict[str, np.ndarray]:
    """One replicate: ``{statistic: array (n_checkpoints, width)}``."""
    params = replace(plan.params, n_max=plan.checkpoints[-1], seed=plan.seed(index))
    rows: dict[str, list] = {s: [] for s in plan.statistics}
    for state in iter_checkpoints(init(params), plan.checkpoints):
        for name, v in _evaluate(plan, state).items():
            rows[name].append(v)
    return {s: np.stack(v) for s, v in rows.items()}


@dataclass(eq=False)
class McSummary:
    """Samples of one or more statistics, indexed ``[replicate, checkpoint, component]``.

    Replicates ``start .. start + count - 1`` of the plan are stored in order.
    """

    statistics: tuple[str, ...]
    checkpoints: tuple[int, ...]
    samples: dict[str, np.ndarray] = field(repr=False)
    start: int = 0
    wall_time: float = 0.0

    @property
    def count(self) -> int:
        return int(next(iter(self.samples.values())).shape[0])

    def _get(self, statistic: Optional[str]) -> np.ndarray:
        return self.samples[statistic or self.statistics[0]]

    def values(self, statistic: Optional[str] = None, checkpoint_index: int = -1) -> np.ndarray:
        """Samples at one checkpoint; scalar statistics come back 1-d."""
        arr = self._get(statistic)[:, checkpoint_index, :]
        return arr[:, 0] if arr.shape[1] == 1 else arr

    def mean(self, statistic: Optional[str] = None) -> np.ndarray:
        return self._squeeze(np.mean(self._get(statistic), axis=0))

    def variance(self, statistic: Optional[str] = None) -> np.ndarray:
        arr = self._get(statistic)
        if arr.shape[0] < 2:
            return self._squeeze(np.zeros(arr.shape[1:]))
        return self._squeeze(np.var(arr, axis=0, ddof=1))

    def standard_error(self, statistic: Optional[str] = None) -> np.ndarray:
        return np.sqrt(self.variance(statistic) / self.count)

    def sorted_samples(self, statistic: Optional[str] = None, checkpoint_index: int = -1) -> np.ndarray:
        return np.sort(self.values(statistic, checkpoint_index), axis=0)

    @staticmethod
    def _squeeze(a: np.ndarray) -> np.ndarray:
        return a[:, 0] if a.ndim == 2 and a.shape[1] == 1 else a

    def fingerprint(self) -> bytes:
        """Bytes identifying the samples exactly (wall time excluded)."""
        parts = [repr((self.statistics, self.checkpoints, self.start)).encode()]
        parts += [self.samples[s].tobytes() for s in self.statistics]
        return b"".join(parts)

    def merge(self, other: "McSummary") -> "McSummary":
        """Concatenate two summaries of adjacent replicate ranges, in index order."""
        a, b = (self, other) if self.start <= other.start else (other, self)
        if a.statistics != b.statistics or a.checkpoints != b.checkpoints:
            raise ConsistencyError("summaries come from different plans")
        if a.start + a.count != b.start:
            raise ConsistencyError("replicate ranges must be adjacent and disjoint")
        samples = {s: np.concatenate([a.samples[s], b.samples[s]]) for s in a.statistics}
        return McSummary(a.statistics, a.checkpoints, samples, a.start, a.wall_time + b.wall_time)


def run_plan(plan: McPlan, workers: int = 1, start: int = 0, stop: Optional[int] = None) -> McSummary:
    """Run replicates ``start..stop-1`` (all of them by default).

    With ``workers > 1`` replicates run on a thread pool (the engine kernel
    releases the GIL); results are written by replicate index, so the summary
    does not depend on ``workers``.
    """
    stop = plan.replicates if stop is None else stop
    if not 0 <= start < stop <= plan.replicates:
        raise ParameterError(f"bad replicate range [{start}, {stop})")
    t0 = time.perf_counter()
    indices = range(start, stop)
    if workers <= 1:
        results = [run_replicate(plan, r) for r in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: run_replicate(plan, r), indices))
    samples = {s: np.stack([res[s] for res in results]) for s in plan.statistics}
    return McSummary(plan.statistics, plan.checkpoints, samples, start, time.perf_counter() - t0)


# --------------------------------------------------------------- statistics

def growth_exponent(summary_or_ns, means=None) -> float:
    """Least-squares slope of ``log(mean)`` against ``log(n)``.

    Accepts an :class:`McSummary` (first statistic) or explicit ``ns, means``.
    """
    if isinstance(summary_or_ns, McSummary):
        ns = np.asarray(summary_or_ns.checkpoints, dtype=np.float64)
        means = np.asarray(summary_or_ns.mean(), dtype=np.float64)
    else:
        ns = np.asarray(summary_or_ns, dtype=np.float64)
        means = np.asarray(means, dtype=np.float64)
    if ns.size < 4 or ns.max() / ns.min() < 100:
        raise ParameterError("need at least 4 checkpoints spanning two decades")
    if np.any(means <= 0):
        raise ParameterError("growth_exponent needs positive means")
    x = np.log(ns)
    y = np.log(means)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


class KsResult(NamedTuple):
    distance: float
    p_value: float


def two_sample_ks(a, b) -> KsResult:
    """Two-sample Kolmogorov-Smirnov distance and asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    na, nb = a.size, b.size
    if na == 0 or nb == 0:
        raise ParameterError("two_sample_ks needs nonempty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / na
    fb = np.searchsorted(b, pts, side="right") / nb
    d = float(np.max(np.abs(fa - fb)))
    return KsResult(d, float(kolmogorov_sf(d * math.sqrt(na * nb / (na + nb)))))


# ------------------------------------------------------------------ reports

@dataclass
class Report:
    """Outcome of one check; ``to_dict`` gives the documented JSON layout."""

    test: str
    params: dict
    statistic: str
    estimate: object
    target: object
    tolerance: object
    passed: bool
    seeds: dict
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"test": self.test, "params": self.params, "statistic": self.statistic,
                "estimate": to_jsonable(self.estimate), "target": to_jsonable(self.target),
                "tolerance": to_jsonable(self.tolerance), "pass": bool(self.passed),
                "seeds": self.seeds, "wall_time": self.wall_time,
                "details": to_jsonable(self.details)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.test}: estimate={_short(self.estimate)} target={_short(self.target)} tol={_short(self.tolerance)}"


def to_jsonable(v):
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return to_jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else str(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_short(x)}" for k, x in v.items()) + "}"
    return str(v)


def _plan(p, checkpoints, replicates, statistic, seed, **kw) -> McPlan:
    return McPlan(ReinforcementParams(p, max(checkpoints), 0), replicates,
                  tuple(checkpoints), statistic, seed, **kw)


# ------------------------------------------------------------------- checks

def moment_check(p: float, checkpoints: Sequence[int], replicates: int, seed: int,
                 workers: int = 1, n_se: float = 4.0) -> Report:
    """Monte Carlo mean of S^2(n) against its exact value at each checkpoint."""
    t0 = time.perf_counter()
    summary = run_plan(_plan(p, checkpoints, replicates, "s2", seed), workers)
    means = summary.mean()
    ses = summary.standard_error()
    targets = np.array([oracles.expected_s2(p, n) for n in checkpoints])
    # S^2(1) = 1 and S^2(2) in {2, 4}: a zero SE means the mean must match exactly.
    ok = np.abs(means - targets) <= n_se * ses + 1e-9 * targets
    return Report("moment_oracle", {"p": p, "checkpoints": list(checkpoints), "replicates": replicates},
                  "s2", means.tolist(), targets.tolist(), f"{n_se:g} SE", bool(ok.all()),
                  {"master_seed": seed}, time.perf_counter() - t0,
                  {"standard_errors": ses.tolist(), "z": ((means - targets) / np.where(ses > 0, ses, 1)).tolist()})


def growth_check(p: float, checkpoints: Sequence[int], replicates: int, seed: int,
                 expected: float, tolerance: float = 0.05, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    summary = run_plan(_plan(p, checkpoints, replicates, "s2", seed), workers)
    slope = growth_exponent(summary)
    return Report("growth_exponent", {"p": p, "checkpoints": list(checkpoints), "replicates": replicates},
                  "slope of log E[S2] vs log n", slope, expected, tolerance,
                  abs(slope - expected) <= tolerance, {"master_seed": seed},
                  time.perf_counter() - t0, {"means": summary.mean().tolist()})


def critical_s2_check(n: int, replicates: int, seed: int, tolerance: float = 0.15,
                      workers: int = 1) -> Report:
    """Mean of S^2(n) / (n log n) at p = 1/2 against 1."""
    t0 = time.perf_counter()
    summary = run_plan(_plan(0.5, [n], replicates, "s2", seed), workers)
    ratio = summary.values() / (n * math.log(n))
    est = float(ratio.mean())
    return Report("critical_s2", {"p": 0.5, "n": n, "replicates": replicates},
                  "mean S2/(n ln n)", est, 1.0, tolerance, abs(est - 1.0) <= tolerance,
                  {"master_seed": seed}, time.perf_counter() - t0,
                  {"standard_error": float(ratio.std(ddof=1) / math.sqrt(replicates)),
                   "exact_mean_ratio": oracles.expected_s2(0.5, n) / (n * math.log(n))})


def donsker_check(p: float, n: int, replicates: int, seed: int, grid_size: int = DEFAULT_GRID,
                   workers: int = 1, floor: float = REJECTION_FLOOR,
                   sum_tolerance: float = 0.05) -> Report:
    """Regime-dispatched distributional check of the rescaled empirical process.

    Below and at p = 1/2 the grid sup of the rescaled path (times
    ``sqrt(1-2p)`` below 1/2) is compared with grid sups of simulated
    Brownian bridges by a two-sample KS test.  Above 1/2 two scalar
    consequences are tested: the mean of ``sum_j (N_j/n^p)^2`` against
    ``1/((2p-1) Gamma(2p))`` and the variance at x = 1/2 of the path
    rescaled by ``n^{-p}`` against a quarter of that constant.
    """
    t0 = time.perf_counter()
    regime = RegimeSpec(p).regime
    params = {"p": p, "n": n, "replicates": replicates, "grid_size": grid_size, "regime": regime}
    if regime != "supercritical":
        plan = _plan(p, [n], replicates, "grid_sup_scaled", seed, grid_size=grid_size)
        sups = run_plan(plan, workers).values()
        if regime == "subcritical":
            sups = sups * math.sqrt(1.0 - 2.0 * p)
        bridge_seed = child_seed(seed, "brownian-bridge")
        ref = brownian_bridge_grid_sups(replicates, grid_size, bridge_seed)
        ks = two_sample_ks(sups, ref)
        return Report(f"donsker_{regime}", params, "grid sup KS p-value", ks.p_value, floor,
                      "p_value >= floor", ks.p_value >= floor,
                      {"master_seed": seed, "bridge_seed": bridge_seed}, time.perf_counter() - t0,
                      {"ks_distance": ks.distance, "median_scaled_sup": float(np.median(sups)),
                       "median_bridge_sup": float(np.median(ref))})
    plan = _plan(p, [n], replicates, ("sum_sq_scaled", "marginal(0.5)"), seed)
    summary = run_plan(plan, workers)
    target = oracles.sumbeta_constant(p)
    sq = summary.values("sum_sq_scaled")
    marg = summary.values("marginal(0.5)")
    sq_mean = float(sq.mean())
    var_half = float(np.mean(marg**2))  # the marginal has mean zero exactly
    var_se = float(np.std(marg**2, ddof=1) / math.sqrt(replicates))
    ok_sum = abs(sq_mean / target - 1.0) <= sum_tolerance
    ok_var = abs(var_half - 0.25 * target) <= 4.0 * var_se
    return Report("donsker_supercritical", params, "mean sum (N_j/n^p)^2", sq_mean, target,
                  sum_tolerance, ok_sum and ok_var, {"master_seed": seed}, time.perf_counter() - t0,
                  {"sum_sq_standard_error": float(sq.std(ddof=1) / math.sqrt(replicates)),
                   "marginal_half_variance": var_half, "marginal_target": 0.25 * target,
                   "marginal_standard_error": var_se, "marginal_pass": ok_var, "sum_pass": ok_sum})


def yule_frequency_check(p: float, n: int, replicates: int, k_max: int, seed: int,
                         n_se: float = 4.0, bias_allowance: Optional[float] = None,
                         workers: int = 1) -> Report:
    """Observed size-k cluster frequencies against the Yule-Simon pmf.

    The allowed gap per k is ``n_se`` standard errors plus ``bias_allowance``
    (default ``2/n``), the order of the finite-n bias of the mean frequency.
    """
    if n < 10**5:
        raise ParameterError("yule_frequency_check needs n >= 10**5")
    t0 = time.perf_counter()
    allowance = 2.0 / n if bias_allowance is None else bias_allowance
    plan = _plan(p, [n], replicates, ("histogram", "innovations"), seed, k_max=k_max)
    summary = run_plan(plan, workers)
    freq = summary.values("histogram")
    means = freq.mean(axis=0)
    ses = freq.std(axis=0, ddof=1) / math.sqrt(replicates)
    targets = oracles.yule_simon_pmf(np.arange(1, k_max + 1), p)
    ok_k = np.abs(means - targets) <= n_se * ses + allowance
    total = float(means.sum())
    total_slack = 4.0 * math.sqrt(p / ((1 - p) * n * replicates)) + 1.0 / n
    ok_total = total <= 1.0 + total_slack
    return Report("yule_simon_frequencies", {"p": p, "n": n, "replicates": replicates, "k_max": k_max},
                  "C_k(n)/((1-p)n)", means.tolist(), targets.tolist(),
                  f"{n_se:g} SE + {allowance:.3g}", bool(ok_k.all() and ok_total),
                  {"master_seed": seed}, time.perf_counter() - t0,
                  {"standard_errors": ses.tolist(), "per_k_pass": ok_k.tolist(),
                   "sum_observed": total, "sum_bound": 1.0 + total_slack})


def glivenko_cantelli_check(p: float, checkpoints: Sequence[int], replicates: int, seed: int,
                            workers: int = 1) -> Report:
    """Median exact sup of the path normalized by n must fall strictly, ending below half."""
    if len(checkpoints) < 3:
        raise ParameterError("need at least 3 checkpoints")
    t0 = time.perf_counter()
    summary = run_plan(_plan(p, checkpoints, replicates, "sup_lln", seed), workers)
    samples = summary.samples["sup_lln"][:, :, 0]
    medians = np.median(samples, axis=0)
    decreasing = bool(np.all(np.diff(medians) < 0))
    halved = bool(medians[-1] < 0.5 * medians[0])
    bounded = bool(np.all(samples <= 1.0))
    return Report("glivenko_cantelli", {"p": p, "checkpoints": list(checkpoints), "replicates": replicates},
                  "median sup|path|/n", medians.tolist(), "strictly decreasing, last < first/2",
                  None, decreasing and halved and bounded, {"master_seed": seed},
                  time.perf_counter() - t0, {"decreasing": decreasing, "halved": halved,
                                             "all_at_most_one": bounded})


def max_cluster_check(n: int, replicates: int, seed: int, p: float = 0.5,
                      etas: Sequence[float] = (0.5, 1.0, 2.0), workers: int = 1) -> Report:
    """Tail of the largest cluster on the ``sqrt(n log n)`` scale at p = 1/2.

    Estimates ``P(max_j N_j(m) > eta sqrt(m log m))`` at ``m = n/100`` and
    ``m = n``; passes when, for every eta, the estimate does not increase
    and strictly decreases whenever it was positive.
    """
    if p != 0.5:
        raise RegimeError("max_cluster_check is defined at p = 1/2 only")
    t0 = time.perf_counter()
    small = max(2, n // 100)
    summary = run_plan(_plan(p, [small, n], replicates, ("max_cluster", "s2"), seed), workers)
    mx = summary.samples["max_cluster"][:, :, 0]
    probs = {}
    ok = True
    for eta in etas:
        est = [float(np.mean(mx[:, i] > eta * math.sqrt(m * math.log(m)))) for i, m in enumerate((small, n))]
        probs[str(eta)] = est
        ok &= est[1] < est[0] if est[0] > 0 else est[1] == 0.0
    ok &= bool(np.all(mx <= np.array([small, n])))
    s2_ratio = float(np.mean(summary.samples["s2"][:, 1, 0]) / (n * math.log(n)))
    return Report("max_cluster_critical", {"p": p, "n": n, "n_small": small, "replicates": replicates},
                  "P(max N_j > eta sqrt(n log n))", probs, "decreasing in n", None, bool(ok),
                  {"master_seed": seed}, time.perf_counter() - t0,
                  {"mean_s2_over_nlogn": s2_ratio})


def m3_bound_check(n: int, replicates: int, seed: int, workers: int = 1) -> Report:
    """Monte Carlo ``E[N_1(n)^3]`` at p = 1/2 against the stored third-moment bound."""
    t0 = time.perf_counter()
    params = ReinforcementParams(0.5, n, 0)
    cubes = []
    for r in range(replicates):
        state = init(replace(params, seed=replicate_seed(seed, r)))
        for st in iter_checkpoints(state, [n]):
            cubes.append(float(st.counts[0]) ** 3)
    est = float(np.mean(cubes))
    bound = oracles.moment_bound_m3(1, n)
    se = float(np.std(cubes, ddof=1) / math.sqrt(replicates))
    return Report("m3_bound", {"p": 0.5, "n": n, "replicates": replicates}, "E[N_1(n)^3]",
                  est, bound, "estimate <= bound", est <= bound, {"master_seed": seed},
                  time.perf_counter() - t0, {"standard_error": se})


def supercritical_sum_check(p: float, n: int, replicates: int, seed: int,
                            tolerance: float = 0.05, workers: int = 1) -> Report:
    """Mean of ``sum_j (N_j(n)/n^p)^2`` against ``1/((2p-1) Gamma(2p))``."""
    t0 = time.perf_counter()
    target = oracles.sumbeta_constant(p)
    sq = run_plan(_plan(p, [n], replicates, "sum_sq_scaled", seed), workers).values()
    est = float(sq.mean())
    return Report("supercritical_sum_squares", {"p": p, "n": n, "replicates": replicates},
                  "mean sum (N_j/n^p)^2", est, target, tolerance,
                  abs(est / target - 1.0) <= tolerance, {"master_seed": seed},
                  time.perf_counter() - t0,
                  {"standard_error": float(sq.std(ddof=1) / math.sqrt(replicates)),
                   "exact_finite_n_mean": oracles.expected_s2(p, n) / float(n) ** (2 * p)})
