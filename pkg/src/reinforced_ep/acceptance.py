"""The acceptance suite: eleven numbered criteria, each a deterministic check.

Every criterion draws its randomness from ``criterion_seed(k)``, a fixed
function of a single master seed, so reruns reproduce the same verdicts.
The ``full`` profile uses the stated sizes; ``quick`` shrinks n and R so the
whole suite runs in about a minute.  A shrunken statistical check has less
power, not a looser tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import oracles
from .empirical import grid_values, path_from_arrays
from .engine import ReinforcementParams, advance_to, init, iter_checkpoints, snapshot
from .errors import ParameterError
from .harness import (McPlan, Report, critical_s2_check, glivenko_cantelli_check,
                      growth_check, moment_check, run_plan, supercritical_sum_check,
                      donsker_check, yule_frequency_check)
from .limits import (brownian_bridge_grid_sups, estimate_xp, grid_sup_correction,
                     kolmogorov_cdf, sample_bp_bridge, sample_brownian_bridge)
from .rng import child_seed
from .walks import StepSpec, regime_report

MASTER_SEED = 20261016
PROFILES = ("quick", "full")


def criterion_seed(k: int) -> int:
    return child_seed(MASTER_SEED, f"criterion-{k}")


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    run: Callable[[str, int], Report]


def _combine(name: str, reports: list[Report], t0: float, statistic: str) -> Report:
    """Fold several sub-checks into one verdict that passes only if all do."""
    return Report(name, {"checks": len(reports)}, statistic,
                  [r.estimate for r in reports], [r.target for r in reports],
                  [r.tolerance for r in reports], all(r.passed for r in reports),
                  {"master_seed": reports[0].seeds.get("master_seed") if reports else None},
                  time.perf_counter() - t0, {"checks": [r.to_dict() for r in reports]})


def _pick(profile: str, quick, full):
    if profile not in PROFILES:
        raise ParameterError(f"profile must be one of {PROFILES}, got {profile!r}")
    return quick if profile == "quick" else full


# ---------------------------------------------------------------- criteria

def c1_moment_oracle(profile: str, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    seed = criterion_seed(1)
    reps = _pick(profile, 2000, 10**4)
    reports = [moment_check(p, [1, 2, 64, 512], reps, child_seed(seed, f"p={p}"), workers)
               for p in (0.1, 0.25, 0.5, 0.75, 0.9)]
    return _combine("c1_moment_oracle", reports, t0, "mean S2(n) within 4 SE of the exact value")


def c2_growth_exponents(profile: str, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    seed = criterion_seed(2)
    ns = _pick(profile, [10**2, 10**3, 10**4, 10**5], [10**3, 10**4, 10**5, 10**6])
    reps = _pick(profile, 100, 500)
    reports = [growth_check(p, ns, reps, child_seed(seed, f"p={p}"), expected, 0.05, workers)
               for p, expected in ((0.25, 1.0), (0.75, 1.5))]
    return _combine("c2_growth_exponents", reports, t0, "slope of log mean S2 against log n")


def c3_critical_growth(profile: str, workers: int = 1) -> Report:
    n = _pick(profile, 10**5, 10**6)
    reps = _pick(profile, 100, 200)
    return replace(critical_s2_check(n, reps, criterion_seed(3), 0.15, workers),
                   test="c3_critical_growth")


def c4_yule_frequencies(profile: str, workers: int = 1) -> Report:
    reps = _pick(profile, 50, 200)
    return replace(yule_frequency_check(0.5, 10**5, reps, 5, criterion_seed(4), workers=workers),
                   test="c4_yule_frequencies")


def c5_supercritical_constant(profile: str, workers: int = 1) -> Report:
    n = _pick(profile, 10**5, 10**6)
    reps = _pick(profile, 200, 500)
    return replace(supercritical_sum_check(0.75, n, reps, criterion_seed(5), 0.05, workers),
                   test="c5_supercritical_constant")


def c6_subcritical_donsker(profile: str, workers: int = 1) -> Report:
    n = _pick(profile, 10**4, 10**5)
    reps = _pick(profile, 500, 4000)
    return replace(donsker_check(0.25, n, reps, criterion_seed(6), workers=workers),
                   test="c6_subcritical_donsker")


def c7_critical_donsker(profile: str, workers: int = 1) -> Report:
    n = _pick(profile, 10**5, 10**6)
    reps = _pick(profile, 200, 2000)
    return replace(donsker_check(0.5, n, reps, criterion_seed(7), workers=workers),
                   test="c7_critical_donsker")


def c8_glivenko_cantelli(profile: str, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    seed = criterion_seed(8)
    reps = _pick(profile, 50, 200)
    reports = [glivenko_cantelli_check(p, [10**3, 10**4, 10**5], reps, child_seed(seed, f"p={p}"), workers)
               for p in (0.25, 0.5, 0.75)]
    return _combine("c8_glivenko_cantelli", reports, t0, "median sup|path|/n")


def c9_walk_regimes(profile: str, workers: int = 1) -> Report:
    """Variance of the rescaled elephant walk in each regime.

    The verdict uses the variance alone; the mean and normality sub-checks
    of each walk report are kept in the details.
    """
    t0 = time.perf_counter()
    seed = criterion_seed(9)
    spec = StepSpec.plus_minus_one()
    cases = _pick(profile,
                  [(0.25, 10**4, 2000), (0.5, 10**5, 500), (0.75, 10**5, 500)],
                  [(0.25, 10**5, 10**4), (0.5, 10**6, 2000), (0.75, 10**6, 4000)])
    reports = []
    for p, n, reps in cases:
        r = regime_report(p, spec, n, reps, child_seed(seed, f"p={p}"), workers)
        reports.append(replace(r, passed=bool(r.details["variance_pass"])))
    return _combine("c9_walk_regimes", reports, t0, "variance of the rescaled walk endpoint")


def c10_property_suites(profile: str, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    seed = criterion_seed(10)
    runs = _pick(profile, 50, 200)
    results = {
        "partition_identity": _prop_partition(seed, runs),
        "incremental_s2": _prop_incremental_s2(seed, runs),
        "bridge_endpoints": _prop_bridge_endpoints(seed, runs),
        "enumeration_oracle": _prop_enumeration(seed, _pick(profile, 2000, 20000)),
        "seed_determinism": _prop_determinism(seed),
        "merge_order_independence": _prop_merge(seed, workers),
    }
    return Report("c10_property_suites", {"runs": runs}, "exact properties",
                  results, {k: True for k in results}, "exact", all(results.values()),
                  {"master_seed": seed}, time.perf_counter() - t0, {})


def c11_bridge_self_test(profile: str, workers: int = 1) -> Report:
    """Grid sups of simulated bridges against the Kolmogorov law, DKW band.

    A grid sup sits below the continuous sup by about
    ``GRID_MAX_GAP * sqrt(h)`` for mesh ``h``; the sample is shifted up by
    that first-order amount before comparison.  The raw deviation is kept
    in the details.
    """
    t0 = time.perf_counter()
    seed = criterion_seed(11)
    count = _pick(profile, 2 * 10**4, 10**5)
    grid = 2048
    alpha = 1e-3
    sups = np.sort(brownian_bridge_grid_sups(count, grid, seed))
    eps = math.sqrt(math.log(2.0 / alpha) / (2.0 * count))
    shift = grid_sup_correction(grid)
    dev = _dkw_deviation(sups + shift)
    raw = _dkw_deviation(sups)
    return Report("c11_bridge_self_test", {"samples": count, "grid_size": grid, "alpha": alpha},
                  "sup |F_emp - K|", dev, 0.0, eps, dev <= eps, {"master_seed": seed},
                  time.perf_counter() - t0,
                  {"grid_shift": shift, "uncorrected_deviation": raw,
                   "uncorrected_pass": raw <= eps})


def _dkw_deviation(sorted_sample: np.ndarray) -> float:
    m = sorted_sample.size
    cdf = kolmogorov_cdf(sorted_sample)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


# ------------------------------------------------------ exact property checks

_PROPERTY_PS = (0.1, 0.3, 0.5, 0.7, 0.95)


def _property_states(seed: int, runs: int, label: str):
    for r in range(runs):
        p = _PROPERTY_PS[r % len(_PROPERTY_PS)]
        n = 1 + (r * 37) % 3000
        yield init(ReinforcementParams(p, n, child_seed(seed, f"{label}-{r}")))


def _prop_partition(seed: int, runs: int) -> bool:
    for state in _property_states(seed, runs, "partition"):
        for st in iter_checkpoints(state, sorted({1, max(1, state.params.n_max // 2), state.params.n_max})):
            counts = st.counts
            if int(counts.sum()) != st.step or np.any(counts < 1) or counts.size != st.innovations:
                return False
            assigned = np.bincount(st.step_cluster[:st.step], minlength=counts.size)
            if not np.array_equal(assigned, counts):
                return False
    return True


def _prop_incremental_s2(seed: int, runs: int) -> bool:
    for state in _property_states(seed, runs, "s2"):
        for st in iter_checkpoints(state, range(1, state.params.n_max + 1, 97)):
            if st.s2 != int(np.sum(st.counts.astype(np.int64) ** 2)):
                return False
        st = advance_to(state, state.params.n_max)
        if st.s2 != int(np.sum(st.counts.astype(np.int64) ** 2)):
            return False
    return True


def _prop_bridge_endpoints(seed: int, runs: int) -> bool:
    for r, state in enumerate(_property_states(seed, runs, "bridge")):
        st = advance_to(state, state.params.n_max)
        n = st.step
        path = path_from_arrays(st.values, st.counts, n, math.sqrt(n))
        if path(0.0) != 0.0 or path(1.0) != 0.0:
            return False
        g = grid_values(st.values, st.counts, math.sqrt(n), 2 + r % 50)
        if g[0] != 0.0 or g[-1] != 0.0:
            return False
        b = sample_brownian_bridge(2 + r % 50, child_seed(seed, f"bb-{r}")).values
        if b[0] != 0.0 or b[-1] != 0.0:
            return False
    xp = estimate_xp(ReinforcementParams(0.75, 10**4, child_seed(seed, "xp")))
    bp = sample_bp_bridge(xp, 33, child_seed(seed, "bp")).values
    return bool(bp[0] == 0.0 and bp[-1] == 0.0)


def _prop_enumeration(seed: int, runs: int) -> bool:
    """The exact law for n <= 4 is consistent with the exact mean and with the engine.

    Checks, with rational arithmetic: probabilities sum to one, E[S^2]
    under the law equals the recursion, and every simulated partition lies
    in the enumerated support.
    """
    for p in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(9, 10)):
        for n in range(1, 5):
            law = oracles.exact_partition_law(n, p)
            if sum(law.values()) != 1:
                return False
            mean = sum(prob * sum(k * k for k in sizes) for sizes, prob in law.items())
            if mean != oracles.exact_expected_s2(n, p):
                return False
            for r in range(runs // 20):
                st = advance_to(init(ReinforcementParams(float(p), n, child_seed(seed, f"enum-{p}-{n}-{r}"))), n)
                if tuple(snapshot(st).counts.tolist()) not in law:
                    return False
    return True


def _prop_determinism(seed: int) -> bool:
    for p in (0.25, 0.5, 0.75):
        a = advance_to(init(ReinforcementParams(p, 5000, seed)), 5000)
        b = advance_to(init(ReinforcementParams(p, 5000, seed)), 5000)
        if not (np.array_equal(a.counts, b.counts) and np.array_equal(a.values, b.values)
                and np.array_equal(a.step_cluster, b.step_cluster)):
            return False
    return True


def _prop_merge(seed: int, workers: int) -> bool:
    plan = McPlan(ReinforcementParams(0.5, 2000, 0), 24, (100, 2000), ("s2", "grid_sup_scaled"), seed,
                  grid_size=64)
    whole = run_plan(plan)
    parts = [run_plan(plan, start=a, stop=b) for a, b in ((0, 5), (5, 17), (17, 24))]
    left = parts[0].merge(parts[1]).merge(parts[2])
    right = parts[2].merge(parts[1].merge(parts[0]))
    threaded = run_plan(plan, workers=max(2, workers))
    return whole.fingerprint() == left.fingerprint() == right.fingerprint() == threaded.fingerprint()


CRITERIA = (
    Criterion(1, "exact moment oracle", c1_moment_oracle),
    Criterion(2, "growth exponents", c2_growth_exponents),
    Criterion(3, "critical growth", c3_critical_growth),
    Criterion(4, "Yule-Simon frequencies", c4_yule_frequencies),
    Criterion(5, "supercritical constant", c5_supercritical_constant),
    Criterion(6, "subcritical Donsker", c6_subcritical_donsker),
    Criterion(7, "critical Donsker", c7_critical_donsker),
    Criterion(8, "Glivenko-Cantelli", c8_glivenko_cantelli),
    Criterion(9, "walk regimes", c9_walk_regimes),
    Criterion(10, "property suites", c10_property_suites),
    Criterion(11, "Brownian bridge self-test", c11_bridge_self_test),
)


def run_criterion(number: int, profile: str = "full", workers: int = 1) -> Report:
    for c in CRITERIA:
        if c.number == number:
            return c.run(profile, workers)
    raise ParameterError(f"no criterion {number}")


def run_suite(profile: str = "quick", workers: int = 1,
              only: Optional[list[int]] = None, echo: Optional[Callable[[str], None]] = None) -> list[Report]:
    """Run the criteria in order; ``echo`` receives one status line per criterion."""
    _pick(profile, None, None)
    reports = []
    for c in CRITERIA:
        if only is not None and c.number not in only:
            continue
        r = c.run(profile, workers)
        reports.append(r)
        if echo is not None:
            echo(f"criterion {c.number:2d} ({c.name}): {r.line()} [{r.wall_time:.1f}s]")
    return reports
