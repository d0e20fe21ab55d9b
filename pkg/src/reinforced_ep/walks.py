"""Step-reinforced random walks driven by the same reinforcement runs.

Each cluster carries one step ``xi_j = tail(U_j) - mean`` computed from its
stored value ``U_j``, where ``tail(x) = m((x, 1])`` for a finite measure ``m``
on [0, 1].  The walk after ``n`` steps is ``sum_j N_j(n) xi_j``.  With
``m = 2 delta_{1/2}`` the steps are +-1 and this is the elephant random walk.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import oracles
from .empirical import RegimeSpec
from .engine import ReinforcementParams, init, iter_checkpoints
from .errors import ParameterError
from .harness import REJECTION_FLOOR, McPlan, Report, run_plan, two_sample_ks
from .rng import child_seed

PLUS_MINUS_ONE = "plus_minus_one"
FROM_MEASURE = "bounded_from_measure"

VARIANCE_TOLERANCE = {"subcritical": 0.05, "critical": 0.15, "supercritical": 0.10}


@dataclass(frozen=True)
class StepSpec:
    kind: str
    tail: Callable[[np.ndarray], np.ndarray]
    mean: float
    variance: float
    bound: float

    @classmethod
    def plus_minus_one(cls) -> "StepSpec":
        return cls(PLUS_MINUS_ONE, lambda u: np.where(np.asarray(u) < 0.5, 2.0, 0.0), 1.0, 1.0, 1.0)

    @classmethod
    def from_measure(cls, atoms: Sequence[float], masses: Sequence[float]) -> "StepSpec":
        """Steps from the discrete measure ``sum_i masses[i] delta_{atoms[i]}``.

        The variance is ``sum_{i,k} m_i m_k (a_i ^ a_k - a_i a_k)``.
        """
        a = np.asarray(atoms, dtype=np.float64)
        w = np.asarray(masses, dtype=np.float64)
        if a.shape != w.shape or a.size == 0:
            raise ParameterError("atoms and masses must be nonempty and of equal length")
        if np.any((a < 0) | (a > 1)) or np.any(w < 0):
            raise ParameterError("atoms must lie in [0, 1] and masses be nonnegative")
        mu = float(np.dot(w, a))
        var = float(w @ (np.minimum.outer(a, a) - np.outer(a, a)) @ w)
        bound = max(float(w.sum()) - mu, mu)

        def tail(u):
            u = np.asarray(u, dtype=np.float64)
            return (a[None, :] > u[..., None]).astype(np.float64) @ w

        return cls(FROM_MEASURE, tail, mu, var, bound)

    def steps(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(self.tail(values), dtype=np.float64) - self.mean


def run_walk(params: ReinforcementParams, spec: StepSpec, checkpoints: Iterable[int]) -> list[tuple[int, float]]:
    """``(n, S(n))`` at each checkpoint, with ``S(n) = sum_j N_j(n) xi_j``."""
    out = []
    for state in iter_checkpoints(init(params), checkpoints):
        xi = spec.steps(state.values)
        out.append((state.step, float(np.dot(state.counts, xi))))
    return out


def walk_path(state, spec: StepSpec) -> np.ndarray:
    """Per-step partial sums ``S(1), ..., S(n)`` accumulated step by step."""
    xi = spec.steps(state.values)
    return np.cumsum(xi[state.step_cluster[: state.step]])


def regime_report(p: float, spec: StepSpec, n: int, replicates: int, seed: int,
                  workers: int = 1, tolerance: float | None = None) -> Report:
    """Variance (and, for p <= 1/2, normality) of the rescaled walk endpoint.

    Targets: ``var/(1-2p)`` with norm ``sqrt(n)`` below 1/2, ``var`` with
    ``sqrt(n log n)`` at 1/2, ``var/((2p-1) Gamma(2p))`` with ``n^p`` above.
    """
    t0 = time.perf_counter()
    regime_spec = RegimeSpec(p)
    regime = regime_spec.regime
    norm = regime_spec.scale(n)
    if regime == "subcritical":
        target = spec.variance / (1.0 - 2.0 * p)
    elif regime == "critical":
        target = spec.variance
    else:
        target = spec.variance * oracles.sumbeta_constant(p)
    tol = VARIANCE_TOLERANCE[regime] if tolerance is None else tolerance

    plan = McPlan(ReinforcementParams(p, n, 0), replicates, (n,), "walk_endpoint", seed, step_spec=spec)
    raw = run_plan(plan, workers).values()
    scaled = raw / norm
    var = float(np.var(scaled, ddof=1))
    var_ok = abs(var / target - 1.0) <= tol
    mean_over_n = raw / n
    mean_se = float(np.std(mean_over_n, ddof=1) / math.sqrt(replicates))
    mean_ok = abs(float(mean_over_n.mean())) <= 4.0 * mean_se + 1e-12
    details = {"variance_pass": var_ok, "mean_over_n": float(mean_over_n.mean()),
               "mean_over_n_se": mean_se, "mean_pass": mean_ok, "norm": norm}
    seeds = {"master_seed": seed}
    passed = var_ok and mean_ok
    if regime != "supercritical":
        gauss_seed = child_seed(seed, "gaussian-reference")
        ref = np.random.default_rng(gauss_seed).normal(0.0, math.sqrt(target), replicates)
        ks = two_sample_ks(scaled, ref)
        details.update(ks_distance=ks.distance, ks_p_value=ks.p_value,
                       normality_pass=ks.p_value >= REJECTION_FLOOR)
        seeds["gaussian_seed"] = gauss_seed
        passed = passed and ks.p_value >= REJECTION_FLOOR
    return Report(f"walk_{regime}", {"p": p, "n": n, "replicates": replicates, "step_kind": spec.kind},
                  "variance of rescaled walk", var, target, tol, passed, seeds,
                  time.perf_counter() - t0, details)
