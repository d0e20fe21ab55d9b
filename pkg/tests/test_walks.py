import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reinforced_ep import ParameterError, ReinforcementParams, oracles, simulate
from reinforced_ep.harness import McPlan, run_plan
from reinforced_ep.walks import StepSpec, regime_report, run_walk, walk_path


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0.05, 0.95), n=st.integers(1, 3000), seed=st.integers(0, 2**64 - 1))
def test_elephant_walk_parity_and_bound(p, n, seed):
    spec = StepSpec.plus_minus_one()
    path = walk_path(simulate(p, n, seed), spec)
    assert np.all(np.abs(np.diff(np.concatenate(([0.0], path)))) == 1.0)
    assert np.all((path + np.arange(1, n + 1)) % 2 == 0)
    assert np.all(np.abs(path) <= np.arange(1, n + 1))


def test_endpoint_identity():
    # The endpoint computed from clusters equals the step-by-step sum.
    spec = StepSpec.from_measure([0.2, 0.7], [1.0, 0.5])
    s = simulate(0.6, 4000, 3)
    end = run_walk(ReinforcementParams(0.6, 4000, 3), spec, [4000])[0][1]
    assert end == pytest.approx(walk_path(s, spec)[-1], abs=1e-8)
    assert np.max(np.abs(spec.steps(s.values))) <= spec.bound + 1e-12


def test_from_measure_moments():
    spec = StepSpec.from_measure([0.2, 0.7], [1.0, 0.5])
    u = np.random.default_rng(0).random(10**6)
    x = spec.tail(u)
    assert spec.mean == pytest.approx(0.55)
    assert x.mean() == pytest.approx(spec.mean, abs=3e-3)
    assert x.var() == pytest.approx(spec.variance, rel=1e-2)
    pm = StepSpec.plus_minus_one()
    assert (pm.mean, pm.variance, pm.bound) == (1.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        StepSpec.from_measure([1.5], [1.0])


@pytest.mark.parametrize("p,target", [(0.25, 2.0), (0.5, 1.0), (0.75, 4 / math.sqrt(math.pi))])
def test_regime_report_targets(p, target):
    r = regime_report(p, StepSpec.plus_minus_one(), 2000, 50, 1)
    assert r.target == pytest.approx(target)
    assert r.test.startswith("walk_")
    assert ("normality_pass" in r.details) == (p <= 0.5)


@pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
def test_endpoint_second_moment_is_exact(p):
    # Steps are independent with mean zero, so E[S(n)^2] = Var(xi) E[S^2(n)].
    n, reps = 4000, 4000
    plan = McPlan(ReinforcementParams(p, n, 0), reps, (n,), "walk_endpoint", 44)
    sq = run_plan(plan).values() ** 2
    target = oracles.expected_s2(p, n)
    assert abs(sq.mean() - target) < 4 * sq.std(ddof=1) / math.sqrt(reps)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.4])
def test_subcritical_variance_across_p(p):
    # Var(S(n))/n is E[S^2(n)]/n exactly; its gap to 1/(1-2p) is n^(2p-1)/Gamma(2p)
    # in relative terms, which is still 5% at p = 0.4, n = 10^6.
    n, reps = 20000, 3000
    r = regime_report(p, StepSpec.plus_minus_one(), n, reps, 90, tolerance=1.0)
    finite_n = oracles.expected_s2(p, n) / n
    assert abs(r.estimate / finite_n - 1) < 4 * math.sqrt(2 / reps)
    gap = 1 - finite_n * (1 - 2 * p)
    assert gap == pytest.approx(n ** (2 * p - 1) / math.gamma(2 * p), rel=1e-3)
