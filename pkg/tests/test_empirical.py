import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reinforced_ep import ConsistencyError, ParameterError, simulate, snapshot
from reinforced_ep.empirical import (RegimeSpec, build_path, evaluate_grid, grid_sup, grid_values,
                                     path_from_arrays, scaled_path, sup_norm, uniform_grid)
from reinforced_ep.engine import cluster_values
from reinforced_ep.rng import replicate_seed


def test_two_cluster_example():
    path = build_path([(0.5, 1), (0.5, 1)], 2)
    assert path(0.25) == pytest.approx(-0.5)
    assert sup_norm(path) == pytest.approx(1.0)
    one = build_path([(0.5, 1)], 1)
    assert one(0.25) == pytest.approx(-0.25)
    assert sup_norm(one) == pytest.approx(0.5)
    assert evaluate_grid(one, 3) == [(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)]


def test_normalized_path():
    path = build_path([(0.2, 2), (0.7, 1)], 3, norm=math.sqrt(3))
    assert path(0.5) == pytest.approx((2 - 1.5) / math.sqrt(3))
    assert sup_norm(path) * math.sqrt(3) == pytest.approx(1.4)


def test_duplicate_locations_merge():
    path = build_path([(0.3, 1), (0.3, 2), (0.9, 1)], 4)
    assert path.locations.tolist() == [0.3, 0.9]
    assert path.weights.tolist() == [3.0, 1.0]


@pytest.mark.parametrize("clusters,n", [([(0.5, 1)], 2), ([(1.5, 1)], 1), ([(0.5, 0), (0.2, 1)], 1)])
def test_inconsistent_clusters(clusters, n):
    with pytest.raises(ConsistencyError):
        build_path(clusters, n)


def test_bad_norm_and_grid():
    with pytest.raises(ParameterError):
        build_path([(0.5, 1)], 1, norm=0.0)
    with pytest.raises(ParameterError):
        uniform_grid(1)


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.05, 0.95), n=st.integers(1, 2000), seed=st.integers(0, 2**64 - 1),
       m=st.integers(2, 300))
def test_endpoints_and_grid_dominance(p, n, seed, m):
    s = simulate(p, n, seed)
    path = path_from_arrays(s.values, s.counts, n, math.sqrt(n))
    assert path(0.0) == 0.0 and path(1.0) == 0.0
    g = grid_values(s.values, s.counts, math.sqrt(n), m)
    assert g[0] == 0.0 and g[-1] == 0.0
    assert np.array_equal(g[1:-1], path(uniform_grid(m))[1:-1])
    assert grid_sup(s.values, s.counts, math.sqrt(n), m) <= sup_norm(path) + 1e-12


def test_exact_sup_against_fine_grid():
    s = simulate(0.3, 300, 4)
    path = build_path(cluster_values(s), 300)
    xs = np.linspace(0, 1, 10**6 + 1)
    brute = max(np.abs(path(xs)).max(), np.abs(path.left_limit(path.locations)).max())
    assert sup_norm(path) == pytest.approx(brute, rel=1e-12)
    assert sup_norm(path) >= np.abs(path(xs)).max()


def test_grid_sup_close_to_exact_sup():
    # Between grid points the path moves by at most n*h plus one cluster's jumps.
    n, m = 10**5, 2049
    s = simulate(0.25, n, 9)
    exact = sup_norm(path_from_arrays(s.values, s.counts, n, 1.0))
    gs = grid_sup(s.values, s.counts, 1.0, m)
    assert exact - gs <= n / (m - 1) + s.counts.max() + 1e-9


def test_increment_exchangeability_covariance():
    # Increments over a uniform partition are exchangeable: equal variances and
    # equal pairwise covariances, with zero total.
    n, reps, m = 2000, 4000, 4
    incs = np.empty((reps, m))
    for r in range(reps):
        s = simulate(0.6, n, replicate_seed(21, r))
        g = grid_values(s.values, s.counts, n ** 0.6, m + 1)
        incs[r] = np.diff(g)
    cov = np.cov(incs, rowvar=False)
    var = np.diag(cov)
    off = cov[~np.eye(m, dtype=bool)]
    assert var.max() / var.min() < 1.15
    assert off.max() - off.min() < 0.15 * var.mean()
    assert np.allclose(incs.sum(axis=1), 0.0, atol=1e-9)


@pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
def test_glivenko_cantelli_decay(p):
    meds = []
    for n in (10**3, 10**4, 10**5):
        sups = [sup_norm(path_from_arrays(*_arrays(p, n, r), n, float(n))) for r in range(40)]
        meds.append(np.median(sups))
    assert meds[0] > meds[1] > meds[2]


def _arrays(p, n, r):
    s = simulate(p, n, replicate_seed(1234, r))
    return s.values, s.counts


def test_regime_scales():
    assert RegimeSpec(0.25).regime == "subcritical"
    assert RegimeSpec(0.5).regime == "critical"
    assert RegimeSpec(0.75).regime == "supercritical"
    assert RegimeSpec(0.25).scale(100) == 10.0
    assert RegimeSpec(0.5).scale(100) == pytest.approx(math.sqrt(100 * math.log(100)))
    assert RegimeSpec(0.75).scale(16) == pytest.approx(8.0)
    with pytest.raises(ParameterError):
        RegimeSpec(0.5).scale(1)
    with pytest.raises(ParameterError):
        RegimeSpec(1.0)


def test_scaled_path_uses_regime_norm():
    s = simulate(0.75, 4096, 2)
    snap = snapshot(s)
    path = scaled_path(snap, cluster_values(s), RegimeSpec(0.75))
    assert path.norm == pytest.approx(4096 ** 0.75)
