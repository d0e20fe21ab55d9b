import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import betaln

from reinforced_ep import ParameterError, RegimeError, oracles
from reinforced_ep.engine import simulate
from reinforced_ep.rng import replicate_seed

mpmath.mp.dps = 40


def mp_expected_s2(p, n):
    p = mpmath.mpf(p)
    total = mpmath.fsum(mpmath.gamma(i) / mpmath.gamma(i + 2 * p) for i in range(1, n + 1))
    return mpmath.gamma(n + 2 * p) / mpmath.gamma(n) * total


@pytest.mark.parametrize("x", [0.5, 3.0, 29.9, 30.0, 31.7, 1e3, 1e6, 1e9, 1e12])
@pytest.mark.parametrize("a", [-0.4, 0.2, 0.5, 1.0, 1.5, 3.0])
def test_log_gamma_ratio_against_mpmath(x, a):
    want = float(mpmath.loggamma(mpmath.mpf(x) + mpmath.mpf(a)) - mpmath.loggamma(mpmath.mpf(x)))
    got = oracles.log_gamma_ratio(x, a)
    assert abs(got - want) <= 1e-13 * max(1.0, abs(want))


def test_log_gamma_ratio_domain():
    with pytest.raises(ParameterError):
        oracles.log_gamma_ratio(0.0, 1.0)
    with pytest.raises(ParameterError):
        oracles.log_gamma_ratio(0.5, -0.6)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.75, 0.9])
@pytest.mark.parametrize("n", [1, 2, 3, 64, 512, 5000])
def test_expected_s2_against_mpmath(p, n):
    want = float(mp_expected_s2(p, n))
    assert oracles.expected_s2(p, n) == pytest.approx(want, rel=1e-12)


def test_expected_s2_small_values():
    assert oracles.expected_s2(0.5, 1) == 1.0
    assert oracles.expected_s2(0.3, 2) == pytest.approx(2.6, rel=1e-14)
    # At p = 1/2 the mean is n times the n-th harmonic number.
    assert oracles.expected_s2(0.5, 4) == pytest.approx(25 / 3, rel=1e-14)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.95])
@pytest.mark.parametrize("n", [10**6 + 1, 3 * 10**6])
def test_closed_form_agrees_with_recursion_past_direct_limit(p, n):
    a = oracles.expected_s2(p, n)
    b = oracles.expected_s2(p, n, method="recursion")
    assert a == pytest.approx(b, rel=1e-10)


@pytest.mark.parametrize("p", [0.25, 0.75])
def test_closed_form_in_gamma_functions(p):
    # (n - Gamma(n+2p)/(Gamma(n) Gamma(2p))) / (1 - 2p), an independent route.
    for n in (10, 10**4, 10**8, 10**9):
        ratio = math.exp(oracles.log_gamma_ratio(float(n), 2 * p) - math.lgamma(2 * p))
        want = (n - ratio) / (1 - 2 * p)
        assert oracles.expected_s2(p, n) == pytest.approx(want, rel=1e-9)


def test_critical_mean_is_n_harmonic():
    n = 10**9
    h = float(mpmath.harmonic(n))
    assert oracles.expected_s2(0.5, n) == pytest.approx(n * h, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(0.01, 0.99), n=st.integers(2, 400))
def test_moment_table_satisfies_recursion(p, n):
    table = oracles.moment_table(p, n)
    assert table.check_recursion(rtol=1e-10)
    assert table.entries[1] == pytest.approx(1.0, rel=1e-14)
    assert np.all(np.diff(table.as_array()) > 0)


def test_moment_table_methods_agree():
    a = oracles.moment_table(0.8, 3000).as_array()
    b = oracles.moment_table(0.8, 3000, method="recursion").as_array()
    assert np.allclose(a, b, rtol=1e-11, atol=0)
    with pytest.raises(ParameterError):
        oracles.moment_table(0.8, 10, method="simpson")


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_exact_recursion_matches_fraction_enumeration(p):
    for n in range(1, 6):
        law = oracles.exact_partition_law(n, p)
        assert sum(law.values()) == 1
        mean = sum(q * sum(k * k for k in sizes) for sizes, q in law.items())
        assert mean == oracles.exact_expected_s2(n, p)
        assert float(mean) == pytest.approx(oracles.expected_s2(p, n), rel=1e-13)


def test_partition_law_small_cases():
    half = Fraction(1, 2)
    assert oracles.exact_partition_law(2, half) == {(2,): half, (1, 1): half}
    law = oracles.exact_partition_law(4, half)
    assert law[(4,)] == Fraction(1, 8)
    assert law[(1, 1, 1, 1)] == Fraction(1, 8)
    assert oracles.exact_expected_s2(3, half) == Fraction(11, 2)


def test_yule_simon_values():
    assert oracles.yule_simon_pmf(1, 0.5) == pytest.approx(2 / 3, rel=1e-14)
    assert oracles.yule_simon_pmf(2, 0.5) == pytest.approx(1 / 6, rel=1e-14)
    k = np.arange(1, 200)
    for p in (0.2, 0.5, 0.8):
        want = np.exp(betaln(k, 1 + 1 / p)) / p
        assert np.allclose(oracles.yule_simon_pmf(k, p), want, rtol=1e-12, atol=0)
    with pytest.raises(ParameterError):
        oracles.yule_simon_pmf(0, 0.5)


def test_yule_simon_sums_to_one():
    k = np.arange(1, 10**6 + 1)
    assert oracles.yule_simon_pmf(k, 0.5).sum() == pytest.approx(1.0, abs=1e-11)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.4])
def test_cluster_second_moment_series(p):
    # sum_k k^2 c_k with c_k the normalized cluster counts equals 1/(1 - 2p).
    s = oracles.cluster_second_moment_series(p, terms=10**7)
    assert s.total == pytest.approx(1 / (1 - 2 * p), rel=1e-6)
    assert s.tail >= 0


def test_series_regime():
    with pytest.raises(RegimeError):
        oracles.cluster_second_moment_series(0.5)
    with pytest.raises(RegimeError):
        oracles.sumbeta_constant(0.5)


def test_sumbeta_constant_values():
    assert oracles.sumbeta_constant(0.75) == pytest.approx(4 / math.sqrt(math.pi), rel=1e-14)
    want = 1 / ((2 * mpmath.mpf("0.999") - 1) * mpmath.gamma(2 * mpmath.mpf("0.999")))
    assert oracles.sumbeta_constant(0.999) == pytest.approx(float(want), rel=1e-13)
    assert oracles.sumbeta_constant(0.999) == pytest.approx(1.00285, abs=1e-5)


@pytest.mark.parametrize("p", [0.6, 0.75, 0.9])
def test_sumbeta_partial_approaches_constant(p):
    # The tail beyond K is about K^(1-2p) / (2p - 1).
    K = 10**6
    gap = oracles.sumbeta_constant(p) - oracles.sumbeta_partial(p, K)
    assert gap > 0
    assert gap == pytest.approx(K ** (1 - 2 * p) / (2 * p - 1), rel=1e-3)


def test_expected_nj():
    assert oracles.expected_nj(1, 1, 0.3) == (pytest.approx(1.0), True)
    assert oracles.expected_nj(1, 2, 0.5).value == pytest.approx(1.5)
    m = oracles.expected_nj(1, 10**6, 0.5)
    assert m.exact and m.value == pytest.approx(math.sqrt(10**6) / math.gamma(1.5), rel=1e-5)
    bound = oracles.expected_nj(5, 100, 0.5)
    assert not bound.exact and bound.value < m.value
    with pytest.raises(ParameterError):
        oracles.expected_nj(3, 2, 0.5)


def test_cluster_moments_first_moment_matches_gamma_form():
    m1, m2, m3 = oracles.cluster_moments_from_birth(1, 1000, 0.5)
    assert m1 == pytest.approx(oracles.expected_nj(1, 1000, 0.5).value, rel=1e-12)
    assert m1 <= m2 <= m3


def test_m3_constant_file_and_bound():
    c = oracles.load_m3_constant()
    assert c["p"] == 0.5 and c["b"] > 1
    # A smaller grid can only give a smaller supremum.
    small = oracles.calibrate_m3_constant(j_max=16, n_max=2**12)
    assert small["b"] <= c["b"]
    assert oracles.moment_bound_m3(1, 100) == pytest.approx(c["b"] * 1000)
    with pytest.raises(RegimeError):
        oracles.moment_bound_m3(1, 100, p=0.6)
    for j in (1, 3, 10):
        for n in (j, 50, 4000):
            assert oracles.cluster_moments_from_birth(j, n)[2] <= oracles.moment_bound_m3(j, n) * (1 + 1e-12)


def test_m3_bound_holds_in_simulation():
    n, reps = 10**4, 2000
    cubes = np.array([float(simulate(0.5, n, replicate_seed(31, r)).counts[0]) ** 3 for r in range(reps)])
    assert cubes.mean() <= oracles.moment_bound_m3(1, n)
