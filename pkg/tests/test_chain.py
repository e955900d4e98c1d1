"""Chain tests: semigroup, transition law, moments, stationarity, simulation.

Independent oracles: dense matrix exponentials of the tridiagonal generator
(scipy), truncated matrix-exponential series for the two-state semigroup,
direct moment summation over the transition law, and a chi-square test of
simulated end-state frequencies.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import chisquare

from ehrenfest.chain import (
    EhrenfestParams,
    binary_semigroup,
    birth_death_rates,
    conditional_mean,
    conditional_variance,
    generator_matrix,
    simulate_path,
    simulate_state_integrals,
    stationary_pmf,
    transition_matrix,
    transition_prob,
)


def test_params_validation():
    with pytest.raises(ValueError):
        EhrenfestParams(0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        EhrenfestParams(4, 0.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        EhrenfestParams(4, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        EhrenfestParams(4, 1.0, 0.5, 1.2)


def test_derived_parameters():
    params = EhrenfestParams(6, 0.5, 0.4, 0.6)
    assert params.p == pytest.approx(0.4)
    assert params.q == pytest.approx(0.6)
    assert params.speed == pytest.approx(0.5)


def test_birth_death_boundaries():
    params = EhrenfestParams(5, 1.2, 0.4, 0.7)
    rates = birth_death_rates(params)
    assert rates.birth[5] == 0.0
    assert rates.death[0] == 0.0
    assert all(rates.birth[i] + rates.death[i] > 0 for i in range(6))
    # birth_i = lam alpha (N - i), death_i = lam beta i
    np.testing.assert_allclose(rates.birth, 1.2 * 0.4 * (5 - np.arange(6)))
    np.testing.assert_allclose(rates.death, 1.2 * 0.7 * np.arange(6))


def test_generator_rows_sum_to_zero():
    Q = generator_matrix(EhrenfestParams(7, 0.9, 0.3, 0.8))
    np.testing.assert_allclose(Q.sum(axis=1), 0.0, atol=1e-14)


# ------------------------------------------------------------ binary semigroup


def test_binary_semigroup_identity_at_zero():
    P = binary_semigroup(0.0, EhrenfestParams(1, 1.0, 0.4, 0.7))
    np.testing.assert_allclose(P, np.eye(2), atol=1e-15)


def test_binary_semigroup_stationary_limit():
    params = EhrenfestParams(1, 1.0, 0.4, 0.7)
    P = binary_semigroup(200.0, params)
    for row in P:
        np.testing.assert_allclose(row, [params.q, params.p], atol=1e-14)


def test_binary_semigroup_rows_sum_to_one():
    params = EhrenfestParams(1, 0.8, 0.25, 0.9)
    for t in (0.0, 0.3, 2.0, 50.0):
        np.testing.assert_allclose(binary_semigroup(t, params).sum(axis=1), 1.0, atol=1e-14)


def test_binary_semigroup_negative_time_rejected():
    with pytest.raises(ValueError):
        binary_semigroup(-0.1, EhrenfestParams(1, 1.0, 0.5, 0.5))


def test_binary_semigroup_matches_exponential_series():
    # e^{-lam t} exp(lam t P) with P the one-step flip matrix
    lam, t = 0.5, 1.0
    params = EhrenfestParams(1, lam, 1.0, 1.0)
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    series = np.zeros((2, 2))
    term = np.eye(2)
    for n in range(60):
        if n > 0:
            term = term @ P * (lam * t) / n
        series += term
    expected = math.exp(-lam * t) * series
    np.testing.assert_allclose(binary_semigroup(t, params), expected, atol=1e-12)


# ------------------------------------------------------------- transition law


def test_transition_identity_at_zero():
    params = EhrenfestParams(8, 1.0, 0.4, 0.7)
    np.testing.assert_allclose(transition_matrix(0.0, params), np.eye(9), atol=1e-10)


def test_transition_single_entry_matches_matrix():
    params = EhrenfestParams(6, 0.9, 0.35, 0.65)
    P = transition_matrix(0.4, params)
    for i in (0, 3, 6):
        for j in (0, 2, 6):
            assert transition_prob(i, j, 0.4, params) == pytest.approx(P[i, j], abs=1e-14)


def test_transition_matches_binary_semigroup_at_N1():
    params = EhrenfestParams(1, 0.7, 0.3, 0.9)
    for t in (0.0, 0.5, 2.0):
        np.testing.assert_allclose(
            transition_matrix(t, params), binary_semigroup(t, params), atol=1e-13
        )


def test_transition_matches_generator_exponential():
    params = EhrenfestParams(5, 1.0, 0.4, 0.7)
    t = 0.3
    np.testing.assert_allclose(
        transition_matrix(t, params), expm(t * generator_matrix(params)), atol=1e-8
    )


def test_transition_rows_and_range():
    params = EhrenfestParams(10, 1.0, 0.25, 0.85)
    for t in (0.05, 0.7, 5.0):
        P = transition_matrix(t, params)
        assert P.min() >= 0.0
        assert P.max() <= 1.0 + 1e-10
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-9)


def test_transition_domain_errors():
    params = EhrenfestParams(4, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        transition_prob(5, 0, 1.0, params)
    with pytest.raises(ValueError):
        transition_prob(0, -1, 1.0, params)
    with pytest.raises(ValueError):
        transition_prob(0, 0, -1.0, params)


def test_chapman_kolmogorov():
    params = EhrenfestParams(10, 0.8, 0.45, 0.75)
    for s, t in [(0.1, 0.2), (0.3, 0.5), (1.0, 0.7)]:
        lhs = transition_matrix(s, params) @ transition_matrix(t, params)
        np.testing.assert_allclose(lhs, transition_matrix(s + t, params), atol=1e-8)


def test_generator_consistency():
    # (P(eps) - I)/eps approximates Q to first order in eps
    params = EhrenfestParams(10, 1.0, 0.4, 0.7)
    eps = 1e-5
    Q = generator_matrix(params)
    diff = (transition_matrix(eps, params) - np.eye(11)) / eps - Q
    bound = 0.6 * eps * np.abs(Q @ Q).sum(axis=1).max()
    assert np.abs(diff).max() <= bound


def test_reparameterization_invariance():
    # law depends on (p, speed) only: (alpha, beta, lam) ~ (c alpha, c beta, lam / c)
    a = EhrenfestParams(6, 1.0, 0.4, 0.7)
    b = EhrenfestParams(6, 2.0, 0.2, 0.35)
    for t in (0.2, 0.9, 3.0):
        np.testing.assert_allclose(
            transition_matrix(t, a), transition_matrix(t, b), atol=1e-12
        )


def test_large_time_rows_reach_stationary():
    params = EhrenfestParams(9, 1.0, 0.3, 0.9)
    pi = stationary_pmf(params)
    P = transition_matrix(50.0 / params.speed, params)
    for i in range(10):
        assert 0.5 * np.abs(P[i] - pi).sum() <= 1e-8


# ------------------------------------------------------------------- moments


def test_moments_at_zero_and_infinity():
    params = EhrenfestParams(6, 1.0, 0.5, 0.5)
    for i in range(7):
        assert conditional_mean(i, 0.0, params) == pytest.approx(float(i), abs=1e-12)
        assert conditional_variance(i, 0.0, params) == pytest.approx(0.0, abs=1e-12)
        assert conditional_mean(i, 1e3, params) == pytest.approx(6 * 0.5, abs=1e-12)
        assert conditional_variance(i, 1e3, params) == pytest.approx(6 * 0.25, abs=1e-12)


@pytest.mark.parametrize(
    "N,alpha,beta,lam,t",
    [
        (6, 0.5, 0.5, 1.0, 0.7),
        (12, 0.45, 0.75, 0.9, 0.7),
        (12, 0.2, 0.9, 1.3, 0.2),
        (5, 1.0, 1.0, 0.6, 1.5),
    ],
)
def test_moments_match_direct_summation(N, alpha, beta, lam, t):
    params = EhrenfestParams(N, lam, alpha, beta)
    P = transition_matrix(t, params)
    j = np.arange(N + 1, dtype=float)
    for i in range(N + 1):
        mean_direct = float(P[i] @ j)
        var_direct = float(P[i] @ j**2) - mean_direct**2
        assert conditional_mean(i, t, params) == pytest.approx(mean_direct, abs=1e-8)
        assert conditional_variance(i, t, params) == pytest.approx(var_direct, abs=1e-8)


def test_variance_nonnegative():
    params = EhrenfestParams(11, 1.0, 0.15, 0.95)
    for i in (0, 5, 11):
        for t in (0.0, 0.01, 0.3, 2.0, 40.0):
            assert conditional_variance(i, t, params) >= 0.0


# ---------------------------------------------------------------- stationary


def test_stationary_pmf_basics():
    params = EhrenfestParams(1, 1.0, 0.3, 0.9)
    np.testing.assert_allclose(stationary_pmf(params), [params.q, params.p], atol=1e-15)
    pmf = stationary_pmf(EhrenfestParams(20, 1.0, 0.45, 0.55))
    assert pmf.sum() == pytest.approx(1.0, abs=1e-12)


def test_detailed_balance():
    params = EhrenfestParams(12, 0.9, 0.45, 0.75)
    pmf = stationary_pmf(params)
    rates = birth_death_rates(params)
    for i in range(12):
        lhs = pmf[i] * rates.birth[i]
        rhs = pmf[i + 1] * rates.death[i + 1]
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------- simulation


def test_simulate_path_deterministic():
    params = EhrenfestParams(10, 1.0, 0.6, 0.8)
    a = simulate_path(4, 2.0, params, seed=7)
    b = simulate_path(4, 2.0, params, seed=7)
    np.testing.assert_array_equal(a.times, b.times)
    np.testing.assert_array_equal(a.states, b.states)
    c = simulate_path(4, 2.0, params, seed=8)
    assert len(c.times) != len(a.times) or not np.array_equal(c.times, a.times)


def test_simulate_path_structure():
    params = EhrenfestParams(3, 2.0, 1.0, 1.0)
    path = simulate_path(1, 50.0, params, seed=11)
    assert path.times[0] == 0.0
    assert np.all(np.diff(path.times) > 0)
    assert path.times[-1] <= path.horizon
    steps = np.diff(path.states)
    assert set(np.unique(steps)) <= {-1, 1}
    assert path.states.min() >= 0 and path.states.max() <= 3


def test_simulate_path_boundary_moves():
    # from the top state the only move is down; from the bottom only up
    params = EhrenfestParams(2, 5.0, 1.0, 1.0)
    path = simulate_path(2, 30.0, params, seed=3)
    idx_top = np.where(path.states[:-1] == 2)[0]
    assert np.all(path.states[idx_top + 1] == 1)
    idx_bot = np.where(path.states[:-1] == 0)[0]
    assert np.all(path.states[idx_bot + 1] == 1)


def test_simulate_path_rejects_bad_inputs():
    params = EhrenfestParams(4, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        simulate_path(5, 1.0, params, seed=0)
    with pytest.raises(ValueError):
        simulate_path(0, 0.0, params, seed=0)


def test_state_integrals_deterministic_and_bounded():
    params = EhrenfestParams(10, 1.0, 0.6, 0.8)
    occ1, end1 = simulate_state_integrals(4, 1.5, params, 500, seed=21)
    occ2, end2 = simulate_state_integrals(4, 1.5, params, 500, seed=21)
    np.testing.assert_array_equal(occ1, occ2)
    np.testing.assert_array_equal(end1, end2)
    assert occ1.min() >= 0.0 and occ1.max() <= 10 * 1.5
    assert end1.min() >= 0 and end1.max() <= 10


def test_simulated_distribution_chi_square():
    # empirical end-state frequencies vs the transition row at significance 0.01
    params = EhrenfestParams(10, 1.0, 0.6, 0.8)
    n = 100_000
    _, end = simulate_state_integrals(4, 1.0, params, n, seed=1234)
    observed = np.bincount(end, minlength=11).astype(float)
    expected = transition_matrix(1.0, params)[4] * n
    # merge cells with tiny expected counts into their neighbour
    keep = expected >= 5.0
    obs = [observed[keep].tolist(), observed[~keep].sum()]
    exp = [expected[keep].tolist(), expected[~keep].sum()]
    if exp[1] > 0:
        obs_arr = np.append(obs[0], obs[1])
        exp_arr = np.append(exp[0], exp[1])
    else:
        obs_arr = np.asarray(obs[0])
        exp_arr = np.asarray(exp[0])
    exp_arr *= obs_arr.sum() / exp_arr.sum()
    _, pvalue = chisquare(obs_arr, exp_arr)
    assert pvalue > 0.01
