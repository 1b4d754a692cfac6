import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uora_aoi.config import NetworkConfig, build_ladder
from uora_aoi.simulator import SimConfig, run_simulation
from uora_aoi.steady_state import (FixedPointError, access_rate, build_transition_matrix,
                                   is_degenerate, solve_fixed_point, solve_stationary,
                                   stationary_gth, stationary_residual, success_rate,
                                   transition_matrix)


def _brute_force_matrix(n, l, lam, rho):
    """Active-count transitions from enumerating every STA's access, RU pick and arrival."""
    p = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for access in itertools.product((0, 1), repeat=i):
            g = sum(access)
            w_access = rho**g * (1 - rho) ** (i - g)
            for picks in itertools.product(range(l), repeat=g):
                s = sum(1 for b in range(l) if picks.count(b) == 1)
                w_pick = w_access / l**g
                idle = n - i + s
                for arrivals in itertools.product((0, 1), repeat=idle):
                    k = sum(arrivals)
                    p[i, i - s + k] += w_pick * lam**k * (1 - lam) ** (idle - k)
    return p


def test_single_sta_matrix():
    for lam in (0.2, 0.7):
        p = transition_matrix(1, 3, lam, 1.0)
        assert np.allclose(p, [[1 - lam, lam], [1 - lam, lam]], atol=1e-15)


def test_no_traffic_is_identity():
    p = transition_matrix(4, 2, 0.0, 0.0)
    assert np.array_equal(p, np.eye(5))
    assert is_degenerate(p)


@pytest.mark.parametrize("n,l,lam,rho", [(2, 2, 0.5, 0.5), (3, 2, 0.3, 0.8), (3, 3, 0.9, 0.4)])
def test_matrix_matches_enumeration(n, l, lam, rho):
    assert np.allclose(transition_matrix(n, l, lam, rho), _brute_force_matrix(n, l, lam, rho),
                       atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 60), l=st.integers(1, 20), lam=st.floats(0.01, 1.0),
       rho=st.floats(0.0, 1.0))
def test_matrix_is_stochastic(n, l, lam, rho):
    p = transition_matrix(n, l, lam, rho)
    assert np.all(p >= -1e-15)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)


def test_rho_outside_unit_interval():
    with pytest.raises(ValueError):
        build_transition_matrix(NetworkConfig(3, 2, 0.5, 2, 0), 1.2)


def test_identity_gives_uniform():
    assert np.allclose(solve_stationary(np.eye(4)), 0.25)


def test_single_sta_stationary():
    lam = 0.35
    mu = solve_stationary(transition_matrix(1, 2, lam, 1.0))
    assert np.allclose(mu, [1 - lam, lam], atol=1e-15)


def test_stationary_against_random_walk():
    rng = np.random.default_rng(7)
    p = rng.random((5, 5)) + 0.05
    p /= p.sum(axis=1, keepdims=True)
    mu = solve_stationary(p)
    cum = np.cumsum(p, axis=1)
    chains, steps, burn = 2000, 5100, 100
    state = rng.integers(0, 5, size=chains)
    visits = np.zeros(5)
    for t in range(steps):
        u = rng.random(chains)
        state = np.minimum((cum[state] <= u[:, None]).sum(axis=1), 4)
        if t >= burn:
            visits += np.bincount(state, minlength=5)
    freq = visits / visits.sum()
    assert 0.5 * np.abs(freq - mu).sum() <= 0.002


def test_success_rate_single_sta():
    config = NetworkConfig(1, 3, 0.4, 2, 0)
    assert success_rate(np.array([0.3, 0.7]), 0.8, config) == 1.0


@pytest.mark.parametrize("n,l,rho", [(5, 2, 0.4), (20, 6, 0.9), (3, 4, 1.0)])
def test_success_rate_saturated(n, l, rho):
    mu = np.zeros(n + 1)
    mu[n] = 1.0
    q = success_rate(mu, rho, NetworkConfig(n, l, 1.0, 0, 0))
    assert q == pytest.approx((1 - rho / l) ** (n - 1), rel=1e-13)


def test_access_rate_examples():
    assert access_rate(0.3, build_ladder(NetworkConfig(5, 4, 0.5, 0, 2))) == 1.0
    assert access_rate(0.3, build_ladder(NetworkConfig(5, 4, 0.5, 3, 0))) == pytest.approx(8 / 11)
    assert access_rate(1.0, build_ladder(NetworkConfig(5, 4, 0.5, 3, 1))) == pytest.approx(8 / 11)


def test_access_rate_range():
    ladder = build_ladder(NetworkConfig(5, 4, 0.5, 3, 1))
    # q = 0: every attempt escalates, so only the top level's waiting counts
    assert access_rate(0.0, ladder) == pytest.approx(8 / (ladder.h[1] / 2 + 8))
    with pytest.raises(ValueError):
        access_rate(1.5, ladder)


def test_fixed_point_single_sta():
    steady = solve_fixed_point(NetworkConfig(1, 2, 0.5, 1, 0))
    assert steady.q == 1.0
    assert steady.rho == 1.0
    assert np.allclose(steady.mu, [0.5, 0.5], atol=1e-14)


@pytest.mark.parametrize("n,l,e", [(10, 4, 0), (10, 4, 2), (7, 7, 3), (30, 8, 3)])
def test_fixed_point_saturated_small_windows(n, l, e):
    steady = solve_fixed_point(NetworkConfig(n, l, 1.0, e, 0))
    assert steady.rho == 1.0
    assert steady.q == pytest.approx((1 - 1 / l) ** (n - 1), rel=1e-12)
    assert steady.mu[n] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("config", [
    NetworkConfig(12, 4, 0.6, 2, 4), NetworkConfig(30, 8, 0.1, 3, 3),
    NetworkConfig(50, 5, 0.05, 4, 2), NetworkConfig(15, 5, 1.0, 3, 3),
])
def test_fixed_point_residuals(config):
    steady = solve_fixed_point(config)
    p = build_transition_matrix(config, steady.rho)
    mu = solve_stationary(p)
    assert np.max(np.abs(mu - steady.mu)) <= 1e-8
    assert stationary_residual(steady.mu, p) <= 1e-8
    assert abs(success_rate(mu, steady.rho, config) - steady.q) <= 1e-8
    assert abs(access_rate(steady.q, build_ladder(config)) - steady.rho) <= 1e-8
    assert 0 < steady.rho <= 1


@pytest.mark.parametrize("n,l,e,m", [(12, 4, 2, 4), (10, 4, 3, 3), (30, 8, 3, 3), (20, 6, 1, 0)])
def test_q_non_increasing_in_lambda(n, l, e, m):
    qs = [solve_fixed_point(NetworkConfig(n, l, lam, e, m)).q
          for lam in np.linspace(0.05, 1.0, 20)]
    assert all(b <= a + 1e-9 for a, b in zip(qs, qs[1:]))


def test_rho_below_one_iff_h_positive():
    assert solve_fixed_point(NetworkConfig(10, 4, 0.5, 3, 0)).rho < 1
    assert solve_fixed_point(NetworkConfig(10, 4, 0.5, 2, 0)).rho == 1


def test_non_convergence_raises():
    with pytest.raises(FixedPointError) as info:
        solve_fixed_point(NetworkConfig(12, 4, 0.6, 2, 4), max_iterations=2)
    assert info.value.iterations == 2
    assert np.isfinite(info.value.rho)


@pytest.mark.slow
def test_fixed_point_against_simulation():
    config = NetworkConfig(12, 4, 0.6, 2, 4)
    steady = solve_fixed_point(config)
    stats = run_simulation(SimConfig(config, slots=400_000, seed=11, replications=4, workers=4))
    assert abs(stats.empirical_q - steady.q) / stats.empirical_q <= 0.02
    assert abs(stats.empirical_rho - steady.rho) / stats.empirical_rho <= 0.02


@pytest.mark.slow
def test_success_rate_against_simulation():
    config = NetworkConfig(5, 3, 0.5, 3, 0)
    steady = solve_fixed_point(config)
    assert steady.rho == pytest.approx(8 / 13)
    stats = run_simulation(SimConfig(config, slots=1_000_000, seed=5, replications=2, workers=2))
    assert abs(stats.empirical_q - steady.q) / stats.empirical_q <= 0.02


def test_gth_matches_direct_solve():
    rng = np.random.default_rng(3)
    p = rng.random((8, 8))
    p /= p.sum(axis=1, keepdims=True)
    assert np.allclose(stationary_gth(p), solve_stationary(p), atol=1e-14)


def test_metastable_chain_stays_non_negative():
    # light traffic with full access: mass splits between the empty and the congested end
    p = transition_matrix(100, 5, 0.002, 1.0)
    mu = solve_stationary(p)
    assert np.all(mu >= 0)
    assert stationary_residual(mu, p) <= 1e-12
