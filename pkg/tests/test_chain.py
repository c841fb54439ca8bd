import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occkit import (
    FELL_THROUGH,
    ParameterError,
    build_transition,
    occ_conditional_pmf,
    occupancy_by_power,
    simulate_process,
    spectral,
)

THETAS = [0.3, 0.7, 1.0]


# ---------------------------------------------------------------------------
# transition matrix


def test_transition_m2_theta1():
    tm = build_transition(2, 1.0)
    assert tm.row(0) == [0.0, 1.0, 0.0]
    assert tm.row(1) == [0.0, 0.5, 0.5]
    assert tm.row(2) == [0.0, 0.0, 1.0]


def test_transition_m1():
    tm = build_transition(1, 1.0)
    assert tm.row(0) == [0.0, 1.0]
    assert tm.row(1) == [0.0, 1.0]


def test_transition_first_row():
    tm = build_transition(3, 0.5)
    assert tm.entry(0, 0) == 0.5
    assert tm.entry(0, 1) == 0.5
    assert tm.entry(0, 2) == 0.0


def test_transition_validation():
    with pytest.raises(ParameterError):
        build_transition(0, 0.5)
    with pytest.raises(ParameterError):
        build_transition(3, 0.0)
    with pytest.raises(ParameterError):
        build_transition(3, 1.5)
    with pytest.raises(ParameterError):
        build_transition(3, 0.5).entry(0, 4)


def test_transition_rows_stochastic():
    for m in (1, 2, 5, 9):
        for theta in THETAS:
            tm = build_transition(m, theta)
            dense = tm.to_dense()
            assert np.all(dense >= 0) and np.all(dense <= 1)
            assert np.max(np.abs(dense.sum(axis=1) - 1.0)) <= 1e-15


def test_transition_stochastic_monotonicity():
    # cumulative sums of row t dominate those of row t+1
    for m in (2, 5, 9):
        for theta in THETAS:
            dense = build_transition(m, theta).to_dense()
            cum = np.cumsum(dense, axis=1)
            assert np.all(cum[:-1] >= cum[1:] - 1e-15)


# ---------------------------------------------------------------------------
# matrix power


def test_power_two_balls_two_bins():
    pm = occupancy_by_power(2, 2, 1.0)
    assert pm.as_dict() == {1: 0.5, 2: 0.5}


def test_power_zero_balls_is_point_mass():
    for t in (0, 2, 3):
        pm = occupancy_by_power(0, 3, 0.7, start_t=t)
        assert pm.as_dict() == {t: 1.0}


def test_power_three_balls_three_bins():
    pm = occupancy_by_power(3, 3, 1.0)
    assert pm[1] == pytest.approx(1 / 9, rel=1e-14)
    assert pm[2] == pytest.approx(6 / 9, rel=1e-14)
    assert pm[3] == pytest.approx(2 / 9, rel=1e-14)


def test_power_start_state_validation():
    with pytest.raises(ParameterError):
        occupancy_by_power(2, 3, 0.5, start_t=4)
    with pytest.raises(ParameterError):
        occupancy_by_power(2, 3, 0.5, start_t=-1)
    with pytest.raises(ParameterError):
        occupancy_by_power(-1, 3, 0.5)


def test_power_from_absorbed_state():
    pm = occupancy_by_power(5, 4, 0.6, start_t=4)
    assert pm.as_dict() == {4: 1.0}


def test_power_normalized():
    for n in (0, 1, 7, 40):
        for m in (1, 3, 10):
            for theta in THETAS:
                assert abs(occupancy_by_power(n, m, theta).total() - 1.0) <= 1e-12


# ---------------------------------------------------------------------------
# spectral decomposition


def test_eigenvalues_m2_theta1():
    sd = spectral(2, 1.0)
    assert sd.eigenvalues == (0.0, 0.5, 1.0)


def test_eigenvalues_strictly_increasing():
    for m in (1, 4, 17):
        for theta in THETAS:
            eig = spectral(m, theta).eigenvalues
            assert all(a < b for a, b in zip(eig, eig[1:]))
            assert eig[-1] == 1.0


def test_right_eigenvectors_first_row():
    for m in (1, 3, 6):
        sd = spectral(m, 0.7)
        assert list(sd.v[0]) == [math.comb(m, j) for j in range(m + 1)]


def test_left_times_right_is_identity():
    # integer matrices, so the product is checked exactly
    for m in (1, 2, 7, 20):
        sd = spectral(m, 0.5)
        size = m + 1
        for t in range(size):
            for k in range(size):
                acc = sum(sd.w[t][i] * sd.v[i][k] for i in range(size))
                assert acc == (1 if t == k else 0)


def test_reconstruction_matches_transition():
    for m in (1, 2, 5, 12, 30):
        for theta in (0.3, 1.0):
            dense = build_transition(m, theta).to_dense()
            rebuilt = spectral(m, theta).reconstruct_dense()
            assert np.max(np.abs(rebuilt - dense)) <= 1e-10


def test_spectral_m_limit():
    with pytest.raises(ParameterError):
        spectral(201, 0.5)
    with pytest.raises(ParameterError):
        spectral(31, 0.5, m_limit=30)


def test_spectral_probability_bounds_states():
    sd = spectral(3, 0.5)
    with pytest.raises(ParameterError):
        sd.probability(2, 0, 4)
    assert sd.probability(2, 2, 1) == 0.0  # k < t unreachable


# ---------------------------------------------------------------------------
# oracle triangle


def test_power_spectral_distribution_agree():
    for m in range(1, 9):
        for theta in THETAS:
            sd = spectral(m, theta)
            for n in range(13):
                for t in range(m + 1):
                    a = occupancy_by_power(n, m, theta, start_t=t)
                    b = sd.pmf(n, start_t=t)
                    c = occ_conditional_pmf(n, m, theta, t)
                    for k in range(t, m + 1):
                        assert a[k] == pytest.approx(b[k], abs=1e-10)
                        assert b[k] == pytest.approx(c[k], abs=1e-10)


def _tv_to_binomial(n, m, theta):
    pm = occupancy_by_power(n, m, theta)
    return 0.5 * sum(
        abs(pm[k] - math.comb(n, k) * theta**k * (1 - theta) ** (n - k))
        for k in range(n + 1)
    )


def test_binomial_limit_of_chain():
    # exact leading-order distance is C(n,2) theta^2 / m, so a flat 1e-4
    # bound is only available for theta^2 C(20,2) <= 100
    m = 10**6
    for theta in (0.3, 0.7):
        for n in (1, 7, 20):
            assert _tv_to_binomial(n, m, theta) < 1e-4


def test_binomial_limit_rate():
    m = 10**6
    for theta in (0.3, 0.7, 1.0):
        for n in (7, 20):
            rate = math.comb(n, 2) * theta**2 / m
            assert _tv_to_binomial(n, m, theta) <= 1.1 * rate


# ---------------------------------------------------------------------------
# simulation


def test_simulate_zero_balls():
    sample = simulate_process(0, 4, 0.5, seed=1)
    assert sample.assignments == ()
    assert sample.occupancy == 0
    assert sample.effective == 0
    assert sample.occupancy_trajectory() == (0,)


def test_simulate_deterministic_given_seed():
    a = simulate_process(50, 6, 0.7, seed=42, stream=3)
    b = simulate_process(50, 6, 0.7, seed=42, stream=3)
    c = simulate_process(50, 6, 0.7, seed=42, stream=4)
    assert a.assignments == b.assignments
    assert a.assignments != c.assignments


@given(
    n=st.integers(min_value=0, max_value=60),
    m=st.integers(min_value=1, max_value=10),
    theta=st.sampled_from([0.3, 0.7, 1.0]),
    seed=st.integers(min_value=0, max_value=2**32),
)
@settings(max_examples=150, deadline=None)
def test_property_sample_invariants(n, m, theta, seed):
    s = simulate_process(n, m, theta, seed)
    assert len(s.assignments) == n
    assert all(a == FELL_THROUGH or 1 <= a <= m for a in s.assignments)
    assert s.occupancy == sum(1 for c in s.bin_counts if c > 0)
    assert s.effective == sum(1 for a in s.assignments if a != FELL_THROUGH)
    assert sum(s.bin_counts) == s.effective
    assert 0 <= s.occupancy <= min(s.effective, m)
    if theta == 1.0:
        assert s.effective == n


@given(
    n=st.integers(min_value=0, max_value=60),
    m=st.integers(min_value=1, max_value=10),
    seed=st.integers(min_value=0, max_value=2**32),
)
@settings(max_examples=100, deadline=None)
def test_property_trajectory_pure_birth(n, m, seed):
    s = simulate_process(n, m, 0.7, seed)
    traj = s.occupancy_trajectory()
    assert len(traj) == n + 1
    assert traj[0] == 0
    assert traj[-1] == s.occupancy
    assert all(b - a in (0, 1) for a, b in zip(traj, traj[1:]))


def test_simulate_long_run_saturates():
    # analytic mass at K = 5 after 10^4 balls is 1 up to ~1e-969
    sample = simulate_process(10**4, 5, 1.0, seed=7)
    assert sample.occupancy == 5
    sigma = math.sqrt(10**4 * 0.2 * 0.8)
    for count in sample.bin_counts:
        assert abs(count - 2000) <= 3 * sigma


def test_simulate_goodness_of_fit():
    # fixed seed; each support point within its 3-sigma multinomial band
    n, m, reps, seed = 6, 5, 4000, 20260819
    analytic = occupancy_by_power(n, m, 1.0)
    counts = {k: 0 for k in analytic.support}
    for r in range(reps):
        counts[simulate_process(n, m, 1.0, seed, stream=r).occupancy] += 1
    for k, p in analytic.items():
        band = 3 * math.sqrt(reps * p * (1 - p))
        assert abs(counts[k] - reps * p) <= band
