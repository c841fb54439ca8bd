"""Resampling coverage: pmfs, planner, moments, excess draws, simulation."""

import math
from fractions import Fraction

import pytest

from occkit import (
    ParameterError,
    coverage_conditional_pmf,
    coverage_moments,
    coverage_pmf,
    excess_resamples_conditional_pmf,
    excess_resamples_pmf,
    occ_moments,
    OccParams,
    occupancy_by_power,
    required_resample_size,
    simulate_coverage,
)


# ---------------------------------------------------------------------------
# coverage pmf


def test_coverage_pmf_two_by_two():
    pm = coverage_pmf(2, 2)
    assert pm[1] == pytest.approx(0.5, abs=1e-15)
    assert pm[2] == pytest.approx(0.5, abs=1e-15)
    exact = coverage_pmf(2, 2, "exact")
    assert exact[1] == Fraction(1, 2)
    assert exact[2] == Fraction(1, 2)


def test_coverage_pmf_single_draw():
    for m in (1, 4, 9):
        pm = coverage_pmf(1, m)
        assert pm.support_min == 1
        assert pm[1] == pytest.approx(1.0, abs=1e-15)


def test_coverage_pmf_validation():
    with pytest.raises(ParameterError):
        coverage_pmf(-1, 3)
    with pytest.raises(ParameterError):
        coverage_pmf(2, 0)
    with pytest.raises(ParameterError):
        coverage_pmf(True, 3)


def test_coverage_conditional_matches_chain():
    # growing the resample from r covered points is the chain started
    # in state r
    for m in (2, 5, 7):
        for r in range(m + 1):
            for n in (0, 1, 4, 8):
                cond = coverage_conditional_pmf(n, m, r)
                chain = occupancy_by_power(n, m, 1.0, start_t=r)
                for k in range(m + 1):
                    assert cond[k] == pytest.approx(chain[k], abs=1e-12)


def test_coverage_conditional_saturated_start():
    pm = coverage_conditional_pmf(6, 4, 4)
    assert pm.support_min == 4
    assert pm[4] == pytest.approx(1.0, abs=1e-15)


# ---------------------------------------------------------------------------
# planner


def test_plan_two_bins_half_target():
    plan = required_resample_size(2, 2, 0.5)
    assert plan.n_required == 2
    assert plan.achieved_probability == Fraction(1, 2)


def test_plan_two_bins_tight_target():
    # P(K_n = 2) = 1 - 2**(1-n): n=4 gives 0.875 < 0.9, n=5 gives 0.9375
    plan = required_resample_size(2, 2, 0.9)
    assert plan.n_required == 5
    assert plan.achieved_probability == Fraction(15, 16)
    assert float(plan.achieved_probability) == 0.9375


def test_plan_first_point_is_free():
    for m in (1, 3, 12):
        plan = required_resample_size(m, 1, 0.999)
        assert plan.n_required == 1
        assert plan.achieved_probability == 1


def _coverage_tail_exact(n, m, k):
    if n < k:
        return Fraction(0)
    pm = coverage_pmf(n, m, "exact")
    return sum((pm[j] for j in range(k, min(n, m) + 1)), Fraction(0))


def test_plan_minimality():
    # the planner's n is the least one: the tail at n-1 misses the
    # target, the tail at n meets it (exact rational comparison)
    for m, k, phi in [(3, 2, 0.3), (6, 4, 0.9), (10, 10, 0.99), (7, 5, 0.5)]:
        plan = required_resample_size(m, k, phi)
        n = plan.n_required
        target = Fraction(phi)
        assert _coverage_tail_exact(n, m, k) >= target
        assert _coverage_tail_exact(n - 1, m, k) < target
        assert plan.achieved_probability == _coverage_tail_exact(n, m, k)


def test_plan_float_backend_above_exact_limit():
    # m > 30 switches to the float recursion; the bracketing invariant
    # still holds up to float comparison noise
    plan = required_resample_size(100, 50, 0.9)
    n = plan.n_required
    assert plan.achieved_probability >= 0.9
    below = float(_coverage_tail_exact(n - 1, 100, 50))
    assert below < 0.9


def test_plan_validation():
    with pytest.raises(ParameterError):
        required_resample_size(0, 1, 0.5)
    with pytest.raises(ParameterError):
        required_resample_size(4, 0, 0.5)
    with pytest.raises(ParameterError):
        required_resample_size(4, 5, 0.5)
    with pytest.raises(ParameterError):
        required_resample_size(4, 2, 0.0)
    with pytest.raises(ParameterError):
        required_resample_size(4, 2, 1.0)


# ---------------------------------------------------------------------------
# moments of the covered proportion


def test_moments_quarter_century():
    mom = coverage_moments(25, 25)
    assert mom.mean_proportion == 1 - Fraction(24, 25) ** 25
    assert float(mom.mean_proportion) == pytest.approx(0.639603, abs=5e-7)
    assert mom.lam == 1.0
    assert mom.asymptotic_mean == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert mom.asymptotic_variance == pytest.approx(
        math.exp(-1) * (1 - math.exp(-1)) / 25, rel=1e-12
    )


def test_moments_edge_cases():
    assert coverage_moments(0, 7).mean_proportion == 0
    assert coverage_moments(0, 7).variance_proportion == 0
    assert coverage_moments(5, 1).mean_proportion == 1
    assert coverage_moments(5, 1).variance_proportion == 0


def test_moments_match_occupancy_moments():
    # K_n/m moments are the theta=1 occupancy moments scaled by m
    for n, m in [(5, 3), (10, 7), (25, 25)]:
        mom = coverage_moments(n, m)
        occ = occ_moments(OccParams(n, m, 1))
        assert float(mom.mean_proportion) == pytest.approx(occ.mean / m, rel=1e-13)
        assert float(mom.variance_proportion) == pytest.approx(
            occ.variance / m**2, rel=1e-12
        )


def test_moments_validation():
    with pytest.raises(ParameterError):
        coverage_moments(-1, 5)
    with pytest.raises(ParameterError):
        coverage_moments(5, 0)


# ---------------------------------------------------------------------------
# excess draws


def test_excess_two_points():
    pm = excess_resamples_pmf(2, 2, 8, "exact")
    for t in range(9):
        assert pm[t] == Fraction(1, 2 ** (t + 1))
    assert pm.meta["tail_mass"] == Fraction(1, 2**9)


def test_excess_first_point():
    pm = excess_resamples_pmf(6, 1, 5)
    assert pm.support_min == 0
    assert len(pm.probabilities) == 1
    assert pm[0] == pytest.approx(1.0, abs=1e-15)


def test_excess_cdf_matches_coverage_tail():
    # P(T_k <= n - k) = P(K_n >= k), the two routes sharing no code
    for m, k, n in [(5, 3, 9), (4, 4, 6), (8, 2, 2), (6, 5, 12)]:
        pm = excess_resamples_pmf(m, k, n - k)
        waiting = sum(pm[t] for t in range(n - k + 1))
        covering = float(_coverage_tail_exact(n, m, k))
        assert waiting == pytest.approx(covering, abs=1e-12)


def test_excess_conditional_composition():
    # reaching k + k_more decomposes exactly: wait for k, then run the
    # reduced process on the uncovered points
    m, k, k_more, t_max = 6, 2, 2, 8
    first = excess_resamples_pmf(m, k, t_max, "exact")
    total = excess_resamples_pmf(m, k + k_more, t_max, "exact")
    for t in range(t_max + 1):
        acc = Fraction(0)
        for r in range(t + 1):
            cond = excess_resamples_conditional_pmf(m, k, k_more, r, t_max, "exact")
            acc += first[r] * cond[t]
        assert acc == total[t]


def test_excess_conditional_zero_base():
    # conditioning on level 0 with no excess is the unconditional law
    base = excess_resamples_pmf(5, 3, 6, "exact")
    cond = excess_resamples_conditional_pmf(5, 0, 3, 0, 6, "exact")
    assert cond.support_min == base.support_min
    assert list(cond.probabilities) == list(base.probabilities)


def test_excess_conditional_shifts_support():
    cond = excess_resamples_conditional_pmf(6, 2, 2, 3, 10)
    assert cond.support_min >= 3


def test_excess_conditional_validation():
    with pytest.raises(ParameterError):
        excess_resamples_conditional_pmf(6, 2, 0, 0, 5)
    with pytest.raises(ParameterError):
        excess_resamples_conditional_pmf(6, 4, 3, 0, 5)
    with pytest.raises(ParameterError):
        excess_resamples_conditional_pmf(6, -1, 2, 0, 5)
    with pytest.raises(ParameterError):
        excess_resamples_conditional_pmf(6, 2, 2, -1, 5)
    with pytest.raises(ParameterError):
        excess_resamples_conditional_pmf(6, 2, 2, 4, 3)


def test_waiting_covering_duality():
    # tail-sum duality between the two families over a broad grid
    for m in range(1, 9):
        for k in range(1, m + 1):
            for n in range(21):
                covering = float(_coverage_tail_exact(n, m, k))
                if n < k:
                    assert covering == 0.0
                    continue
                pm = excess_resamples_pmf(m, k, n - k)
                waiting = sum(pm[t] for t in range(n - k + 1))
                assert waiting == pytest.approx(covering, abs=1e-12)


# ---------------------------------------------------------------------------
# simulation


def test_simulate_zero_replications():
    sim = simulate_coverage(10, 5, 0, seed=1)
    assert sim.replications == 0
    assert sim.frequencies == {}
    assert sim.empirical is None
    assert math.isnan(sim.sup_distance)
    assert math.isnan(sim.mean_proportion)


def test_simulate_small_run_shape():
    sim = simulate_coverage(25, 25, 30, seed=4)
    assert sim.replications == 30
    assert sum(sim.frequencies.values()) == 30
    assert all(1 <= k <= 25 for k in sim.frequencies)
    assert sum(sim.empirical.probabilities) == pytest.approx(1.0, abs=1e-12)
    assert 0 < sim.mean_proportion <= 1


def test_simulate_deterministic():
    a = simulate_coverage(12, 8, 200, seed=99)
    b = simulate_coverage(12, 8, 200, seed=99)
    assert a.frequencies == b.frequencies
    assert a.sup_distance == b.sup_distance
    assert a.mean_proportion == b.mean_proportion


def test_simulate_validation():
    with pytest.raises(ParameterError):
        simulate_coverage(10, 5, -1, seed=1)
    with pytest.raises(ParameterError):
        simulate_coverage(10, 0, 5, seed=1)


def test_simulate_converges_to_analytic():
    # strong-law demonstration: sup-distance falls by roughly sqrt(10)
    # per decade of replications, and the big run pins the mean
    sups = []
    means = []
    for reps in (100, 1000, 10000, 100000):
        sim = simulate_coverage(25, 25, reps, seed=2026)
        sups.append(sim.sup_distance)
        means.append(sim.mean_proportion)
    assert all(a > b for a, b in zip(sups, sups[1:]))
    assert sups[-1] < 0.005
    assert means[-1] == pytest.approx(0.639603, abs=0.005)
