"""Occupancy distributions for balls dropped into bins with a retention
probability.

n balls are thrown independently at m equally likely bins and each ball
sticks with probability theta (otherwise it falls through).  The package
computes the distribution of the number of occupied bins, the waiting
time until a target number of bins is occupied, the number of surplus
balls in already-occupied bins, and the coverage/resampling quantities
these induce, together with the noncentral Stirling numbers that
underlie all of them.
"""

from .chain import (
    FELL_THROUGH,
    ProcessSample,
    SpectralDecomposition,
    TransitionMatrix,
    build_transition,
    occupancy_by_power,
    simulate_process,
    spectral,
)
from .coverage import (
    CoverageMoments,
    CoveragePlan,
    coverage_conditional_pmf,
    coverage_moments,
    coverage_pmf,
    excess_resamples_conditional_pmf,
    excess_resamples_pmf,
    required_resample_size,
    simulate_coverage,
)
from .dist import (
    MomentSet,
    NegOccParams,
    OccParams,
    SpillageParams,
    coupon_collector_pmf,
    effective_balls_given_occupancy,
    negocc_cdf,
    negocc_pmf,
    negocc_sample,
    occ_cdf,
    occ_conditional_pmf,
    occ_factorial_moment,
    occ_moments,
    occ_moments_asymptotic,
    occ_normal_approx,
    occ_pmf,
    occ_pmf_theta_zero,
    occ_sample,
    spillage_pmf,
    spillage_sample,
)
from .errors import ParameterError, ResourceLimitError
from .identities import (
    IdentityReport,
    check_binomial_poisson_mixture,
    check_negocc_mixture,
    check_occ_binomial_mixture,
    check_random_ball_count,
    check_spillage_mixture,
    run_all_checks,
)
from .pmf import Pmf
from .rng import make_rng
from .stirling import (
    ExactReal,
    ScaledFloat,
    StirlingTable,
    exact_digit_budget,
    get_table,
    scaled_stirling_pi,
    shift_noncentrality,
    stirling_alternating_sum,
    stirling_central,
    stirling_noncentral,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ParameterError",
    "ResourceLimitError",
    "Pmf",
    "make_rng",
    "ExactReal",
    "ScaledFloat",
    "StirlingTable",
    "exact_digit_budget",
    "get_table",
    "scaled_stirling_pi",
    "shift_noncentrality",
    "stirling_alternating_sum",
    "stirling_central",
    "stirling_noncentral",
    "FELL_THROUGH",
    "TransitionMatrix",
    "SpectralDecomposition",
    "ProcessSample",
    "build_transition",
    "occupancy_by_power",
    "simulate_process",
    "spectral",
    "OccParams",
    "NegOccParams",
    "SpillageParams",
    "MomentSet",
    "occ_pmf",
    "occ_pmf_theta_zero",
    "occ_conditional_pmf",
    "occ_cdf",
    "occ_moments",
    "occ_moments_asymptotic",
    "occ_factorial_moment",
    "occ_normal_approx",
    "occ_sample",
    "negocc_pmf",
    "negocc_cdf",
    "negocc_sample",
    "coupon_collector_pmf",
    "spillage_pmf",
    "spillage_sample",
    "effective_balls_given_occupancy",
    "IdentityReport",
    "check_random_ball_count",
    "check_occ_binomial_mixture",
    "check_binomial_poisson_mixture",
    "check_negocc_mixture",
    "check_spillage_mixture",
    "run_all_checks",
    "coverage_pmf",
    "coverage_conditional_pmf",
    "coverage_moments",
    "CoverageMoments",
    "CoveragePlan",
    "required_resample_size",
    "simulate_coverage",
    "excess_resamples_pmf",
    "excess_resamples_conditional_pmf",
]
