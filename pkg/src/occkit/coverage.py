"""Coverage analysis for with-replacement resampling.

Drawing n values uniformly with replacement from an original sample of
m distinct points is the balls-in-bins process with every ball
retained, so the number of distinct original points covered by the
resample is the occupancy count at theta = 1.  This module specializes
the distribution machinery to that case: coverage pmfs, the smallest
resample size guaranteeing a coverage target with stipulated
probability, moments of the covered proportion with their large-sample
limits, the excess-draws distribution, and a Monte Carlo convergence
demonstration.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .chain import simulate_process
from .dist import (
    NegOccParams,
    OccParams,
    _occ_recursion_exact,
    negocc_pmf,
    occ_conditional_pmf,
    occ_pmf,
)
from .errors import ParameterError
from .pmf import Pmf

__all__ = [
    "CoveragePlan",
    "CoverageMoments",
    "CoverageSimulation",
    "coverage_pmf",
    "coverage_conditional_pmf",
    "coverage_moments",
    "required_resample_size",
    "simulate_coverage",
    "excess_resamples_pmf",
    "excess_resamples_conditional_pmf",
]

# exact rational CDF evaluation is cheap up to this many original points
_EXACT_M_LIMIT = 30


def _check_original_size(m) -> int:
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ParameterError(f"m must be an integer >= 1, got {m!r}")
    return m


def _check_resample_size(n) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ParameterError(f"n must be an integer >= 0, got {n!r}")
    return n


def coverage_pmf(n: int, m: int, backend: str = "recursion") -> Pmf:
    """Distribution of the number of distinct original points covered
    by a resample of size n."""
    _check_resample_size(n)
    _check_original_size(m)
    return occ_pmf(OccParams(n, m, 1 if backend == "recursion" else Fraction(1)), backend)


def coverage_conditional_pmf(n: int, m: int, r: int, backend: str = "recursion") -> Pmf:
    """Coverage after n further draws given that r points are covered.

    The still-uncovered points form a smaller occupancy problem: m - r
    bins with retention 1 - r/m, shifted back up by r.
    """
    _check_resample_size(n)
    _check_original_size(m)
    theta = 1 if backend == "recursion" else Fraction(1)
    return occ_conditional_pmf(n, m, theta, r, backend)


@dataclass(frozen=True)
class CoverageMoments:
    """Mean and variance of the covered proportion K_n / m.

    The exact fields are rational.  The asymptotic fields are the
    n, m -> infinity limits at fixed ratio lam = n/m: mean 1 - e**-lam
    and variance e**-lam (1 - e**-lam) / m.
    """

    mean_proportion: Fraction
    variance_proportion: Fraction
    asymptotic_mean: float
    asymptotic_variance: float
    lam: float

    def __post_init__(self):
        if not 0 <= self.mean_proportion <= 1:
            raise ParameterError("mean_proportion must lie in [0, 1]")
        if self.variance_proportion < 0:
            raise ParameterError("variance_proportion must be >= 0")


def coverage_moments(n: int, m: int) -> CoverageMoments:
    _check_resample_size(n)
    _check_original_size(m)
    e1 = Fraction(m - 1, m) ** n
    e2 = Fraction(m - 2, m) ** n  # only enters multiplied by m - 1
    mean = 1 - e1
    var = ((m - 1) * e2 + e1 - m * e1 * e1) / m
    lam = n / m
    return CoverageMoments(
        mean_proportion=mean,
        variance_proportion=var,
        asymptotic_mean=-math.expm1(-lam),
        asymptotic_variance=math.exp(-lam) * -math.expm1(-lam) / m,
        lam=lam,
    )


@dataclass(frozen=True)
class CoveragePlan:
    """Smallest resample size whose coverage probability meets a target.

    n_required is the least n with P(K_n >= k) >= phi_target;
    achieved_probability is that probability at n_required (kept
    rational when found by the exact backend).
    """

    m: int
    k: int
    phi_target: float
    n_required: int
    achieved_probability: float

    def __post_init__(self):
        if self.achieved_probability < self.phi_target:
            raise ParameterError(
                "achieved_probability must be >= phi_target"
            )


def _coverage_tail(n: int, m: int, k: int, exact: bool):
    """P(K_n >= k) for the theta = 1 process."""
    if k <= 0:
        return Fraction(1) if exact else 1.0
    if n < k:
        return Fraction(0) if exact else 0.0
    if exact:
        row = _occ_recursion_exact(n, m, Fraction(1))
        return sum(row[k:], Fraction(0))
    pm = occ_pmf(OccParams(n, m, 1))
    return float(sum(pm[j] for j in range(k, min(n, m) + 1)))


def required_resample_size(m: int, k: int, phi_target) -> CoveragePlan:
    """Least n with P(K_n >= k) >= phi_target.

    The tail probability is nondecreasing in n, so an exponential
    bracket followed by binary search finds the exact minimum in
    O(log n) tail evaluations.  For m <= 30 the tails are evaluated in
    rational arithmetic and the comparison against phi_target is exact.
    """
    _check_original_size(m)
    if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= m:
        raise ParameterError(f"k must be an integer in [1, m], got {k!r}")
    if not 0 < phi_target < 1:
        raise ParameterError(f"phi_target must lie in (0, 1), got {phi_target!r}")
    exact = m <= _EXACT_M_LIMIT
    target = Fraction(phi_target) if exact else float(phi_target)

    def tail(n):
        return _coverage_tail(n, m, k, exact)

    lo, hi = k - 1, k  # tail(k-1) = 0 < target
    while tail(hi) < target:
        lo, hi = hi, 2 * hi
    # invariant: tail(lo) < target <= tail(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) < target:
            lo = mid
        else:
            hi = mid
    return CoveragePlan(
        m=m,
        k=k,
        phi_target=phi_target,
        n_required=hi,
        achieved_probability=tail(hi),
    )


@dataclass(frozen=True)
class CoverageSimulation:
    """Empirical coverage from repeated resampling.

    frequencies maps each observed coverage count to how many of the
    replications produced it; sup_distance is
    max_k |empirical(k) - analytic(k)| against coverage_pmf.  With zero
    replications the report is empty and the float summaries are NaN.
    """

    n: int
    m: int
    replications: int
    frequencies: dict
    empirical: Pmf | None
    sup_distance: float
    mean_proportion: float


def simulate_coverage(n: int, m: int, replications: int, seed: int) -> CoverageSimulation:
    """Resample `replications` times and compare empirical coverage
    frequencies with the analytic pmf.

    Each replication runs the ball-by-ball process on its own RNG
    stream, so the report is deterministic in (seed, replications) and
    any prefix of the streams reproduces a smaller run.
    """
    _check_resample_size(n)
    _check_original_size(m)
    if isinstance(replications, bool) or not isinstance(replications, int) or replications < 0:
        raise ParameterError(f"replications must be an integer >= 0, got {replications!r}")
    if replications == 0:
        return CoverageSimulation(
            n=n,
            m=m,
            replications=0,
            frequencies={},
            empirical=None,
            sup_distance=math.nan,
            mean_proportion=math.nan,
        )
    counts = {}
    total_k = 0
    for s in range(replications):
        k = simulate_process(n, m, 1, seed, stream=s).occupancy
        counts[k] = counts.get(k, 0) + 1
        total_k += k
    k_min = min(counts)
    k_max = max(counts)
    empirical = Pmf(
        support_min=k_min,
        probabilities=[counts.get(k, 0) / replications for k in range(k_min, k_max + 1)],
        meta={"backend": "simulation", "replications": replications},
    )
    analytic = coverage_pmf(n, m)
    sup = max(
        abs(empirical[k] - analytic[k]) for k in range(min(n, m) + 1)
    )
    return CoverageSimulation(
        n=n,
        m=m,
        replications=replications,
        frequencies=dict(sorted(counts.items())),
        empirical=empirical,
        sup_distance=sup,
        mean_proportion=total_k / (replications * m),
    )


def excess_resamples_pmf(m: int, k: int, t_max: int, backend: str = "recursion") -> Pmf:
    """Distribution of the draws beyond k needed to cover k distinct
    original points, truncated at t_max (see meta["tail_mass"])."""
    _check_original_size(m)
    theta = 1 if backend == "recursion" else Fraction(1)
    return negocc_pmf(NegOccParams(m, k, theta), t_max, backend)


def excess_resamples_conditional_pmf(
    m: int, k: int, k_more: int, r: int, t_max: int, backend: str = "recursion"
) -> Pmf:
    """Distribution of the total excess at coverage level k + k_more
    given that level k was reached with excess r.

    Conditioning puts the process in the state "k points covered", so
    the remaining draws form a fresh coverage process on the m - k
    uncovered points where a draw landing on an already-covered point
    falls through: m - k bins with retention 1 - k/m.  The total excess
    is r plus the excess of that reduced process.
    """
    _check_original_size(m)
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ParameterError(f"k must be an integer >= 0, got {k!r}")
    if isinstance(k_more, bool) or not isinstance(k_more, int) or k_more < 1:
        raise ParameterError(f"k_more must be an integer >= 1, got {k_more!r}")
    if k + k_more > m:
        raise ParameterError(
            f"k + k_more must be <= m, got {k} + {k_more} > {m}"
        )
    if isinstance(r, bool) or not isinstance(r, int) or r < 0:
        raise ParameterError(f"r must be an integer >= 0, got {r!r}")
    if not isinstance(t_max, int) or t_max < r:
        raise ParameterError(f"t_max must be an integer >= r, got {t_max!r}")
    theta = Fraction(m - k, m)
    if backend == "recursion":
        theta = float(theta)
    base = negocc_pmf(NegOccParams(m - k, k_more, theta), t_max - r, backend)
    return Pmf(
        support_min=base.support_min + r,
        probabilities=list(base.probabilities),
        meta=dict(base.meta),
    )
