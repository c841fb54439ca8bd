"""Distributions of the extended occupancy problem.

Throw n balls at m bins, each ball landing uniformly and sticking with
probability theta (otherwise it falls through).  Three families live
here:

* ``occ_*``      -- the occupancy count K_n: how many bins are occupied
  after n balls.
* ``negocc_*``   -- the waiting time T_k: how many balls beyond the
  k-th are needed before k bins are occupied.  The coupon-collector
  time is the k = m special case.
* ``spillage_*`` -- given the occupancy count, how many effective balls
  landed on top of already-occupied bins.

``m = math.inf`` is accepted where the limit exists: the occupancy
count becomes Binomial(n, theta) and the waiting time becomes negative
binomial.  ``theta = 0`` is excluded from the parameter bundles (the
count is then the point mass at zero; see ``occ_pmf_theta_zero``).

Backends
--------
``"recursion"`` (default) advances the one-ball update

    Occ(k | n+1) = theta*(m-k+1)/m * Occ(k-1 | n)
                   + (1 - theta*(m-k)/m) * Occ(k | n)

whose coefficients all lie in [0, 1]; cost O(n * min(n, m)), done in
numpy, with a block-power fast path for large n.  ``"exact"`` evaluates
the closed form theta**n / m**n * (m)_k * S(n, k, phi) with
phi = m*(1-theta)/theta in rational arithmetic (exact Stirling table),
returning Fractions.  The two routes share no code, which is what makes
their agreement a meaningful check.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from .errors import ParameterError
from .pmf import Pmf
from .rng import make_rng
from .stirling import ScaledFloat, get_table, stirling_central

__all__ = [
    "OccParams",
    "NegOccParams",
    "SpillageParams",
    "MomentSet",
    "occ_pmf",
    "occ_pmf_theta_zero",
    "occ_conditional_pmf",
    "occ_cdf",
    "occ_factorial_moment",
    "occ_moments",
    "occ_moments_asymptotic",
    "occ_normal_approx",
    "occ_sample",
    "negocc_pmf",
    "negocc_cdf",
    "negocc_sample",
    "coupon_collector_pmf",
    "spillage_pmf",
    "effective_balls_given_occupancy",
    "spillage_sample",
]

INF = math.inf


def _is_count(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_bins(m):
    if m == INF:
        return
    if not _is_count(m) or m < 1:
        raise ParameterError(f"m must be an integer >= 1 or math.inf, got {m!r}")


def _check_theta(theta):
    try:
        ok = 0 < theta <= 1
    except TypeError:
        ok = False
    if not ok:
        raise ParameterError(f"theta must satisfy 0 < theta <= 1, got {theta!r}")


def _theta_fraction(theta) -> Fraction:
    """Exact rational view of theta (floats map to their binary value)."""
    if isinstance(theta, Rational):
        return Fraction(theta)
    return Fraction(float(theta))


@dataclass(frozen=True)
class OccParams:
    """Parameters of the occupancy count: n balls, m bins, retention theta."""

    n: int
    m: object  # int >= 1 or math.inf
    theta: object  # 0 < theta <= 1; Fraction noted for exact backends

    def __post_init__(self):
        if not _is_count(self.n) or self.n < 0:
            raise ParameterError(f"n must be an integer >= 0, got {self.n!r}")
        _check_bins(self.m)
        _check_theta(self.theta)

    @property
    def infinite_bins(self) -> bool:
        return self.m == INF


@dataclass(frozen=True)
class NegOccParams:
    """Parameters of the waiting time to k occupied bins."""

    m: object  # int >= 1 or math.inf
    k: int
    theta: object

    def __post_init__(self):
        _check_bins(self.m)
        if not _is_count(self.k) or self.k < 1:
            raise ParameterError(f"k must be an integer >= 1, got {self.k!r}")
        if self.m != INF and self.k > self.m:
            raise ParameterError(f"k must be <= m, got k={self.k}, m={self.m}")
        _check_theta(self.theta)

    @property
    def infinite_bins(self) -> bool:
        return self.m == INF


@dataclass(frozen=True)
class SpillageParams:
    """Spillage given the count: n balls total, k occupied, shift phi."""

    n: int
    k: int
    phi: object  # 0 <= phi <= math.inf

    def __post_init__(self):
        if not _is_count(self.n) or self.n < 0:
            raise ParameterError(f"n must be an integer >= 0, got {self.n!r}")
        if not _is_count(self.k) or not 0 <= self.k <= self.n:
            raise ParameterError(f"k must be an integer in [0, n], got {self.k!r}")
        if self.phi != INF:
            try:
                ok = self.phi >= 0
            except TypeError:
                ok = False
            if not ok:
                raise ParameterError(f"phi must be >= 0 or math.inf, got {self.phi!r}")


# ---------------------------------------------------------------------------
# occupancy count: pmf backends


_BLOCK_THRESHOLD_STEPS = 512  # below this the plain loop wins
_BLOCK_MAX_WIDTH = 2048  # dense block matrix memory cap
_BLOCK_SIZE = 128


def _banded_coeffs(n, m, theta):
    K = min(n, m)
    ks = np.arange(K + 1)
    stay = 1.0 - theta * (m - ks) / m
    up = theta * (m - ks) / m
    return K, stay, up


def _step_loop(p, stay, up, steps):
    if len(p) == 1:
        return p
    tmp = np.empty(len(p) - 1)
    head, uh, tail = p[:-1], up[:-1], p[1:]
    for _ in range(steps):
        np.multiply(head, uh, out=tmp)
        p *= stay
        tail += tmp
    return p

def _block_power_dense(stay, up, block):
    """Dense matrix of `block` chained one-ball updates.

    Built by repeated band squaring; every entry is a sum of products
    of coefficients in [0, 1], so no cancellation occurs.
    """
    width = len(stay)
    bands = [stay.copy(), up[:-1].copy()]
    steps = 1
    while steps < block:
        wa = len(bands) - 1
        wc = min(2 * wa, width - 1)
        new = [np.zeros(width - d) for d in range(wc + 1)]
        for e, be in enumerate(bands):
            for f, bf in enumerate(bands):
                d = e + f
                if d > wc:
                    continue
                L = width - d
                new[d] += be[:L] * bf[e : e + L]
        bands = new
        steps *= 2
    dense = np.zeros((width, width))
    for d, band in enumerate(bands):
        idx = np.arange(width - d)
        dense[idx, idx + d] = band
    return np.ascontiguousarray(dense.T), steps


def _occ_recursion_float(n, m, theta) -> np.ndarray:
    """One-ball transition applied n times; probabilities over k = 0..min(n, m)."""
    theta = float(theta)
    K, stay, up = _banded_coeffs(n, m, theta)
    p = np.zeros(K + 1)
    p[0] = 1.0
    if n == 0 or K == 0:
        return p
    if n >= _BLOCK_THRESHOLD_STEPS and K + 1 <= _BLOCK_MAX_WIDTH:
        dense_t, block = _block_power_dense(stay, up, _BLOCK_SIZE)
        blocks, rem = divmod(n, block)
        for _ in range(blocks):
            p = dense_t @ p
        _step_loop(p, stay, up, rem)
        return p
    return _step_loop(p, stay, up, n)


def _occ_recursion_exact(n, m, theta) -> list:
    """Same one-ball update in rational arithmetic.  Independent of the
    closed-form route; identity checks put one on each side."""
    th = _theta_fraction(theta)
    K = min(n, m)
    stay = [1 - th * (m - k) / m for k in range(K + 1)]
    up = [th * (m - k) / m for k in range(K + 1)]
    p = [Fraction(0)] * (K + 1)
    p[0] = Fraction(1)
    for _ in range(n):
        for j in range(K, 0, -1):
            p[j] = stay[j] * p[j] + up[j - 1] * p[j - 1]
        p[0] = stay[0] * p[0]
    return p


def _occ_exact_closed(n, m, theta) -> list:
    """Closed form  theta**n / m**n * (m)_k * S(n, k, m(1-theta)/theta)."""
    th = _theta_fraction(theta)
    phi = Fraction(m) * (1 - th) / th
    tab = get_table(n, min(n, m), phi, "exact")
    base = th**n / Fraction(m) ** n
    return [base * math.perm(m, k) * tab.value(n, k) for k in range(min(n, m) + 1)]


def _occ_closed_scaledfloat(n, m, theta) -> list:
    """Float occupancy probabilities via the closed form in ScaledFloat
    arithmetic.  A third, independent route (identity checks pair it
    against the recursion backend)."""
    th = float(theta)
    phi = Fraction(m) * (1 - _theta_fraction(theta)) / _theta_fraction(theta)
    tab = get_table(n, min(n, m), phi, "scaled")
    base = ScaledFloat.from_float(th / m) ** n
    return [
        (base * ScaledFloat.from_int(math.perm(m, k)) * tab.value(n, k)).to_float()
        for k in range(min(n, m) + 1)
    ]


def _negocc_closed_exact(m, k, theta, t_max) -> list:
    """Waiting-time probabilities from the closed form

        P(T_k = t) = theta**(k+t) / m**(k+t) * (m)_k * S(k+t-1, k-1, phi)

    in rational arithmetic (phi = m*(1-theta)/theta)."""
    th = _theta_fraction(theta)
    phi = Fraction(m) * (1 - th) / th
    tab = get_table(max(k + t_max - 1, 0), k - 1, phi, "exact")
    occupied = math.perm(m, k)
    return [
        th ** (k + t) / Fraction(m) ** (k + t) * occupied * tab.value(k + t - 1, k - 1)
        for t in range(t_max + 1)
    ]


def _negocc_closed_scaledfloat(m, k, theta, t_max) -> list:
    th = float(theta)
    phi = Fraction(m) * (1 - _theta_fraction(theta)) / _theta_fraction(theta)
    tab = get_table(max(k + t_max - 1, 0), k - 1, phi, "scaled")
    occupied = ScaledFloat.from_int(math.perm(m, k))
    ratio = ScaledFloat.from_float(th / m)
    return [
        (ratio ** (k + t) * occupied * tab.value(k + t - 1, k - 1)).to_float()
        for t in range(t_max + 1)
    ]


def _binomial_pmf_float(n, theta) -> np.ndarray:
    theta = float(theta)
    if theta == 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    ks = np.arange(n + 1)
    lg = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(k + 1) + math.lgamma(n - k + 1) for k in ks])
        + ks * math.log(theta)
        + (n - ks) * math.log1p(-theta)
    )
    return np.exp(lg)


def _binomial_pmf_exact(n, theta) -> list:
    th = _theta_fraction(theta)
    return [math.comb(n, k) * th**k * (1 - th) ** (n - k) for k in range(n + 1)]


def occ_pmf(params: OccParams, backend: str = "recursion") -> Pmf:
    """PMF of the occupancy count on 0..min(n, m).

    ``backend="recursion"`` returns floats; ``backend="exact"`` returns
    Fractions from the rational closed form (subject to the exact digit
    budget).  With infinite bins both reduce to Binomial(n, theta).
    """
    n, m, theta = params.n, params.m, params.theta
    if backend == "recursion":
        if params.infinite_bins:
            probs = _binomial_pmf_float(n, theta)
        else:
            probs = _occ_recursion_float(n, m, theta)
        meta = {"backend": "recursion", "error_bound": 4e-16 * n + 1e-15}
        return Pmf(0, probs.tolist(), meta)
    if backend == "exact":
        if params.infinite_bins:
            probs = _binomial_pmf_exact(n, theta)
        else:
            probs = _occ_exact_closed(n, m, theta)
        return Pmf(0, probs, {"backend": "exact", "error_bound": 0.0})
    raise ParameterError(f"backend must be 'recursion' or 'exact', got {backend!r}")


def occ_pmf_theta_zero(n: int, m) -> Pmf:
    """Degenerate theta = 0 case: every ball falls through, K_n = 0.

    Kept out of OccParams on purpose; callers that permit theta = 0
    should branch to this constructor.
    """
    if not _is_count(n) or n < 0:
        raise ParameterError(f"n must be an integer >= 0, got {n!r}")
    _check_bins(m)
    return Pmf(0, [Fraction(1)], {"backend": "degenerate", "error_bound": 0.0})


def occ_conditional_pmf(n: int, m, theta, t: int, backend: str = "recursion") -> Pmf:
    """Occupancy count after n further balls given t bins already occupied.

    Marginally this is the count for n balls on the m - t free bins with
    retention theta * (1 - t/m), shifted up by t.
    """
    _check_bins(m)
    if m == INF:
        if not _is_count(t) or t < 0:
            raise ParameterError(f"t must be an integer >= 0, got {t!r}")
        inner = occ_pmf(OccParams(n, INF, theta), backend)
    else:
        if not _is_count(t) or not 0 <= t <= m:
            raise ParameterError(f"t must be an integer in [0, m], got {t!r}")
        if t == m:
            # no free bins: the count stays at m
            if not _is_count(n) or n < 0:
                raise ParameterError(f"n must be an integer >= 0, got {n!r}")
            _check_theta(theta)
            one = Fraction(1) if backend == "exact" else 1.0
            return Pmf(m, [one], {"backend": backend, "error_bound": 0.0})
        if isinstance(theta, Rational):
            reduced = theta * Fraction(m - t, m)
        else:
            reduced = theta * (m - t) / m
        inner = occ_pmf(OccParams(n, m - t, reduced), backend)
    return Pmf(inner.support_min + t, inner.probabilities, inner.meta)


def occ_cdf(params: OccParams, k: int, backend: str = "recursion"):
    """P(K_n <= k)."""
    if not _is_count(k):
        raise ParameterError(f"k must be an integer, got {k!r}")
    return occ_pmf(params, backend).cdf_at(k)


# ---------------------------------------------------------------------------
# occupancy count: moments


@dataclass(frozen=True)
class MomentSet:
    """First four standardized moments plus the decay terms behind them.

    ``e_terms[r-1]`` holds E_r = (1 - theta*r/m)**n, the scale of the
    r-th falling-factorial moment of the number of empty bins.
    Skewness and kurtosis are NaN for degenerate (zero variance) cases.
    """

    mean: float
    variance: float
    skewness: float
    kurtosis: float
    e_terms: tuple

    def __post_init__(self):
        if self.variance > 0 and not math.isnan(self.kurtosis):
            # Pearson inequality; equality only for two-point laws.  Tolerance
            # is relative: near-degenerate laws have huge kurtosis and the
            # float error scales with it.
            tol = 1e-9 * max(1.0, abs(self.kurtosis), self.skewness**2)
            if self.kurtosis < 1 + self.skewness**2 - tol:
                raise ParameterError(
                    "kurtosis must be >= 1 + skewness**2 for a nondegenerate law"
                )


def _moments_from_e(m, e1, e2, e3, e4) -> MomentSet:
    """Standardized moments from the four decay terms.

    The numerators cancel catastrophically near two-point laws, which
    sit exactly on the Pearson boundary kurtosis = 1 + skewness**2, and
    they cancel completely for point masses.  Everything up to the final
    ratios therefore runs in exact arithmetic over the terms as given;
    callers pass Fractions where the terms are exactly representable.
    The structural coefficients also matter: at m <= 3 the higher terms
    can exceed 1 in magnitude and grow exponentially in n, and they are
    killed by the (m-1)(m-2)(m-3) factors, never by cancellation.
    """
    E1, E2, E3, E4 = (Fraction(x) for x in (e1, e2, e3, e4))
    floats = (float(E1), float(E2), float(E3), float(E4))
    mean = float(m - m * E1)
    var_frac = m * ((m - 1) * E2 + E1 - m * E1 * E1)
    var = float(var_frac)
    if var_frac <= 0 or var == 0.0:
        return MomentSet(mean, max(var, 0.0), math.nan, math.nan, floats)
    skew_num = (
        E1
        - 3 * m * E1**2
        + 2 * m**2 * E1**3
        + 3 * (m - 1) * E2 * (1 - m * E1)
        + (m - 1) * (m - 2) * E3
    )
    skew = -float(skew_num) / (math.sqrt(m) * (var / m) ** 1.5)
    kurt_num = (
        E1
        - 4 * m * E1**2
        + 6 * m**2 * E1**3
        - 3 * m**3 * E1**4
        + 7 * (m - 1) * E2
        + 6 * (m - 1) * (m - 2) * E3
        + (m - 1) * (m - 2) * (m - 3) * E4
        - 12 * m * (m - 1) * E1 * E2
        + 6 * m**2 * (m - 1) * E1**2 * E2
        - 4 * m * (m - 1) * (m - 2) * E1 * E3
    )
    kurt = float(kurt_num) / (m * (var / m) ** 2)
    return MomentSet(mean, var, skew, kurt, floats)


def _binomial_moments(n, theta) -> MomentSet:
    theta = float(theta)
    mean = n * theta
    var = n * theta * (1 - theta)
    if var <= 0:
        return MomentSet(mean, 0.0, math.nan, math.nan, (1.0, 1.0, 1.0, 1.0))
    skew = (1 - 2 * theta) / math.sqrt(var)
    kurt = 3 + (1 - 6 * theta * (1 - theta)) / var
    return MomentSet(mean, var, skew, kurt, (1.0, 1.0, 1.0, 1.0))


def occ_factorial_moment(params: OccParams, r: int):
    """Falling-factorial moment of the EMPTY bin count:

        E[(m - K_n) * (m - K_n - 1) * ... * (m - K_n - r + 1)]
          = (m)_r * (1 - theta*r/m)**n

    Requires finite m and 0 <= r <= m.
    """
    if params.infinite_bins:
        raise ParameterError("factorial moments of the empty-bin count need finite m")
    if not _is_count(r) or not 0 <= r <= params.m:
        raise ParameterError(f"r must be an integer in [0, m], got {r!r}")
    n, m = params.n, params.m
    if isinstance(params.theta, Rational):
        return math.perm(m, r) * (1 - Fraction(params.theta) * r / m) ** n
    return math.perm(m, r) * (1.0 - float(params.theta) * r / m) ** n


def occ_moments(params: OccParams) -> MomentSet:
    """Mean, variance, skewness, kurtosis of the occupancy count."""
    if params.infinite_bins:
        return _binomial_moments(params.n, params.theta)
    return _occ_moments_finite(params.n, params.m, Fraction(params.theta))


@lru_cache(maxsize=512)
def _occ_moments_finite(n: int, m: int, theta: Fraction) -> MomentSet:
    # exact decay terms; cached because the normal approximation asks
    # for the same moments at every evaluation point
    e = [(1 - theta * r / m) ** n for r in (1, 2, 3, 4)]
    return _moments_from_e(m, *e)


def occ_moments_asymptotic(params: OccParams, regime: str) -> MomentSet:
    """Limit-regime moment approximations.

    ``regime="large_n"`` substitutes the decay terms by their
    exponential limits exp(-theta*r*n/m) (n >> m).  ``regime="large_m"``
    gives the Binomial(n, theta) moments the count converges to as the
    bins outnumber the balls.
    """
    if regime == "large_n":
        if params.infinite_bins:
            raise ParameterError("large_n regime requires finite m")
        n, m = params.n, params.m
        th = float(params.theta)
        x = Fraction(math.exp(-th * n / m))
        return _moments_from_e(m, x, x**2, x**3, x**4)
    if regime == "large_m":
        return _binomial_moments(params.n, params.theta)
    raise ParameterError(f"regime must be 'large_n' or 'large_m', got {regime!r}")


def _phi_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def occ_normal_approx(params: OccParams, k: int) -> float:
    """Continuity-corrected normal estimate of P(K_n = k)."""
    if not _is_count(k):
        raise ParameterError(f"k must be an integer, got {k!r}")
    mom = occ_moments(params)
    if not mom.variance > 0:
        raise ParameterError("normal approximation requires positive variance")
    sd = math.sqrt(mom.variance)
    return _phi_cdf((k + 0.5 - mom.mean) / sd) - _phi_cdf((k - 0.5 - mom.mean) / sd)


# ---------------------------------------------------------------------------
# waiting time (negative occupancy)


def _negocc_probs_float(m, k, theta, t_max) -> np.ndarray:
    """P(T_k = t), t = 0..t_max, via the running occupancy recursion:

        P(T_k = t) = theta * (m-k+1)/m * Occ(k-1 | k+t-1, m, theta)

    One vector of occupancy probabilities capped at index k-1 is
    advanced ball by ball; entries above k-1 never feed back down.
    """
    theta = float(theta)
    ks = np.arange(k)
    stay = 1.0 - theta * (m - ks) / m
    up = theta * (m - ks) / m
    v = np.zeros(k)
    v[0] = 1.0
    coef = theta * (m - k + 1) / m
    out = np.empty(t_max + 1)
    tmp = np.empty(k - 1) if k > 1 else None

    def advance():
        if tmp is None:
            v[0] *= stay[0]
            return
        np.multiply(v[:-1], up[:-1], out=tmp)
        np.multiply(v, stay, out=v)
        v[1:] += tmp

    for _ in range(k - 1):
        advance()
    for t in range(t_max + 1):
        out[t] = coef * v[k - 1]
        advance()
    return out


def _negocc_probs_exact(m, k, theta, t_max) -> list:
    th = _theta_fraction(theta)
    stay = [1 - th * (m - j) / m for j in range(k)]
    up = [th * (m - j) / m for j in range(k)]
    v = [Fraction(0)] * k
    v[0] = Fraction(1)
    coef = th * Fraction(m - k + 1, m)

    def advance():
        for j in range(k - 1, 0, -1):
            v[j] = stay[j] * v[j] + up[j - 1] * v[j - 1]
        v[0] = stay[0] * v[0]

    for _ in range(k - 1):
        advance()
    out = []
    for _ in range(t_max + 1):
        out.append(coef * v[k - 1])
        advance()
    return out


def _negbin_probs_float(k, theta, t_max) -> np.ndarray:
    theta = float(theta)
    if theta == 1.0:
        out = np.zeros(t_max + 1)
        out[0] = 1.0
        return out
    ts = np.arange(t_max + 1)
    lg = (
        np.array([math.lgamma(k + t) - math.lgamma(t + 1) for t in ts])
        - math.lgamma(k)
        + ts * math.log1p(-theta)
        + k * math.log(theta)
    )
    return np.exp(lg)


def negocc_pmf(params: NegOccParams, t_max: int, backend: str = "recursion") -> Pmf:
    """PMF of the waiting time on t = 0..t_max, with the remaining mass
    reported as ``meta["tail_mass"]``.

    With infinite bins this is NegativeBinomial(k, 1 - theta) on the
    number of falls-through before the k-th success.
    """
    if not _is_count(t_max) or t_max < 0:
        raise ParameterError(f"t_max must be an integer >= 0, got {t_max!r}")
    m, k, theta = params.m, params.k, params.theta
    if backend == "recursion":
        if params.infinite_bins:
            probs = _negbin_probs_float(k, theta, t_max)
        else:
            probs = _negocc_probs_float(m, k, theta, t_max)
        total = float(probs.sum())
        meta = {
            "backend": "recursion",
            "error_bound": 4e-16 * (k + t_max) + 1e-15,
            "tail_mass": max(1.0 - total, 0.0),
        }
        return Pmf(0, probs.tolist(), meta)
    if backend == "exact":
        if params.infinite_bins:
            th = _theta_fraction(theta)
            probs = [
                math.comb(k + t - 1, t) * (1 - th) ** t * th**k
                for t in range(t_max + 1)
            ]
        else:
            probs = _negocc_probs_exact(m, k, theta, t_max)
        tail = 1 - sum(probs)
        return Pmf(0, probs, {"backend": "exact", "error_bound": 0.0, "tail_mass": tail})
    raise ParameterError(f"backend must be 'recursion' or 'exact', got {backend!r}")


def negocc_cdf(params: NegOccParams, t: int) -> float:
    """P(T_k <= t), computed from the occupancy side:

        P(T_k <= t) = P(K_{k+t} >= k)

    so it cross-checks the pmf accumulation through a different route.
    """
    if not _is_count(t):
        raise ParameterError(f"t must be an integer, got {t!r}")
    if t < 0:
        return 0.0
    occ = occ_pmf(OccParams(params.k + t, params.m, params.theta))
    return float(sum(p for k, p in occ.items() if k >= params.k))


def coupon_collector_pmf(m: int, theta, t_max: int, total: bool = False) -> Pmf:
    """Waiting time to fill every bin (k = m).

    By default counts the excess balls T beyond the m-th; with
    ``total=True`` the support shifts to m + T, the total balls thrown.
    Requires finite m.
    """
    if m == INF:
        raise ParameterError("coupon collection over infinitely many bins never completes")
    base = negocc_pmf(NegOccParams(m, m, theta), t_max)
    if not total:
        return base
    return Pmf(base.support_min + m, base.probabilities, base.meta)


# ---------------------------------------------------------------------------
# spillage


def _point_mass(at: int, backend: str, extra=None) -> Pmf:
    one = Fraction(1) if backend == "exact" else 1.0
    meta = {"backend": backend, "error_bound": 0.0}
    if extra:
        meta.update(extra)
    return Pmf(at, [one], meta)


def spillage_pmf(params: SpillageParams, backend: str = "scaled") -> Pmf:
    """Distribution of the spillage r = (effective balls) - (occupied bins),
    conditional on k bins occupied, over r = 0..n-k.

        P(r) proportional to C(n, k+r) * phi**(n-k-r) * S(k+r, k)

    The normalizer is S(n, k, phi) (the terms are exactly its expansion
    around the classical numbers), so all weights are nonnegative and
    the ratio is computed term by term: in ScaledFloat for the default
    backend, in rationals for ``backend="exact"``.  phi = 0 degenerates
    to the point mass at r = n-k (all effective), phi = infinity to the
    point mass at r = 0.
    """
    n, k, phi = params.n, params.k, params.phi
    if backend not in ("scaled", "exact"):
        raise ParameterError(f"backend must be 'scaled' or 'exact', got {backend!r}")
    if phi == INF:
        return _point_mass(0, backend)
    phi_frac = Fraction(phi) if isinstance(phi, Rational) else Fraction(float(phi))
    if phi_frac == 0:
        return _point_mass(n - k, backend)
    if backend == "exact":
        kernel = [
            math.comb(n, k + r) * phi_frac ** (n - k - r) * stirling_central(k + r, k)
            for r in range(n - k + 1)
        ]
        z = sum(kernel)
        return Pmf(0, [t / z for t in kernel], {"backend": "exact", "error_bound": 0.0})
    phi_s = ScaledFloat.from_fraction(phi_frac)
    kernel = [
        ScaledFloat.from_int(math.comb(n, k + r) * stirling_central(k + r, k))
        * phi_s ** (n - k - r)
        for r in range(n - k + 1)
    ]
    z = ScaledFloat.ZERO
    for t in kernel:
        z = z + t
    probs = [(t / z).to_float() for t in kernel]
    err = 4e-16 * (n - k + 2)
    return Pmf(0, probs, {"backend": "scaled", "error_bound": err})


def effective_balls_given_occupancy(n: int, m, theta, k: int, backend: str = "scaled") -> Pmf:
    """Distribution of the number of balls that stuck, given K_n = k.

    This is the spillage law with phi = m*(1-theta)/theta shifted up by
    k (effective = k + spillage).  theta = 1 forces every ball
    effective (point mass at n); infinitely many bins with theta < 1
    force every effective ball into its own bin (point mass at k).
    """
    _check_bins(m)
    _check_theta(theta)
    if not _is_count(n) or n < 0:
        raise ParameterError(f"n must be an integer >= 0, got {n!r}")
    if not _is_count(k) or k < 0 or k > n or (m != INF and k > m):
        raise ParameterError(f"k must be an integer in [0, min(n, m)], got {k!r}")
    if theta == 1:
        # phi = 0 regardless of m (with infinite bins the limit is taken
        # at theta = 1 first: every ball sticks)
        return _point_mass(n, backend)
    if m == INF:
        return _point_mass(k, backend)
    th = _theta_fraction(theta)
    phi = Fraction(m) * (1 - th) / th
    inner = spillage_pmf(SpillageParams(n, k, phi), backend)
    return Pmf(inner.support_min + k, inner.probabilities, inner.meta)


# ---------------------------------------------------------------------------
# samplers


def _inverse_cdf_sample(pmf: Pmf, count: int, seed: int, stream: int) -> np.ndarray:
    if not _is_count(count) or count < 0:
        raise ParameterError(f"count must be an integer >= 0, got {count!r}")
    rng = make_rng(seed, stream)
    probs = np.array([float(p) for p in pmf.probabilities])
    cum = np.cumsum(probs)
    u = rng.random(count)
    idx = np.searchsorted(cum, u, side="right")
    idx = np.minimum(idx, len(probs) - 1)
    return idx + pmf.support_min


def occ_sample(params: OccParams, count: int, seed: int, stream: int = 0) -> np.ndarray:
    """IID occupancy counts by inverse CDF over the recursion pmf."""
    return _inverse_cdf_sample(occ_pmf(params), count, seed, stream)


def negocc_sample(params: NegOccParams, count: int, seed: int, stream: int = 0) -> np.ndarray:
    """IID waiting times.  The support is unbounded, so the pmf is
    extended until the unresolved tail is below 1e-15; draws beyond it
    (probability < 1e-15 each) clamp to the last tabulated value."""
    t_max = 64
    while True:
        pmf = negocc_pmf(params, t_max)
        if pmf.meta["tail_mass"] < 1e-15 or t_max > 1 << 26:
            break
        t_max *= 2
    return _inverse_cdf_sample(pmf, count, seed, stream)


def spillage_sample(params: SpillageParams, count: int, seed: int, stream: int = 0) -> np.ndarray:
    return _inverse_cdf_sample(spillage_pmf(params), count, seed, stream)
