"""Cross-family identity checks.

Each ``check_*`` function evaluates both sides of a distributional
identity over its natural argument range and reports the largest
absolute discrepancy.  The two sides are deliberately routed through
different computational backends (closed form vs. recursion, rational
vs. scaled float), so agreement is evidence of correctness rather than
of evaluating the same code twice.

When every input is rational (pass ``Fraction`` parameters) the
applicable checks run entirely in exact arithmetic and a correct
implementation reports a discrepancy of exactly 0.0.  Checks involving
Poisson weights are inherently irrational and run in float, truncating
the mixing series once the unassigned weight drops below
``truncation_tail``; their reported discrepancy is bounded by that tail
plus float noise.

``run_all_checks`` sweeps the standard parameter grid and merges the
reports per identity.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .dist import (
    NegOccParams,
    OccParams,
    SpillageParams,
    _binomial_pmf_exact,
    _binomial_pmf_float,
    _negbin_probs_float,
    _negocc_closed_exact,
    _negocc_closed_scaledfloat,
    _negocc_probs_exact,
    _negocc_probs_float,
    _occ_closed_scaledfloat,
    _occ_exact_closed,
    _occ_recursion_exact,
    _theta_fraction,
    occ_pmf,
    spillage_pmf,
)
from .errors import ParameterError
from .pmf import Pmf

__all__ = [
    "IdentityReport",
    "check_random_ball_count",
    "check_occ_binomial_mixture",
    "check_binomial_poisson_mixture",
    "check_negocc_mixture",
    "check_spillage_mixture",
    "run_all_checks",
]

INF = math.inf


@dataclass(frozen=True, eq=False)
class IdentityReport:
    identity_name: str
    grid: tuple  # every evaluated point, as parameter dicts
    max_abs_discrepancy: float
    worst_case: dict  # the grid entry realizing the maximum

    def __post_init__(self):
        if self.max_abs_discrepancy < 0:
            raise ParameterError("max_abs_discrepancy must be >= 0")
        if self.worst_case not in self.grid:
            raise ParameterError("worst_case must be one of the grid points")


def _report(name, points, diffs) -> IdentityReport:
    worst = max(range(len(points)), key=lambda i: diffs[i])
    return IdentityReport(
        identity_name=name,
        grid=tuple(points),
        max_abs_discrepancy=float(diffs[worst]),
        worst_case=points[worst],
    )


def _merge(name, reports) -> IdentityReport:
    grid = tuple(pt for r in reports for pt in r.grid)
    worst = max(reports, key=lambda r: r.max_abs_discrepancy)
    return IdentityReport(
        identity_name=name,
        grid=grid,
        max_abs_discrepancy=worst.max_abs_discrepancy,
        worst_case=worst.worst_case,
    )


def _all_rational(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _occ_support(n, m) -> int:
    return n if m == INF else min(n, m)


def _row_get(row, k):
    # lists are full base-0 vectors, Pmf objects carry a support offset
    if isinstance(row, Pmf):
        return row[k]
    if 0 <= k < len(row):
        return row[k]
    return 0


# ---------------------------------------------------------------------------


def check_random_ball_count(pgf, support_hint, m: int, theta) -> IdentityReport:
    """Occupancy count under a random number of balls N.

    Left side: the finite-difference formula driven only by the
    probability generating function of N,

        P(K_N = k) = C(m, k) * sum_i C(k, i) (-1)**(k-i) G_N(1 - theta*(m-i)/m)

    Right side: direct mixing  sum_n P(N = n) Occ(k | n, m, theta)  with
    the occupancy rows from the recursion backend.

    ``support_hint`` supplies the pmf of N as (n, probability) pairs;
    any probability mass it omits inflates the reported discrepancy, so
    truncate it below 1e-14.  Exact arithmetic is used when theta and
    every hint probability are rational and the pgf maps rationals to
    rationals.
    """
    if m == INF or not isinstance(m, int) or m < 1:
        raise ParameterError(f"m must be a finite integer >= 1, got {m!r}")
    hints = [(int(n), p) for n, p in support_hint]
    if not hints:
        raise ParameterError("support_hint must provide at least one (n, p) pair")
    if any(n < 0 or p < 0 for n, p in hints):
        raise ParameterError("support_hint entries must have n >= 0 and p >= 0")
    one = pgf(Fraction(1)) if _all_rational(theta) else pgf(1.0)
    if abs(float(one) - 1.0) > 1e-12:
        raise ParameterError(f"pgf(1) must be 1 within 1e-12, got {float(one)!r}")
    exact = _all_rational(theta, *(p for _, p in hints)) and isinstance(one, Rational)

    n_top = max(n for n, _ in hints)
    if exact:
        th = _theta_fraction(theta)
        args = [1 - th * Fraction(m - i, m) for i in range(m + 1)]
        gvals = [pgf(a) for a in args]
        rows = {n: _occ_recursion_exact(n, m, th) for n, _ in hints}
        zero = Fraction(0)
    else:
        th = float(theta)
        gvals = [pgf(1.0 - th * (m - i) / m) for i in range(m + 1)]
        rows = {n: occ_pmf(OccParams(n, m, th)) for n, _ in hints}
        zero = 0.0

    points, diffs = [], []
    for k in range(min(n_top, m) + 1):
        lhs = zero
        for i in range(k + 1):
            term = math.comb(k, i) * gvals[i]
            lhs = lhs + (term if (k - i) % 2 == 0 else -term)
        lhs = math.comb(m, k) * lhs
        rhs = zero
        for n, p in hints:
            rhs = rhs + p * _row_get(rows[n], k)
        points.append({"m": m, "theta": theta, "k": k})
        diffs.append(abs(float(lhs - rhs)))
    return _report("random_ball_count", points, diffs)


def check_occ_binomial_mixture(n: int, m, theta, gamma) -> IdentityReport:
    """Two-stage thinning of the occupancy count:

        Occ(k | n, m, gamma*theta) = sum_r Bin(r | n, theta) Occ(k | r, m, gamma)

    Left side by closed form (rational, or ScaledFloat for float
    input), right side by mixing recursion-backend rows.
    """
    OccParams(n, m, theta)
    OccParams(n, m, gamma)
    exact = _all_rational(theta, gamma)
    if exact:
        prod = _theta_fraction(theta) * _theta_fraction(gamma)
        if m == INF:
            lhs = _binomial_pmf_exact(n, prod)
            rows = [_binomial_pmf_exact(r, _theta_fraction(gamma)) for r in range(n + 1)]
        else:
            lhs = _occ_exact_closed(n, m, prod)
            rows = [_occ_recursion_exact(r, m, _theta_fraction(gamma)) for r in range(n + 1)]
        weights = _binomial_pmf_exact(n, _theta_fraction(theta))
        zero = Fraction(0)
    else:
        prod = float(theta) * float(gamma)
        if m == INF:
            lhs = list(_binomial_pmf_float(n, prod))
            rows = [list(_binomial_pmf_float(r, float(gamma))) for r in range(n + 1)]
        else:
            lhs = _occ_closed_scaledfloat(n, m, prod)
            rows = [occ_pmf(OccParams(r, m, float(gamma))) for r in range(n + 1)]
        weights = list(_binomial_pmf_float(n, float(theta)))
        zero = 0.0

    points, diffs = [], []
    for k in range(_occ_support(n, m) + 1):
        rhs = zero
        for r in range(n + 1):
            rhs = rhs + weights[r] * _row_get(rows[r], k)
        points.append({"n": n, "m": m, "theta": theta, "gamma": gamma, "k": k})
        diffs.append(abs(float(lhs[k] - rhs)))
    return _report("occ_binomial_mixture", points, diffs)


def check_binomial_poisson_mixture(
    lam, m: int, theta, truncation_tail: float = 1e-14, *, gamma=None
) -> IdentityReport:
    """Poisson number of balls gives an exactly binomial occupancy count:

        Bin(k | m, 1 - exp(-lam*theta/m)) = sum_r Pois(r | lam) Occ(k | r, m, theta)

    Provide ``lam`` directly, or pass ``lam=None`` with ``gamma`` in
    (0, 1) to use lam = m*|ln(1-gamma)|/theta, which makes the left
    side Bin(k | m, gamma).  Float arithmetic throughout (the weights
    are irrational); the mixing series is truncated once the remaining
    Poisson mass is below ``truncation_tail``, so discrepancies up to
    ``truncation_tail`` plus float noise are expected.
    """
    if m == INF or not isinstance(m, int) or m < 1:
        raise ParameterError(f"m must be a finite integer >= 1, got {m!r}")
    if (lam is None) == (gamma is None):
        raise ParameterError("provide exactly one of lam and gamma")
    th = float(theta)
    if not 0 < th <= 1:
        raise ParameterError(f"theta must satisfy 0 < theta <= 1, got {theta!r}")
    if gamma is not None:
        if not 0 < gamma < 1:
            raise ParameterError(f"gamma must lie in (0, 1), got {gamma!r}")
        lam = m * abs(math.log1p(-float(gamma))) / th
        p_star = float(gamma)
    else:
        lam = float(lam)
        if lam <= 0:
            raise ParameterError(f"lam must be > 0, got {lam!r}")
        p_star = -math.expm1(-lam * th / m)
    if not 0 < truncation_tail < 1:
        raise ParameterError("truncation_tail must lie in (0, 1)")

    lhs = _binomial_pmf_float(m, p_star)

    # one occupancy vector advanced ball by ball, mixed with Poisson weights
    rhs = [0.0] * (m + 1)
    v = [0.0] * (m + 1)
    v[0] = 1.0
    w = math.exp(-lam)  # Pois(0 | lam)
    assigned = 0.0
    r = 0
    while assigned < 1.0 - truncation_tail:
        for k in range(m + 1):
            rhs[k] += w * v[k]
        assigned += w
        for k in range(m, 0, -1):
            v[k] = v[k] * (1 - th * (m - k) / m) + v[k - 1] * th * (m - k + 1) / m
        v[0] *= 1 - th
        r += 1
        w *= lam / r

    points, diffs = [], []
    for k in range(m + 1):
        points.append({"m": m, "theta": theta, "lam": lam, "k": k})
        diffs.append(abs(lhs[k] - rhs[k]))
    return _report("binomial_poisson_mixture", points, diffs)


def check_negocc_mixture(m, k: int, theta, gamma, t_max: int = 12) -> IdentityReport:
    """Two-stage thinning of the waiting time:

        NegOcc(t | m, k, gamma*theta)
          = sum_{r=0}^t NegBin(t-r | k+r, 1-theta) NegOcc(r | m, k, gamma)

    where NegBin(j | a, p) = C(a+j-1, j) p**j (1-p)**a counts the
    falls-through interleaved among the first k+r effective balls.
    Left side by closed form, right side by mixing the recursion.
    """
    NegOccParams(m, k, theta)
    NegOccParams(m, k, gamma)
    if not isinstance(t_max, int) or t_max < 0:
        raise ParameterError(f"t_max must be an integer >= 0, got {t_max!r}")
    exact = _all_rational(theta, gamma)
    if exact:
        th = _theta_fraction(theta)
        ga = _theta_fraction(gamma)
        prod = th * ga
        if m == INF:
            lhs = [
                math.comb(k + t - 1, t) * (1 - prod) ** t * prod**k
                for t in range(t_max + 1)
            ]
            inner = [
                math.comb(k + r - 1, r) * (1 - ga) ** r * ga**k
                for r in range(t_max + 1)
            ]
        else:
            lhs = _negocc_closed_exact(m, k, prod, t_max)
            inner = _negocc_probs_exact(m, k, ga, t_max)
        fall = 1 - th
        zero = Fraction(0)
    else:
        th = float(theta)
        ga = float(gamma)
        prod = th * ga
        if m == INF:
            lhs = list(_negbin_probs_float(k, prod, t_max))
            inner = list(_negbin_probs_float(k, ga, t_max))
        else:
            lhs = _negocc_closed_scaledfloat(m, k, prod, t_max)
            inner = list(_negocc_probs_float(m, k, ga, t_max))
        fall = 1.0 - th
        zero = 0.0

    points, diffs = [], []
    for t in range(t_max + 1):
        rhs = zero
        for r in range(t + 1):
            nb = math.comb(k + t - 1, t - r) * fall ** (t - r) * th ** (k + r)
            rhs = rhs + nb * inner[r]
        points.append({"m": m, "k": k, "theta": theta, "gamma": gamma, "t": t})
        diffs.append(abs(float(lhs[t] - rhs)))
    return _report("negocc_mixture", points, diffs)


def check_spillage_mixture(n: int, m, theta) -> IdentityReport:
    """Decomposition of the effective-ball count:

        Bin(s | n, theta) = sum_{k=0}^{s} Spillage(s-k | n, k, phi) Occ(k | n, m, theta)

    with phi = m*(1-theta)/theta: conditioning the binomially
    distributed effective count on the occupancy count and re-mixing
    must give the binomial back.  theta = 1 collapses every spillage
    factor to a point mass.
    """
    OccParams(n, m, theta)
    exact = _all_rational(theta)
    if exact:
        th = _theta_fraction(theta)
        lhs = _binomial_pmf_exact(n, th)
        occ = (
            _binomial_pmf_exact(n, th)
            if m == INF
            else _occ_recursion_exact(n, m, th)
        )
        if th == 1:
            phi = Fraction(0)
        elif m == INF:
            phi = INF
        else:
            phi = Fraction(m) * (1 - th) / th
        spill = [
            spillage_pmf(SpillageParams(n, k, phi), "exact")
            for k in range(len(occ))
        ]
        zero = Fraction(0)
    else:
        th = float(theta)
        lhs = list(_binomial_pmf_float(n, th))
        pm = occ_pmf(OccParams(n, m, th))
        occ = [pm[k] for k in range(_occ_support(n, m) + 1)]
        if th == 1:
            phi = Fraction(0)
        elif m == INF:
            phi = INF
        else:
            phi = Fraction(m) * (1 - _theta_fraction(th)) / _theta_fraction(th)
        spill = [
            spillage_pmf(SpillageParams(n, k, phi), "scaled")
            for k in range(len(occ))
        ]
        zero = 0.0

    points, diffs = [], []
    for s in range(n + 1):
        rhs = zero
        for k in range(min(s, len(occ) - 1) + 1):
            rhs = rhs + occ[k] * spill[k][s - k]
        points.append({"n": n, "m": m, "theta": theta, "s": s})
        diffs.append(abs(float(lhs[s] - rhs)))
    return _report("spillage_mixture", points, diffs)


# ---------------------------------------------------------------------------


def run_all_checks(grid: str = "full") -> list:
    """Run every identity over the standard parameter grid.

    ``grid="full"`` (default): n, m, k up to 8; theta, gamma over
    {3/10, 7/10, 1}; Poisson rate over {1, 3}.  ``grid="small"`` is a
    fast subset.  Returns one merged IdentityReport per identity.
    """
    if grid == "full":
        ns = range(9)
        ms = range(1, 9)
        ths = [Fraction(3, 10), Fraction(7, 10), Fraction(1)]
        lams = [1.0, 3.0]
        t_max = 8
    elif grid == "small":
        ns = (0, 2, 5)
        ms = (1, 3, 6)
        ths = [Fraction(7, 10), Fraction(1)]
        lams = [1.0]
        t_max = 5
    else:
        raise ParameterError(f"grid must be 'small' or 'full', got {grid!r}")

    by_name = {}

    def add(rep):
        by_name.setdefault(rep.identity_name, []).append(rep)

    for m in ms:
        for th in ths:
            for ga in ths:
                for n in ns:
                    add(check_occ_binomial_mixture(n, m, th, ga))
                for k in {1, min(2, m), m}:
                    add(check_negocc_mixture(m, k, th, ga, t_max))
            for n in ns:
                add(check_spillage_mixture(n, m, th))
            for lam in lams:
                add(check_binomial_poisson_mixture(lam, m, th))
            for n0 in (0, 4, 8):
                add(
                    check_random_ball_count(
                        lambda z, n0=n0: z**n0, [(n0, Fraction(1))], m, th
                    )
                )
            # N ~ Binomial(6, 1/2)
            half = Fraction(1, 2)
            add(
                check_random_ball_count(
                    lambda z: (1 - half + half * z) ** 6,
                    [(r, b) for r, b in enumerate(_binomial_pmf_exact(6, half))],
                    m,
                    th,
                )
            )
            # N ~ Poisson(lam), float path
            for lam in lams:
                pairs = []
                w = math.exp(-lam)
                r = 0
                acc = 0.0
                while acc < 1.0 - 1e-15:
                    pairs.append((r, w))
                    acc += w
                    r += 1
                    w *= lam / r
                add(
                    check_random_ball_count(
                        lambda z, lam=lam: math.exp(lam * (z - 1.0)),
                        pairs,
                        m,
                        float(th),
                    )
                )

    return [_merge(name, reps) for name, reps in by_name.items()]
