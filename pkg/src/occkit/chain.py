"""Occupancy process as a Markov chain on the number of occupied bins.

Each ball independently lands in one of ``m`` bins chosen uniformly and
sticks with probability ``theta`` (otherwise it falls through and
occupies nothing).  The occupied-bin count after each ball is a Markov
chain on {0, ..., m} that either stays put or steps up by one:

    P[t, t]   = 1 - theta * (1 - t/m)
    P[t, t+1] = theta * (1 - t/m)

``theta = 0`` is excluded everywhere here: the chain never moves and
the count is the point mass at the start state, which callers can
construct directly (see ``occkit.dist.occ_pmf_theta_zero``).

The chain is also diagonalizable in closed form; see ``spectral``.
That route is validation-grade: its change-of-basis matrices hold
binomial coefficients with alternating signs, so sums are evaluated in
exact rational arithmetic and the matrix size is capped.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .pmf import Pmf
from .rng import make_rng

__all__ = [
    "TransitionMatrix",
    "SpectralDecomposition",
    "ProcessSample",
    "build_transition",
    "occupancy_by_power",
    "spectral",
    "simulate_process",
    "FELL_THROUGH",
]

#: assignment value marking a ball that fell through (occupied nothing)
FELL_THROUGH = 0

SPECTRAL_M_LIMIT = 200


def _check_m(m):
    if not isinstance(m, int) or m < 1:
        raise ParameterError(f"m must be an integer >= 1, got {m!r}")


def _check_theta(theta):
    if not 0 < theta <= 1:
        raise ParameterError(
            f"theta must satisfy 0 < theta <= 1 (theta = 0 gives a frozen chain), got {theta!r}"
        )


def _check_n(n):
    if not isinstance(n, int) or n < 0:
        raise ParameterError(f"n must be an integer >= 0, got {n!r}")


@dataclass(frozen=True)
class TransitionMatrix:
    """Upper-bidiagonal one-ball transition matrix on states 0..m."""

    m: int
    theta: float

    def __post_init__(self):
        _check_m(self.m)
        _check_theta(self.theta)

    def entry(self, i: int, j: int) -> float:
        if not (0 <= i <= self.m and 0 <= j <= self.m):
            raise ParameterError(f"state indices must lie in [0, {self.m}]")
        if j == i:
            return 1.0 - self.theta * (self.m - i) / self.m
        if j == i + 1:
            return self.theta * (self.m - i) / self.m
        return 0.0

    def row(self, i: int):
        return [self.entry(i, j) for j in range(self.m + 1)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.m + 1, self.m + 1))
        for i in range(self.m + 1):
            out[i, i] = self.entry(i, i)
            if i < self.m:
                out[i, i + 1] = self.entry(i, i + 1)
        return out


def build_transition(m: int, theta) -> TransitionMatrix:
    return TransitionMatrix(m, theta)


def occupancy_by_power(n: int, m: int, theta, start_t: int = 0) -> Pmf:
    """Distribution of the occupied-bin count after n more balls.

    Starts the chain at ``start_t`` occupied bins and applies the
    one-ball transition n times, working only on the reachable window
    [start_t, min(start_t + n, m)].  Probabilities stay nonnegative
    throughout (every coefficient lies in [0, 1]).
    """
    _check_n(n)
    tm = build_transition(m, theta)
    if not isinstance(start_t, int) or not 0 <= start_t <= m:
        raise ParameterError(f"start_t must be an integer in [0, m], got {start_t!r}")
    lo = start_t
    hi = min(start_t + n, m)
    ks = np.arange(lo, hi + 1)
    stay = 1.0 - tm.theta * (m - ks) / m
    up = tm.theta * (m - ks) / m
    p = np.zeros(len(ks))
    p[0] = 1.0
    tmp = np.empty(len(ks) - 1) if len(ks) > 1 else None
    for _ in range(n):
        if tmp is None:
            break  # single state: hi == lo == m, chain already absorbed
        np.multiply(p[:-1], up[:-1], out=tmp)
        p *= stay
        p[1:] += tmp
    return Pmf(lo, p.tolist(), {"backend": "chain-power", "error_bound": 4e-16 * n + 1e-15})


@dataclass(frozen=True)
class SpectralDecomposition:
    """Closed-form eigendecomposition P = v diag(eigenvalues) w.

    Eigenvalues are 1 - (1 - i/m) * theta for i = 0..m.  The right and
    left eigenvector matrices hold signed binomial coefficients:

        v[i][j] = C(m-i, j-i)          w[i][j] = (-1)**(j-i) * C(m-i, j-i)

    both upper triangular, and w is the exact inverse of v.  n-step
    probabilities are alternating sums of large integers, so they are
    evaluated in exact rational arithmetic and converted to float at
    the end.  Intended for validating the power recursion, not for
    production-size m; construction refuses m > SPECTRAL_M_LIMIT.
    """

    m: int
    theta: float
    eigenvalues: tuple = field(repr=False)
    v: tuple = field(repr=False)
    w: tuple = field(repr=False)

    def eigenvalue_fractions(self):
        th = Fraction(self.theta)
        return [1 - (1 - Fraction(i, self.m)) * th for i in range(self.m + 1)]

    def probability(self, n: int, start_t: int, k: int) -> float:
        """[P^n] at (start_t, k), from the spectral sum."""
        _check_n(n)
        if not (0 <= start_t <= self.m and 0 <= k <= self.m):
            raise ParameterError(f"states must lie in [0, {self.m}]")
        return float(self._probability_fraction(n, start_t, k))

    def _probability_fraction(self, n, t, k, lam_pows=None) -> Fraction:
        if k < t:
            return Fraction(0)
        if lam_pows is None:
            lam_pows = [lam**n for lam in self.eigenvalue_fractions()]
        total = Fraction(0)
        for i in range(t, k + 1):
            total += lam_pows[i] * self.v[t][i] * self.w[i][k]
        return total

    def pmf(self, n: int, start_t: int = 0) -> Pmf:
        _check_n(n)
        lam_pows = [lam**n for lam in self.eigenvalue_fractions()]
        probs = [
            self._probability_fraction(n, start_t, k, lam_pows)
            for k in range(start_t, min(start_t + n, self.m) + 1)
        ]
        return Pmf(
            start_t,
            [float(p) for p in probs],
            {"backend": "chain-spectral", "error_bound": 1e-15},
        )

    def reconstruct_dense(self) -> np.ndarray:
        """v diag(lambda) w as floats; should reproduce the transition matrix."""
        lams = self.eigenvalue_fractions()
        size = self.m + 1
        out = np.zeros((size, size))
        for t in range(size):
            for k in range(size):
                acc = Fraction(0)
                for i in range(t, min(k, size - 1) + 1):
                    acc += lams[i] * self.v[t][i] * self.w[i][k]
                out[t, k] = float(acc)
        return out


def spectral(m: int, theta, *, m_limit: int = SPECTRAL_M_LIMIT) -> SpectralDecomposition:
    _check_m(m)
    _check_theta(theta)
    if m > m_limit:
        raise ParameterError(
            f"spectral path is validation-grade and capped at m <= {m_limit}, got m={m}"
        )
    eig = tuple(1.0 - (1.0 - i / m) * theta for i in range(m + 1))
    v = tuple(
        tuple(math.comb(m - i, j - i) if j >= i else 0 for j in range(m + 1))
        for i in range(m + 1)
    )
    w = tuple(
        tuple(
            (-1) ** (j - i) * math.comb(m - i, j - i) if j >= i else 0
            for j in range(m + 1)
        )
        for i in range(m + 1)
    )
    return SpectralDecomposition(m, float(theta), eig, v, w)


@dataclass(frozen=True)
class ProcessSample:
    """One simulated run of n balls.

    ``assignments[i]`` is the bin (1-based) occupied by ball i, or
    ``FELL_THROUGH`` (0) if it fell through.  ``occupancy`` counts the
    distinct occupied bins, ``effective`` the balls that stuck.
    """

    m: int
    theta: float
    assignments: tuple
    bin_counts: tuple
    occupancy: int
    effective: int

    def occupancy_trajectory(self):
        """K_0, K_1, ..., K_n: occupied-bin count after each ball."""
        seen = set()
        traj = [0]
        for a in self.assignments:
            if a != FELL_THROUGH:
                seen.add(a)
            traj.append(len(seen))
        return tuple(traj)


def simulate_process(n: int, m: int, theta, seed: int, stream: int = 0) -> ProcessSample:
    """Sample one occupancy process run with the counter-based generator.

    Each ball draws a uniform bin and an occupy/fall-through flag; the
    (seed, stream) pair fully determines the run.
    """
    _check_n(n)
    _check_m(m)
    _check_theta(theta)
    rng = make_rng(seed, stream)
    bins = rng.integers(1, m + 1, size=n)
    stuck = rng.random(n) < theta  # theta = 1 always sticks: random() < 1.0
    assignments = np.where(stuck, bins, FELL_THROUGH)
    counts = np.bincount(assignments[assignments != FELL_THROUGH], minlength=m + 1)[1:]
    return ProcessSample(
        m=m,
        theta=float(theta),
        assignments=tuple(int(a) for a in assignments),
        bin_counts=tuple(int(c) for c in counts),
        occupancy=int(np.count_nonzero(counts)),
        effective=int(stuck.sum()),
    )
