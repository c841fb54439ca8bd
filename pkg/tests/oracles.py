"""Brute-force enumeration oracles.

Everything here counts outcomes one by one, so it is trustworthy and
slow.  The occupancy recursions are validated against these counts on
small grids; the counts themselves involve no probability theory beyond
"each allocation is equally likely".
"""

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


@lru_cache(maxsize=None)
def enum_occupancy_counts(n: int, m: int) -> tuple:
    """counts[k] = number of the m**n equally likely allocations that
    occupy exactly k bins (every ball retained)."""
    assert m <= 8
    total = m**n
    masks = np.zeros(total, dtype=np.int64)
    idx = np.arange(total, dtype=np.int64)
    for ball in range(n):
        digit = (idx // m**ball) % m
        masks |= np.int64(1) << digit
    occ = _POPCOUNT[masks]
    counts = np.bincount(occ, minlength=min(n, m) + 1)
    return tuple(int(c) for c in counts)


def enum_occ_theta1(n: int, m: int) -> list:
    total = Fraction(m) ** n
    return [Fraction(c) / total for c in enum_occupancy_counts(n, m)]


@lru_cache(maxsize=None)
def enum_joint_counts(n: int, m: int) -> tuple:
    """joint[k][j] = number of (allocation, retention-flag) outcome pairs
    with occupancy k and j retained balls, over all m**n * 2**n pairs."""
    K = min(n, m)
    joint = [[0] * (n + 1) for _ in range(K + 1)]
    for alloc in itertools.product(range(m), repeat=n):
        bits = [1 << b for b in alloc]
        for subset in range(1 << n):
            mask = 0
            j = 0
            rem = subset
            i = 0
            while rem:
                if rem & 1:
                    mask |= bits[i]
                    j += 1
                rem >>= 1
                i += 1
            joint[mask.bit_count()][j] += 1
    return tuple(tuple(row) for row in joint)


def enum_occ(n: int, m: int, theta) -> list:
    """Occupancy pmf by exhaustive enumeration, exact rational weights."""
    th = Fraction(theta)
    denom = Fraction(m) ** n
    probs = []
    for row in enum_joint_counts(n, m):
        acc = Fraction(0)
        for j, cnt in enumerate(row):
            if cnt:
                acc += cnt * th**j * (1 - th) ** (n - j)
        probs.append(acc / denom)
    return probs


def enum_effective_joint(n: int, m: int, theta) -> dict:
    """(k, j) -> P(occupancy = k, effective = j), exact."""
    th = Fraction(theta)
    denom = Fraction(m) ** n
    out = {}
    for k, row in enumerate(enum_joint_counts(n, m)):
        for j, cnt in enumerate(row):
            if cnt:
                out[(k, j)] = cnt * th**j * (1 - th) ** (n - j) / denom
    return out


def coupon_total_mean_harmonic(m: int) -> Fraction:
    """Expected total draws to cover all m bins: m * H_m."""
    return m * sum(Fraction(1, i) for i in range(1, m + 1))


def lagrange_derivative_at(nodes, values, x0) -> Fraction:
    """Exact derivative at x0 of the polynomial through (nodes, values).

    Intended for probability masses that are polynomials in a parameter:
    sample them at distinct rational nodes (one more than the degree) and
    differentiate the interpolant, all in rational arithmetic.
    """
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        li = Fraction(0)
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            term = Fraction(1)
            for l, xl in enumerate(nodes):
                if l in (i, j):
                    continue
                term *= (x0 - xl) / (xi - xl)
            li += term / (xi - xj)
        total += yi * li
    return total
