"""Finite probability mass function container.

A ``Pmf`` stores probabilities on a contiguous integer support starting
at ``support_min``.  Values may be floats or ``fractions.Fraction``
(exact backends return Fractions).  ``meta`` records which backend
produced the values and a coarse upper bound on the numerical error of
each entry; truncated distributions additionally report the mass beyond
the stored support under ``meta["tail_mass"]``.
"""

from fractions import Fraction

from .errors import ParameterError

__all__ = ["Pmf"]

_SUM_TOL = 1e-9


class Pmf:
    """Probability mass on consecutive integers ``support_min .. support_max``.

    Zero entries at either end are trimmed at construction; they carry
    no information (mass beyond the support is structurally zero).  The
    container is immutable by convention: do not mutate ``probabilities``
    or ``meta`` after construction.
    """

    __slots__ = ("support_min", "probabilities", "meta")

    def __init__(self, support_min, probabilities, meta=None):
        probs = list(probabilities)
        support_min = int(support_min)
        while len(probs) > 1 and probs[-1] == 0:
            probs.pop()
        while len(probs) > 1 and probs[0] == 0:
            probs.pop(0)
            support_min += 1
        if not probs:
            raise ParameterError("Pmf requires at least one probability entry")
        self.support_min = support_min
        self.probabilities = tuple(probs)
        self.meta = dict(meta) if meta else {}
        self._validate()

    def _validate(self):
        for p in self.probabilities:
            if p < 0:
                raise ParameterError(f"Pmf entries must be >= 0, got {p!r}")
        total = self.total() + self.meta.get("tail_mass", 0)
        if abs(float(total) - 1.0) > _SUM_TOL:
            raise ParameterError(
                f"Pmf mass (including any reported tail) must be within {_SUM_TOL} "
                f"of 1, got {float(total)!r}"
            )

    @property
    def support_max(self):
        return self.support_min + len(self.probabilities) - 1

    @property
    def support(self):
        return range(self.support_min, self.support_max + 1)

    def __len__(self):
        return len(self.probabilities)

    def __getitem__(self, k):
        """Probability at integer k; zero off support."""
        i = k - self.support_min
        if 0 <= i < len(self.probabilities):
            return self.probabilities[i]
        return Fraction(0) if self.is_exact() else 0.0

    def __iter__(self):
        return iter(self.items())

    def items(self):
        return list(zip(self.support, self.probabilities))

    def as_dict(self):
        return dict(self.items())

    def is_exact(self) -> bool:
        return all(isinstance(p, (Fraction, int)) for p in self.probabilities)

    def total(self):
        return sum(self.probabilities)

    def cdf_at(self, k) -> float:
        """P(X <= k) from the stored entries."""
        i = k - self.support_min
        if i < 0:
            return Fraction(0) if self.is_exact() else 0.0
        return sum(self.probabilities[: i + 1])

    def mean(self):
        return sum(k * p for k, p in self.items())

    def variance(self):
        mu = self.mean()
        return sum((k - mu) ** 2 * p for k, p in self.items())

    def moment_central(self, order: int):
        mu = self.mean()
        return sum((k - mu) ** order * p for k, p in self.items())

    def to_floats(self) -> "Pmf":
        """Float copy (exact backends return Fractions)."""
        return Pmf(
            self.support_min,
            [float(p) for p in self.probabilities],
            self.meta,
        )

    def __repr__(self):
        body = ", ".join(f"{k}: {p}" for k, p in self.items())
        return f"Pmf({{{body}}})"
