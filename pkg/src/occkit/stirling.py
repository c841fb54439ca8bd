"""Noncentral Stirling numbers of the second kind.

The family S(n, k, phi) is defined by the expansion of the shifted power
``(t + phi)**n`` in falling factorials of t:

    (t + phi)**n = sum_k S(n, k, phi) * t*(t-1)*...*(t-k+1)

with phi >= 0 here (the occupancy context never needs negative shifts).
``phi = 0`` recovers the classical Stirling numbers of the second kind.
Everything in this module is driven by the triangular recursion

    S(n+1, k, phi) = (k + phi) * S(n, k, phi) + S(n, k-1, phi)

whose terms are all nonnegative, so it is stable in floating point as
well as exact in rational arithmetic.

Two backends are provided:

* ``"exact"``  -- arbitrary-precision rationals (`fractions.Fraction`).
  Subject to a digit budget, see OCCKIT_EXACT_DIGIT_BUDGET below.
* ``"scaled"`` -- :class:`ScaledFloat`, a sign/mantissa/exponent triple
  with an unbounded base-2 exponent.  Same recursion, never overflows.

The explicit alternating-sum formula (`stirling_alternating_sum`) is
exposed for cross-checking only and deliberately refuses to run in
floating point: its terms nearly cancel, losing most significant digits
already for moderate n.

Exact computations estimate their working precision up front and raise
:class:`~occkit.errors.ResourceLimitError` when the result would exceed
the digit budget read from the environment variable
``OCCKIT_EXACT_DIGIT_BUDGET`` (default: one million decimal digits).
"""

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import ClassVar

from .errors import ParameterError, ResourceLimitError

__all__ = [
    "ExactReal",
    "ScaledFloat",
    "StirlingTable",
    "get_table",
    "stirling_noncentral",
    "stirling_central",
    "stirling_alternating_sum",
    "scaled_stirling_pi",
    "shift_noncentrality",
    "exact_digit_budget",
]

# Arbitrary-precision rational numbers.  fractions.Fraction already
# guarantees lowest terms, a positive denominator, exact field
# arithmetic, and decidable equality, so it is used as-is.
ExactReal = Fraction

_ENV_BUDGET = "OCCKIT_EXACT_DIGIT_BUDGET"
_DEFAULT_BUDGET = 1_000_000


def exact_digit_budget() -> int:
    """Decimal-digit budget for exact results, from the environment."""
    raw = os.environ.get(_ENV_BUDGET)
    if raw is None:
        return _DEFAULT_BUDGET
    try:
        budget = int(raw)
    except ValueError:
        raise ParameterError(f"{_ENV_BUDGET} must be an integer, got {raw!r}")
    if budget <= 0:
        raise ParameterError(f"{_ENV_BUDGET} must be positive, got {budget}")
    return budget


# ---------------------------------------------------------------------------
# ScaledFloat


@dataclass(frozen=True)
class ScaledFloat:
    """Nonzero value ``sign * mantissa * 2**exponent`` with mantissa in [1, 2).

    The exponent is a plain Python int, so products and same-sign sums of
    values of any magnitude neither overflow nor underflow.  Zero is
    represented as (0, 0.0, 0).  Accuracy matches float64: each
    operation rounds the mantissa once.
    """

    sign: int
    mantissa: float
    exponent: int

    ZERO: ClassVar["ScaledFloat"]  # canonical zero, set after class definition

    @staticmethod
    def from_float(x: float) -> "ScaledFloat":
        if x != x or x in (math.inf, -math.inf):
            raise ParameterError("ScaledFloat requires a finite value")
        if x == 0.0:
            return ScaledFloat.ZERO
        f, e = math.frexp(abs(x))  # f in [0.5, 1)
        return ScaledFloat(1 if x > 0 else -1, f * 2.0, e - 1)

    @staticmethod
    def from_int(n: int) -> "ScaledFloat":
        if n == 0:
            return ScaledFloat.ZERO
        a = abs(n)
        shift = max(a.bit_length() - 54, 0)
        f, e = math.frexp(float(a >> shift))
        return ScaledFloat(1 if n > 0 else -1, f * 2.0, e - 1 + shift)

    @staticmethod
    def from_fraction(q) -> "ScaledFloat":
        return ScaledFloat.from_int(q.numerator) / ScaledFloat.from_int(q.denominator)

    @staticmethod
    def coerce(x) -> "ScaledFloat":
        if isinstance(x, ScaledFloat):
            return x
        if isinstance(x, int):
            return ScaledFloat.from_int(x)
        if isinstance(x, Rational):
            return ScaledFloat.from_fraction(x)
        return ScaledFloat.from_float(float(x))

    @staticmethod
    def _normalized(sign: int, mant: float, exp: int) -> "ScaledFloat":
        if mant == 0.0:
            return ScaledFloat.ZERO
        f, e = math.frexp(mant)
        return ScaledFloat(sign, f * 2.0, exp + e - 1)

    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other):
        other = ScaledFloat.coerce(other)
        if self.sign == 0 or other.sign == 0:
            return ScaledFloat.ZERO
        return ScaledFloat._normalized(
            self.sign * other.sign,
            self.mantissa * other.mantissa,
            self.exponent + other.exponent,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ScaledFloat.coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("ScaledFloat division by zero")
        if self.sign == 0:
            return ScaledFloat.ZERO
        return ScaledFloat._normalized(
            self.sign * other.sign,
            self.mantissa / other.mantissa,
            self.exponent - other.exponent,
        )

    def __add__(self, other):
        other = ScaledFloat.coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other)
        if (lo.exponent, lo.mantissa) > (hi.exponent, hi.mantissa):
            hi, lo = lo, hi
        d = hi.exponent - lo.exponent
        if d > 54:
            # below one ulp of the larger magnitude
            return hi
        mant = hi.sign * hi.mantissa + lo.sign * math.ldexp(lo.mantissa, -d)
        if mant == 0.0:
            return ScaledFloat.ZERO
        return ScaledFloat._normalized(
            1 if mant > 0 else -1, abs(mant), hi.exponent
        )

    __radd__ = __add__

    def __neg__(self):
        if self.sign == 0:
            return self
        return ScaledFloat(-self.sign, self.mantissa, self.exponent)

    def __sub__(self, other):
        return self + (-ScaledFloat.coerce(other))

    def __pow__(self, r: int):
        if r < 0:
            raise ParameterError("ScaledFloat powers take a nonnegative integer")
        out = ScaledFloat.from_int(1)
        base = self
        while r:
            if r & 1:
                out = out * base
            base = base * base
            r >>= 1
        return out

    def _cmp_key(self):
        # sign-major ordering; exponent comparison flips for negatives
        if self.sign == 0:
            return (0, 0, 0.0)
        return (self.sign, self.sign * self.exponent, self.sign * self.mantissa)

    def __lt__(self, other):
        return self._cmp_key() < ScaledFloat.coerce(other)._cmp_key()

    def __le__(self, other):
        return self._cmp_key() <= ScaledFloat.coerce(other)._cmp_key()

    def log2(self) -> float:
        """log2 of the absolute value.  Requires a nonzero value."""
        if self.sign == 0:
            raise ParameterError("log2 of zero is undefined")
        return math.log2(self.mantissa) + self.exponent

    def to_float(self) -> float:
        """Nearest float64; +-inf on overflow, 0.0 on underflow."""
        if self.sign == 0:
            return 0.0
        try:
            x = math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.inf * self.sign
        return x * self.sign

    def to_fraction(self) -> Fraction:
        if self.sign == 0:
            return Fraction(0)
        return self.sign * Fraction(self.mantissa) * Fraction(2) ** self.exponent

    def __float__(self):
        return self.to_float()

    def __repr__(self):
        if self.sign == 0:
            return "ScaledFloat(0)"
        return f"ScaledFloat({'-' if self.sign < 0 else ''}{self.mantissa}*2**{self.exponent})"


ScaledFloat.ZERO = ScaledFloat(0, 0.0, 0)


# ---------------------------------------------------------------------------
# validation helpers


def _check_nk(n, k):
    if not isinstance(n, int) or n < 0:
        raise ParameterError(f"n must be an integer >= 0, got {n!r}")
    if not isinstance(k, int) or k < 0:
        raise ParameterError(f"k must be an integer >= 0, got {k!r}")


def _exact_phi(phi) -> Fraction:
    if isinstance(phi, float):
        if phi != phi or phi in (math.inf, -math.inf):
            raise ParameterError("phi must be finite for table construction")
        phi = Fraction(phi)
    elif isinstance(phi, Rational):
        phi = Fraction(phi)
    else:
        raise ParameterError(f"phi must be a real number, got {phi!r}")
    if phi < 0:
        raise ParameterError(f"phi must be >= 0, got {phi}")
    return phi


def _check_exact_budget(n_max, k_max, phi: Fraction):
    # magnitude estimate: S(n, k, phi) <= (k + phi + 1)**n and rational
    # denominators divide denom(phi)**n
    mag = k_max + float(phi) + 2.0
    est = int(n_max * (math.log10(mag) + math.log10(phi.denominator))) + 1
    budget = exact_digit_budget()
    if est > budget:
        raise ResourceLimitError(
            f"exact table for n={n_max}, k={k_max}, phi={phi} needs roughly "
            f"{est} decimal digits, over the {_ENV_BUDGET} budget of {budget}"
        )


# ---------------------------------------------------------------------------
# tables


class StirlingTable:
    """Triangular table of S(n, k, phi) for n <= n_max, k <= min(n, k_max).

    Built column by column: column 0 holds phi**n, and column k follows
    from column k-1 via the triangular recursion.  ``backend`` is
    ``"exact"`` (Fraction cells) or ``"scaled"`` (ScaledFloat cells).
    Construction is single-threaded; a finished table is immutable and
    safe to share between threads.
    """

    def __init__(self, n_max: int, k_max: int, phi, backend: str = "scaled"):
        _check_nk(n_max, k_max)
        if backend not in ("exact", "scaled"):
            raise ParameterError(f"backend must be 'exact' or 'scaled', got {backend!r}")
        phi_frac = _exact_phi(phi)
        k_max = min(k_max, n_max)
        self.n_max = n_max
        self.k_max = k_max
        self.backend = backend
        self.phi = phi_frac
        if backend == "exact":
            _check_exact_budget(n_max, k_max, phi_frac)
            self._columns = self._build_exact(n_max, k_max, phi_frac)
        else:
            self._columns = self._build_scaled(n_max, k_max, phi_frac)

    @staticmethod
    def _build_exact(n_max, k_max, phi):
        cols = []
        col0 = [phi**n for n in range(n_max + 1)]
        cols.append(col0)
        for k in range(1, k_max + 1):
            prev = cols[k - 1]
            shift = k + phi
            col = [Fraction(1)]  # S(k, k) = 1
            for n in range(k, n_max):
                # S(n+1, k) = (k + phi) S(n, k) + S(n, k-1)
                col.append(shift * col[n - k] + prev[n - (k - 1)])
            cols.append(col)
        return cols

    @staticmethod
    def _build_scaled(n_max, k_max, phi):
        phi_s = ScaledFloat.from_fraction(phi)
        cols = [[phi_s ** n for n in range(n_max + 1)]]
        one = ScaledFloat.from_int(1)
        for k in range(1, k_max + 1):
            prev = cols[k - 1]
            shift = ScaledFloat.from_fraction(k + phi)
            col = [one]
            for n in range(k, n_max):
                col.append(shift * col[n - k] + prev[n - (k - 1)])
            cols.append(col)
        return cols

    def value(self, n: int, k: int):
        """S(n, k, phi); zero when k > n."""
        _check_nk(n, k)
        if n > self.n_max:
            raise ParameterError(f"table holds n <= {self.n_max}, got n={n}")
        if k > n:
            return Fraction(0) if self.backend == "exact" else ScaledFloat.ZERO
        if k > self.k_max:
            raise ParameterError(f"table holds k <= {self.k_max}, got k={k}")
        return self._columns[k][n - k]

    def covers(self, n: int, k: int) -> bool:
        return n <= self.n_max and min(k, n) <= self.k_max


_table_cache: dict = {}


def get_table(n_max: int, k_max: int, phi, backend: str = "scaled") -> StirlingTable:
    """Memoized table lookup, growing the cached table as needed."""
    phi_frac = _exact_phi(phi)
    key = (phi_frac, backend)
    tab = _table_cache.get(key)
    if tab is None or not tab.covers(n_max, min(k_max, n_max)):
        if tab is not None:
            n_max = max(n_max, tab.n_max)
            k_max = max(k_max, tab.k_max)
        tab = StirlingTable(n_max, k_max, phi_frac, backend)
        _table_cache[key] = tab
    return tab


# classical (phi = 0) integer columns, grown on demand: _central[k][i] = S(k+i, k)
_central_columns: list = [[1]]
_central_n_max: int = 0


def _ensure_central(n_max: int, k_max: int):
    global _central_n_max
    k_max = min(k_max, n_max)
    while len(_central_columns) <= k_max:
        _central_columns.append([1])
    if n_max > _central_n_max:
        _central_n_max = n_max
    for k, col in enumerate(_central_columns[: k_max + 1]):
        if k == 0:
            # S(n, 0) = [n == 0]
            col.extend(0 for _ in range(len(col), _central_n_max + 1))
            continue
        prev = _central_columns[k - 1]
        for n in range(k + len(col) - 1, _central_n_max):
            col.append(k * col[n - k] + prev[n - (k - 1)])


def stirling_central(n: int, k: int) -> int:
    """Classical Stirling number of the second kind (phi = 0), exact."""
    _check_nk(n, k)
    if k > n:
        return 0
    _ensure_central(n, k)
    return _central_columns[k][n - k]


# ---------------------------------------------------------------------------
# scalar entry points


def stirling_noncentral(n: int, k: int, phi, backend: str = "scaled"):
    """S(n, k, phi) via the triangular recursion.

    Returns ``Fraction`` for the exact backend and :class:`ScaledFloat`
    for the scaled backend.  phi must be >= 0; k > n gives zero.
    """
    _check_nk(n, k)
    tab = get_table(n, min(k, n), phi, backend)
    return tab.value(n, k)


def stirling_alternating_sum(n: int, k: int, phi) -> Fraction:
    """Explicit form  (1/k!) * sum_i C(k,i) (-1)**(k-i) (i+phi)**n.

    Exact arithmetic only: the summands nearly cancel, so a floating
    point evaluation loses roughly k*log2(k+phi) bits.  Used as an
    independent cross-check of the recursion.
    """
    _check_nk(n, k)
    phi_frac = _exact_phi(phi)
    if k > n:
        return Fraction(0)
    _check_exact_budget(n, k, phi_frac)
    total = Fraction(0)
    for i in range(k + 1):
        term = math.comb(k, i) * (i + phi_frac) ** n
        total += -term if (k - i) % 2 else term
    return total / math.factorial(k)


def scaled_stirling_pi(n: int, k: int, phi) -> float:
    """Ratio Pi(n, k, phi) = S(n, k, phi) / (C(n, k) * phi**(n-k)).

    Pi >= 1 for k <= n, equals 1 at k = n, at k = 0, and in the
    phi -> infinity limit, and decreases toward 1 as phi grows.
    Requires phi > 0 (infinity allowed); returns 0.0 when k > n.
    Evaluated from the expansion in powers of 1/phi, whose coefficients
    are products of binomial ratios and classical Stirling numbers, so
    every term is nonnegative.  May return ``inf`` when the true value
    exceeds the float64 range.
    """
    _check_nk(n, k)
    if k > n:
        return 0.0
    if phi == math.inf:
        return 1.0
    phi_frac = _exact_phi(phi)
    if phi_frac <= 0:
        raise ParameterError(f"scaled_stirling_pi requires phi > 0, got {phi}")
    _ensure_central(n, k)
    inv_phi = ScaledFloat.from_fraction(1 / phi_frac)
    total = ScaledFloat.from_int(1)  # i = 0 term
    coeff = ScaledFloat.from_int(1)  # (n-k)_i / (k+i)_i, updated per i
    power = ScaledFloat.from_int(1)
    for i in range(1, n - k + 1):
        coeff = coeff * ScaledFloat.from_fraction(Fraction(n - k - i + 1, k + i))
        power = power * inv_phi
        total = total + coeff * power * ScaledFloat.from_int(_central_columns[k][i])
    return total.to_float()


def shift_noncentrality(n: int, k: int, phi_from, phi_to, backend: str = "exact"):
    """Re-expand S(n, k, phi_to) around tabulated values at phi_from.

        S(n, k, phi') = sum_r C(n, r) (phi' - phi)**r S(n-r, k, phi)

    Restricted to phi_to >= phi_from so every term is nonnegative and
    the scaled backend stays cancellation-free.
    """
    _check_nk(n, k)
    lo = _exact_phi(phi_from)
    hi = _exact_phi(phi_to)
    if hi < lo:
        raise ParameterError(
            f"shift_noncentrality requires phi_to >= phi_from, got {phi_to} < {phi_from}"
        )
    tab = get_table(n, min(k, n), lo, backend)
    delta = hi - lo
    if backend == "exact":
        total = Fraction(0)
        for r in range(n - k + 1):
            total += math.comb(n, r) * delta**r * tab.value(n - r, k)
        return total
    total = ScaledFloat.ZERO
    delta_s = ScaledFloat.from_fraction(delta)
    for r in range(n - k + 1):
        term = ScaledFloat.from_int(math.comb(n, r)) * delta_s**r * tab.value(n - r, k)
        total = total + term
    return total
