"""Exact floors and comparisons of n^c for rational exponents c = a/b.

Every count downstream trusts these primitives, so the default mode decides
floor(n^c) with big-integer arithmetic (the integer b-th root of n^a) and has
zero rounding error.  A second mode evaluates n^c by directed-rounding
interval arithmetic at escalating precision; when the enclosure pins the
value between two consecutive integers it certifies the boundary with one
exact big-integer comparison, and it reports ambiguity rather than guessing
when the enclosure still spans several integers at the precision cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction

import gmpy2
import numpy as np

__all__ = [
    "AmbiguousAtMaxPrecision",
    "Exponent",
    "Ordering",
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "cmp_pow",
    "count_n_in_pow_window",
    "floor_pow",
    "floor_pow_block",
    "floor_pow_ratio",
    "floor_root",
]

# Float fast path: trust floor(float(n**c)) only when the value is small
# enough that the worst-case libm + exponent-rounding error (~5e-15 relative)
# stays far below the 1e-4 distance-to-integer screen.
_FAST_PATH_CAP = 4e9
_FAST_PATH_MARGIN = 1e-4


class AmbiguousAtMaxPrecision(Exception):
    """Interval evaluation still straddles an integer at the precision cap."""


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class PrecisionPolicy:
    """Escalation schedule for interval evaluation of n^c."""

    start_bits: int = 128
    max_bits: int = 4096
    escalation_factor: float = 2.0

    def __post_init__(self):
        if self.start_bits < 64:
            raise ValueError("start_bits must be >= 64")
        if self.max_bits < self.start_bits:
            raise ValueError("max_bits must be >= start_bits")
        if self.escalation_factor <= 1:
            raise ValueError("escalation_factor must be > 1")

    def next_bits(self, bits: int) -> int:
        return min(self.max_bits, math.ceil(bits * self.escalation_factor))


DEFAULT_POLICY = PrecisionPolicy()

EXACT_RATIONAL = "exact-rational"
REAL_INTERVAL = "real-interval"


@dataclass(frozen=True)
class Exponent:
    """The exponent c = a/b > 1 (c = 1 allowed for identity checks).

    ``mode`` selects how floor/comparison queries are answered:
    exact-rational uses big-integer roots, real-interval uses escalating
    interval arithmetic.  ``real_approx`` is a decimal rendering of c kept
    for real-interval exponents (>= 128 bits worth of digits).
    """

    a: int
    b: int
    mode: str = EXACT_RATIONAL
    real_approx: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("exponent a/b must have positive numerator and denominator")
        g = math.gcd(self.a, self.b)
        if g != 1:
            object.__setattr__(self, "a", self.a // g)
            object.__setattr__(self, "b", self.b // g)
        if self.a < self.b:
            raise ValueError(f"exponent {self.a}/{self.b} < 1 is not supported")
        if self.mode not in (EXACT_RATIONAL, REAL_INTERVAL):
            raise ValueError(f"unknown exponent mode {self.mode!r}")
        if self.mode == REAL_INTERVAL and self.real_approx is None:
            with gmpy2.context(precision=192):
                approx = gmpy2.div(gmpy2.mpfr(self.a), gmpy2.mpfr(self.b))
            object.__setattr__(self, "real_approx", f"{approx:.45f}")

    @classmethod
    def parse(cls, text: str, real: bool = False) -> "Exponent":
        """Parse "a/b" or a decimal like "1.1" (read as the exact 11/10)."""
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                frac = Fraction(int(num), int(den))
            else:
                frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse exponent {text!r}") from exc
        mode = REAL_INTERVAL if real else EXACT_RATIONAL
        return cls(frac.numerator, frac.denominator, mode=mode)

    def gamma(self) -> Fraction:
        """The reciprocal exponent 1/c, exact."""
        return Fraction(self.b, self.a)

    def theorem_range(self) -> bool:
        """True iff 1 < c < 7/6, the range the asymptotics are proved for."""
        return self.b < self.a and 6 * self.a < 7 * self.b

    def as_float(self) -> float:
        return self.a / self.b

    def __str__(self) -> str:
        return f"{self.a}/{self.b}"


def floor_root(m: int, b: int) -> int:
    """Integer b-th root: the r with r^b <= m < (r+1)^b.

    Newton iteration seeded from a log2 estimate, then certified by the two
    defining comparisons (the seed and iteration are heuristics; the final
    while loops are the contract).
    """
    if m < 0:
        raise ValueError("floor_root requires m >= 0")
    if b < 1:
        raise ValueError("floor_root requires b >= 1")
    if m == 0:
        return 0
    if b == 1:
        return m
    if b == 2:
        return math.isqrt(m)
    bits = m.bit_length()
    if bits <= b:
        return 1
    shift = max(0, bits - 53)
    lg = math.log2(m >> shift) + shift
    r = int(2.0 ** (lg / b)) + 1
    while True:
        nr = ((b - 1) * r + m // r ** (b - 1)) // b
        if nr >= r:
            break
        r = nr
    while r ** b > m:
        r -= 1
    while (r + 1) ** b <= m:
        r += 1
    return r


def _fast_floor(n: int, c: Exponent) -> int | None:
    # None means the float estimate is too close to an integer (or too
    # large) to be trusted; caller must take the exact path.
    if n.bit_length() > 512:
        return None
    v = float(n) ** (c.a / c.b)
    if v >= _FAST_PATH_CAP:
        return None
    f = math.floor(v)
    if _FAST_PATH_MARGIN < v - f < 1.0 - _FAST_PATH_MARGIN:
        return f
    return None


def _interval_pow(n: int, c: Exponent, bits: int):
    # exp((a/b) * log n) with all operands nonnegative, so rounding every
    # operation in one direction yields a true bound on that side.
    with gmpy2.context(precision=bits, round=gmpy2.RoundDown):
        lo = gmpy2.exp(gmpy2.div(gmpy2.mul(gmpy2.mpfr(c.a), gmpy2.log(n)), gmpy2.mpfr(c.b)))
    with gmpy2.context(precision=bits, round=gmpy2.RoundUp):
        hi = gmpy2.exp(gmpy2.div(gmpy2.mul(gmpy2.mpfr(c.a), gmpy2.log(n)), gmpy2.mpfr(c.b)))
    return lo, hi


def _floor_mpfr(x) -> int:
    num, den = x.as_integer_ratio()
    return num // den


def _interval_floor(n: int, c: Exponent, policy: PrecisionPolicy) -> int:
    bits = policy.start_bits
    while True:
        lo, hi = _interval_pow(n, c, bits)
        flo = _floor_mpfr(lo)
        fhi = _floor_mpfr(hi)
        if flo == fhi:
            return flo
        if fhi - flo == 1:
            # The enclosure straddles exactly the integer fhi; settle which
            # side n^c falls on with one exact comparison of n^a vs fhi^b.
            return fhi if n ** c.a >= fhi ** c.b else flo
        if bits >= policy.max_bits:
            raise AmbiguousAtMaxPrecision(
                f"floor({n}^{c}) undecided at {policy.max_bits} bits: "
                f"enclosure spans [{flo}, {fhi}]"
            )
        bits = policy.next_bits(bits)


def floor_pow(n: int, c: Exponent, policy: PrecisionPolicy | None = None) -> int:
    """floor(n^c) for n >= 1, exact in both exponent modes.

    Raises AmbiguousAtMaxPrecision when real-interval evaluation cannot
    separate the value from an integer neighbourhood within the policy cap.
    """
    if n < 1:
        raise ValueError("floor_pow requires n >= 1")
    if c.mode == REAL_INTERVAL:
        return _interval_floor(n, c, policy or DEFAULT_POLICY)
    fast = _fast_floor(n, c)
    if fast is not None:
        return fast
    return floor_root(n ** c.a, c.b)


def floor_pow_ratio(num: int, den: int, c: Exponent) -> int:
    """floor((num/den)^c) for a positive rational base, exact.

    Used for bases like X/2 with odd X; decided by r^b * den^a <= num^a.
    """
    if num < 1 or den < 1:
        raise ValueError("floor_pow_ratio requires a positive rational base")
    if den == 1:
        return floor_pow(num, c)
    pw = num ** c.a
    scale = den ** c.a
    r = floor_root(pw // scale, c.b)
    while r ** c.b * scale > pw:
        r -= 1
    while (r + 1) ** c.b * scale <= pw:
        r += 1
    return r


def cmp_pow(n: int, c: Exponent, m: int, policy: PrecisionPolicy | None = None) -> Ordering:
    """Order n^c against the integer m (exact in both modes)."""
    if n < 1 or m < 1:
        raise ValueError("cmp_pow requires n >= 1 and m >= 1")
    if c.mode == REAL_INTERVAL:
        lo, hi = _interval_pow(n, c, (policy or DEFAULT_POLICY).start_bits)
        if lo > m:
            return Ordering.GREATER
        if hi < m:
            return Ordering.LESS
        # fall through: certify the near-integer case exactly
    lhs = n ** c.a
    rhs = m ** c.b
    if lhs < rhs:
        return Ordering.LESS
    if lhs > rhs:
        return Ordering.GREATER
    return Ordering.EQUAL


def _first_n_with_pow_ge(m: int, c: Exponent) -> int:
    # Smallest n >= 1 with n^c >= m, i.e. n^a >= m^b.
    if m <= 1:
        return 1
    t = m ** c.b
    r = floor_root(t, c.a)
    return r if r ** c.a == t else r + 1


def _first_n_with_pow_ge_search(m: int, c: Exponent, n_hi: int, policy) -> int:
    # Real-interval variant: binary search on the monotone predicate
    # n^c >= m, answered through cmp_pow.  Returns n_hi + 1 when no n
    # in [1, n_hi] qualifies.
    lo, hi = 1, n_hi + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cmp_pow(mid, c, m, policy) >= Ordering.EQUAL:
            hi = mid
        else:
            lo = mid + 1
    return lo


def count_n_in_pow_window(
    m: int,
    c: Exponent,
    n_lo: int,
    n_hi: int,
    policy: PrecisionPolicy | None = None,
) -> int:
    """#{n in (n_lo, n_hi] : m <= n^c < m+1}, with exact boundary decisions."""
    if m < 1:
        raise ValueError("count_n_in_pow_window requires m >= 1")
    if n_lo >= n_hi:
        raise ValueError("count_n_in_pow_window requires n_lo < n_hi")
    if c.mode == REAL_INTERVAL:
        n1 = _first_n_with_pow_ge_search(m, c, n_hi, policy)
        n2 = _first_n_with_pow_ge_search(m + 1, c, n_hi, policy) - 1
    else:
        n1 = _first_n_with_pow_ge(m, c)
        n2 = _first_n_with_pow_ge(m + 1, c) - 1
    return max(0, min(n2, n_hi) - max(n1, n_lo + 1) + 1)


def floor_pow_block(n_lo: int, n_hi: int, c: Exponent) -> np.ndarray:
    """floor(n^c) for every n in [n_lo, n_hi] as an int64 array.

    Vectorised float screen with the same 1e-4 distance margin as the scalar
    fast path; entries too close to an integer (or too large for the screen)
    are recomputed by the exact big-integer path, so the result is exact.
    Exact-rational exponents only.
    """
    if c.mode != EXACT_RATIONAL:
        raise ValueError("floor_pow_block requires an exact-rational exponent")
    if n_lo < 1 or n_hi < n_lo:
        raise ValueError("floor_pow_block requires 1 <= n_lo <= n_hi")
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    v = np.power(ns.astype(np.float64), c.a / c.b)
    out = np.floor(v).astype(np.int64)
    frac = v - out
    unsafe = (frac < _FAST_PATH_MARGIN) | (frac > 1.0 - _FAST_PATH_MARGIN) | (v >= _FAST_PATH_CAP)
    for i in np.nonzero(unsafe)[0]:
        out[i] = floor_root(int(ns[i]) ** c.a, c.b)
    return out
