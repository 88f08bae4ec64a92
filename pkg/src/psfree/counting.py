"""Exact evaluation of the counting sums and of their divisor-pair
decomposition.

Three direct counts:

  * carlitz_count:  #{n <= X : n and n+1 both squarefree}
  * cao_zhai_count: #{n <= X : floor(n^c) squarefree}
  * scpair_count:   #{X/2 < n <= X : floor(n^c) and floor(n^c)+1 squarefree}

and the expansion of the last one through mu^2(m) = sum_{d^2 | m} mu(d):
summing mu(d) mu(t) over coprime squarefree pairs (d, t), with k = m/d^2
running through one residue class mod t^2, of the number of n whose power
floor lands on k d^2.  The pair sum is split at dt <= z / dt > z
(small_split_term / large_split_term); with the tight k-range the two parts
recombine to the direct count exactly, integer for integer.

Two k lower bounds are implemented: the tight one (k d^2 >= floor((X/2)^c),
an exact identity) and a shifted one (k d^2 > (X/2)^c) that drops at most
one k per pair; `decompose` computes both and the dropped boundary term
explicitly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .exactpow import (
    EXACT_RATIONAL,
    Exponent,
    floor_pow,
    floor_pow_block,
    floor_pow_ratio,
    floor_root,
    count_n_in_pow_window,
)
from .sieve import DEFAULT_WINDOW, mobius_window, squarefree_window

__all__ = [
    "CountReport",
    "DecompositionReport",
    "ErrorSample",
    "NotInvertible",
    "cao_zhai_count",
    "carlitz_count",
    "count_k_in_progression",
    "decompose",
    "error_sample",
    "large_split_term",
    "mod_inverse",
    "scpair_count",
    "small_split_term",
]


class NotInvertible(Exception):
    """Modular inverse requested for non-coprime arguments."""


@dataclass
class CountReport:
    sum_kind: str  # "carlitz" | "caoZhai" | "scPair"
    x: int
    c: Exponent | None
    count: int
    elapsed: float

    def to_dict(self) -> dict:
        return {
            "sumKind": self.sum_kind,
            "X": self.x,
            "c": str(self.c) if self.c is not None else None,
            "count": self.count,
            "elapsed": self.elapsed,
        }


@dataclass
class DecompositionReport:
    """Both k-range conventions side by side.

    s1/s2/boundary use the shifted lower bound, where the boundary term is
    nonzero in general; s1_pre/s2_pre use the tight bound, where the pair
    sum alone reproduces the direct count.
    """

    x: int
    c: Exponent
    z: float
    s1: int
    s2: int
    boundary: int
    direct: int
    identity_holds: bool
    s1_pre: int
    s2_pre: int
    pre_identity_holds: bool

    def to_dict(self) -> dict:
        return {
            "X": self.x,
            "c": str(self.c),
            "z": self.z,
            "s1": self.s1,
            "s2": self.s2,
            "boundary": self.boundary,
            "direct": self.direct,
            "identityHolds": self.identity_holds,
            "s1Pre": self.s1_pre,
            "s2Pre": self.s2_pre,
            "preIdentityHolds": self.pre_identity_holds,
        }


@dataclass
class ErrorSample:
    x: int
    c: Exponent | None
    count: int
    main_term: float
    error: float
    normalized_error: float
    elapsed_seconds: float
    sum_kind: str = "scPair"

    def to_row(self) -> dict:
        return {
            "X": self.x,
            "c": str(self.c) if self.c is not None else "",
            "count": self.count,
            "mainTerm": self.main_term,
            "error": self.error,
            "normalizedError": self.normalized_error,
            "elapsedSeconds": self.elapsed_seconds,
        }


def mod_inverse(a: int, m: int) -> int:
    """a^-1 mod m in [1, m-1], by the extended Euclid recurrences."""
    if m < 2:
        raise ValueError("mod_inverse requires m >= 2")
    a = a % m
    old_r, r = a, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NotInvertible(f"gcd({a}, {m}) = {old_r} != 1")
    return old_s % m


def count_k_in_progression(
    k_lo: float, k_hi: float, modulus: int, residue: int
) -> tuple[int, Iterator[int]]:
    """Integers k in (k_lo, k_hi] with k = residue (mod modulus).

    Returns the closed-form count and an ascending iterator (a range).
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if not 0 <= residue < modulus:
        raise ValueError("residue must lie in [0, modulus)")
    first = math.floor(k_lo) + 1  # smallest integer > k_lo
    last = math.floor(k_hi)
    first += (residue - first) % modulus
    if first > last:
        return 0, iter(range(0))
    count = (last - first) // modulus + 1
    return count, iter(range(first, last + 1, modulus))


def _floor_pow_half(x: int, c: Exponent) -> int:
    # floor((X/2)^c), exact for odd X as well.
    if x % 2 == 0:
        return floor_pow(x // 2, c)
    return floor_pow_ratio(x, 2, c)


def carlitz_count(x: int) -> CountReport:
    """Exact #{n <= X : mu^2(n) mu^2(n+1) = 1}, by windowed sieving with a
    one-element overlap so every pair (n, n+1) is seen."""
    if x < 1:
        raise ValueError("carlitz_count requires X >= 1")
    start = time.perf_counter()
    total = 0
    lo = 1
    while lo <= x:
        hi = min(lo + DEFAULT_WINDOW, x + 1)
        flags = squarefree_window(lo, hi + 1).values
        total += int(np.sum(flags[: hi - lo].astype(np.uint16) & flags[1 : hi - lo + 1]))
        lo = hi
    return CountReport("carlitz", x, None, total, time.perf_counter() - start)


def _floors_for_chunk(n_lo: int, n_hi: int, c: Exponent) -> np.ndarray:
    if c.mode == EXACT_RATIONAL:
        return floor_pow_block(n_lo, n_hi, c)
    return np.array([floor_pow(n, c) for n in range(n_lo, n_hi + 1)], dtype=np.int64)


def cao_zhai_count(x: int, c: Exponent) -> CountReport:
    """Exact #{n <= X : floor(n^c) squarefree}."""
    if x < 1:
        raise ValueError("cao_zhai_count requires X >= 1")
    start = time.perf_counter()
    total = 0
    lo = 1
    while lo <= x:
        hi = min(lo + DEFAULT_WINDOW - 1, x)
        ms = _floors_for_chunk(lo, hi, c)
        m_lo, m_hi = int(ms[0]), int(ms[-1]) + 1
        flags = squarefree_window(m_lo, m_hi).values
        total += int(np.sum(flags[ms - m_lo]))
        lo = hi + 1
    return CountReport("caoZhai", x, c, total, time.perf_counter() - start)


def scpair_count(x: int, c: Exponent) -> CountReport:
    """Exact #{X/2 < n <= X : floor(n^c) and floor(n^c)+1 both squarefree};
    n > X/2 means n >= floor(X/2) + 1."""
    if x < 2:
        raise ValueError("scpair_count requires X >= 2")
    start = time.perf_counter()
    total = 0
    lo = x // 2 + 1
    while lo <= x:
        hi = min(lo + DEFAULT_WINDOW - 1, x)
        ms = _floors_for_chunk(lo, hi, c)
        m_lo, m_hi = int(ms[0]), int(ms[-1]) + 2
        flags = squarefree_window(m_lo, m_hi).values
        idx = ms - m_lo
        total += int(np.sum(flags[idx].astype(np.uint16) & flags[idx + 1]))
        lo = hi + 1
    return CountReport("scPair", x, c, total, time.perf_counter() - start)


def _z_test(x: int, c: Exponent, z_override):
    # Membership test for the small side of the dt-split.  The default rule
    # dt <= X^((2c-1)/4) is decided exactly for integer dt through
    # floor(X^((2a-b)/(4b))) = floor_root(X^(2a-b), 4b).
    if z_override is None:
        cut = floor_root(x ** (2 * c.a - c.b), 4 * c.b)
        return lambda dt: dt <= cut
    if math.isinf(z_override):
        return lambda dt: True
    zv = float(z_override)
    return lambda dt: dt <= zv


@dataclass
class _SplitSums:
    small_tight: int = 0
    large_tight: int = 0
    small_shifted: int = 0
    large_shifted: int = 0


def _split_sums(x: int, c: Exponent, z_override=None) -> tuple[_SplitSums, int, int]:
    """One pass over coprime squarefree (d, t) pairs, accumulating the pair
    sums for both k lower bounds.  Returns (sums, boundary_m, boundary_inner)
    where boundary_m = floor((X/2)^c) is the single power value the shifted
    bound can drop."""
    if x < 2:
        raise ValueError("split terms require X >= 2")
    mx = floor_pow(x, c)
    tf = _floor_pow_half(x, c)
    n_lo, n_hi = x // 2, x
    d_max = math.isqrt(mx)
    t_max = math.isqrt(mx + 1)
    mu = mobius_window(0, max(d_max, t_max) + 1).values
    in_small = _z_test(x, c, z_override)
    sliver_inner = count_n_in_pow_window(tf, c, n_lo, n_hi)
    sums = _SplitSums()
    for d in range(1, d_max + 1):
        mu_d = int(mu[d])
        if mu_d == 0:
            continue
        dd = d * d
        k_max = mx // dd
        k_min = max(1, -(-tf // dd))  # smallest k with k d^2 >= floor((X/2)^c)
        if k_min > k_max:
            continue
        for t in range(1, t_max + 1):
            mu_t = int(mu[t])
            if mu_t == 0 or math.gcd(d, t) != 1:
                continue
            tt = t * t
            residue = 0 if tt == 1 else (-mod_inverse(dd, tt)) % tt
            _, ks = count_k_in_progression(k_min - 1, k_max, tt, residue)
            subtotal = 0
            for k in ks:
                subtotal += count_n_in_pow_window(k * dd, c, n_lo, n_hi)
            # k = tf/d^2 is included by the tight bound only
            sliver = 0
            if sliver_inner and tf % dd == 0:
                ks = tf // dd
                if k_min <= ks <= k_max and ks % tt == residue:
                    sliver = sliver_inner
            term = mu_d * mu_t
            if in_small(d * t):
                sums.small_tight += term * subtotal
                sums.small_shifted += term * (subtotal - sliver)
            else:
                sums.large_tight += term * subtotal
                sums.large_shifted += term * (subtotal - sliver)
    return sums, tf, sliver_inner


def small_split_term(x: int, c: Exponent, z_override=None) -> int:
    """Pair sum over dt <= z with the tight k-range (z defaults to the
    X^((2c-1)/4) rule; pass 1 or math.inf to move the split)."""
    return _split_sums(x, c, z_override)[0].small_tight


def large_split_term(x: int, c: Exponent, z_override=None) -> int:
    """Pair sum over dt > z with the tight k-range."""
    return _split_sums(x, c, z_override)[0].large_tight


def decompose(x: int, c: Exponent, z_override=None) -> DecompositionReport:
    """Exact decomposition report for S(X) = direct pair count over
    (X/2, X].

    The s1/s2 fields use the shifted k lower bound together with the
    explicitly computed boundary term (the at-most-one dropped power value
    per pair, which the asymptotic argument absorbs); s1_pre/s2_pre use the
    tight bound and need no correction.  Both identities are checked against
    the direct count, which is computed by an independent sieve pipeline.
    """
    sums, tf, sliver_inner = _split_sums(x, c, z_override)
    direct = scpair_count(x, c).count
    flags = squarefree_window(tf, tf + 2).values
    boundary = int(flags[0]) * int(flags[1]) * sliver_inner
    z_value = float(z_override) if z_override is not None else x ** ((2 * c.a / c.b - 1) / 4)
    return DecompositionReport(
        x=x,
        c=c,
        z=z_value,
        s1=sums.small_shifted,
        s2=sums.large_shifted,
        boundary=boundary,
        direct=direct,
        identity_holds=(direct == sums.small_shifted + sums.large_shifted + boundary),
        s1_pre=sums.small_tight,
        s2_pre=sums.large_tight,
        pre_identity_holds=(direct == sums.small_tight + sums.large_tight),
    )


def error_sample(x: int, c: Exponent, sigma) -> ErrorSample:
    """Measure count - sigma X / 2 for the pair count over (X/2, X],
    normalised by the X^((6c+1)/8) error scale."""
    report = scpair_count(x, c)
    main = float(sigma.value) * x / 2
    err = report.count - main
    norm = err / x ** ((6 * c.a / c.b + 1) / 8)
    return ErrorSample(
        x=x,
        c=c,
        count=report.count,
        main_term=main,
        error=err,
        normalized_error=norm,
        elapsed_seconds=report.elapsed,
        sum_kind="scPair",
    )
