"""Segmented sieves: squarefree flags, Mobius values, divisor counts, primes.

Windows are half-open [lo, hi) and hold dense numpy arrays, so large ranges
(floor(n^c) reaches ~1e8 at desk scale) are processed in fixed-size segments
instead of one whole-range allocation.

Conventions at the low end: 0 is not squarefree, mu(0) = 0, tau(0) is
undefined and asking for it is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_WINDOW",
    "SieveWindow",
    "divisor_window",
    "mobius_window",
    "primes_up_to",
    "squarefree_window",
]

DEFAULT_WINDOW = 1 << 20


@dataclass
class SieveWindow:
    """Values of one arithmetic function on [lo, hi), indexed by m - lo."""

    lo: int
    hi: int
    kind: str  # "squarefree" | "mobius" | "divisor"
    values: np.ndarray

    def value_at(self, m: int) -> int:
        if not self.lo <= m < self.hi:
            raise IndexError(f"{m} outside window [{self.lo}, {self.hi})")
        return int(self.values[m - self.lo])

    def __len__(self) -> int:
        return self.hi - self.lo


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n, ascending."""
    if n < 2:
        raise ValueError("primes_up_to requires n >= 2")
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def _check_window(lo: int, hi: int):
    if lo < 0 or hi <= lo:
        raise ValueError(f"bad window [{lo}, {hi})")


def squarefree_window(lo: int, hi: int) -> SieveWindow:
    """mu^2 on [lo, hi): 1 iff no prime square divides m."""
    _check_window(lo, hi)
    values = np.ones(hi - lo, dtype=np.uint8)
    if hi > 4:
        for p in primes_up_to(math.isqrt(hi - 1)):
            q = int(p) * int(p)
            start = ((lo + q - 1) // q) * q
            values[start - lo :: q] = 0
    if lo == 0:
        values[0] = 0
    return SieveWindow(lo, hi, "squarefree", values)


def mobius_window(lo: int, hi: int) -> SieveWindow:
    """mu on [lo, hi) by one division per sieving prime plus square marking.

    After dividing one copy of every prime <= sqrt(hi) out of each residual,
    anything left > 1 is a single large prime factor and flips the sign; a
    residual can hide a repeated factor only when a prime square was already
    marked, where the value is pinned to 0 anyway.
    """
    _check_window(lo, hi)
    values = np.ones(hi - lo, dtype=np.int8)
    residual = np.arange(lo, hi, dtype=np.int64)
    if hi > 2:
        for p in primes_up_to(max(2, math.isqrt(hi - 1))):
            p = int(p)
            start = ((lo + p - 1) // p) * p - lo
            values[start::p] = -values[start::p]
            residual[start::p] //= p
            q = p * p
            if q < hi:
                start = ((lo + q - 1) // q) * q - lo
                values[start::q] = 0
    values[residual > 1] = -values[residual > 1]
    if lo == 0:
        values[0] = 0
    if lo <= 1 < hi:
        values[1 - lo] = 1
    return SieveWindow(lo, hi, "mobius", values)


def divisor_window(lo: int, hi: int) -> SieveWindow:
    """tau on [lo, hi) via exponent counting per sieving prime."""
    _check_window(lo, hi)
    if lo == 0:
        raise ValueError("tau(0) is undefined; start the window at 1")
    values = np.ones(hi - lo, dtype=np.int64)
    residual = np.arange(lo, hi, dtype=np.int64)
    if hi > 2:
        for p in primes_up_to(max(2, math.isqrt(hi - 1))):
            p = int(p)
            exponents = np.zeros(hi - lo, dtype=np.int64)
            pk = p
            while pk < hi:
                start = ((lo + pk - 1) // pk) * pk - lo
                exponents[start::pk] += 1
                residual[start::pk] //= p
                pk *= p
            touched = exponents > 0
            values[touched] *= exponents[touched] + 1
    values[residual > 1] *= 2
    if lo <= 1 < hi:
        values[1 - lo] = 1
    return SieveWindow(lo, hi, "divisor", values)
