"""Rigorously enclosed constants: the pair-density Euler product, 6/pi^2,
and the truncated coprime double sum that converges to the same product.

Finite prime products are accumulated in 192-bit fixed point with one
floor-rounded and one ceil-rounded track, so the accumulation error is an
exact interval rather than an estimate.  The omitted factors over p > P are
bracketed by the elementary bound

    0 <= -log prod_{p>P} (1 - k/p^2) <= sum_{n>P} (k/n^2 + k^2/n^4)
                                     <= k/P + k^2/(3 P^3),

which needs no prime-counting input (-log(1-x) <= x + x^2 for x <= 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .sieve import mobius_window, primes_up_to

__all__ = [
    "RigorousValue",
    "coprime_double_sum",
    "reciprocal_zeta2",
    "sigma_euler_product",
]

_PRODUCT_BITS = 192
_WORK_PREC = 200


@dataclass(frozen=True)
class RigorousValue:
    """A value with a proven absolute error bound: truth lies in
    [value - error_bound, value + error_bound]."""

    value: mpmath.mpf
    error_bound: mpmath.mpf
    derivation: str

    def __post_init__(self):
        if self.error_bound < 0:
            raise ValueError("error_bound must be nonnegative")

    def interval(self) -> tuple[mpmath.mpf, mpmath.mpf]:
        return self.value - self.error_bound, self.value + self.error_bound

    def overlaps(self, other: "RigorousValue") -> bool:
        a_lo, a_hi = self.interval()
        b_lo, b_hi = other.interval()
        return a_lo <= b_hi and b_lo <= a_hi

    def contains(self, x) -> bool:
        lo, hi = self.interval()
        return lo <= x <= hi

    def to_dict(self) -> dict:
        return {
            "value": mpmath.nstr(self.value, 30),
            "errorBound": mpmath.nstr(self.error_bound, 6),
            "derivation": self.derivation,
        }


def _prime_square_product(prime_cutoff: int, k: int) -> RigorousValue:
    """Enclosure of prod_p (1 - k/p^2) from the factors with p <= prime_cutoff."""
    if prime_cutoff < 3:
        raise ValueError("prime cutoff must be >= 3")
    scale = 1 << _PRODUCT_BITS
    lo = hi = scale
    for p in primes_up_to(prime_cutoff):
        q = int(p) * int(p)
        lo = lo * (q - k) // q
        hi = -(-hi * (q - k) // q)
    with mpmath.workprec(_WORK_PREC):
        value = (mpmath.mpf(lo) + mpmath.mpf(hi)) / (2 * scale)
        accum = (mpmath.mpf(hi) - mpmath.mpf(lo)) / (2 * scale)
        # Tail factor T = prod_{p>P}(1 - k/p^2) lies in [exp(-t), 1]; pad t
        # upward and exp(-t) downward by a few ulps so the bracket survives
        # the conversions to binary.
        p_cut = mpmath.mpf(prime_cutoff)
        t = (k / p_cut + k * k / (3 * p_cut**3)) * (1 + mpmath.mpf(2) ** -150)
        tail_lo = mpmath.exp(-t) * (1 - mpmath.mpf(2) ** -150)
        error = value * (1 - tail_lo) + accum + mpmath.mpf(2) ** -150
    return RigorousValue(
        value=value,
        error_bound=error,
        derivation=(
            f"prod over p <= {prime_cutoff} of (1 - {k}/p^2) in 192-bit directed-rounding "
            f"fixed point; tail bracketed by exp(-({k}/P + {k}^2/(3P^3)))"
        ),
    )


@lru_cache(maxsize=32)
def sigma_euler_product(prime_cutoff: int) -> RigorousValue:
    """The density constant prod_p (1 - 2/p^2) of consecutive squarefree pairs,
    truncated at prime_cutoff, with a proven bound covering the omitted tail."""
    return _prime_square_product(prime_cutoff, 2)


@lru_cache(maxsize=1)
def reciprocal_zeta2() -> RigorousValue:
    """6/pi^2, the squarefree density, to well beyond 30 significant digits."""
    with mpmath.workprec(_WORK_PREC):
        value = 6 / mpmath.pi**2
        # pi is correctly rounded at working precision; three arithmetic ops
        # at 200 bits leave relative error < 2^-195.  1e-40 is a wide cover.
        error = mpmath.mpf("1e-40")
    return RigorousValue(value=value, error_bound=error, derivation="6/pi^2 at 200-bit precision")


def coprime_double_sum(z: int) -> float:
    """sum over dt <= z, gcd(d,t)=1 of mu(d) mu(t) / (d^2 t^2).

    Accumulated in 96-fractional-bit fixed point (one floor division per
    term), so the total rounding error is below z * 2^-96.
    """
    if z < 1:
        raise ValueError("coprime_double_sum requires z >= 1")
    mu = mobius_window(0, z + 1).values
    scale = 1 << 96
    acc = 0
    for d in range(1, z + 1):
        md = int(mu[d])
        if md == 0:
            continue
        dd = d * d
        for t in range(1, z // d + 1):
            mt = int(mu[t])
            if mt == 0 or math.gcd(d, t) != 1:
                continue
            acc += md * mt * (scale // (dd * t * t))
    return acc / scale
