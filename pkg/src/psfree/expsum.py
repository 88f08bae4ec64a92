"""The analytic machinery, made numerical: the centered sawtooth and its
truncated Fourier series, the sawtooth difference at consecutive power
values, complete exponential sums over an integer range, and empirical
checks of the second-derivative (van der Corput) bound.

Phases h*(l t^2 - 1)^gamma reach ~1e6 at desk scale; they are evaluated at
128-bit precision and reduced mod 1 before the multiplication by 2*pi, so no
phase digits are lost to the large integer part.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .exactpow import Exponent, floor_pow, floor_pow_ratio

__all__ = [
    "DEFAULT_SEED",
    "ExpSumInstance",
    "RangeTooLarge",
    "VdcReport",
    "check_vdc",
    "coeff_envelope",
    "eval_exp_sum",
    "fourier_cutoff",
    "nearest_int_dist",
    "psi",
    "psi_increment",
    "psi_truncated",
    "random_instances",
    "second_derivative_range",
    "split_threshold",
    "vdc_bound",
]

_PHASE_BITS = 128
_MAX_TERMS = 10**9
DEFAULT_SEED = 1729


class RangeTooLarge(Exception):
    """Exponential-sum range exceeds the term cap."""


def psi(x):
    """Centered sawtooth {x} - 1/2 in [-1/2, 1/2); accepts scalars or arrays."""
    return x - np.floor(x) - 0.5


def nearest_int_dist(x):
    """Distance from x to the nearest integer, in [0, 1/2]."""
    frac = x - np.floor(x)
    return np.minimum(frac, 1.0 - frac)


def psi_truncated(x, m_terms: int):
    """Truncated Fourier series of the sawtooth:
    -sum_{h=1..M} sin(2 pi h x) / (pi h).  Vectorised over x.

    Each phase h x is reduced mod 1 into [-1/4, 1/4] (using the symmetry
    sin(pi - u) = sin(u)) before the multiplication by 2 pi, so the series
    vanishes identically at integer and half-integer x instead of leaving
    sin(pi h) rounding residue."""
    if m_terms < 1:
        raise ValueError("psi_truncated requires M >= 1")
    h = np.arange(1, m_terms + 1, dtype=np.float64)
    xs = np.asarray(x, dtype=np.float64)
    t = xs[..., np.newaxis] * h
    r = t - np.floor(t)
    r = np.where(r > 0.75, r - 1.0, r)
    r = np.where(r > 0.25, 0.5 - r, r)
    out = -np.sum(np.sin(2.0 * np.pi * r) / (np.pi * h), axis=-1)
    return out if out.ndim else float(out)


def psi_increment(k: int, d: int, c: Exponent) -> float:
    """psi(-(k d^2 + 1)^gamma) - psi(-(k d^2)^gamma), the quantity whose
    Fourier expansion drives the error analysis.  gamma powers evaluated at
    128-bit precision before reduction mod 1."""
    m = k * d * d
    if m < 1:
        raise ValueError("psi_increment requires k d^2 >= 1")
    with gmpy2.context(precision=_PHASE_BITS):
        gamma = gmpy2.div(gmpy2.mpfr(c.b), gmpy2.mpfr(c.a))
        vals = []
        for base in (m + 1, m):
            w = gmpy2.exp(gmpy2.mul(gamma, gmpy2.log(base)))
            neg = -w
            frac = neg - gmpy2.floor(neg)
            vals.append(float(frac) - 0.5)
    return vals[0] - vals[1]


@dataclass
class ExpSumInstance:
    """One exponential sum sum_l e(h (l t^2 - 1)^gamma) with l running over
    the integers of (((X/2)^c + 1)/t^2, (X^c + 2)/t^2]."""

    t: int
    h: int
    x: int
    c: Exponent
    l_min: int = field(init=False)
    l_max: int = field(init=False)

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.h == 0:
            raise ValueError("h must be nonzero")
        if self.x < 2:
            raise ValueError("X must be >= 2")
        tt = self.t * self.t
        tf = floor_pow_ratio(self.x, 2, self.c)  # floor((X/2)^c)
        mx = floor_pow(self.x, self.c)
        # l t^2 > (X/2)^c + 1  <=>  l t^2 >= floor((X/2)^c) + 2
        self.l_min = -(-(tf + 2) // tt)
        # l t^2 <= X^c + 2  <=>  l t^2 <= floor(X^c) + 2
        self.l_max = (mx + 2) // tt

    @property
    def terms(self) -> int:
        return max(0, self.l_max - self.l_min + 1)


def eval_exp_sum(inst: ExpSumInstance) -> complex:
    """The exact finite sum; empty ranges give 0."""
    if inst.terms == 0:
        return 0j
    if inst.terms > _MAX_TERMS:
        raise RangeTooLarge(f"{inst.terms} terms exceeds the {_MAX_TERMS} cap")
    tt = inst.t * inst.t
    h = inst.h
    re = im = 0.0
    with gmpy2.context(precision=_PHASE_BITS):
        gamma = gmpy2.div(gmpy2.mpfr(inst.c.b), gmpy2.mpfr(inst.c.a))
        for l in range(inst.l_min, inst.l_max + 1):
            w = gmpy2.exp(gmpy2.mul(gamma, gmpy2.log(l * tt - 1)))
            phase = gmpy2.mul(w, h)
            frac = float(phase - gmpy2.floor(phase))
            angle = 2.0 * math.pi * frac
            re += math.cos(angle)
            im += math.sin(angle)
    return complex(re, im)


def second_derivative_range(inst: ExpSumInstance) -> tuple[float, float]:
    """(lambda_min, lambda_max) of |f''| for f(y) = h (y t^2 - 1)^gamma over
    the summation range; |f''| is monotone in y, so the endpoints decide.

    At the endpoints y t^2 - 1 equals (X/2)^c and X^c + 1 exactly."""
    if inst.terms == 0:
        raise ValueError("second_derivative_range requires a nonempty range")
    gamma = inst.c.b / inst.c.a
    coeff = abs(inst.h) * gamma * (1.0 - gamma) * inst.t**4
    base_lo = (inst.x / 2.0) ** (inst.c.a / inst.c.b)
    base_hi = float(inst.x) ** (inst.c.a / inst.c.b) + 1.0
    lam_max = coeff * base_lo ** (gamma - 2.0)
    lam_min = coeff * base_hi ** (gamma - 2.0)
    return lam_min, lam_max


def vdc_bound(length: float, lam: float) -> float:
    """The second-derivative test envelope: length * sqrt(lam) + 1/sqrt(lam)."""
    if length <= 0 or lam <= 0:
        raise ValueError("vdc_bound requires positive length and lambda")
    return length * math.sqrt(lam) + 1.0 / math.sqrt(lam)


@dataclass
class VdcReport:
    instance: ExpSumInstance
    abs_sum: float
    terms: int
    lam_min: float
    lam_max: float
    ratio: float        # |sum| / (terms * sqrt(lam_min) + 1/sqrt(lam_min))
    hest_ratio: float   # |sum| / (sqrt|h| sqrt X + X^(c-1/2) / (sqrt|h| t^2))


def check_vdc(inst: ExpSumInstance) -> VdcReport:
    """Measure the sum against the second-derivative bound and against its
    specialisation in terms of |h|, t and X."""
    if inst.terms == 0:
        raise ValueError("check_vdc requires a nonempty range")
    value = eval_exp_sum(inst)
    abs_sum = abs(value)
    lam_min, lam_max = second_derivative_range(inst)
    ratio = abs_sum / vdc_bound(inst.terms, lam_min)
    cf = inst.c.a / inst.c.b
    ah = abs(inst.h)
    specialised = math.sqrt(ah) * math.sqrt(inst.x) + inst.x ** (cf - 0.5) / (
        math.sqrt(ah) * inst.t**2
    )
    return VdcReport(
        instance=inst,
        abs_sum=abs_sum,
        terms=inst.terms,
        lam_min=lam_min,
        lam_max=lam_max,
        ratio=ratio,
        hest_ratio=abs_sum / specialised,
    )


def random_instances(
    count: int,
    seed: int = DEFAULT_SEED,
    c: Exponent | None = None,
    x_min: int = 10**3,
    x_max: int = 10**5,
    t_max: int = 10,
    h_max: int = 50,
) -> list[ExpSumInstance]:
    """Seeded sample of nonempty instances (t <= t_max, 0 < |h| <= h_max,
    X log-uniform in [x_min, x_max])."""
    if c is None:
        c = Exponent(11, 10)
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        t = rng.randint(1, t_max)
        h = rng.choice([-1, 1]) * rng.randint(1, h_max)
        x = round(math.exp(rng.uniform(math.log(x_min), math.log(x_max))))
        inst = ExpSumInstance(t=t, h=h, x=x, c=c)
        if inst.terms > 0:
            out.append(inst)
    return out


def split_threshold(x: int, c: Exponent) -> float:
    """The dt-split point X^((2c-1)/4)."""
    if x < 3:
        raise ValueError("split_threshold requires X >= 3")
    return float(x) ** ((2 * c.a / c.b - 1) / 4)


def fourier_cutoff(x: int, d: int, t: int, c: Exponent) -> float:
    """The series-truncation choice X^((2c-1)/4) log X / (d t)."""
    if d < 1 or t < 1:
        raise ValueError("fourier_cutoff requires d, t >= 1")
    return split_threshold(x, c) * math.log(x) / (d * t)


def coeff_envelope(h: int, m_cut: float) -> float:
    """Envelope for the smoothed Fourier coefficients: log M / M at h = 0,
    min(log M / M, M / h^2) otherwise."""
    if m_cut < 2:
        raise ValueError("coeff_envelope requires M >= 2")
    base = math.log(m_cut) / m_cut
    if h == 0:
        return base
    return min(base, m_cut / (h * h))
