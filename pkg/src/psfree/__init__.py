"""Desk-scale verification lab for consecutive squarefree values of
floor(n^c): exact power floors, segmented sieves, rigorously enclosed
constants, the exact divisor-pair decomposition of the pair count, and the
exponential-sum machinery behind its error term.
"""

from .exactpow import (
    AmbiguousAtMaxPrecision,
    Exponent,
    Ordering,
    PrecisionPolicy,
    cmp_pow,
    count_n_in_pow_window,
    floor_pow,
    floor_root,
)
from .sieve import SieveWindow, divisor_window, mobius_window, primes_up_to, squarefree_window
from .constants import RigorousValue, coprime_double_sum, reciprocal_zeta2, sigma_euler_product
from .counting import (
    CountReport,
    DecompositionReport,
    ErrorSample,
    NotInvertible,
    cao_zhai_count,
    carlitz_count,
    count_k_in_progression,
    decompose,
    error_sample,
    large_split_term,
    mod_inverse,
    scpair_count,
    small_split_term,
)
from .expsum import (
    ExpSumInstance,
    RangeTooLarge,
    check_vdc,
    coeff_envelope,
    eval_exp_sum,
    fourier_cutoff,
    nearest_int_dist,
    psi,
    psi_increment,
    psi_truncated,
    second_derivative_range,
    split_threshold,
    vdc_bound,
)
from .cli import FitResult, InsufficientData, ScanConfig, fit_error_exponent, run_scan

__version__ = "0.1.0"
