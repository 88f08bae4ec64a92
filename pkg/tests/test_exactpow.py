import math
import random
from fractions import Fraction

import pytest

from psfree.exactpow import (
    AmbiguousAtMaxPrecision,
    DEFAULT_POLICY,
    Exponent,
    Ordering,
    PrecisionPolicy,
    cmp_pow,
    count_n_in_pow_window,
    floor_pow,
    floor_pow_block,
    floor_pow_ratio,
    floor_root,
)
from oracles import naive_floor_pow, window_count_brute

C32 = Exponent(3, 2)
STANDARD_CS = [Exponent(21, 20), Exponent(11, 10), Exponent(7, 6), Exponent(3, 2)]


class TestExponent:
    def test_parse_fraction(self):
        c = Exponent.parse("3/2")
        assert (c.a, c.b) == (3, 2)

    def test_parse_decimal_is_exact_rational(self):
        c = Exponent.parse("1.1")
        assert (c.a, c.b) == (11, 10)

    def test_parse_reduces(self):
        c = Exponent.parse("6/4")
        assert (c.a, c.b) == (3, 2)

    @pytest.mark.parametrize("bad", ["0/5", "2/0", "abc", "-3/2", "1/2"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            Exponent.parse(bad)

    def test_gamma_exact(self):
        assert Exponent(11, 10).gamma() == Fraction(10, 11)
        assert Exponent(1, 1).gamma() == 1

    def test_theorem_range(self):
        assert Exponent(21, 20).theorem_range()
        assert Exponent(11, 10).theorem_range()
        assert not Exponent(7, 6).theorem_range()  # endpoint excluded
        assert not Exponent(1, 1).theorem_range()
        assert not Exponent(3, 2).theorem_range()

    def test_real_mode_records_approx(self):
        c = Exponent.parse("3/2", real=True)
        assert c.mode == "real-interval"
        assert c.real_approx.startswith("1.5000")

    def test_str(self):
        assert str(Exponent.parse("1.05")) == "21/20"


class TestPrecisionPolicy:
    def test_defaults(self):
        assert DEFAULT_POLICY.start_bits == 128
        assert DEFAULT_POLICY.max_bits == 4096
        assert DEFAULT_POLICY.escalation_factor == 2.0

    @pytest.mark.parametrize("kwargs", [
        {"start_bits": 32},
        {"start_bits": 128, "max_bits": 64},
        {"escalation_factor": 1.0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            PrecisionPolicy(**kwargs)


class TestFloorRoot:
    def test_trivial(self):
        assert floor_root(0, 3) == 0
        assert floor_root(125, 2) == 11
        assert floor_root(10**11, 10) == 12

    def test_contract_exhaustive_small(self):
        for b in range(1, 13):
            for m in range(0, 3000):
                r = floor_root(m, b)
                assert r**b <= m < (r + 1) ** b, (m, b, r)

    def test_contract_boundaries_to_1e6(self):
        # every jump point of m -> floor_root(m, b) below 1e6, plus both sides
        limit = 10**6
        for b in range(2, 13):
            r = 1
            while (r + 1) ** b <= limit:
                r += 1
                edge = r**b
                assert floor_root(edge - 1, b) == r - 1
                assert floor_root(edge, b) == r
            assert floor_root(limit, b) ** b <= limit

    def test_contract_random_to_1e6(self):
        rng = random.Random(7)
        for _ in range(4000):
            b = rng.randint(1, 12)
            m = rng.randint(0, 10**6)
            r = floor_root(m, b)
            assert r**b <= m < (r + 1) ** b

    def test_big_inputs(self):
        m = 10**147 + 12345
        r = floor_root(m, 20)
        assert r**20 <= m < (r + 1) ** 20

    def test_rejects(self):
        with pytest.raises(ValueError):
            floor_root(-1, 2)
        with pytest.raises(ValueError):
            floor_root(5, 0)


class TestFloorPow:
    def test_known_values(self):
        for c in STANDARD_CS:
            assert floor_pow(1, c) == 1
        assert floor_pow(5, C32) == 11
        assert floor_pow(10, Exponent(11, 10)) == 12

    def test_identity_exponent(self):
        one = Exponent(1, 1)
        for n in [1, 2, 17, 10**6, 10**12]:
            assert floor_pow(n, one) == n

    def test_monotone(self):
        for c in STANDARD_CS:
            prev = 0
            for n in range(1, 3000):
                cur = floor_pow(n, c)
                assert cur >= prev
                prev = cur

    def test_against_naive_oracle(self):
        rng = random.Random(11)
        for c in STANDARD_CS:
            for n in [1, 2, 3, 4, 9, 1024, 59049, 46656] + [rng.randint(1, 10**7) for _ in range(100)]:
                assert floor_pow(n, c) == naive_floor_pow(n, c.a, c.b)

    def test_mode_agreement_sample(self):
        rng = random.Random(13)
        for c_exact in STANDARD_CS:
            c_real = Exponent(c_exact.a, c_exact.b, mode="real-interval")
            ns = list(range(1, 400)) + [rng.randint(1, 10**5) for _ in range(150)]
            # include exact powers, the hard cases for interval evaluation
            ns += [k**c_exact.b for k in range(1, 12) if k**c_exact.b <= 10**5]
            for n in ns:
                assert floor_pow(n, c_exact) == floor_pow(n, c_real), (n, str(c_exact))

    def test_ambiguous_at_tiny_cap(self):
        c_real = Exponent(3, 2, mode="real-interval")
        tight = PrecisionPolicy(start_bits=64, max_bits=64)
        with pytest.raises(AmbiguousAtMaxPrecision):
            floor_pow(2**40 + 7, c_real, tight)
        # same query succeeds once escalation is allowed
        assert floor_pow(2**40 + 7, c_real) == floor_pow(2**40 + 7, Exponent(3, 2))

    def test_escalation_reaches_wide_values(self):
        # ~150-bit result: the 128-bit start enclosure spans many integers,
        # so at least one escalation round is required
        c_real = Exponent(3, 2, mode="real-interval")
        n = 2**100 + 12345
        assert floor_pow(n, c_real) == floor_root(n**3, 2)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            floor_pow(0, C32)


class TestFloorPowRatio:
    def test_matches_integer_base(self):
        for c in STANDARD_CS:
            for x in [2, 10, 36, 1000]:
                assert floor_pow_ratio(x, 2, c) == floor_pow(x // 2, c)

    def test_odd_half_base(self):
        # (7/2)^(3/2) = 6.547...
        assert floor_pow_ratio(7, 2, C32) == 6
        # (3/2)^(11/10) = 1.5621...
        assert floor_pow_ratio(3, 2, Exponent(11, 10)) == 1


class TestCmpPow:
    def test_known_values(self):
        assert cmp_pow(4, C32, 8) == Ordering.EQUAL
        assert cmp_pow(5, C32, 11) == Ordering.GREATER
        assert cmp_pow(5, C32, 12) == Ordering.LESS

    def test_real_mode_agrees(self):
        c_real = Exponent(3, 2, mode="real-interval")
        assert cmp_pow(4, c_real, 8) == Ordering.EQUAL
        assert cmp_pow(5, c_real, 11) == Ordering.GREATER
        assert cmp_pow(5, c_real, 12) == Ordering.LESS

    def test_consistent_with_floor(self):
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randint(1, 10**5)
            c = rng.choice(STANDARD_CS)
            f = floor_pow(n, c)
            assert cmp_pow(n, c, f) in (Ordering.EQUAL, Ordering.GREATER)
            assert cmp_pow(n, c, f + 1) == Ordering.LESS


class TestCountWindow:
    def test_known_values(self):
        assert count_n_in_pow_window(8, C32, 0, 10) == 1
        assert count_n_in_pow_window(7, C32, 0, 10) == 0
        assert count_n_in_pow_window(1, C32, 0, 1) == 1
        assert count_n_in_pow_window(1, Exponent(11, 10), 0, 1) == 1

    def test_against_brute_scan(self):
        rng = random.Random(5)
        for _ in range(200):
            c = rng.choice(STANDARD_CS)
            m = rng.randint(1, 2000)
            n_lo = rng.randint(0, 50)
            n_hi = n_lo + rng.randint(1, 300)
            assert count_n_in_pow_window(m, c, n_lo, n_hi) == window_count_brute(
                m, c.a, c.b, n_lo, n_hi
            )

    def test_real_mode_matches_exact(self):
        c_real = Exponent(3, 2, mode="real-interval")
        for m in range(1, 40):
            assert count_n_in_pow_window(m, c_real, 0, 60) == count_n_in_pow_window(m, C32, 0, 60)

    def test_partition(self):
        # every n in (n_lo, n_hi] lands in exactly one power window
        rng = random.Random(17)
        for _ in range(30):
            c = rng.choice(STANDARD_CS)
            n_lo = rng.randint(0, 1000)
            n_hi = n_lo + rng.randint(1, 500)
            m_first = floor_pow(n_lo + 1, c)
            m_last = floor_pow(n_hi, c)
            total = sum(
                count_n_in_pow_window(m, c, n_lo, n_hi) for m in range(m_first, m_last + 1)
            )
            assert total == n_hi - n_lo

    def test_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            count_n_in_pow_window(5, C32, 10, 10)


class TestFloorPowBlock:
    def test_matches_scalar(self):
        for c in STANDARD_CS:
            block = floor_pow_block(1, 3000, c)
            for n in range(1, 3001, 37):
                assert block[n - 1] == floor_pow(n, c)

    def test_exact_powers_in_block(self):
        block = floor_pow_block(1, 1100, Exponent(11, 10))
        assert block[1024 - 1] == 2**11  # 1024^(11/10) = 2048 exactly

    def test_requires_exact_mode(self):
        with pytest.raises(ValueError):
            floor_pow_block(1, 10, Exponent(3, 2, mode="real-interval"))
