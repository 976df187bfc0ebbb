import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.arith import (
    cmp_sqrt_sum,
    cmp_sqrt_sum_sqrt,
    coprime_pairs,
    factor,
    factor_product,
    factorization_value,
    is_perfect_square,
    is_squarefree,
    isqrt,
    radical_form,
    signed_sqrt_sum,
    sqrt_interval,
    squarefree_split,
)


@pytest.mark.parametrize("v, expected", [(0, 0), (560, 23), (900, 30)])
def test_isqrt_examples(v, expected):
    assert isqrt(v) == expected


def test_isqrt_rejects_negative():
    with pytest.raises(ValueError):
        isqrt(-1)


@given(st.integers(min_value=0, max_value=10**6))
def test_isqrt_brackets(v):
    r = isqrt(v)
    assert r * r <= v < (r + 1) ** 2


@given(st.integers(min_value=0, max_value=10**40))
def test_isqrt_brackets_big(v):
    r = isqrt(v)
    assert r * r <= v < (r + 1) ** 2


@pytest.mark.parametrize("v, expected", [(140 * 560, 280), (141, None), (0, 0), (-4, None)])
def test_is_perfect_square(v, expected):
    assert is_perfect_square(v) == expected


@pytest.mark.parametrize("v, expected", [
    (140, [(2, 2), (5, 1), (7, 1)]),
    (1, []),
    (1080, [(2, 3), (3, 3), (5, 1)]),
    (97, [(97, 1)]),
])
def test_factor(v, expected):
    assert factor(v) == expected


def test_factor_rejects_zero():
    with pytest.raises(ValueError):
        factor(0)


@pytest.mark.parametrize("v, expected", [(140, (35, 2)), (1080, (30, 6)), (1, (1, 1))])
def test_squarefree_split(v, expected):
    assert squarefree_split(factor(v)) == expected


@given(st.integers(min_value=1, max_value=10**6))
def test_squarefree_split_roundtrip(v):
    s, m = squarefree_split(factor(v))
    assert s * m * m == v
    assert is_squarefree(s)


def test_factor_product_matches_direct():
    assert factor_product(49, 48, 51) == factor(49 * 48 * 51)
    assert factorization_value(factor_product(5, 4, 7)) == 140


def test_radical_form():
    assert radical_form(119952) == (84, 17)
    assert radical_form(240) == (4, 15)
    assert radical_form(0) == (0, 1)


class TestComparator:
    def test_resonance_identity_is_equal(self):
        assert cmp_sqrt_sum_sqrt(140, 140, 560) == 0
        # (560 - 280)**2 == 4 * 140 * 140
        assert (560 - 280) ** 2 == 4 * 140 * 140

    def test_zero_radicands(self):
        assert cmp_sqrt_sum(0, 0, 1) == -1
        assert cmp_sqrt_sum(0, 0, 0) == 0

    def test_greater(self):
        assert cmp_sqrt_sum(8, 30, Fraction(11, 2)) == 1

    def test_negative_r_is_greater(self):
        assert cmp_sqrt_sum(0, 0, -1) == 1
        assert cmp_sqrt_sum(3, 5, Fraction(-7, 2)) == 1

    def test_perfect_squares_exact(self):
        assert cmp_sqrt_sum(9, 16, 7) == 0
        assert cmp_sqrt_sum(9, 16, Fraction(7001, 1000)) == -1

    @settings(max_examples=300)
    @given(st.integers(0, 10**6), st.integers(0, 10**6), st.fractions(min_value=0, max_value=3000, max_denominator=1000))
    def test_agrees_with_float_when_margin_is_large(self, F1, F2, r):
        margin = math.sqrt(F1) + math.sqrt(F2) - float(r)
        if abs(margin) > 1e-6:
            assert cmp_sqrt_sum(F1, F2, r) == (1 if margin > 0 else -1)

    @given(st.integers(0, 10**5), st.integers(0, 10**5), st.integers(0, 10**5))
    def test_three_root_form_matches_float(self, F1, F2, F3):
        margin = math.sqrt(F1) + math.sqrt(F2) - math.sqrt(F3)
        if abs(margin) > 1e-6:
            assert cmp_sqrt_sum_sqrt(F1, F2, F3) == (1 if margin > 0 else -1)


@given(st.integers(0, 10**9), st.integers(10, 90))
def test_sqrt_interval_encloses(F, bits):
    lo, hi = sqrt_interval(F, bits)
    assert lo * lo <= F <= hi * hi
    assert hi - lo <= Fraction(1, 2 ** bits)


def test_sqrt_interval_exact_for_squares():
    assert sqrt_interval(900, 40) == (Fraction(30), Fraction(30))


def test_signed_sqrt_sum_encloses_small_divisor():
    lo, hi = signed_sqrt_sum([(1, 30), (-1, 8), (-1, 8)], 80)
    value = math.sqrt(30) - 2 * math.sqrt(8)
    assert float(lo) <= value + 1e-15 and float(hi) >= value - 1e-15
    assert hi - lo < Fraction(1, 10**18)


def test_coprime_pairs():
    assert coprime_pairs(15) == [(1, 15), (3, 5), (5, 3), (15, 1)]
    assert coprime_pairs(50) == [(1, 50), (2, 25), (25, 2), (50, 1)]
    assert coprime_pairs(1) == [(1, 1)]
