"""
Exact integer and rational primitives.

Every resonance and admissibility decision in this package goes through
these helpers; no floating point is used here.
"""

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import gmpy2

Rational = Union[int, Fraction]
Factorization = List[Tuple[int, int]]


def isqrt(v: int) -> int:
    """Return floor(sqrt(v)) exactly."""
    if v < 0:
        raise ValueError(f"isqrt of negative value {v}")
    return int(gmpy2.isqrt(v))


def is_perfect_square(v: int) -> Optional[int]:
    """Return sqrt(v) if v is a perfect square, else None."""
    if v < 0:
        return None
    if not gmpy2.is_square(v):
        return None
    return int(gmpy2.isqrt(v))


def factor(v: int) -> Factorization:
    """Prime factorization by trial division, sorted by prime."""
    if v < 1:
        raise ValueError(f"factor requires v >= 1, got {v}")
    result: Factorization = []
    for p in (2, 3):
        if v % p == 0:
            e = 0
            while v % p == 0:
                v //= p
                e += 1
            result.append((p, e))
    # 6k +/- 1 wheel
    p = 5
    step = 2
    while p * p <= v:
        if v % p == 0:
            e = 0
            while v % p == 0:
                v //= p
                e += 1
            result.append((p, e))
        p += step
        step = 6 - step
    if v > 1:
        result.append((v, 1))
    return result


def factor_product(*values: int) -> Factorization:
    """Factorization of a product, merged from the factorizations of its factors."""
    exponents = {}
    for value in values:
        for p, e in factor(value):
            exponents[p] = exponents.get(p, 0) + e
    return sorted(exponents.items())


def factorization_value(f: Factorization) -> int:
    value = 1
    for p, e in f:
        value *= p ** e
    return value


def squarefree_split(f: Factorization) -> Tuple[int, int]:
    """Split the factored value as s * m**2 with s square-free."""
    s = 1
    m = 1
    for p, e in f:
        if e % 2:
            s *= p
        m *= p ** (e // 2)
    return s, m


def radical_form(v: int) -> Tuple[int, int]:
    """Write sqrt(v) as d*sqrt(k) with k square-free; returns (d, k)."""
    if v == 0:
        return 0, 1
    s, m = squarefree_split(factor(v))
    return m, s


def _as_fraction(r: Rational) -> Fraction:
    return r if isinstance(r, Fraction) else Fraction(r)


def cmp_sqrt_sum(F1: int, F2: int, r: Rational) -> int:
    """Exact sign of (sqrt(F1) + sqrt(F2)) - r: -1, 0 or 1."""
    if F1 < 0 or F2 < 0:
        raise ValueError("cmp_sqrt_sum requires nonnegative radicands")
    r = _as_fraction(r)
    if r < 0:
        return 1
    # sqrt(F1)+sqrt(F2) vs r  <=>  2*sqrt(F1*F2) vs D, both sides squared once more
    D = r * r - F1 - F2
    if D < 0:
        return 1
    lhs = 4 * F1 * F2
    rhs = D * D
    if lhs > rhs:
        return 1
    if lhs < rhs:
        return -1
    return 0


def cmp_sqrt_sum_sqrt(F1: int, F2: int, F3: int) -> int:
    """Exact sign of (sqrt(F1) + sqrt(F2)) - sqrt(F3)."""
    if min(F1, F2, F3) < 0:
        raise ValueError("cmp_sqrt_sum_sqrt requires nonnegative radicands")
    D = F3 - F1 - F2
    if D < 0:
        return 1
    lhs = 4 * F1 * F2
    rhs = D * D
    return (lhs > rhs) - (lhs < rhs)


def sqrt_interval(F: int, bits: int) -> Tuple[Fraction, Fraction]:
    """Rational enclosure lo <= sqrt(F) <= hi of width at most 2**-bits."""
    if F < 0:
        raise ValueError(f"sqrt_interval of negative value {F}")
    scale = 1 << bits
    root = isqrt(F << (2 * bits))
    lo = Fraction(root, scale)
    if root * root == F << (2 * bits):
        return lo, lo
    return lo, Fraction(root + 1, scale)


def signed_sqrt_sum(terms: Iterable[Tuple[int, int]], bits: int) -> Tuple[Fraction, Fraction]:
    """Enclosure of sum(sign * sqrt(F)) for (sign, F) terms."""
    lo = Fraction(0)
    hi = Fraction(0)
    for sign, F in terms:
        a, b = sqrt_interval(F, bits)
        if sign >= 0:
            lo += a
            hi += b
        else:
            lo -= b
            hi -= a
    return lo, hi


def is_squarefree(v: int) -> bool:
    return v >= 1 and all(e == 1 for _, e in factor(v))


def coprime_pairs(c: int) -> List[Tuple[int, int]]:
    """All (a, b) with a*b == c and gcd(a, b) == 1, sorted by a."""
    if c < 1:
        raise ValueError(f"coprime_pairs requires c >= 1, got {c}")
    primes: Sequence[Tuple[int, int]] = factor(c)
    pairs = []
    for mask in range(1 << len(primes)):
        a = 1
        for i, (p, e) in enumerate(primes):
            if mask >> i & 1:
                a *= p ** e
        pairs.append((a, c // a))
    return sorted(pairs)
