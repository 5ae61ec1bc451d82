"""Exact Bernoulli numbers and harmonic numbers."""

from fractions import Fraction
from functools import lru_cache

from mpmath import mpf

from .budget import MAX_BERNOULLI_INDEX, DomainError


@lru_cache(maxsize=None)
def _bernoulli_table() -> tuple:
    # Akiyama-Tanigawa, with B_1 = +1/2 convention (only even indices are exposed).
    n_max = MAX_BERNOULLI_INDEX
    a = [Fraction(0)] * (n_max + 1)
    table = []
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        table.append(a[0])
    return tuple(table)


def bernoulli_fraction(k: int) -> Fraction:
    """B_k as an exact rational for even ``k`` in [0, 64]."""
    if k == 1:
        return Fraction(-1, 2)
    if k < 0 or k > MAX_BERNOULLI_INDEX:
        raise DomainError(f"Bernoulli index out of range: {k}")
    if k % 2:
        return Fraction(0)
    return _bernoulli_table()[k]


def bernoulli(k: int) -> mpf:
    """B_k for even k with 2 <= k <= 64, at the current working precision."""
    if not isinstance(k, int) or k % 2 or not 2 <= k <= MAX_BERNOULLI_INDEX:
        raise DomainError(f"bernoulli expects an even integer in [2, {MAX_BERNOULLI_INDEX}], got {k!r}")
    b = bernoulli_fraction(k)
    return mpf(b.numerator) / b.denominator


@lru_cache(maxsize=256)
def harmonic_fraction(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def harmonic(n: int) -> mpf:
    """H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0."""
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"harmonic expects a nonnegative integer, got {n!r}")
    h = harmonic_fraction(n)
    return mpf(h.numerator) / h.denominator
