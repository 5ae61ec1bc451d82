"""Euler-Maclaurin summation and lattice sums with asymptotic tails.

Two engines live here:

* :func:`log_power_sum` sums ``f(u) = u**-s * P(log u)`` over ``u = a, a+1, ...``
  with an Euler-Maclaurin tail.  When the series diverges (``s <= 1``) the
  result is the regularized value obtained by dropping the antiderivative at
  infinity, which is what Hurwitz zeta, its derivatives and the generalized
  Stieltjes constants all need.
* :func:`lattice_sum` sums ``n**-p * g(n x)`` for ``n >= 1`` where ``g`` has a
  known asymptotic expansion in powers and logs of its argument; the tail past
  the cutoff is summed term by term through :func:`log_power_sum`.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

from mpmath import mp, mpf

from .bernoulli import bernoulli_fraction
from .budget import Budget, EvalOutcome, finish, resolve, rounding_error, working_precision


@lru_cache(maxsize=4096)
def _em_coeff(j: int, dps: int) -> mpf:
    """B_{2j} / (2j)! at ``dps`` digits."""
    b = bernoulli_fraction(2 * j)
    return mpf(b.numerator) / (b.denominator * mp.factorial(2 * j))


def derivative_polys(s, poly: Sequence, count: int) -> list:
    """Polynomials P_j with d^j/du^j [u^-s P(log u)] = u^(-s-j) P_j(log u), j = 0..count."""
    polys = [list(poly)]
    for j in range(count):
        p = polys[-1]
        nxt = [-(s + j) * c for c in p]
        for i in range(1, len(p)):
            nxt[i - 1] += i * p[i]
        polys.append(nxt)
    return polys


def poly_eval(poly, x):
    acc = mpf(0)
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def _poly_abs_eval(poly, x):
    x = abs(x)
    acc = mpf(0)
    for c in reversed(poly):
        acc = acc * x + abs(c)
    return acc


def _antiderivative(s, poly, u, L):
    """G(u) with G' = u^-s P(log u); for s > 1 this is minus the integral to infinity."""
    if s == 1:
        return mp.fsum(c * L ** (i + 1) / (i + 1) for i, c in enumerate(poly))
    inv = 1 / (s - 1)
    total = []
    for i, c in enumerate(poly):
        if not c:
            continue
        # int u^-s L^i = -u^(1-s) sum_j i!/(i-j)! L^(i-j) / (s-1)^(j+1)
        falling = mpf(1)
        for j in range(i + 1):
            total.append(c * falling * L ** (i - j) * inv ** (j + 1))
            falling *= i - j
    return -u ** (1 - s) * mp.fsum(total)


def _em_cutoff(s, polys, a, K, budget: Budget):
    """Smallest N with first omitted Euler-Maclaurin term at u = N + a within target/2."""
    top = polys[2 * K + 1]
    coeff = abs(_em_coeff(K + 1, mp.dps))
    order = -s - 2 * K - 1
    re_s = abs(s)
    u_min = max(mpf(1), (re_s + 2 * K + 2) / mp.pi)

    def bound(n):
        u = n + a
        return coeff * _poly_abs_eval(top, mp.log(u)) * u ** order

    n = max(0, int(mp.ceil(u_min - a)))
    limit = budget.max_terms
    goal = budget.target / 2
    b = bound(n)
    while b > goal and n < limit:
        n = min(limit, int(n * 1.25) + 2)
        b = bound(n)
    return n, b


def log_power_sum(s, poly: Sequence, a, budget: Budget | None = None) -> EvalOutcome:
    """Regularized sum of (k+a)^-s P(log(k+a)) over k >= 0.

    ``poly`` lists the coefficients of P in increasing degree.  For s > 1 this is
    the convergent series; otherwise it is the constant term obtained by
    discarding the antiderivative at infinity (analytic continuation in s, or
    the Stieltjes-style limit at s = 1).
    """
    budget = resolve(budget)
    with working_precision(budget):
        s = mpf(s)
        a = mpf(a)
        poly = [mpf(c) for c in poly]
        K = budget.em_order
        polys = derivative_polys(s, poly, 2 * K + 1)
        n, bound = _em_cutoff(s, polys, a, K, budget)
        converged = n < budget.max_terms or bound <= budget.target / 2
        direct = []
        const_poly = len(poly) == 1
        for k in range(n):
            u = k + a
            if const_poly:
                direct.append(poly[0] * u ** (-s))
            else:
                direct.append(u ** (-s) * poly_eval(poly, mp.log(u)))
        u = n + a
        L = mp.log(u)
        corr = [u ** (-s) * poly_eval(poly, L) / 2, -_antiderivative(s, poly, u, L)]
        for j in range(1, K + 1):
            corr.append(-_em_coeff(j, mp.dps) * u ** (-s - 2 * j + 1) * poly_eval(polys[2 * j - 1], L))
        value = mp.fsum(direct) + mp.fsum(corr)
        scale = max([abs(v) for v in corr[:2]] + [abs(direct[0]) if direct else mpf(0), abs(value)])
        err = bound + rounding_error(scale, n + K + 4)
        return finish(value, err, n, budget, converged)


def power_log_tail(q, log_power: int, log_shift, start, budget: Budget | None = None) -> EvalOutcome:
    """sum_{n >= start} n^-q (log n + log_shift)^log_power, for q > 1 and integer start >= 1."""
    budget = resolve(budget)
    with working_precision(budget):
        poly = [mp.binomial(log_power, i) * mpf(log_shift) ** (log_power - i) for i in range(log_power + 1)]
        return log_power_sum(q, poly, start, budget)


class PowerTerm(NamedTuple):
    """The term ``coef * a**-power * log(a)**log_power`` of an asymptotic expansion in a."""

    coef: object
    power: object
    log_power: int = 0


Expansion = Callable[[int], tuple]


def _tail_estimate(term: PowerTerm, weight, x, n):
    # Cheap upper estimate for sum_{m > n} m^-weight |term(m x)|, used only to pick n.
    q = weight + term.power
    u = mpf(n + 1)
    lx = abs(mp.log(x))
    lu = mp.log(u) + lx
    inv = 1 / (q - 1)
    est = u ** (-q) * lu ** term.log_power + u ** (1 - q) * inv * (lu + inv) ** term.log_power
    return abs(term.coef) * x ** (-term.power) * est


def lattice_sum(
    term: Callable,
    x,
    weight,
    expansion: Expansion,
    budget: Budget | None = None,
    min_terms: int = 1,
) -> EvalOutcome:
    """sum_{n >= 1} n^-weight * term(n x).

    ``term(a, budget)`` returns an EvalOutcome for g(a).  ``expansion(K)`` returns
    ``(terms, omitted)``: the PowerTerms of the large-a expansion of g with K
    correction terms, and the first omitted PowerTerm, whose magnitude bounds
    the remainder for every a > 0.
    """
    budget = resolve(budget)
    with working_precision(budget):
        x = mpf(x)
        weight = mpf(weight)
        terms, omitted = expansion(budget.em_order)
        goal = budget.target / 4
        n = max(1, min_terms)
        while _tail_estimate(omitted, weight, x, n) > goal and n < budget.max_terms:
            n = min(budget.max_terms, int(n * 1.3) + 1)
        converged = n < budget.max_terms

        sub = budget.scaled(mpf(1) / (4 * n))
        direct, direct_err = [], []
        ok = True
        for k in range(1, n + 1):
            out = term(k * x, sub)
            w = mpf(k) ** (-weight)
            direct.append(w * out.value)
            direct_err.append(w * out.err_bound)
            ok = ok and out.converged

        tail_budget = budget.scaled(mpf(1) / (8 * (len(terms) + 1)))
        lx = mp.log(x)
        tail, tail_err = [], []
        for t in terms:
            q = weight + t.power
            z = power_log_tail(q, t.log_power, lx, n + 1, tail_budget)
            scale = t.coef * x ** (-t.power)
            tail.append(scale * z.value)
            tail_err.append(abs(scale) * z.err_bound)
            ok = ok and z.converged
        om = power_log_tail(weight + omitted.power, omitted.log_power, abs(lx), n + 1, tail_budget)
        omitted_bound = abs(omitted.coef) * x ** (-omitted.power) * (om.value + om.err_bound)

        value = mp.fsum(direct) + mp.fsum(tail)
        err = mp.fsum(direct_err) + mp.fsum(tail_err) + omitted_bound
        err += rounding_error(max([abs(v) for v in direct[:1] + tail] + [abs(value)]), n + len(terms))
        return finish(value, err, n, budget, converged and ok)


def pochhammer(s, k: int):
    """Rising factorial (s)_k."""
    acc = mpf(1)
    for i in range(k):
        acc *= s + i
    return acc


def hurwitz_asymptotic_terms(s, K: int, shift_one: bool = False) -> tuple:
    """Large-a expansion of zeta(s, a) - a^(1-s)/(s-1) (or of zeta(s, a+1) - a^(1-s)/(s-1)).

    zeta(s, a) ~ a^(1-s)/(s-1) + a^-s/2 + sum_k B_2k/(2k)! (s)_(2k-1) a^(1-s-2k).
    Returns (terms, omitted) as PowerTerms, excluding the leading a^(1-s)/(s-1).
    """
    s = mpf(s)
    half = mpf(-1) / 2 if shift_one else mpf(1) / 2
    terms = [PowerTerm(half, s)]
    for k in range(1, K + 1):
        terms.append(PowerTerm(_em_coeff(k, mp.dps) * pochhammer(s, 2 * k - 1), s + 2 * k - 1))
    omitted = PowerTerm(_em_coeff(K + 1, mp.dps) * pochhammer(s, 2 * K + 1), s + 2 * K + 1)
    return terms, omitted


def psi_asymptotic_terms(K: int) -> tuple:
    """psi(a) - log(a) ~ -1/(2a) - sum_k B_2k/(2k a^2k): (terms, omitted)."""
    terms = [PowerTerm(mpf(-1) / 2, 1)]
    for k in range(1, K + 1):
        b = bernoulli_fraction(2 * k)
        terms.append(PowerTerm(-mpf(b.numerator) / (b.denominator * 2 * k), 2 * k))
    b = bernoulli_fraction(2 * K + 2)
    omitted = PowerTerm(-mpf(b.numerator) / (b.denominator * (2 * K + 2)), 2 * K + 2)
    return terms, omitted


def ceil_int(v) -> int:
    return int(math.ceil(float(v)))
