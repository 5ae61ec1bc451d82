"""Digamma and polygamma functions."""

from __future__ import annotations

from mpmath import mp, mpf

from .bernoulli import bernoulli_fraction
from .budget import Budget, DomainError, EvalOutcome, as_int, as_real, finish, resolve, working_precision
from .zeta import hurwitz_zeta


def _psi_series(u, K: int):
    """Asymptotic psi(u) with K Bernoulli terms; returns (value, first omitted term magnitude)."""
    acc = [mp.log(u), -1 / (2 * u)]
    inv2 = 1 / (u * u)
    p = mpf(1)
    for k in range(1, K + 1):
        p *= inv2
        b = bernoulli_fraction(2 * k)
        acc.append(-mpf(b.numerator) * p / (b.denominator * 2 * k))
    b = bernoulli_fraction(2 * K + 2)
    omitted = abs(mpf(b.numerator) / (b.denominator * (2 * K + 2))) * p * inv2
    return mp.fsum(acc), omitted


def shift_threshold(budget: Budget) -> mpf:
    """Argument above which the asymptotic series alone meets the budget."""
    K = budget.em_order
    b = bernoulli_fraction(2 * K + 2)
    lead = abs(mpf(b.numerator) / (b.denominator * (2 * K + 2)))
    needed = (lead / (budget.target / 2)) ** (mpf(1) / (2 * K + 2))
    return max(mpf(10), mpf(budget.precision) / 2, needed)


def digamma(a, budget: Budget | None = None) -> EvalOutcome:
    """psi(a) for a > 0 by upward recurrence followed by the asymptotic series."""
    budget = resolve(budget)
    with working_precision(budget):
        a = as_real(a, "a")
        if a <= 0:
            raise DomainError(f"digamma requires a > 0, got {a}")
        shift = max(0, int(mp.ceil(shift_threshold(budget) - a)))
        u = a + shift
        asym, omitted = _psi_series(u, budget.em_order)
        recur = mp.fsum(1 / (a + k) for k in range(shift)) if shift else mpf(0)
        value = asym - recur
        err = omitted + (abs(asym) + abs(recur)) * (shift + 2 * budget.em_order) * mpf(10) ** (1 - mp.dps)
        return finish(value, err, shift, budget)


def polygamma(j, a, budget: Budget | None = None) -> EvalOutcome:
    """psi^(j)(a) = (-1)^(j+1) j! zeta(j+1, a) for j >= 1."""
    budget = resolve(budget)
    with working_precision(budget):
        j = as_int(j, "j")
        a = as_real(a, "a")
        if j < 1:
            raise DomainError(f"polygamma requires j >= 1, got {j}")
        if a <= 0:
            raise DomainError(f"polygamma requires a > 0, got {a}")
        scale = (-1) ** (j + 1) * mp.factorial(j)
        z = hurwitz_zeta(j + 1, a, budget.scaled(1 / abs(scale)))
        return finish(scale * z.value, abs(scale) * z.err_bound, z.terms_used, budget, z.converged)
