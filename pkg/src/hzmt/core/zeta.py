"""Hurwitz and Riemann zeta values, derivatives and Stieltjes constants."""

from __future__ import annotations

from mpmath import mp, mpf

from .bernoulli import bernoulli_fraction
from .budget import (
    Budget,
    DomainError,
    EvalOutcome,
    as_int,
    as_real,
    finish,
    resolve,
    working_precision,
)
from .summation import derivative_polys, log_power_sum, _em_coeff, _em_cutoff, poly_eval


def zeta_nonpositive_int(m: int) -> mpf:
    """zeta(-m) for integer m >= 0: -1/2 at 0, else -B_(m+1)/(m+1)."""
    if m < 0:
        raise DomainError("zeta_nonpositive_int expects m >= 0")
    if m == 0:
        return mpf(-1) / 2
    if m % 2 == 0:
        return mpf(0)
    b = bernoulli_fraction(m + 1)
    return -mpf(b.numerator) / (b.denominator * (m + 1))


def hurwitz_zeta(s, a, budget: Budget | None = None) -> EvalOutcome:
    """zeta(s, a) = sum_{n>=0} (n+a)^-s; analytic continuation for s < 1."""
    budget = resolve(budget)
    with working_precision(budget):
        s = as_real(s, "s")
        a = as_real(a, "a")
        if s == 1:
            raise DomainError("hurwitz_zeta has a pole at s = 1")
        if a <= 0:
            raise DomainError(f"hurwitz_zeta requires a > 0, got {a}")
        return log_power_sum(s, [1], a, budget)


def hurwitz_zeta_deriv(s, a, budget: Budget | None = None) -> EvalOutcome:
    """d/ds zeta(s, a) = -sum log(n+a) (n+a)^-s."""
    budget = resolve(budget)
    with working_precision(budget):
        s = as_real(s, "s")
        a = as_real(a, "a")
        if s == 1 or a <= 0:
            raise DomainError("hurwitz_zeta_deriv requires s != 1 and a > 0")
        return log_power_sum(s, [0, -1], a, budget)


def _expm1_ratio(y):
    """expm1(y)/y, equal to 1 at y = 0."""
    if y == 0:
        return mpf(1)
    return mp.expm1(y) / y


def hurwitz_zeta_reg(z, a, budget: Budget | None = None) -> EvalOutcome:
    """zeta(z, a) - a^(1-z)/(z-1), continuous through z = 1 where it equals log(a) - psi(a).

    The subtracted pole term is folded into the Euler-Maclaurin antiderivative
    difference ((N+a)^(1-z) - a^(1-z))/(z-1), evaluated with expm1, so nothing
    cancels near z = 1.
    """
    budget = resolve(budget)
    with working_precision(budget):
        z = as_real(z, "z")
        a = as_real(a, "a")
        if z <= 0:
            raise DomainError(f"hurwitz_zeta_reg requires z > 0, got {z}")
        if a <= 0:
            raise DomainError(f"hurwitz_zeta_reg requires a > 0, got {a}")
        K = budget.em_order
        polys = derivative_polys(z, [mpf(1)], 2 * K + 1)
        n, bound = _em_cutoff(z, polys, a, K, budget)
        converged = n < budget.max_terms or bound <= budget.target / 2
        direct = mp.fsum((k + a) ** (-z) for k in range(n))
        u = n + a
        ell = mp.log1p(n / a)
        # ((N+a)^(1-z) - a^(1-z)) / (z-1)
        between = -a ** (1 - z) * ell * _expm1_ratio((1 - z) * ell)
        corr = [u ** (-z) / 2, between]
        for j in range(1, K + 1):
            corr.append(-_em_coeff(j, mp.dps) * u ** (-z - 2 * j + 1) * polys[2 * j - 1][0])
        value = direct + mp.fsum(corr)
        err = bound + (abs(direct) + abs(between) + 1) * (n + K + 4) * mpf(10) ** (1 - mp.dps)
        return finish(value, err, n, budget, converged)


def hurwitz_zeta_minus_pole(w, a, budget: Budget | None = None) -> EvalOutcome:
    """zeta(w, a) - 1/(w-1), continuous through w = 1 where it equals -psi(a)."""
    budget = resolve(budget)
    with working_precision(budget):
        w = as_real(w, "w")
        a = as_real(a, "a")
        reg = hurwitz_zeta_reg(w, a, budget)
        la = mp.log(a)
        # (a^(1-w) - 1)/(w - 1)
        extra = -la * _expm1_ratio((1 - w) * la)
        return finish(reg.value + extra, reg.err_bound, reg.terms_used, budget, reg.converged)


def riemann_zeta(s, budget: Budget | None = None) -> EvalOutcome:
    budget = resolve(budget)
    with working_precision(budget):
        s = as_real(s, "s")
        if s == 1:
            raise DomainError("riemann_zeta has a pole at s = 1")
        if s <= 0 and s == mp.floor(s):
            return finish(zeta_nonpositive_int(int(-s)), 0, 0, budget)
        return hurwitz_zeta(s, 1, budget)


def riemann_zeta_conv(s, budget: Budget | None = None) -> EvalOutcome:
    """zeta(s) for s > 1, with the convention zeta(1) = Euler's gamma."""
    budget = resolve(budget)
    with working_precision(budget):
        s = as_real(s, "s")
        if s < 1:
            raise DomainError(f"riemann_zeta_conv requires s >= 1, got {s}")
        if s == 1:
            return finish(+mp.euler, 0, 0, budget)
        return riemann_zeta(s, budget)


def riemann_zeta_prime(s, budget: Budget | None = None) -> EvalOutcome:
    budget = resolve(budget)
    with working_precision(budget):
        s = as_real(s, "s")
        if s <= 1:
            raise DomainError(f"riemann_zeta_prime requires s > 1, got {s}")
        return hurwitz_zeta_deriv(s, 1, budget)


def stieltjes_generalized(n, a, budget: Budget | None = None) -> mpf:
    """gamma_n(a) in zeta(s, a) = 1/(s-1) + sum_n (-1)^n gamma_n(a) (s-1)^n / n!, for n in {0, 1}."""
    budget = resolve(budget)
    with working_precision(budget):
        n = as_int(n, "n")
        a = as_real(a, "a")
        if n not in (0, 1):
            raise DomainError(f"stieltjes_generalized supports n in {{0, 1}}, got {n}")
        if a <= 0:
            raise DomainError(f"stieltjes_generalized requires a > 0, got {a}")
        poly = [0] * n + [1]
        return log_power_sum(1, poly, a, budget).value


def stieltjes(n, budget: Budget | None = None) -> mpf:
    """Stieltjes constant gamma_n for n in {0, 1, 2}; gamma_0 is Euler's constant."""
    budget = resolve(budget)
    with working_precision(budget):
        n = as_int(n, "n")
        if n not in (0, 1, 2):
            raise DomainError(f"stieltjes supports n in {{0, 1, 2}}, got {n}")
        poly = [0] * n + [1]
        return log_power_sum(1, poly, 1, budget).value


def hurwitz_reg_near_one(z, a, budget: Budget | None = None) -> mpf:
    """First-order expansion of zeta(z, a) - a^(1-z)/(z-1) about z = 1.

    (log a - psi(a)) + (z-1)(-gamma_1(a) - log(a)^2/2); error O((z-1)^2).
    """
    budget = resolve(budget)
    with working_precision(budget):
        z = as_real(z, "z")
        a = as_real(a, "a")
        la = mp.log(a)
        g0 = stieltjes_generalized(0, a, budget)
        g1 = stieltjes_generalized(1, a, budget)
        return la + g0 + (z - 1) * (-g1 - la ** 2 / 2)
