"""The Herglotz family: F, F_r, Phi, double zeta and related closed forms."""

from __future__ import annotations

from mpmath import mp, mpf

from .core.bernoulli import bernoulli_fraction
from .core.budget import (
    Budget,
    DomainError,
    EvalOutcome,
    as_int,
    as_real,
    combine,
    finish,
    resolve,
    working_precision,
)
from .core.gamma import _psi_series, digamma
from .core.polylog import dilog
from .core.summation import (
    PowerTerm,
    hurwitz_asymptotic_terms,
    lattice_sum,
    psi_asymptotic_terms,
)
from .core.zeta import (
    hurwitz_zeta,
    hurwitz_zeta_reg,
    riemann_zeta,
    riemann_zeta_prime,
    stieltjes,
)


def _require_positive(x, name="x"):
    x = as_real(x, name)
    if x <= 0:
        raise DomainError(f"{name} must be > 0, got {x}")
    return x


def _psi_minus_log(a, budget):
    d = digamma(a, budget)
    return finish(d.value - mp.log(a), d.err_bound, d.terms_used, budget, d.converged)


def herglotz_F(x, budget: Budget | None = None) -> EvalOutcome:
    """F(x) = sum_{n>=1} (psi(nx) - log(nx))/n for x > 0."""
    budget = resolve(budget)
    with working_precision(budget):
        x = _require_positive(x)
        return lattice_sum(_psi_minus_log, x, 1, psi_asymptotic_terms, budget)


def higher_herglotz_F(r, x, budget: Budget | None = None) -> EvalOutcome:
    """F_r(x) = sum_{n>=1} psi(nx)/n^r, integer r >= 2.

    Uses the global subtraction of the K-term psi asymptotic:
    F_r(x) = log(x) zeta(r) - zeta'(r) - zeta(r+1)/(2x) - sum_k B_2k zeta(r+2k)/(2k x^2k)
             + sum_n [psi(nx) - asym_K(nx)]/n^r,
    where the corrections decay like n^(-r-2K-2).
    """
    budget = resolve(budget)
    r = as_int(r, "r")
    if r < 2:
        raise DomainError(f"higher_herglotz_F requires r >= 2, got {r}")
    with working_precision(budget):
        x = _require_positive(x)
        K = budget.em_order
    # small x makes the subtracted series large; carry enough digits to absorb it
    extra = int(mp.ceil(2 * K * max(0, -mp.log10(x)))) + 2
    with working_precision(budget, extra):
        x = mpf(x)
        target = budget.target
        b = bernoulli_fraction(2 * K + 2)
        lead = abs(mpf(b.numerator) / (b.denominator * (2 * K + 2))) * x ** (-2 * K - 2)
        q = r + 2 * K + 2
        n = 1
        while lead * ((n + 1) ** (-q) + mpf(n + 1) ** (1 - q) / (q - 1)) > target / 4:
            n = int(n * 1.3) + 1
        # zeta(r+2k) errors are amplified by x^(-2k) and by |log x|
        amp = max(1, x ** (-2 * K), abs(mp.log(x)))
        sub = budget.scaled(1 / (8 * (K + 4) * amp))
        zr = riemann_zeta(r, sub)
        zp = riemann_zeta_prime(r, sub)
        zr1 = riemann_zeta(r + 1, sub)
        parts = [mp.log(x) * zr.value, -zp.value, -zr1.value / (2 * x)]
        err = abs(mp.log(x)) * zr.err_bound + zp.err_bound + zr1.err_bound / (2 * x)
        for k in range(1, K + 1):
            bk = bernoulli_fraction(2 * k)
            zk = riemann_zeta(r + 2 * k, sub)
            c = mpf(bk.numerator) / (bk.denominator * 2 * k * x ** (2 * k))
            parts.append(-c * zk.value)
            err += abs(c) * zk.err_bound
        dsub = budget.scaled(mpf(1) / (4 * n))
        corr = []
        for m in range(1, n + 1):
            a = m * x
            d = digamma(a, dsub)
            asym, _ = _psi_series(a, K)
            corr.append((d.value - asym) / mpf(m) ** r)
            err += d.err_bound / mpf(m) ** r
        omitted = lead * (mp.zeta(q, n + 1))
        value = mp.fsum(parts) + mp.fsum(corr)
        scale = max(abs(p) for p in parts)
        err += omitted + scale * (n + K) * mpf(10) ** (1 - mp.dps)
        return finish(value, err, n, budget)


def _psi(a, budget):
    return digamma(a, budget)


def _psi_full_terms(K):
    terms, omitted = psi_asymptotic_terms(K)
    return [PowerTerm(mpf(1), mpf(0), 1)] + terms, omitted


def higher_herglotz_F_direct(r, x, budget: Budget | None = None) -> EvalOutcome:
    """F_r(x) by direct summation with an asymptotic tail (independent of zeta'(r))."""
    budget = resolve(budget)
    with working_precision(budget):
        r = as_int(r, "r")
        if r < 2:
            raise DomainError(f"higher_herglotz_F requires r >= 2, got {r}")
        x = _require_positive(x)
        return lattice_sum(_psi, x, r, _psi_full_terms, budget)


def phi(z, x, budget: Budget | None = None) -> EvalOutcome:
    """Generalized Herglotz function sum_n (zeta(z, nx) - (nx)^(1-z)/(z-1))/n, z > 0, z != 1."""
    budget = resolve(budget)
    with working_precision(budget):
        z = as_real(z, "z")
        x = _require_positive(x)
        if z <= 0:
            raise DomainError(f"phi requires z > 0, got {z}")
        if z == 1:
            raise DomainError("phi is defined for z != 1; use phi_limit_at_1")
        return _phi_sum(z, x, budget)


def _phi_sum(z, x, budget):
    def term(a, b):
        return hurwitz_zeta_reg(z, a, b)

    return lattice_sum(term, x, 1, lambda K: hurwitz_asymptotic_terms(z, K), budget)


def phi_limit_at_1(x, budget: Budget | None = None) -> EvalOutcome:
    """lim_{z -> 1} Phi(z, x) = -F(x)."""
    return -herglotz_F(x, budget)


def double_zeta(s1, s2, budget: Budget | None = None) -> EvalOutcome:
    """zeta_D(s1, s2) = sum_{n>=1} sum_{m>n} m^-s1 n^-s2 = sum_n zeta(s1, n+1)/n^s2."""
    budget = resolve(budget)
    with working_precision(budget):
        s1 = as_real(s1, "s1")
        s2 = as_real(s2, "s2")
        if s1 < 2 or s2 < 1:
            raise DomainError(f"double_zeta requires s1 >= 2 and s2 >= 1, got ({s1}, {s2})")

        def term(a, b):
            return hurwitz_zeta(s1, a + 1, b)

        def expansion(K):
            terms, omitted = hurwitz_asymptotic_terms(s1, K, shift_one=True)
            return [PowerTerm(1 / (s1 - 1), s1 - 1)] + terms, omitted

        return lattice_sum(term, 1, s2, expansion, budget)


def double_zeta_conv(s1, s2, budget: Budget | None = None, reading: str = "double") -> EvalOutcome:
    """zeta_D with the divergent value zeta_D(1, r) = -(zeta_D(r, 1) + zeta(r+1) - gamma zeta(r)).

    ``reading="hurwitz"`` substitutes zeta(r, 1) = zeta(r) for zeta_D(r, 1) in
    that convention; it exists only to probe the notation's alternative reading.
    """
    budget = resolve(budget)
    with working_precision(budget):
        s1 = as_real(s1, "s1")
        if s1 >= 2:
            return double_zeta(s1, s2, budget)
        if s1 != 1:
            raise DomainError(f"double_zeta_conv requires s1 = 1 or s1 >= 2, got {s1}")
        r = as_int(s2, "s2")
        if r < 2:
            raise DomainError(f"double_zeta_conv(1, r) requires integer r >= 2, got {s2}")
        sub = budget.scaled(mpf(1) / 8)
        if reading == "double":
            first = double_zeta(r, 1, sub)
        elif reading == "hurwitz":
            first = riemann_zeta(r, sub)
        else:
            raise DomainError(f"unknown reading {reading!r}")
        zr1 = riemann_zeta(r + 1, sub)
        zr = riemann_zeta(r, sub)
        gamma = +mp.euler
        value, err, terms, ok = combine([first, zr1, zr], [-1, -1, gamma])
        return finish(value, err, terms, budget, ok)


def zagier_P(x, y, budget: Budget | None = None) -> EvalOutcome:
    """P(x, y) = F(x) - F(y) + Li2(y/x) - pi^2/6 + log(x/y)(gamma - log(x-y)/2 + log(x/y)/4)."""
    budget = resolve(budget)
    with working_precision(budget):
        x = _require_positive(x)
        y = _require_positive(y, "y")
        if not y < x:
            raise DomainError(f"zagier_P requires 0 < y < x, got x={x}, y={y}")
        sub = budget.scaled(mpf(1) / 4)
        fx = herglotz_F(x, sub)
        fy = herglotz_F(y, sub)
        li = dilog(y / x, sub)
        lq = mp.log(x / y)
        elementary = -mp.pi ** 2 / 6 + lq * (mp.euler - mp.log(x - y) / 2 + lq / 4)
        value, err, terms, ok = combine([fx, fy, li], [1, -1, 1])
        return finish(value + elementary, err, terms, budget, ok)


def ramanujan_phi(a, budget: Budget | None = None) -> EvalOutcome:
    """phi(a) = psi(a) + 1/(2a) - log(a), a > 0."""
    budget = resolve(budget)
    with working_precision(budget):
        a = _require_positive(a, "a")
        d = digamma(a, budget)
        return finish(d.value + 1 / (2 * a) - mp.log(a), d.err_bound, d.terms_used, budget, d.converged)


def f1_constant(budget: Budget | None = None) -> mpf:
    """F(1) = -gamma^2/2 - pi^2/12 - gamma_1."""
    budget = resolve(budget)
    with working_precision(budget):
        return -mp.euler ** 2 / 2 - mp.pi ** 2 / 12 - stieltjes(1, budget)
