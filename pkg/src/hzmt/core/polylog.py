"""Polylogarithms Li_r on (0, 1], including the expansion of Li_r(e^-y) at small y."""

from __future__ import annotations

from mpmath import mp, mpf

from .bernoulli import harmonic
from .budget import Budget, DomainError, EvalOutcome, as_int, as_real, finish, resolve, working_precision
from .zeta import riemann_zeta, zeta_nonpositive_int

Y_SWITCH = mpf(1) / 2


def _exp_series(q, r: int, budget: Budget, terms_cap: int):
    """sum_{u>=1} q^u / u^r with geometric tail bound, 0 < q < 1."""
    target = budget.target / 4
    acc = []
    p = mpf(1)
    u = 0
    while True:
        u += 1
        p *= q
        term = p / mpf(u) ** r
        acc.append(term)
        tail = p * q / (mpf(u + 1) ** r * (1 - q))
        if tail < target or u >= terms_cap:
            return mp.fsum(acc), tail, u


def polylog_exp(r, y, budget: Budget | None = None) -> EvalOutcome:
    """Li_r(e^-y) for integer r >= 2 and y > 0.

    For y < 1/2 the expansion about y = 0 is used:
    (-1)^(r-1) (H_(r-1) - log y) y^(r-1)/(r-1)! + sum_{k != r-1} (-1)^k zeta(r-k) y^k / k!,
    with zeta at nonpositive integers taken from Bernoulli numbers.
    """
    budget = resolve(budget)
    with working_precision(budget):
        r = as_int(r, "r")
        y = as_real(y, "y")
        if r < 2:
            raise DomainError(f"polylog_exp requires r >= 2, got {r}")
        if y <= 0:
            raise DomainError(f"polylog_exp requires y > 0, got {y}")
        if y >= Y_SWITCH:
            value, err, n = _exp_series(mp.exp(-y), r, budget, budget.max_terms)
            return finish(value, err, n, budget, n < budget.max_terms)
        return _polylog_small_y(r, y, budget)


def _polylog_small_y(r: int, y, budget: Budget) -> EvalOutcome:
    target = budget.target / 4
    acc = [(-1) ** (r - 1) * (harmonic(r - 1) - mp.log(y)) * y ** (r - 1) / mp.factorial(r - 1)]
    sub = budget.scaled(mpf(1) / (4 * r))
    err = mpf(0)
    for k in range(0, r - 1):
        z = riemann_zeta(r - k, sub)
        acc.append((-1) ** k * z.value * y ** k / mp.factorial(k))
        err += z.err_bound * y ** k / mp.factorial(k)
    ratio = y / (2 * mp.pi)
    k = r
    while True:
        m = k - r  # zeta(r - k) = zeta(-m)
        acc.append((-1) ** k * zeta_nonpositive_int(m) * y ** k / mp.factorial(k))
        # |zeta(-m')| <= 4 m'! / (2 pi)^(m'+1) bounds every later coefficient
        m1 = m + 1
        envelope = 4 * mp.factorial(m1) / (2 * mp.pi) ** (m1 + 1) * y ** (k + 1) / mp.factorial(k + 1)
        tail = envelope / (1 - ratio)
        if tail < target and m >= 1:
            break
        k += 1
    value = mp.fsum(acc)
    return finish(value, err + tail, k + 1, budget)


def polylog(r, z, budget: Budget | None = None) -> EvalOutcome:
    """Li_r(z) for integer r >= 1 and 0 < z <= 1 (except the divergent Li_1(1))."""
    budget = resolve(budget)
    with working_precision(budget):
        r = as_int(r, "r")
        z = as_real(z, "z")
        if r < 1:
            raise DomainError(f"polylog requires r >= 1, got {r}")
        if not 0 < z <= 1:
            raise DomainError(f"polylog requires 0 < z <= 1, got {z}")
        if r == 1:
            if z == 1:
                raise DomainError("Li_1(1) diverges")
            return finish(-mp.log1p(-z), 0, 0, budget)
        if z == 1:
            return riemann_zeta(r, budget)
        if z <= mp.exp(-Y_SWITCH):
            value, err, n = _exp_series(z, r, budget, budget.max_terms)
            return finish(value, err, n, budget, n < budget.max_terms)
        return polylog_exp(r, -mp.log(z), budget)


def dilog(z, budget: Budget | None = None) -> EvalOutcome:
    """Li_2(z) on [0, 1]."""
    budget = resolve(budget)
    with working_precision(budget):
        z = as_real(z, "z")
        if not 0 <= z <= 1:
            raise DomainError(f"dilog requires 0 <= z <= 1, got {z}")
        if z == 0:
            return finish(0, 0, 0, budget)
        return polylog(2, z, budget)
