"""Mordell-Tornheim type double series Theta(r, s, t, x).

Theta(r, s, t, x) = sum_{n, m >= 1} n^-r m^-s (n + m x)^-t.

Evaluators:

* ``theta_direct`` sums the double series inside the convergence region with
  Euler-Maclaurin inner tails and an asymptotic outer tail.
* ``theta_0r`` / ``theta_01_reg`` reduce Theta(0, r, w, x) to single sums of
  Hurwitz zeta values, which stay accurate next to the pole at w = 1.
* ``theta_rr_near_pole`` and ``theta11_via_phi`` reach the poles at t = 1 - r
  and t = 0 through those single sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from mpmath import mp, mpf

from .core.bernoulli import harmonic
from .core.budget import (
    DEFAULT_PRECISION,
    Budget,
    DomainError,
    EvalOutcome,
    as_int,
    as_real,
    combine,
    finish,
    resolve,
    rounding_error,
    working_precision,
)
from .core.gamma import digamma
from .core.summation import (
    PowerTerm,
    _em_coeff,
    ceil_int,
    hurwitz_asymptotic_terms,
    lattice_sum,
    pochhammer,
    psi_asymptotic_terms,
)
from .core.zeta import (
    hurwitz_zeta,
    hurwitz_zeta_deriv,
    hurwitz_zeta_reg,
    riemann_zeta,
    riemann_zeta_prime,
)
from .herglotz import phi

DEFAULT_MARGIN = 0.25
# outer index m switches to the large-(m x) expansion once m x exceeds this
_OUTER_SWITCH = 25
_NEAR_POLE = 0.5


@dataclass(frozen=True)
class ThetaPoint:
    r: float
    s: float
    t: float
    x: float

    def __post_init__(self):
        for name in ("r", "s", "t", "x"):
            object.__setattr__(self, name, as_real(getattr(self, name), name))
        if self.x <= 0:
            raise DomainError(f"x must be > 0, got {self.x}")

    def margin(self) -> mpf:
        """Distance to the boundary of the absolute convergence region."""
        r, s, t = self.r, self.s, self.t
        return min(r + t - 1, s + t - 1, r + s + t - 2)

    def in_region_D(self, margin=0) -> bool:
        return self.margin() > 0 and self.margin() >= margin

    def on_singularity(self) -> bool:
        r, s, t = self.r, self.s, self.t

        def hits(v):
            return v <= 1 and v == mp.floor(v)

        return hits(r + t) or hits(s + t) or r + s + t == 2

    def as_tuple(self) -> tuple:
        return (self.r, self.s, self.t, self.x)


def _point(r, s=None, t=None, x=None) -> ThetaPoint:
    if isinstance(r, ThetaPoint):
        return r
    return ThetaPoint(r, s, t, x)


@dataclass(frozen=True)
class LaurentExpansion:
    """Laurent coefficients of a function of t about ``center``."""

    center: mpf
    coeffs: dict = field(default_factory=dict)
    remainder_order: int = 1
    variable: str = "t"

    def __post_init__(self):
        orders = sorted(self.coeffs)
        if orders and orders != list(range(orders[0], self.remainder_order)):
            raise ValueError("coefficients must cover every order below remainder_order")

    def truncated(self, eps) -> mpf:
        """Sum of the stored terms at t = center + eps."""
        eps = mpf(eps)
        return mp.fsum(c * eps ** k for k, c in self.coeffs.items())


def _binom(a, k: int):
    out = mpf(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


def _is_int(v) -> bool:
    return v == mp.floor(v)


def _zeta_any(s, budget: Budget) -> tuple:
    """zeta(s) for any real s != 1, reflecting negative arguments."""
    if s <= 0 and _is_int(s):
        m = int(-s)
        if m > 0 and m % 2 == 0:
            return mpf(0), mpf(0)
        z = riemann_zeta(s, budget)
        return z.value, z.err_bound
    if s >= 0:
        z = riemann_zeta(s, budget)
        return z.value, z.err_bound
    pre = 2 ** s * mp.pi ** (s - 1) * mp.sin(mp.pi * s / 2) * mp.gamma(1 - s)
    z = riemann_zeta(1 - s, budget.scaled(1 / max(1, abs(pre))))
    return pre * z.value, abs(pre) * z.err_bound + rounding_error(pre * z.value)


class _InnerSum:
    """I(c) = sum_{n >= 1} n^-r (n + c)^-t by direct summation plus Euler-Maclaurin."""

    def __init__(self, r, t, K: int, n_min: int):
        self.r, self.t, self.K, self.n_min = r, t, K, n_min
        self.pr = [pochhammer(r, i) for i in range(2 * K + 2)]
        self.pt = [pochhammer(t, i) for i in range(2 * K + 2)]
        self.binoms = [[mpf(comb(j, i)) for i in range(j + 1)] for j in range(2 * K + 2)]
        self.em = [_em_coeff(k, mp.dps) for k in range(1, K + 2)]

    def deriv(self, j: int, u, c):
        # Leibniz rule on u^-r (u + c)^-t
        r, t = self.r, self.t
        ur = u ** (-r)
        uc = (u + c) ** (-t)
        acc = mp.fsum(
            self.binoms[j][i] * self.pr[i] * self.pt[j - i] * ur * u ** (-i) * uc * (u + c) ** (i - j)
            for i in range(j + 1)
        )
        return acc if j % 2 == 0 else -acc

    def integral(self, n0, c, goal):
        r, t = self.r, self.t
        q = c / n0
        terms = []
        k = 0
        term = n0 ** (1 - r - t) / (r + t - 1)
        coef = mpf(1)
        while True:
            terms.append(term)
            ratio = q * (k + abs(t) + 1) / (k + 1)
            if coef == 0 or (ratio < 1 and abs(term) * ratio / (1 - ratio) <= goal):
                break
            k += 1
            coef = coef * (-t - k + 1) / k
            term = coef * c ** k * n0 ** (1 - r - t - k) / (r + t + k - 1)
            if k > 10_000:
                raise ArithmeticError("inner integral series failed to converge")
        return mp.fsum(terms), len(terms)

    def __call__(self, c, goal) -> tuple:
        K = self.K
        n0 = max(self.n_min, ceil_int(3 * c) + 1)
        omitted = _em_coeff(K + 1, mp.dps)
        while True:
            bound = abs(omitted * self.deriv(2 * K + 1, mpf(n0), c))
            if bound <= goal / 2:
                break
            n0 = int(n0 * 1.5) + 1
        r, t = self.r, self.t
        direct = [mpf(n) ** (-r) * (n + c) ** (-t) for n in range(1, n0)]
        integ, used = self.integral(mpf(n0), c, goal / 8)
        u = mpf(n0)
        corr = [integ, u ** (-r) * (u + c) ** (-t) / 2]
        for k in range(1, K + 1):
            corr.append(-self.em[k - 1] * self.deriv(2 * k - 1, u, c))
        value = mp.fsum(direct) + mp.fsum(corr)
        err = bound + goal / 8 + rounding_error(max(abs(value), abs(integ)), n0 + used)
        return value, err, n0


def _outer_tail(p: ThetaPoint, M: int, budget: Budget) -> tuple:
    """sum_{m > M} m^-s I(m x) from the large-c expansion of I(c).

    I(c) ~ sum_k binom(-t, k) zeta(r - k) c^(-t-k) + Gamma(1-r) Gamma(r+t-1)/Gamma(t) c^(1-r-t);
    for integer r >= 1 the k = r - 1 term and the pole term merge into
    binom(-t, r-1) c^(1-r-t) (log c + H_(r-1) - psi(t+r-1)).
    """
    r, s, t, x = p.as_tuple()
    target = budget.target
    sub = budget.scaled(mpf(1) / 64)
    parts, errs = [], []
    int_r = _is_int(r) and r >= 1
    k0 = int(r) - 1 if int_r else None

    if not int_r:
        g = mp.gamma(1 - r) * mp.gamma(r + t - 1) * mp.rgamma(t)
        if g != 0:
            z = hurwitz_zeta(s + r + t - 1, M + 1, sub.scaled(1 / max(1, abs(g))))
            scale = g * x ** (1 - r - t)
            parts.append(scale * z.value)
            errs.append(abs(scale) * z.err_bound)
    else:
        b = _binom(-t, k0)
        if b != 0:
            q = s + t + k0
            scale = b * x ** (-t - k0)
            const = mp.log(x) + harmonic(k0) - digamma(t + k0, sub).value
            zq = hurwitz_zeta(q, M + 1, sub.scaled(1 / max(1, abs(const * scale))))
            zd = hurwitz_zeta_deriv(q, M + 1, sub.scaled(1 / max(1, abs(scale))))
            parts.append(scale * (const * zq.value - zd.value))
            errs.append(abs(scale) * (abs(const) * zq.err_bound + zd.err_bound))

    contributions = []
    k = 0
    coef = mpf(1)
    while True:
        if coef == 0:
            break
        if k != k0:
            zr, zr_err = _zeta_any(r - k, sub)
            z = hurwitz_zeta(s + t + k, M + 1, sub)
            scale = coef * x ** (-t - k)
            contributions.append(abs(scale * zr * z.value))
            parts.append(scale * zr * z.value)
            errs.append(abs(scale) * (abs(zr) * z.err_bound + zr_err * z.value))
            if len(contributions) >= 3 and contributions[-1] + contributions[-2] <= target / 16:
                break
            if len(contributions) >= 4 and contributions[-1] > contributions[-3] and contributions[-1] > target / 16:
                return None
        k += 1
        coef = coef * (-t - k + 1) / k
        if k > 200:
            return None
    # remainder bounded by the two smallest computed terms (one may vanish)
    trailing = contributions[-1] + contributions[-2] if len(contributions) >= 2 else mpf(0)
    value = mp.fsum(parts)
    err = mp.fsum(errs) + trailing + rounding_error(max([abs(v) for v in parts] + [value]), len(parts))
    return value, err, k


def theta_direct(
    r, s=None, t=None, x=None, budget: Budget | None = None, margin=DEFAULT_MARGIN, schedule: int = 0
) -> EvalOutcome:
    """Theta(r, s, t, x) from the double series, for points inside the region.

    ``schedule`` selects an alternative truncation pattern (different inner and
    outer cut-offs); two schedules give two independent evaluations.
    """
    budget = resolve(budget)
    with working_precision(budget):
        p = _point(r, s, t, x)
        if not p.in_region_D(margin):
            raise DomainError(f"theta_direct needs a point in the region with margin {margin}: {p.as_tuple()}")
        r, s, t, x = p.as_tuple()
        K = budget.em_order
        n_min = 10 + 7 * schedule
        switch = _OUTER_SWITCH * (1 + schedule)
        inner = _InnerSum(r, t, K, n_min)
        while True:
            M = max(1, ceil_int(switch / x))
            tail = _outer_tail(p, M, budget.scaled(mpf(1) / 4))
            if tail is not None:
                break
            switch *= 2
        tail_value, tail_err, tail_terms = tail
        goal = budget.target / (4 * M)
        parts, err, terms = [], tail_err, tail_terms
        for m in range(1, M + 1):
            w = mpf(m) ** (-s)
            v, e, n0 = inner(m * x, goal / max(1, w))
            parts.append(w * v)
            err += w * e
            terms += n0
        value = mp.fsum(parts) + tail_value
        err += rounding_error(max([abs(v) for v in parts] + [abs(value)]), M)
        if terms > budget.max_terms * 10:
            return finish(value, err, terms, budget, False)
        return finish(value, err, terms, budget)


def mt_zeta(r, s, t, budget: Budget | None = None, schedule: int = 0) -> EvalOutcome:
    """Mordell-Tornheim zeta: Theta at x = 1."""
    return theta_direct(r, s, t, 1, budget, schedule=schedule)


def _shifted_reg_terms(w):
    def expansion(K):
        return hurwitz_asymptotic_terms(w, K, shift_one=True)

    return expansion


def _shifted_reg(w):
    # zeta(w, a+1) - a^(1-w)/(w-1), stable at w = 1
    def term(a, b):
        out = hurwitz_zeta_reg(w, a, b)
        return finish(out.value - a ** (-w), out.err_bound, out.terms_used, b, out.converged)

    return term


def _pole_difference(w, r: int, x, budget: Budget) -> EvalOutcome:
    """[x^(1-w) zeta(r+w-1) - zeta(r)]/(w - 1); at w = 1 its limit zeta'(r) - log(x) zeta(r)."""
    if w == 1:
        sub = budget.scaled(mpf(1) / (4 * max(1, abs(mp.log(x)))))
        zr = riemann_zeta(r, sub)
        zp = riemann_zeta_prime(r, sub)
        value = zp.value - mp.log(x) * zr.value
        return finish(value, zp.err_bound + abs(mp.log(x)) * zr.err_bound, 0, budget)
    d = abs(w - 1)
    extra = max(0, ceil_int(-mp.log10(d))) + 2
    with working_precision(budget, extra):
        sub = budget.scaled(d / 4)
        a = riemann_zeta(r + w - 1, sub)
        b = riemann_zeta(r, sub)
        xp = x ** (1 - w)
        value = (xp * a.value - b.value) / (w - 1)
        err = (xp * a.err_bound + b.err_bound) / d
        return finish(+value, err, 0, budget)


def theta_0r(w, r, x, budget: Budget | None = None, regularized: bool = False) -> EvalOutcome:
    """Theta(0, r, w, x) = sum_m zeta(w, m x + 1)/m^r.

    With ``regularized=True`` returns Theta(0, r, w, x) - zeta(r)/(w - 1), which is
    regular at w = 1, where it equals -sum_m psi(m x + 1)/m^r.
    """
    budget = resolve(budget)
    with working_precision(budget):
        w = as_real(w, "w")
        r = as_int(r, "r")
        x = as_real(x, "x")
        if r < 2:
            raise DomainError(f"theta_0r requires r >= 2, got {r}")
        if x <= 0:
            raise DomainError(f"x must be > 0, got {x}")
        if w <= 0.5:
            raise DomainError(f"theta_0r requires w > 1/2, got {w}")
        if w == 1 and not regularized:
            raise DomainError("Theta(0, r, w, x) has a pole at w = 1; use regularized=True")
        sub = budget.scaled(mpf(1) / 4)
        series = lattice_sum(_shifted_reg(w), x, r, _shifted_reg_terms(w), sub)
        diff = _pole_difference(w, r, x, sub)
        parts = [series, diff]
        if not regularized:
            zr = riemann_zeta(r, sub.scaled(abs(w - 1)))
            parts.append(finish(zr.value / (w - 1), zr.err_bound / abs(w - 1), 0, sub))
        value, err, terms, ok = combine(parts)
        return finish(value, err, terms, budget, ok)


def theta_01_reg(w, x, budget: Budget | None = None) -> EvalOutcome:
    """Theta(0, 1, w, x) = sum_m [zeta(w, m x + 1) - (m x)^(1-w)/(w-1)]/m + x^(1-w) zeta(w)/(w-1)."""
    budget = resolve(budget)
    with working_precision(budget):
        w = as_real(w, "w")
        x = as_real(x, "x")
        if x <= 0:
            raise DomainError(f"x must be > 0, got {x}")
        if w <= 0.5 or w == 1:
            raise DomainError(f"theta_01_reg requires w > 1/2 and w != 1, got {w}")
        sub = budget.scaled(mpf(1) / 4)
        series = lattice_sum(_shifted_reg(w), x, 1, _shifted_reg_terms(w), sub)
        scale = x ** (1 - w) / (w - 1)
        zw = riemann_zeta(w, sub.scaled(1 / max(1, abs(scale))))
        value = series.value + scale * zw.value
        err = series.err_bound + abs(scale) * zw.err_bound + rounding_error(scale * zw.value)
        return finish(value, err, series.terms_used, budget, series.converged)


def theta11_via_01(t, x, budget: Budget | None = None) -> EvalOutcome:
    """Theta(1, 1, t, x) = Theta(0, 1, t+1, x) + x^-t Theta(0, 1, t+1, 1/x)."""
    budget = resolve(budget)
    with working_precision(budget):
        t = as_real(t, "t")
        x = as_real(x, "x")
        sub = budget.scaled(mpf(1) / 4)
        a = theta_01_reg(t + 1, x, sub)
        b = theta_01_reg(t + 1, 1 / x, sub.scaled(min(1, x ** t)))
        value, err, terms, ok = combine([a, b], [1, x ** (-t)])
        return finish(value, err, terms, budget, ok)


def theta11_via_phi(t, x, budget: Budget | None = None) -> EvalOutcome:
    """Theta(1, 1, t, x) = Phi(z, x) + x^(1-z) Phi(z, 1/x) + (1 + x^(1-z)) zeta(z)/(z-1) - (x + x^-z) zeta(z+1), z = t + 1."""
    budget = resolve(budget)
    with working_precision(budget):
        t = as_real(t, "t")
        x = as_real(x, "x")
        if t == 0:
            raise DomainError("Theta(1, 1, t, x) has a double pole at t = 0; use theta11_laurent")
        if t <= -1:
            raise DomainError(f"theta11_via_phi requires t > -1, got {t}")
        z = t + 1
        xz = x ** (1 - z)
        sub = budget.scaled(mpf(1) / 8)
        p1 = phi(z, x, sub)
        p2 = phi(z, 1 / x, sub.scaled(1 / max(1, xz)))
        pole = (1 + xz) / (z - 1)
        zz = riemann_zeta(z, sub.scaled(1 / max(1, abs(pole))))
        z1 = riemann_zeta(z + 1, sub.scaled(1 / max(1, x + x ** (-z))))
        parts = [p1, p2, zz, z1]
        coeffs = [1, xz, pole, -(x + x ** (-z))]
        value, err, terms, ok = combine(parts, coeffs)
        err += rounding_error(abs(pole * zz.value), 4)
        return finish(value, err, terms, budget, ok)


def theta_rr_near_pole(r, t, x, budget: Budget | None = None) -> EvalOutcome:
    """Theta(r, r, t, x) for t near 1 - r via single-sum reductions.

    Theta(r, r, t, x) = Theta(0, r, t+r, x) + S(r, t) + x^-t Theta(0, r, t+r, 1/x), with
    S(r, t) = (1 + (-1)^r) x^(r-1) Theta(r-1, 1, t+r, x)
              + sum_{l=1}^{r-2} ((-1)^(l+1) + C(r-1, l)) x^l Theta(l+1, r-l, t+r-1, x).
    """
    budget = resolve(budget)
    with working_precision(budget):
        r = as_int(r, "r")
        t = as_real(t, "t")
        x = as_real(x, "x")
        if r < 2:
            raise DomainError(f"theta_rr_near_pole requires r >= 2, got {r}")
        if x <= 0:
            raise DomainError(f"x must be > 0, got {x}")
        eps = t - (1 - r)
        if eps == 0:
            raise DomainError("t = 1 - r is the pole; use theta_rr_laurent")
        if abs(eps) >= _NEAR_POLE:
            raise DomainError(f"theta_rr_near_pole requires |t - (1 - r)| < {_NEAR_POLE}")
        w = t + r
        xt = x ** (-t)
        n_parts = 3 + max(0, r - 2)
        sub = budget.scaled(mpf(1) / (2 * n_parts))
        parts = [theta_0r(w, r, x, sub), theta_0r(w, r, 1 / x, sub.scaled(1 / max(1, xt)))]
        coeffs = [1, xt]
        if r % 2 == 0:
            c = 2 * x ** (r - 1)
            parts.append(theta_direct(r - 1, 1, w, x, sub.scaled(1 / max(1, c)), margin=0))
            coeffs.append(c)
        for ell in range(1, r - 1):
            c = ((-1) ** (ell + 1) + comb(r - 1, ell)) * x ** ell
            if c == 0:
                continue
            parts.append(theta_direct(ell + 1, r - ell, w - 1, x, sub.scaled(1 / max(1, abs(c))), margin=0))
            coeffs.append(c)
        value, err, terms, ok = combine(parts, coeffs)
        return finish(value, err, terms, budget, ok)


def theta_split_rhs(r, s=None, t=None, x=None, budget: Budget | None = None) -> EvalOutcome:
    """Theta(r-1, s, t+1, x) + x Theta(r, s-1, t+1, x)."""
    return theta_recursion_rhs(1, r, s, t, x, budget)


def theta_recursion_rhs(n, r, s=None, t=None, x=None, budget: Budget | None = None) -> EvalOutcome:
    """sum_{l=0}^{n} C(n, l) x^l Theta(r-n+l, s-l, t+n, x)."""
    budget = resolve(budget)
    with working_precision(budget):
        n = as_int(n, "n")
        if n < 0:
            raise DomainError(f"n must be >= 0, got {n}")
        p = _point(r, s, t, x)
        r, s, t, x = p.as_tuple()
        coeffs = [comb(n, ell) * x ** ell for ell in range(n + 1)]
        parts = []
        for ell in range(n + 1):
            q = ThetaPoint(r - n + ell, s - ell, t + n, x)
            parts.append(theta(q, budget=budget.scaled(1 / ((n + 1) * max(1, coeffs[ell])))))
        value, err, terms, ok = combine(parts, coeffs)
        return finish(value, err, terms, budget, ok)


def theta(r, s=None, t=None, x=None, budget: Budget | None = None) -> EvalOutcome:
    """Theta(r, s, t, x) using the best evaluator for the point."""
    budget = resolve(budget)
    with working_precision(budget):
        p = _point(r, s, t, x)
        r, s, t, x = p.as_tuple()
        if p.on_singularity():
            raise DomainError(f"Theta is singular at {p.as_tuple()}")
        if p.in_region_D(DEFAULT_MARGIN):
            return theta_direct(p, budget=budget)
        if r == s and _is_int(r) and r >= 2 and 0 < abs(t - (1 - r)) < _NEAR_POLE:
            return theta_rr_near_pole(int(r), t, x, budget)
        if r == 1 and s == 1 and t > -1:
            return theta11_via_phi(t, x, budget)
        if r == 0 and _is_int(s) and s >= 2 and t > 0.5:
            return theta_0r(t, int(s), x, budget)
        if p.in_region_D():
            return theta_direct(p, budget=budget, margin=0)
        raise DomainError(f"no evaluator covers {p.as_tuple()}")


def theta11_laurent(x) -> LaurentExpansion:
    """Theta(1, 1, t, x) = 2/t^2 + (2 gamma - log x)/t + gamma^2 - gamma log x - pi^2/6 + O(t)."""
    x = as_real(x, "x")
    if x <= 0:
        raise DomainError(f"x must be > 0, got {x}")
    g, lx = +mp.euler, mp.log(x)
    return LaurentExpansion(mpf(0), {-2: mpf(2), -1: 2 * g - lx, 0: g * g - g * lx - mp.pi ** 2 / 6})


def theta_rr_laurent(r, x, budget: Budget | None = None) -> LaurentExpansion:
    """Pole and constant term of Theta(r, r, t, x) at t = 1 - r."""
    budget = resolve(budget)
    with working_precision(budget):
        r = as_int(r, "r")
        x = as_real(x, "x")
        if r < 2:
            raise DomainError(f"theta_rr_laurent requires r >= 2, got {r}")
        if x <= 0:
            raise DomainError(f"x must be > 0, got {x}")
        z = [None] + [riemann_zeta(k, budget).value if k > 1 else None for k in range(1, r + 1)]
        g = +mp.euler
        xr = x ** (r - 1)
        c_1 = z[r] * (1 + xr)
        c0 = xr * z[r] * (g - mp.log(x)) + g * z[r]
        c0 += xr * mp.fsum(comb(r - 1, k) * x ** (-k) * z[r - k] * z[k + 1] for k in range(1, r - 1))
        return LaurentExpansion(mpf(1 - r), {-1: +c_1, 0: +c0})


def _psi_shift_terms(K):
    # psi(a + 1) - log(a) ~ +1/(2a) - sum_k B_2k/(2k a^2k)
    terms, omitted = psi_asymptotic_terms(K)
    terms = [PowerTerm(mpf(1), mpf(0), 1), PowerTerm(mpf(1) / 2, mpf(1))] + terms[1:]
    return terms, omitted


def psi_shift_sum(r, x, budget: Budget | None = None) -> EvalOutcome:
    """sum_{m >= 1} psi(m x + 1)/m^r."""
    budget = resolve(budget)
    with working_precision(budget):

        def term(a, b):
            return digamma(a + 1, b)

        return lattice_sum(term, x, r, _psi_shift_terms, budget)


def klf_constant_series(r, x, budget: Budget | None = None) -> EvalOutcome:
    """Constant term of Theta(r, r, t, x) at t = 1 - r, assembled from psi-series.

    -x^(r-1) zeta(r) log x - sum_m psi(m x + 1)/m^r + (-1)^r x^(r-1) sum_m psi(m/x + 1)/m^r
    + (1 + (-1)^r) x^(r-1) gamma zeta(r)
    + sum_{l=1}^{r-2} ((-1)^(l+1) + C(r-1, l)) x^l zeta(l+1) zeta(r-l).
    """
    budget = resolve(budget)
    with working_precision(budget):
        r = as_int(r, "r")
        x = as_real(x, "x")
        if r < 2:
            raise DomainError(f"klf_constant_series requires r >= 2, got {r}")
        if x <= 0:
            raise DomainError(f"x must be > 0, got {x}")
        xr = x ** (r - 1)
        sign = (-1) ** r
        lx = mp.log(x)
        n_parts = 4 + 2 * max(0, r - 2)
        sub = budget.scaled(mpf(1) / (n_parts * max(1, xr) * max(1, abs(lx))))
        zr = riemann_zeta(r, sub)
        parts = [psi_shift_sum(r, x, sub), psi_shift_sum(r, 1 / x, sub), zr]
        coeffs = [-1, sign * xr, -xr * lx + (1 + sign) * xr * mp.euler]
        extra, extra_err = [], mpf(0)
        for ell in range(1, r - 1):
            c = ((-1) ** (ell + 1) + comb(r - 1, ell)) * x ** ell
            a = riemann_zeta(ell + 1, sub)
            b = riemann_zeta(r - ell, sub)
            extra.append(c * a.value * b.value)
            extra_err += abs(c) * (a.err_bound * abs(b.value) + b.err_bound * abs(a.value))
        value, err, terms, ok = combine(parts, coeffs)
        return finish(value + mp.fsum(extra), err + extra_err, terms, budget, ok)


def fit_slope(eps, residuals) -> float:
    """Least-squares slope of log|residual| against log(eps)."""
    xs = [float(mp.log(e)) for e in eps]
    ys = [float(mp.log(abs(v))) if v != 0 else float("-inf") for v in residuals]
    if any(y == float("-inf") for y in ys):
        return float("nan")
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((a - mx) ** 2 for a in xs)
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    return sxy / sxx


def richardson_limit(eps, values):
    """Extrapolate values(eps) -> eps = 0 under a linear-in-eps model (last two samples)."""
    e1, e2 = mpf(eps[-2]), mpf(eps[-1])
    v1, v2 = values[-2], values[-1]
    return (e1 * v2 - e2 * v1) / (e1 - e2)
