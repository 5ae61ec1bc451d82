"""Identity checks over parameter grids.

Each ``verify_*`` function evaluates both sides of one identity through
evaluation routes that do not rely on the identity itself and returns a
:class:`CheckResult`.  :func:`run_suite` runs the whole catalogue over a
:class:`GridSpec`.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from math import comb

from mpmath import mp, mpf

from .core.budget import Budget, DomainError, resolve, working_precision
from .core.gamma import polygamma
from .core.polylog import dilog
from .core.summation import PowerTerm, hurwitz_asymptotic_terms, lattice_sum, psi_asymptotic_terms
from .core.zeta import hurwitz_zeta_reg, riemann_zeta, riemann_zeta_conv
from .herglotz import (
    double_zeta,
    double_zeta_conv,
    f1_constant,
    herglotz_F,
    higher_herglotz_F,
    phi,
    ramanujan_phi,
)
from .theta import (
    fit_slope,
    klf_constant_series,
    richardson_limit,
    theta11_laurent,
    theta11_via_01,
    theta11_via_phi,
    theta_direct,
    theta_recursion_rhs,
    theta_rr_laurent,
    theta_rr_near_pole,
    theta_split_rhs,
)


class IdentityId(str, Enum):
    FE2 = "FE2"
    FE1 = "FE1"
    VZ2 = "VZ2"
    VZ3 = "VZ3"
    GUINAND_DERIV = "GUINAND_DERIV"
    GUINAND_FIRST = "GUINAND_FIRST"
    RAMANUJAN_FIRST = "RAMANUJAN_FIRST"
    DECOMPOSITION = "DECOMPOSITION"
    SPLIT = "SPLIT"
    INVERSION = "INVERSION"
    RECURSION = "RECURSION"
    KLF11 = "KLF11"
    KLF_RR = "KLF_RR"
    F1_VALUE = "F1_VALUE"
    STUFFLE = "STUFFLE"

    @classmethod
    def parse(cls, name: str) -> "IdentityId":
        key = name.strip().upper().replace("-", "_")
        try:
            return cls[key]
        except KeyError:
            raise DomainError(f"unknown identity {name!r}") from None


@dataclass(frozen=True)
class TolPolicy:
    default: float = 1e-9
    structural: float = 1e-7
    oracle: float = 1e-5
    stuffle: float = 1e-10
    slope: float = 1.0
    slope_tol: float = 0.2

    def degraded(self) -> "TolPolicy":
        return TolPolicy(
            self.default * 1e3, self.structural * 1e3, self.oracle * 1e3, self.stuffle * 1e3, self.slope, self.slope_tol
        )

    def with_default(self, tol: float) -> "TolPolicy":
        return TolPolicy(tol, self.structural, self.oracle, self.stuffle, self.slope, self.slope_tol)


DEFAULT_POLICY = TolPolicy()


def _fmt(v) -> str:
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, int):
        return str(v)
    return mp.nstr(mpf(v), mp.dps if mp.dps < 40 else 40, strip_zeros=False)


@dataclass
class CheckResult:
    id: IdentityId
    params: dict
    lhs: mpf | None
    rhs: mpf | None
    abs_residual: mpf | None
    rel_residual: mpf | None
    tol: float
    passed: bool
    routes: tuple = ()
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self, digits: int = 30) -> dict:
        def num(v):
            if v is None:
                return None
            if isinstance(v, bool):
                return v
            if isinstance(v, int):
                return str(v)
            if isinstance(v, float) and v != v:
                return "nan"
            return mp.nstr(mpf(v), digits)

        def deep(v):
            if isinstance(v, dict):
                return {k: deep(w) for k, w in v.items()}
            if isinstance(v, (list, tuple)):
                return [deep(w) for w in v]
            if isinstance(v, str) or v is None:
                return v
            return num(v)

        return {
            "id": self.id.value,
            "params": {k: num(v) for k, v in self.params.items()},
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "abs_residual": num(self.abs_residual),
            "rel_residual": num(self.rel_residual),
            "tol": repr(float(self.tol)),
            "pass": self.passed,
            "routes": list(self.routes),
            "diagnostics": deep(self.diagnostics),
            "error": self.error,
        }


def _result(id_, params, lhs, rhs, tol, routes, diagnostics=None) -> CheckResult:
    lhs, rhs = mpf(lhs), mpf(rhs)
    ab = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel = ab / scale if scale else mpf(0)
    passed = bool(ab <= tol or rel <= tol)
    return CheckResult(id_, dict(params), lhs, rhs, ab, rel, tol, passed, tuple(routes), diagnostics or {})


def _slope_result(id_, params, slope, policy, routes, diagnostics) -> CheckResult:
    ok = slope == slope and abs(slope - policy.slope) <= policy.slope_tol
    dev = abs(mpf(slope) - policy.slope) if slope == slope else mpf("inf")
    return CheckResult(
        id_, dict(params), mpf(slope), mpf(policy.slope), dev, dev / policy.slope, policy.slope_tol, bool(ok),
        tuple(routes), diagnostics,
    )


def _budget(budget):
    return resolve(budget).scaled(mpf(1) / 16)


def _zeta_conv(k, b):
    return riemann_zeta_conv(k, b).value


def verify_f1_value(budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    b = _budget(budget)
    with working_precision(resolve(budget)):
        lhs = herglotz_F(1, b).value
        rhs = f1_constant(b)
        return _result(IdentityId.F1_VALUE, {}, lhs, rhs, policy.default, ["herglotz_F:lattice", "stieltjes:em"])


def verify_fe2(x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """F(x) + F(1/x) = 2 F(1) + log^2(x)/2 - pi^2 (x-1)^2/(6x)."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        x = mpf(x)
        lhs = herglotz_F(x, b).value + herglotz_F(1 / x, b).value
        rhs = 2 * herglotz_F(1, b).value + mp.log(x) ** 2 / 2 - mp.pi ** 2 / (6 * x) * (x - 1) ** 2
        return _result(IdentityId.FE2, {"x": x}, lhs, rhs, policy.default, ["herglotz_F:lattice"])


def verify_fe1(x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """F(x) - F(x+1) - F(x/(x+1)) = -F(1) + Li2(1/(1+x))."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        x = mpf(x)
        lhs = herglotz_F(x, b).value - herglotz_F(x + 1, b).value - herglotz_F(x / (x + 1), b).value
        rhs = -herglotz_F(1, b).value + dilog(1 / (1 + x), b).value
        return _result(IdentityId.FE1, {"x": x}, lhs, rhs, policy.default, ["herglotz_F:lattice", "dilog:series"])


def verify_vz2(r, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """F_r(x) + (-x)^(r-1) F_r(1/x) = zeta(r+1)((-x)^r - 1/x) - sum_l zeta(l) zeta(r-l+1) (-x)^(l-1)."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        r, x = int(r), mpf(x)
        lhs = higher_herglotz_F(r, x, b).value + (-x) ** (r - 1) * higher_herglotz_F(r, 1 / x, b).value
        rhs = riemann_zeta(r + 1, b).value * ((-x) ** r - 1 / x)
        rhs -= mp.fsum(_zeta_conv(ell, b) * _zeta_conv(r - ell + 1, b) * (-x) ** (ell - 1) for ell in range(1, r + 1))
        return _result(IdentityId.VZ2, {"r": r, "x": x}, lhs, rhs, policy.default,
                       ["higher_herglotz_F:accelerated", "zeta:em"])


def _vz3_rhs(r, x, b, reading):
    rhs = riemann_zeta(r + 1, b).value * ((-x) ** r / (x + 1) - 1 / x)
    for ell in range(1, r + 1):
        zd = double_zeta_conv(r - ell + 1, ell, b, reading=reading).value
        rhs -= zd * (-x) ** (ell - 1)
    return rhs


def verify_vz3(r, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """F_r(x) - F_r(x+1) + (-x)^(r-1) F_r((x+1)/x) = zeta(r+1)((-x)^r/(x+1) - 1/x) - sum_l zeta_D(r-l+1, l)(-x)^(l-1)."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        r, x = int(r), mpf(x)
        lhs = (
            higher_herglotz_F(r, x, b).value
            - higher_herglotz_F(r, x + 1, b).value
            + (-x) ** (r - 1) * higher_herglotz_F(r, (x + 1) / x, b).value
        )
        rhs = _vz3_rhs(r, x, b, "double")
        diagnostics = {}
        if r == 2:
            alt = _vz3_rhs(r, x, b, "hurwitz")
            diagnostics = {"alt_reading": "zeta(r,1) as Hurwitz zeta(r)", "alt_abs_residual": abs(lhs - alt)}
        return _result(IdentityId.VZ3, {"r": r, "x": x}, lhs, rhs, policy.default,
                       ["higher_herglotz_F:accelerated", "double_zeta:hurwitz-inner"], diagnostics)


def _polygamma_shift_sum(z: int, x, budget) -> mpf:
    """sum_{j >= 1} psi^(z-1)(1 + j x)."""
    sign = (-1) ** z * mp.factorial(z - 1)

    def term(a, b):
        return polygamma(z - 1, a + 1, b)

    def expansion(K):
        terms, omitted = hurwitz_asymptotic_terms(z, K, shift_one=True)
        terms = [PowerTerm(mpf(1) / (z - 1), mpf(z - 1))] + terms
        scale = lambda t: PowerTerm(sign * t.coef, t.power, t.log_power)  # noqa: E731
        return [scale(t) for t in terms], scale(omitted)

    return lattice_sum(term, x, 0, expansion, budget).value


def verify_guinand_deriv(z, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """x^(z/2) sum_j psi^(z-1)(1 + j x) = x^(-z/2) sum_j psi^(z-1)(1 + j/x), integer z >= 3."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        z, x = int(z), mpf(x)
        if z < 3:
            raise DomainError(f"guinand derivative form requires integer z >= 3, got {z}")
        lhs = x ** (mpf(z) / 2) * _polygamma_shift_sum(z, x, b)
        rhs = x ** (-mpf(z) / 2) * _polygamma_shift_sum(z, 1 / x, b)
        return _result(IdentityId.GUINAND_DERIV, {"z": z, "x": x}, lhs, rhs, policy.default,
                       ["polygamma:hurwitz", "lattice:em-tail"])


def _trigamma_reg_sum(x, budget) -> mpf:
    """sum_{j >= 1} (psi'(1 + j x) - 1/(j x))."""

    def term(a, b):
        out = hurwitz_zeta_reg(2, a, b)
        return type(out)(out.value - a ** -2, out.err_bound, out.terms_used, out.converged)

    return lattice_sum(term, x, 0, lambda K: hurwitz_asymptotic_terms(2, K, shift_one=True), budget).value


def verify_guinand_first(x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """x sum_j (psi'(1+jx) - 1/(jx)) - log(x)/2 = (1/x) sum_j (psi'(1+j/x) - x/j) - log(1/x)/2."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        x = mpf(x)
        lhs = x * _trigamma_reg_sum(x, b) - mp.log(x) / 2
        rhs = _trigamma_reg_sum(1 / x, b) / x + mp.log(x) / 2
        return _result(IdentityId.GUINAND_FIRST, {"x": x}, lhs, rhs, policy.default, ["hurwitz_zeta_reg", "lattice:em-tail"])


def _ramanujan_side(x, budget) -> mpf:
    def expansion(K):
        terms, omitted = psi_asymptotic_terms(K)
        return terms[1:], omitted

    s = lattice_sum(ramanujan_phi, x, 0, expansion, budget).value
    return mp.sqrt(x) * ((mp.euler - mp.log(2 * mp.pi * x)) / (2 * x) + s)


def verify_ramanujan_first(x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """sqrt(x){(gamma - log(2 pi x))/(2x) + sum phi(nx)} is invariant under x -> 1/x."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        x = mpf(x)
        lhs = _ramanujan_side(x, b)
        rhs = _ramanujan_side(1 / x, b)
        return _result(IdentityId.RAMANUJAN_FIRST, {"x": x}, lhs, rhs, policy.default, ["digamma:asymptotic", "lattice:em-tail"])


def verify_decomposition(z, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY,
                         route: str = "single-sum") -> CheckResult:
    """Phi(z,x) + x^(1-z) Phi(z,1/x) = Theta(1,1,z-1,x) - (1+x^(1-z)) zeta(z)/(z-1) + (x+x^-z) zeta(z+1)."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        z, x = mpf(z), mpf(x)
        if z <= 1:
            raise DomainError(f"decomposition check requires z > 1, got {z}")
        lhs = phi(z, x, b).value + x ** (1 - z) * phi(z, 1 / x, b).value
        if route == "direct":
            th = theta_direct(1, 1, z - 1, x, b).value
            tol, routes = policy.oracle, ["phi:lattice", "theta_direct"]
        elif route == "single-sum":
            th = theta11_via_01(z - 1, x, b).value
            tol, routes = policy.structural, ["phi:lattice", "theta_01_reg:split+inversion"]
        else:
            raise DomainError(f"unknown route {route!r}")
        rhs = th - (1 + x ** (1 - z)) * riemann_zeta(z, b).value / (z - 1) + (x + x ** (-z)) * riemann_zeta(z + 1, b).value
        return _result(IdentityId.DECOMPOSITION, {"z": z, "x": x}, lhs, rhs, tol, routes)


def verify_split(r, s, t, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    b = _budget(budget)
    with working_precision(resolve(budget)):
        lhs = theta_direct(r, s, t, x, b).value
        rhs = theta_split_rhs(r, s, t, x, b).value
        return _result(IdentityId.SPLIT, {"r": r, "s": s, "t": t, "x": x}, lhs, rhs, policy.structural, ["theta_direct"])


def verify_inversion(r, s, t, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    b = _budget(budget)
    with working_precision(resolve(budget)):
        r, s, t, x = mpf(r), mpf(s), mpf(t), mpf(x)
        lhs = theta_direct(r, s, t, x, b).value
        rhs = x ** (-t) * theta_direct(s, r, t, 1 / x, b).value
        return _result(IdentityId.INVERSION, {"r": r, "s": s, "t": t, "x": x}, lhs, rhs, policy.structural, ["theta_direct"])


def verify_recursion(n, r, s, t, x, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    b = _budget(budget)
    with working_precision(resolve(budget)):
        lhs = theta_direct(r, s, t, x, b).value
        rhs = theta_recursion_rhs(n, r, s, t, x, b).value
        return _result(IdentityId.RECURSION, {"n": int(n), "r": r, "s": s, "t": t, "x": x}, lhs, rhs,
                       policy.structural, ["theta_direct"])


def verify_stuffle(a, b_, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """zeta(a) zeta(b) = zeta_D(a, b) + zeta_D(b, a) + zeta(a + b)."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        lhs = riemann_zeta(a, b).value * riemann_zeta(b_, b).value
        rhs = double_zeta(a, b_, b).value + double_zeta(b_, a, b).value + riemann_zeta(a + b_, b).value
        return _result(IdentityId.STUFFLE, {"a": a, "b": b_}, lhs, rhs, policy.stuffle, ["double_zeta:hurwitz-inner", "zeta:em"])


DEFAULT_EPSILONS = (mpf("1e-2"), mpf("5e-3"), mpf("2.5e-3"))


def verify_klf11(x, eps=DEFAULT_EPSILONS, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """Theta(1,1,eps,x) minus its three-term principal part shrinks linearly in eps."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        x = mpf(x)
        eps = [mpf(e) for e in eps]
        lau = theta11_laurent(x)
        values = [theta11_via_phi(e, x, b).value for e in eps]
        residuals = [v - lau.truncated(e) for v, e in zip(values, eps)]
        slope = fit_slope(eps, residuals)
        diagnostics = {
            "eps": eps,
            "residuals": residuals,
            "coeffs": [lau.coeffs[k] for k in sorted(lau.coeffs)],
            "richardson_c0": richardson_limit(eps, [v - 2 / e ** 2 - lau.coeffs[-1] / e for v, e in zip(values, eps)]),
        }
        return _slope_result(IdentityId.KLF11, {"x": x}, slope, policy, ["theta11_via_phi", "laurent:closed-form"], diagnostics)


def verify_klf_rr(r, x, eps=DEFAULT_EPSILONS, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> CheckResult:
    """Constant term of Theta(r, r, t, x) at t = 1 - r from the closed form vs the psi-series,
    plus linear convergence of the residue from near-pole samples."""
    b = _budget(budget)
    with working_precision(resolve(budget)):
        r, x = int(r), mpf(x)
        eps = [mpf(e) for e in eps]
        lau = theta_rr_laurent(r, x, b)
        series = klf_constant_series(r, x, b).value
        res = _result(IdentityId.KLF_RR, {"r": r, "x": x}, lau.coeffs[0], series, policy.default,
                      ["laurent:closed-form", "klf_constant_series:psi-sums", "theta_rr_near_pole"])
        values = [theta_rr_near_pole(r, 1 - r + e, x, b).value for e in eps]
        residue_res = [e * v - lau.coeffs[-1] for v, e in zip(values, eps)]
        slope = fit_slope(eps, residue_res)
        slope_ok = slope == slope and abs(slope - policy.slope) <= policy.slope_tol
        c0_est = richardson_limit(eps, [v - lau.coeffs[-1] / e for v, e in zip(values, eps)])
        res.diagnostics = {
            "constant_pass": res.passed,
            "residue_slope": slope,
            "residue_slope_pass": bool(slope_ok),
            "residue_residuals": residue_res,
            "richardson_c0": c0_est,
        }
        res.passed = bool(res.passed and slope_ok)
        return res


THETA_POINTS = ((2, 2, 1), (1, 2, 1.5), (3, 2, 0.5))
THETA_X = (0.5, 1, 2, 3.7)
RECURSION_CASES = ((3, 3, 1, 1.5), (4, 2, 2, 0.8))
STUFFLE_PAIRS = ((2, 2), (3, 2), (2, 3))


@dataclass(frozen=True)
class GridSpec:
    x_values: tuple = (0.25, 0.5, 1, 2, 4, "pi")
    r_values: tuple = (2, 3, 4, 5, 6)
    z_values: tuple = (3, 4, 5)
    epsilon_offsets: tuple = ("1e-2", "5e-3", "2.5e-3")
    theta_points: tuple = THETA_POINTS
    theta_x_values: tuple = THETA_X
    recursion_cases: tuple = RECURSION_CASES
    recursion_orders: tuple = (1, 2, 3)
    stuffle_pairs: tuple = STUFFLE_PAIRS

    def __post_init__(self):
        for name in ("x_values", "r_values", "z_values", "epsilon_offsets"):
            values = getattr(self, name)
            if not values:
                raise DomainError(f"grid list {name} must be non-empty")
            object.__setattr__(self, name, tuple(values))
        if any(_num(x) <= 0 for x in self.x_values):
            raise DomainError("x values must be > 0")
        if any(_num(e) <= 0 for e in self.epsilon_offsets):
            raise DomainError("epsilon offsets must be > 0")
        if any(int(r) != r or r < 2 for r in self.r_values):
            raise DomainError("r values must be integers >= 2")
        if any(int(z) != z or z < 3 for z in self.z_values):
            raise DomainError("z values must be integers >= 3")

    def to_dict(self) -> dict:
        def s(v):
            return [str(w) if not isinstance(w, (tuple, list)) else [str(u) for u in w] for w in v]

        return {
            "x_values": s(self.x_values),
            "r_values": s(self.r_values),
            "z_values": s(self.z_values),
            "epsilon_offsets": s(self.epsilon_offsets),
            "theta_points": s(self.theta_points),
            "theta_x_values": s(self.theta_x_values),
            "recursion_cases": s(self.recursion_cases),
            "recursion_orders": s(self.recursion_orders),
            "stuffle_pairs": s(self.stuffle_pairs),
        }


def _num(v) -> mpf:
    if isinstance(v, str) and v.strip().lower() in ("pi", "π"):
        return +mp.pi
    return mpf(v)


def build_cells(grid: GridSpec, ids=None) -> list:
    """Deterministic list of (IdentityId, kwargs) cells."""
    wanted = list(IdentityId) if ids is None else [IdentityId.parse(i) if isinstance(i, str) else i for i in ids]
    xs = list(grid.x_values)
    eps = tuple(grid.epsilon_offsets)
    cells = []
    for id_ in IdentityId:
        if id_ not in wanted:
            continue
        if id_ == IdentityId.F1_VALUE:
            cells.append((id_, {}))
        elif id_ in (IdentityId.FE2, IdentityId.FE1, IdentityId.GUINAND_FIRST, IdentityId.RAMANUJAN_FIRST):
            cells += [(id_, {"x": x}) for x in xs]
        elif id_ == IdentityId.KLF11:
            cells += [(id_, {"x": x, "eps": eps}) for x in xs]
        elif id_ in (IdentityId.VZ2, IdentityId.VZ3):
            cells += [(id_, {"r": r, "x": x}) for r in grid.r_values for x in xs]
        elif id_ == IdentityId.KLF_RR:
            cells += [(id_, {"r": r, "x": x, "eps": eps}) for r in grid.r_values for x in xs]
        elif id_ == IdentityId.GUINAND_DERIV:
            cells += [(id_, {"z": z, "x": x}) for z in grid.z_values for x in xs]
        elif id_ == IdentityId.DECOMPOSITION:
            cells += [(id_, {"z": z, "x": x}) for z in grid.z_values for x in xs]
        elif id_ in (IdentityId.SPLIT, IdentityId.INVERSION):
            cells += [(id_, {"r": p[0], "s": p[1], "t": p[2], "x": x}) for p in grid.theta_points for x in grid.theta_x_values]
        elif id_ == IdentityId.RECURSION:
            cells += [
                (id_, {"n": n, "r": c[0], "s": c[1], "t": c[2], "x": c[3]})
                for c in grid.recursion_cases
                for n in grid.recursion_orders
            ]
        elif id_ == IdentityId.STUFFLE:
            cells += [(id_, {"a": a, "b_": b}) for a, b in grid.stuffle_pairs]
    return cells


_DISPATCH = {
    IdentityId.F1_VALUE: verify_f1_value,
    IdentityId.FE2: verify_fe2,
    IdentityId.FE1: verify_fe1,
    IdentityId.VZ2: verify_vz2,
    IdentityId.VZ3: verify_vz3,
    IdentityId.GUINAND_DERIV: verify_guinand_deriv,
    IdentityId.GUINAND_FIRST: verify_guinand_first,
    IdentityId.RAMANUJAN_FIRST: verify_ramanujan_first,
    IdentityId.DECOMPOSITION: verify_decomposition,
    IdentityId.SPLIT: verify_split,
    IdentityId.INVERSION: verify_inversion,
    IdentityId.RECURSION: verify_recursion,
    IdentityId.KLF11: verify_klf11,
    IdentityId.KLF_RR: verify_klf_rr,
    IdentityId.STUFFLE: verify_stuffle,
}


def run_cell(cell, budget: Budget | None = None, policy: TolPolicy = DEFAULT_POLICY) -> tuple:
    """Evaluate one cell; never raises.  Returns (CheckResult, seconds)."""
    id_, kwargs = cell
    budget = resolve(budget)
    start = time.perf_counter()
    with working_precision(budget):
        args = {k: (_num(v) if k in ("x",) else v) for k, v in kwargs.items()}
        if "eps" in args:
            args["eps"] = tuple(_num(e) for e in args["eps"])
        try:
            res = _DISPATCH[id_](**args, budget=budget, policy=policy)
        except Exception as exc:  # a failing cell must not abort the suite
            params = {k: v for k, v in args.items() if k != "eps"}
            res = CheckResult(id_, params, None, None, None, None, policy.default, False, (), {},
                              f"{type(exc).__name__}: {exc}")
    return res, time.perf_counter() - start


def _run_cell_star(payload):
    cell, budget, policy, dps = payload
    mp.dps = dps
    return run_cell(cell, budget, policy)


@dataclass
class SuiteReport:
    results: list
    precision: int
    wall_time: dict
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.summary:
            counts: dict = {}
            for r in self.results:
                c = counts.setdefault(r.id.value, {"pass": 0, "fail": 0})
                c["pass" if r.passed else "fail"] += 1
            self.summary = {
                "by_id": counts,
                "total": len(self.results),
                "passed": sum(r.passed for r in self.results),
                "failed": sum(not r.passed for r in self.results),
            }

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self, digits: int | None = None) -> dict:
        digits = digits or self.precision
        return {
            "results": [r.to_dict(digits) for r in self.results],
            "summary": {**self.summary, "precision": self.precision,
                        "wall_time": {k: f"{v:.3f}" for k, v in self.wall_time.items()}},
        }


def run_suite(
    grid: GridSpec | None = None,
    policy: TolPolicy | None = None,
    ids=None,
    budget: Budget | None = None,
    workers: int = 1,
) -> SuiteReport:
    """Run every selected identity over the grid; results ordered by (identity, grid index)."""
    grid = grid or GridSpec()
    budget = resolve(budget)
    policy = policy or (DEFAULT_POLICY.degraded() if budget.degraded else DEFAULT_POLICY)
    cells = build_cells(grid, ids)
    if workers > 1 and len(cells) > 1:
        payload = [(c, budget, policy, mp.dps) for c in cells]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell_star, payload))
    else:
        outcomes = [run_cell(c, budget, policy) for c in cells]
    wall: dict = {}
    for (res, dt) in outcomes:
        wall[res.id.value] = wall.get(res.id.value, 0.0) + dt
    return SuiteReport([o[0] for o in outcomes], budget.precision, wall)
