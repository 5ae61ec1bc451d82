"""Accuracy budgets, evaluation outcomes and working-precision handling."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, replace

from mpmath import mp, mpf

# Extra decimal digits carried internally on top of the requested precision.
GUARD_DIGITS = 12
DEFAULT_PRECISION = 30
# Largest Bernoulli index tabulated, so em_order <= MAX_BERNOULLI_INDEX // 2 - 1.
MAX_BERNOULLI_INDEX = 64


class DomainError(ValueError):
    """Raised when arguments fall outside an operation's domain."""


@dataclass(frozen=True)
class Budget:
    """Per-evaluation error contract.

    ``target_abs_err`` defaults to ``10**-(precision - 5)``.  ``em_order`` is the
    number K of Bernoulli correction terms used in Euler-Maclaurin tails and
    asymptotic expansions.
    """

    precision: int = DEFAULT_PRECISION
    target_abs_err: object = None
    max_terms: int = 200_000
    em_order: int = 8

    def __post_init__(self):
        if self.precision < 15:
            raise DomainError(f"precision must be >= 15, got {self.precision}")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if self.em_order < 2 or self.em_order % 2:
            raise DomainError(f"em_order must be a positive even integer, got {self.em_order}")
        if 2 * self.em_order + 2 > MAX_BERNOULLI_INDEX:
            raise DomainError(f"em_order must be <= {MAX_BERNOULLI_INDEX // 2 - 1}")
        if self.target_abs_err is not None and not mpf(self.target_abs_err) > 0:
            raise DomainError("target_abs_err must be > 0")

    @property
    def target(self) -> mpf:
        if self.target_abs_err is None:
            return mpf(10) ** (5 - self.precision)
        return mpf(self.target_abs_err)

    @property
    def degraded(self) -> bool:
        """True when running at (roughly) binary64 precision."""
        return self.precision <= 16

    def scaled(self, factor) -> "Budget":
        """Same budget with the target multiplied by ``factor``."""
        return replace(self, target_abs_err=self.target * factor)


DEFAULT_BUDGET = Budget()


def resolve(budget: Budget | None) -> Budget:
    return DEFAULT_BUDGET if budget is None else budget


@contextlib.contextmanager
def working_precision(budget: Budget, extra: int = 0):
    """Raise mpmath's working precision to the budget's level plus guard digits.

    Never lowers an already higher precision set by an enclosing evaluation.
    """
    dps = max(mp.dps, budget.precision + GUARD_DIGITS + extra)
    with mp.workdps(dps):
        yield


@dataclass(frozen=True)
class EvalOutcome:
    value: mpf
    err_bound: mpf
    terms_used: int = 0
    converged: bool = True

    def __float__(self):
        return float(self.value)

    def __neg__(self):
        return EvalOutcome(-self.value, self.err_bound, self.terms_used, self.converged)


def finish(value, err, terms: int, budget: Budget, converged: bool = True) -> EvalOutcome:
    """Build an outcome, enforcing finiteness and the converged => err <= target rule."""
    value = mpf(value)
    err = abs(mpf(err))
    if not mp.isfinite(value) or not mp.isfinite(err):
        raise ArithmeticError(f"non-finite result (value={value}, err={err})")
    return EvalOutcome(value, err, int(terms), bool(converged) and err <= budget.target)


def combine(parts, coeffs=None):
    """Linear combination of outcomes: returns (value, err, terms, converged)."""
    parts = list(parts)
    if coeffs is None:
        coeffs = [1] * len(parts)
    value = mp.fsum(c * p.value for c, p in zip(coeffs, parts))
    err = mp.fsum(abs(c) * p.err_bound for c, p in zip(coeffs, parts))
    terms = sum(p.terms_used for p in parts)
    return value, err, terms, all(p.converged for p in parts)


def rounding_error(magnitude, count: int = 1) -> mpf:
    """Crude floating-point error estimate for ``count`` operations on values of ``magnitude``."""
    return abs(mpf(magnitude)) * (count + 1) * mpf(10) ** (1 - mp.dps)


def as_real(value, name: str = "argument") -> mpf:
    try:
        v = mpf(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} is not a real number: {value!r}") from exc
    if not mp.isfinite(v):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return v


def as_int(value, name: str = "argument") -> int:
    v = as_real(value, name)
    if v != mp.floor(v):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    return int(v)
