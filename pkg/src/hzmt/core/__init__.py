"""Foundation special functions with explicit truncation-error models."""

from .bernoulli import bernoulli, harmonic
from .budget import DEFAULT_BUDGET, Budget, DomainError, EvalOutcome, working_precision
from .gamma import digamma, polygamma
from .polylog import dilog, polylog, polylog_exp
from .zeta import (
    hurwitz_zeta,
    hurwitz_zeta_deriv,
    hurwitz_zeta_minus_pole,
    hurwitz_zeta_reg,
    riemann_zeta,
    riemann_zeta_conv,
    riemann_zeta_prime,
    stieltjes,
    stieltjes_generalized,
    zeta_nonpositive_int,
)

__all__ = [
    "Budget",
    "DEFAULT_BUDGET",
    "DomainError",
    "EvalOutcome",
    "bernoulli",
    "digamma",
    "dilog",
    "harmonic",
    "hurwitz_zeta",
    "hurwitz_zeta_deriv",
    "hurwitz_zeta_minus_pole",
    "hurwitz_zeta_reg",
    "polygamma",
    "polylog",
    "polylog_exp",
    "riemann_zeta",
    "riemann_zeta_conv",
    "riemann_zeta_prime",
    "stieltjes",
    "stieltjes_generalized",
    "working_precision",
    "zeta_nonpositive_int",
]
