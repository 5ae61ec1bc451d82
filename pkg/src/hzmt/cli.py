"""Command-line front end: ``hzmt eval | verify | laurent | scan``.

Settings resolve as flags > HZMT_* environment variables > JSON config file > defaults.
Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from . import __version__
from .core import Budget, DomainError, digamma, hurwitz_zeta, polygamma, polylog, riemann_zeta, working_precision
from .core.budget import DEFAULT_PRECISION
from .herglotz import double_zeta_conv, herglotz_F, higher_herglotz_F, phi, ramanujan_phi, zagier_P
from .theta import (
    fit_slope,
    mt_zeta,
    theta,
    theta11_laurent,
    theta11_via_phi,
    theta_rr_laurent,
    theta_rr_near_pole,
)
from .verifier import DEFAULT_POLICY, GridSpec, IdentityId, TolPolicy, build_cells, run_cell, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# name -> (callable(budget, *args), parameter names)
FUNCTIONS = {
    "F": (lambda b, x: herglotz_F(x, b), ("x",)),
    "Fr": (lambda b, r, x: higher_herglotz_F(r, x, b), ("r", "x")),
    "phi": (lambda b, z, x: phi(z, x, b), ("z", "x")),
    "theta": (lambda b, r, s, t, x: theta(r, s, t, x, b), ("r", "s", "t", "x")),
    "mt": (lambda b, r, s, t: mt_zeta(r, s, t, b), ("r", "s", "t")),
    "zeta": (lambda b, s: riemann_zeta(s, b), ("s",)),
    "zetaD": (lambda b, s1, s2: double_zeta_conv(s1, s2, b), ("s1", "s2")),
    "psi": (lambda b, a: digamma(a, b), ("a",)),
    "polygamma": (lambda b, j, a: polygamma(j, a, b), ("j", "a")),
    "hurwitz": (lambda b, s, a: hurwitz_zeta(s, a, b), ("s", "a")),
    "polylog": (lambda b, r, z: polylog(r, z, b), ("r", "z")),
    "P": (lambda b, x, y: zagier_P(x, y, b), ("x", "y")),
    "phi_ram": (lambda b, a: ramanujan_phi(a, b), ("a",)),
}


class UsageError(Exception):
    pass


def parse_number(text: str) -> mpf:
    t = str(text).strip()
    low = t.lower()
    if low in ("pi", "π"):
        return +mp.pi
    if low == "e":
        return +mp.e
    try:
        if "/" in t:
            f = Fraction(t)
            return mpf(f.numerator) / f.denominator
        return mpf(t)
    except (ValueError, ZeroDivisionError, TypeError):
        raise UsageError(f"not a number: {text!r}") from None


@dataclass
class Config:
    precision: int = DEFAULT_PRECISION
    tol: float | None = None
    max_terms: int = 200_000
    em_order: int = 8
    format: str = "json"
    grid: dict = field(default_factory=dict)

    def budget(self) -> Budget:
        return Budget(precision=self.precision, max_terms=self.max_terms, em_order=self.em_order)

    def policy(self) -> TolPolicy:
        base = DEFAULT_POLICY.degraded() if self.budget().degraded else DEFAULT_POLICY
        return base.with_default(self.tol) if self.tol is not None else base

    def echo(self) -> dict:
        policy = self.policy()
        return {
            "precision": self.precision,
            "tolerance": repr(float(policy.default)),
            "max_terms": self.max_terms,
            "em_order": self.em_order,
            "format": self.format,
            "grid": self.grid,
            "versions": {"hzmt": __version__, "mpmath": mpmath.__version__},
        }


_ENV = {
    "precision": ("HZMT_PRECISION", int),
    "tol": ("HZMT_TOL", float),
    "max_terms": ("HZMT_MAX_TERMS", int),
    "em_order": ("HZMT_EM_ORDER", int),
    "format": ("HZMT_FORMAT", str),
}


def resolve_config(args: argparse.Namespace, environ=None) -> Config:
    environ = os.environ if environ is None else environ
    values: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - set(_ENV) - {"grid"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key, (var, conv) in _ENV.items():
        if var in environ:
            try:
                values[key] = conv(environ[var])
            except ValueError:
                raise UsageError(f"bad value for {var}: {environ[var]!r}") from None
    for key in _ENV:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = Config(**values)
    if not isinstance(cfg.precision, int) or cfg.precision < 15:
        raise UsageError(f"precision must be an integer >= 15, got {cfg.precision}")
    if cfg.format not in ("json", "csv", "table"):
        raise UsageError(f"unknown format {cfg.format!r}")
    if cfg.tol is not None and not cfg.tol > 0:
        raise UsageError("tolerance must be > 0")
    if cfg.max_terms < 1:
        raise UsageError("max_terms must be >= 1")
    try:
        cfg.budget()
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _num(v, digits: int) -> str:
    return mp.nstr(mpf(v), digits)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(cfg: Config, results: list, summary: dict, columns: list) -> str:
    if cfg.format == "json":
        return json.dumps({"config": cfg.echo(), "results": results, "summary": summary}, indent=2, ensure_ascii=False) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in results:
            w.writerow([_flat(r.get(c)) for c in columns])
        return buf.getvalue()
    rows = [[_flat(r.get(c)) for c in columns] for r in results]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(widths[i]) for i, c in enumerate(columns))]
    lines += ["  ".join(v.ljust(widths[i]) for i, v in enumerate(row)) for row in rows]
    lines.append(" ".join(f"{k}={_flat(v)}" for k, v in summary.items() if not isinstance(v, dict)))
    return "\n".join(lines) + "\n"


def _flat(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_flat(w) for w in v)
    if isinstance(v, dict):
        return ";".join(f"{k}={_flat(w)}" for k, w in v.items())
    return str(v)


def cmd_eval(args, cfg: Config) -> int:
    if args.function not in FUNCTIONS:
        raise UsageError(f"unknown function {args.function!r}; choose from {', '.join(FUNCTIONS)}")
    fn, params = FUNCTIONS[args.function]
    if len(args.args) != len(params):
        raise UsageError(f"{args.function} takes {len(params)} argument(s): {' '.join(params)}")
    budget = cfg.budget()
    with working_precision(budget):
        values = [parse_number(a) for a in args.args]
        out = fn(budget, *values)
        P = cfg.precision
        row = {
            "function": args.function,
            "args": dict(zip(params, (str(a) for a in args.args))),
            "value": _num(out.value, P),
            "err_bound": _num(out.err_bound, 3),
            "terms_used": out.terms_used,
            "converged": out.converged,
        }
    summary = {"converged": out.converged}
    _emit(_render(cfg, [row], summary, ["function", "args", "value", "err_bound", "terms_used", "converged"]), args.out)
    return EXIT_OK


def _grid_from(args, cfg: Config) -> GridSpec:
    overrides = dict(cfg.grid)
    for key, flag in (("x_values", "x"), ("r_values", "r"), ("z_values", "z"), ("epsilon_offsets", "eps")):
        v = getattr(args, flag, None)
        if v:
            overrides[key] = v
    clean = {}
    for key, vals in overrides.items():
        if key not in GridSpec.__dataclass_fields__:
            raise UsageError(f"unknown grid key {key!r}")
        if key in ("r_values", "z_values"):
            clean[key] = tuple(int(parse_number(v)) for v in vals)
        elif key in ("x_values", "epsilon_offsets", "theta_x_values"):
            clean[key] = tuple(str(v) for v in vals)
            for v in vals:
                parse_number(v)
        else:
            clean[key] = tuple(tuple(w) if isinstance(w, list) else w for w in vals)
    return GridSpec(**clean)


def cmd_verify(args, cfg: Config) -> int:
    ids = None if args.identity.lower() == "all" else [IdentityId.parse(args.identity)]
    grid = _grid_from(args, cfg)
    cfg.grid = grid.to_dict()
    report = run_suite(grid, cfg.policy(), ids, cfg.budget(), workers=args.workers)
    results = [r.to_dict(cfg.precision) for r in report.results]
    summary = report.to_dict(cfg.precision)["summary"]
    cols = ["id", "params", "abs_residual", "tol", "pass", "error"]
    _emit(_render(cfg, results, summary, cols), args.out)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_laurent(args, cfg: Config) -> int:
    budget = cfg.budget()
    with working_precision(budget):
        x = parse_number(args.x)
        eps = [parse_number(e) for e in (args.eps or ["1e-2", "5e-3", "2.5e-3"])]
        if args.target == "theta11":
            lau = theta11_laurent(x)
            values = [theta11_via_phi(e, x, budget).value for e in eps]
            params = {"x": args.x}
        else:
            if args.r is None:
                raise UsageError("theta-rr needs --r")
            r = int(parse_number(args.r))
            lau = theta_rr_laurent(r, x, budget)
            values = [theta_rr_near_pole(r, 1 - r + e, x, budget).value for e in eps]
            params = {"r": str(r), "x": args.x}
        residuals = [v - lau.truncated(e) for v, e in zip(values, eps)]
        slope = fit_slope(eps, residuals)
        policy = cfg.policy()
        ok = slope == slope and abs(slope - policy.slope) <= policy.slope_tol
        P = cfg.precision
        row = {
            "target": args.target,
            "params": params,
            "center": _num(lau.center, P),
            "coeffs": {str(k): _num(v, P) for k, v in sorted(lau.coeffs.items())},
            "remainder_order": lau.remainder_order,
            "eps": [_num(e, 6) for e in eps],
            "residuals": [_num(v, 8) for v in residuals],
            "slope": f"{slope:.6f}",
            "slope_pass": bool(ok),
        }
    cols = ["target", "params", "center", "coeffs", "slope", "slope_pass"]
    _emit(_render(cfg, [row], {"slope_pass": bool(ok)}, cols), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _scan_identity(id_: IdentityId, var: str, fixed: dict, budget, policy):
    def f(v):
        kwargs = dict(fixed)
        kwargs[var] = v
        res, _ = run_cell((id_, kwargs), budget, policy)
        if res.error:
            raise DomainError(res.error)
        return res.lhs - res.rhs, mpf(res.tol)

    return f


def cmd_scan(args, cfg: Config) -> int:
    budget = cfg.budget()
    policy = cfg.policy()
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    with working_precision(budget):
        lo, hi = parse_number(args.start), parse_number(args.stop)
        if lo > hi or (lo == hi and args.points > 1):
            raise UsageError("scan range must satisfy from < to")
        fixed = {}
        for item in args.set or []:
            if "=" not in item:
                raise UsageError(f"--set expects name=value, got {item!r}")
            k, v = item.split("=", 1)
            fixed[k] = v
        if args.function in FUNCTIONS:
            fn, params = FUNCTIONS[args.function]
            if args.var not in params:
                raise UsageError(f"{args.function} has no parameter {args.var!r}")
            missing = [p for p in params if p != args.var and p not in fixed]
            if missing:
                raise UsageError(f"missing --set for {missing}")

            def evaluate(v):
                vals = [v if p == args.var else parse_number(fixed[p]) for p in params]
                out = fn(budget, *vals)
                return out.value, out.err_bound

        else:
            id_ = IdentityId.parse(args.function)
            evaluate = _scan_identity(id_, args.var, {k: parse_number(v) for k, v in fixed.items()}, budget, policy)
        n = args.points
        grid = [lo] if n == 1 else [lo + (hi - lo) * i / (n - 1) for i in range(n)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["param", "value", "err_bound"])
        P = cfg.precision
        for v in grid:
            value, err = evaluate(v)
            w.writerow([_num(v, P), _num(value, P), _num(err, 3)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, help="significant decimal digits P (>= 15)")
    common.add_argument("--tol", type=float, help="default residual tolerance")
    common.add_argument("--max-terms", dest="max_terms", type=int, help="truncation cap per series")
    common.add_argument("--em-order", dest="em_order", type=int, help="Euler-Maclaurin correction pairs K")
    common.add_argument("--format", choices=("json", "csv", "table"))
    common.add_argument("--out", help="write output to this path")
    common.add_argument("--config", help="JSON config file")

    parser = argparse.ArgumentParser(prog="hzmt", description="Herglotz and Mordell-Tornheim numerics")
    parser.add_argument("--version", action="version", version=f"hzmt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a function")
    p.add_argument("function", help=", ".join(FUNCTIONS))
    p.add_argument("args", nargs="*")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="run identity checks")
    p.add_argument("identity", help="identity id or 'all'")
    p.add_argument("--x", nargs="+")
    p.add_argument("--r", nargs="+")
    p.add_argument("--z", nargs="+")
    p.add_argument("--eps", nargs="+")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("laurent", parents=[common], help="Laurent data at a pole")
    p.add_argument("target", choices=("theta11", "theta-rr"))
    p.add_argument("--x", default="1")
    p.add_argument("--r")
    p.add_argument("--eps", nargs="+")
    p.set_defaults(handler=cmd_laurent)

    p = sub.add_parser("scan", parents=[common], help="tabulate a function or identity residual as CSV")
    p.add_argument("--function", required=True)
    p.add_argument("--var", default="x")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="stop", required=True)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--set", nargs="+", help="fixed parameters as name=value")
    p.set_defaults(handler=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = resolve_config(args)
        return args.handler(args, cfg)
    except (UsageError, DomainError) as exc:
        print(f"hzmt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"hzmt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
