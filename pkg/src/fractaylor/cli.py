"""Command-line front end: forward/inverse solves and error-table emission.

Subcommands:
  forward    evaluate the forward solution of a config at one point
  invert     recover the spatial coefficient and print it
  table      sweep an (alpha, beta) grid and emit an error table (csv/text)
  selfcheck  run the built-in verification suite

Exit codes: 0 ok, 2 config/validation error, 4 solver non-convergence,
3 other solver/domain errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .cases import EXAMPLES, exact_classical, example_problem
from .forward import forward_march
from .gammafn import frac_binom, gamma_ratio, log_gamma
from .inverse import (
    DegenerateData,
    NotSeparable,
    RecoveryReport,
    recover_newton,
    recover_separable,
)
from .problem import ConfigError, ProblemSpec, problem_from_config
from .series import (
    BiFracSeries,
    DomainError,
    FracOrders,
    WidthError,
    eval_series,
    normalized_from_raw,
    raw_from_normalized,
)

TABLE_DEFAULTS = {"nt": 10, "nx": 16, "kmax": 8}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NotSeparable, DegenerateData, DomainError, WidthError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractaylor",
        description="Fractional Taylor series solver for space-time fractional diffusion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fwd = sub.add_parser("forward", help="evaluate the forward solution at a point")
    fwd.add_argument("--config", required=True, help="problem config (JSON)")
    fwd.add_argument("--x", type=float, required=True, help="spatial evaluation point")
    fwd.add_argument("--t", type=float, required=True, help="temporal evaluation point")
    fwd.add_argument("--invert", action="store_true",
                     help="recover p from the boundary data first (config p not required)")
    fwd.add_argument("--mode", choices=("auto", "separable", "newton"), default="auto",
                     help="recovery mode when --invert is given")
    _add_truncation_overrides(fwd)
    fwd.set_defaults(handler=_cmd_forward)

    inv = sub.add_parser("invert", help="recover the spatial coefficient p")
    inv.add_argument("--config", required=True, help="problem config (JSON)")
    inv.add_argument("--mode", choices=("auto", "separable", "newton"), default="auto")
    _add_truncation_overrides(inv)
    inv.set_defaults(handler=_cmd_invert)

    tab = sub.add_parser("table", help="emit an absolute-error table over an order grid")
    src = tab.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", type=int, choices=EXAMPLES,
                     help="built-in case (exact column is its classical closed form)")
    src.add_argument("--config", help="custom config (exact column is the classical-limit run)")
    tab.add_argument("--alphas", default="1,0.9,0.7", help="comma-separated time orders")
    tab.add_argument("--betas", default="1,0.9,0.7", help="comma-separated space orders")
    tab.add_argument("--x-eval", type=float, default=0.5, dest="x_eval")
    tab.add_argument("--t-start", type=float, default=0.05, dest="t_start")
    tab.add_argument("--t-step", type=float, default=0.05, dest="t_step")
    tab.add_argument("--rows", type=int, default=10)
    tab.add_argument("--format", choices=("csv", "text"), default="csv")
    tab.add_argument("--output", default=None, help="output path (default: stdout)")
    _add_truncation_overrides(tab)
    tab.set_defaults(handler=_cmd_table)

    chk = sub.add_parser("selfcheck", help="run the built-in verification suite")
    chk.set_defaults(handler=_cmd_selfcheck)
    return parser


def _add_truncation_overrides(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--nt", type=int, default=None, help="override time truncation depth")
    sub.add_argument("--nx", type=int, default=None, help="override guaranteed final width")
    sub.add_argument("--kmax", type=int, default=None, help="override highest p index")


def _load_config_dict(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config document must be a JSON object")
    return cfg


def _spec_from_args(args, cfg: dict | None = None) -> ProblemSpec:
    cfg = dict(cfg if cfg is not None else _load_config_dict(args.config))
    for field in ("nt", "nx", "kmax"):
        override = getattr(args, field)
        if override is not None:
            cfg[field] = override
    return problem_from_config(cfg)


def _recover(spec: ProblemSpec, mode: str) -> RecoveryReport:
    if mode == "separable":
        return recover_separable(spec)
    if mode == "newton":
        return recover_newton(spec)
    try:
        return recover_separable(spec)
    except NotSeparable:
        return recover_newton(spec)


def _cmd_forward(args) -> int:
    spec = _spec_from_args(args)
    if args.invert:
        report = _recover(spec, args.mode)
        if report.mode == "newton" and not report.converged:
            print("inversion did not converge; rerun `invert` for diagnostics", file=sys.stderr)
            return 4
        p = report.p
    elif spec.p_known is not None:
        p = spec.p_known
    else:
        raise ConfigError("config carries no p; pass --invert to recover it from the data")
    result = forward_march(spec, p)
    value = eval_series(result.u, args.x, args.t)
    print(f"{value:.8g}")
    return 0


def _cmd_invert(args) -> int:
    spec = _spec_from_args(args)
    report = _recover(spec, args.mode)
    beta = spec.orders.beta
    print(f"mode: {report.mode}")
    if report.lam is not None:
        print(f"lambda: {report.lam:.10g}")
    print(f"forward residual: {report.forward_residual:.4e}")
    print(f"iterations: {report.iterations}")
    print(f"converged: {'yes' if report.converged else 'no'}")
    if report.rank_deficient:
        print("warning: Jacobian is rank deficient at the solution")
    print(f"{'k':>4}  {'coefficient':>16}  {'monomial':>16}")
    for k, coeff in enumerate(report.p.coeffs):
        monomial = coeff * math.exp(-log_gamma(k * beta + 1.0))
        print(f"{k:>4}  {coeff:>16.10g}  {monomial:>16.10g}")
    if report.mode == "newton" and not report.converged:
        return 4
    return 0


def _cmd_table(args) -> int:
    alphas = _parse_order_list(args.alphas, "--alphas")
    betas = _parse_order_list(args.betas, "--betas")
    if args.rows < 1:
        raise ConfigError(f"--rows must be >= 1, got {args.rows}")
    if not 0.0 <= args.x_eval <= 1.0:
        raise ConfigError(f"--x-eval must lie in [0, 1], got {args.x_eval}")
    if args.t_step < 0.0:
        raise ConfigError(f"--t-step must be >= 0, got {args.t_step}")
    ts = [args.t_start + k * args.t_step for k in range(args.rows)]
    if ts[0] < 0.0 or ts[-1] > 1.0:
        raise ConfigError(f"t values must lie in [0, 1], got range [{ts[0]:.6g}, {ts[-1]:.6g}]")

    # explicit flags always win; the built-in cases fall back to the table
    # defaults while a custom config keeps its own truncation fields
    overrides = {
        field: getattr(args, field)
        for field in ("nt", "nx", "kmax")
        if getattr(args, field) is not None
    }
    cfg = _load_config_dict(args.config) if args.example is None else None

    def solution_at(alpha: float, beta: float) -> BiFracSeries:
        if args.example is not None:
            spec = example_problem(args.example, alpha, beta, **{**TABLE_DEFAULTS, **overrides})
        else:
            patched = dict(cfg)
            patched.update(alpha=alpha, beta=beta, **overrides)
            spec = problem_from_config(patched)
        report = _recover(spec, "auto")
        return forward_march(spec, report.p).u

    if args.example is not None:
        exact = [exact_classical(args.example, args.x_eval, t) for t in ts]
    else:
        u_ref = solution_at(1.0, 1.0)
        exact = [eval_series(u_ref, args.x_eval, t) for t in ts]

    columns = []
    for alpha in alphas:
        for beta in betas:
            u = solution_at(alpha, beta)
            columns.append([abs(eval_series(u, args.x_eval, t) - e) for t, e in zip(ts, exact)])

    labels = [f"E({_fmt_order(a)},{_fmt_order(b)})" for a in alphas for b in betas]
    if args.format == "csv":
        text = _render_csv(ts, exact, labels, columns)
    else:
        text = _render_text(ts, exact, labels, columns)
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_bytes(text.encode())
    return 0


def _parse_order_list(raw: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag} must be a comma-separated list of reals: {exc}") from exc
    if not values:
        raise ConfigError(f"{flag} must name at least one order")
    for v in values:
        if not 0.0 < v <= 1.0:
            raise ConfigError(f"{flag} entries must lie in (0, 1], got {v}")
    return values


def _fmt_order(v: float) -> str:
    return f"{v:.6g}"


def _render_csv(ts, exact, labels, columns) -> str:
    lines = ["t,exact," + ",".join(labels)]
    for row, t in enumerate(ts):
        cells = [f"{t:.6g}", f"{exact[row]:.5f}"] + [f"{col[row]:.2e}" for col in columns]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_text(ts, exact, labels, columns) -> str:
    header = f"{'t':>8}  {'exact':>10}  " + "  ".join(f"{label:>12}" for label in labels)
    lines = [header]
    for row, t in enumerate(ts):
        cells = [f"{t:>8.6g}", f"{exact[row]:>10.5f}"] + [f"{col[row]:>12.2e}" for col in columns]
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def _cmd_selfcheck(args) -> int:
    failures = 0
    for name, fn in _SELFCHECKS:
        try:
            detail = fn()
        except Exception as exc:  # a check that raises is a failure, not a crash
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
            failures += 1
            continue
        print(f"ok   {name} ({detail})")
    if failures:
        print(f"{failures} selfcheck(s) failed")
        return 3
    print("all selfchecks passed")
    return 0


def _check_gamma() -> str:
    worst = abs(frac_binom(10, 10, 1.0) - math.comb(20, 10)) / math.comb(20, 10)
    worst = max(worst, abs(log_gamma(5.0) - math.log(24.0)))
    worst = max(worst, abs(gamma_ratio(7.5, 7.5) - 1.0))
    if worst > 1e-12:
        raise AssertionError(f"gamma arithmetic off by {worst:.2e}")
    return f"max deviation {worst:.1e}"


def _check_roundtrip() -> str:
    orders = FracOrders(0.9, 0.7)
    series = BiFracSeries(orders, ((1.0, -2.5, 3.25, 0.5), (4.0, 0.125, -9.75)))
    raw = raw_from_normalized(series)
    back = normalized_from_raw(orders, raw)
    worst = max(
        abs(back.levels[i][j] - series.levels[i][j]) / max(1.0, abs(series.levels[i][j]))
        for i in range(series.nt + 1)
        for j in range(series.width(i) + 1)
    )
    if worst > 1e-14:
        raise AssertionError(f"raw/normalized roundtrip off by {worst:.2e}")
    return f"max deviation {worst:.1e}"


def _check_case(example: int, expected: tuple[float, ...]) -> str:
    spec = example_problem(example, 1.0, 1.0, nt=4, nx=18, kmax=len(expected) - 1)
    report = recover_separable(spec)
    worst = max(abs(a - b) for a, b in zip(report.p.coeffs, expected))
    if worst > 1e-9:
        raise AssertionError(f"recovered p off by {worst:.2e}")
    return f"max coefficient error {worst:.1e}"


def _check_forward_accuracy() -> str:
    spec = example_problem(1, 1.0, 1.0, nt=12, nx=12, kmax=2)
    report = recover_separable(spec)
    u = forward_march(spec, report.p).u
    err = abs(eval_series(u, 0.5, 0.05) - math.exp(0.35))
    if err > 1e-5:
        raise AssertionError(f"forward value off by {err:.2e}")
    return f"|error| {err:.1e} at (x, t) = (0.5, 0.05)"


def _check_fractional_consistency() -> str:
    # at fractional orders exact separability needs the recovered support to
    # cover every marched column, which pins nt = 1 with kmax = nx
    spec = example_problem(1, 0.7, 0.7, nt=1, nx=44, kmax=44)
    report = recover_separable(spec)
    if report.forward_residual > 1e-9:
        raise AssertionError(f"forward residual {report.forward_residual:.2e}")
    u = forward_march(spec, report.p).u
    worst = max(
        abs(u.levels[1][j] - report.lam * u.levels[0][j]) / max(1.0, abs(u.levels[0][j]))
        for j in range(u.width(1) + 1)
    )
    if worst > 1e-10:
        raise AssertionError(f"separability off by {worst:.2e}")
    return f"residual {report.forward_residual:.1e}, separability {worst:.1e}"


_SELFCHECKS = (
    ("gamma arithmetic", _check_gamma),
    ("raw/normalized roundtrip", _check_roundtrip),
    ("case 1 classical recovery", lambda: _check_case(1, (0.0, 0.0, -8.0, 0.0, 0.0, 0.0, 0.0))),
    ("case 2 classical recovery", lambda: _check_case(2, (1.0, -6.0, 0.0, 0.0, -216.0, 0.0, 0.0))),
    ("classical forward accuracy", _check_forward_accuracy),
    ("fractional self-consistency", _check_fractional_consistency),
)


if __name__ == "__main__":
    raise SystemExit(main())
