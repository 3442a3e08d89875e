"""Command-line entry point: ``starsearch <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence

from . import advice_model as adv
from . import directional_model as dirm
from . import positional_model as pos
from .base_solver import solve_base
from .errors import EmptyErrorClass, SchemaError, StarSearchError, TooFewBranches
from .star_model import ErrorKind, StarEnv, Target
from .strategy_core import Strategy, competitive_ratio, first_hit_cost
from .verify import SUITES, run_suites

EXIT_OK, EXIT_SCHEMA, EXIT_NOT_CONVERGED, EXIT_UNBOUNDED, EXIT_VERIFY = 0, 1, 2, 3, 4


def _fmt(x: object) -> object:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return x


def _json_value(x: object) -> object:
    if isinstance(x, float):
        if not math.isfinite(x):
            return _fmt(x)
        return float(f"{x:.12g}")
    return x


def _threads() -> int:
    raw = os.environ.get("STARSEARCH_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _parallel_map(fn: Callable, items: Sequence) -> list:
    n = min(_threads(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def _emit(rows: list[dict], columns: list[str], args: argparse.Namespace) -> None:
    if args.format == "json":
        text = json.dumps([{c: _json_value(r.get(c)) for c in columns} for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow(["" if r.get(c) is None else _fmt(r.get(c)) for c in columns])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# -- commands -------------------------------------------------------------------


def cmd_solve_base(args: argparse.Namespace) -> int:
    print(f"{solve_base(args.m, args.r):.12f}")
    return EXIT_OK


def _load_strategy(path: str) -> Strategy:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return Strategy.from_dict(doc)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        X = _load_strategy(args.strategy)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    env = StarEnv(X.m, args.d_min)
    report = competitive_ratio(X, env, horizon=args.horizon, closed_form=not args.numeric)
    if args.format == "json":
        print(json.dumps(report.to_dict()))
    elif report.unbounded:
        print(f"unbounded (adversary hides on ray {report.witness.ray})")
    else:
        w = report.witness
        print(f"{report.value:.6f}")
        print(f"witness: ray={w.ray} dist={w.dist:.12g} attained={str(report.attained).lower()}")
        print(f"converged: {str(report.converged).lower()} (horizon {report.horizon_used} iterations)")
    if report.unbounded:
        return EXIT_UNBOUNDED
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_simulate_walk(args: argparse.Namespace) -> int:
    try:
        X = _load_strategy(args.strategy)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    t = Target(args.ray, args.dist)
    t.validate(StarEnv(X.m, args.d_min))
    cost = first_hit_cost(X, t)
    print(f"cost={_fmt(cost)} ratio={_fmt(cost / t.dist)}")
    return EXIT_OK


def cmd_simulate_advice(args: argparse.Namespace) -> int:
    cfg = adv.AdviceFamilyConfig(args.r, args.k, args.tolerance, branch_rule=args.branch_rule)
    lies = [int(x) for x in args.lies.split(",") if x.strip()] if args.lies else []
    chosen = adv.run_advice_protocol(cfg, args.branch, lies)
    print(f"p={adv.branch_count(cfg)} true={args.branch} decoded={chosen}")
    return EXIT_OK


ADVICE_COLUMNS = ["k", "H", "p", "consistency_bound", "measured_consistency", "max_branch_robustness"]


def cmd_tradeoff_advice(args: argparse.Namespace) -> int:
    ks = [k for k in range(1, args.k + 1) if 2 * args.tolerance <= k]

    def row(k: int) -> Optional[dict]:
        try:
            cfg = adv.AdviceFamilyConfig(args.r, k, args.tolerance, branch_rule=args.branch_rule)
            P = adv.build_advice_family(cfg)
        except TooFewBranches:
            return None
        out = {
            "k": k,
            "H": args.tolerance,
            "p": len(P),
            "consistency_bound": adv.consistency_bound(cfg),
            "measured_consistency": adv.measured_consistency(cfg).value,
            "max_branch_robustness": max(competitive_ratio(b, StarEnv()).value for b in P.branches),
        }
        if args.verify:
            out["decoding_failures"] = len(adv.protocol_failures(cfg))
        return out

    rows = [r for r in _parallel_map(row, ks) if r is not None]
    columns = ADVICE_COLUMNS + (["decoding_failures"] if args.verify else [])
    _emit(rows, columns, args)
    if args.verify and any(r["decoding_failures"] for r in rows):
        return EXIT_VERIFY
    return EXIT_OK


BIASED_COLUMNS = ["delta", "consistency", "robustness", "closed_form_consistency", "closed_form_robustness"]
WEAK_DIRECTIONAL_COLUMNS = ["delta", "ratio_under_tolerance", "robustness", "window_floor"]


def cmd_tradeoff_directional(args: argparse.Namespace) -> int:
    deltas = args.delta_list
    if args.tolerance == 0:
        b = args.b if args.b is not None else args.m / (args.m - 1)

        def row(d: float) -> dict:
            cfg = dirm.BiasedConfig(args.m, b, d)
            mc, mr = dirm.measured_biased(cfg)
            cc, cr = dirm.biased_bounds(cfg)
            return dict(zip(BIASED_COLUMNS, (d, mc.value, mr.value, cc, cr)))

        _emit(_parallel_map(row, deltas), BIASED_COLUMNS, args)
        return EXIT_OK

    def weak_row(d: float) -> dict:
        cfg = dirm.WeakDirectionalConfig(args.m, args.tolerance, d)
        under, rob = dirm.weak_directional_ratios(cfg)
        return dict(zip(WEAK_DIRECTIONAL_COLUMNS, (d, under, rob, dirm.weak_directional_floor(cfg))))

    _emit(_parallel_map(weak_row, deltas), WEAK_DIRECTIONAL_COLUMNS, args)
    return EXIT_OK


POSITIONAL_COLUMNS = [
    "eta",
    "ratio_at_prediction",
    "robustness",
    "positive_error_ratio",
    "negative_error_ratio",
    "ray_mismatch_ratio",
    "tolerance_bound",
]


def cmd_tradeoff_positional(args: argparse.Namespace) -> int:
    cfg = pos.PositionalConfig(args.m, args.r, args.d_hint, args.ray_hint, args.tolerance)
    env = StarEnv(args.m, args.d_min)
    X = pos.build_weak_positional(cfg, env) if args.tolerance > 0 else pos.build_positional(cfg, env)
    h = cfg.prediction
    at_h = pos.ratio_at_prediction(X, h)
    rob = competitive_ratio(X, env).value
    mismatch = pos.ratio_under_error(X, h, ErrorKind.RAY_MISMATCH, 0.0, env).value
    etas = args.eta_list if args.eta_list else [args.eta_max * i / args.eta_steps for i in range(args.eta_steps + 1)]

    def row(eta: float) -> dict:
        positive = pos.ratio_under_error(X, h, ErrorKind.POSITIVE, eta, env).value
        try:
            negative: Optional[float] = pos.ratio_under_error(X, h, ErrorKind.NEGATIVE, eta, env).value
        except EmptyErrorClass:
            negative = None
        return dict(
            zip(POSITIONAL_COLUMNS, (eta, at_h, rob, positive, negative, mismatch, pos.weak_bound(cfg)))
        )

    _emit(_parallel_map(row, etas), POSITIONAL_COLUMNS, args)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, args.tol_scale, args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<11} {r.name:<{width}}  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print(f"first failing check: {failed[0].suite}: {failed[0].name}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write to this path instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starsearch", description="Search on an m-ray star with predictions.")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-base", help="largest base whose geometric strategy is r-competitive")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--r", type=float, default=9.0)
    p.set_defaults(func=cmd_solve_base)

    p = sub.add_parser("eval", help="competitive ratio of a strategy file")
    p.add_argument("strategy")
    p.add_argument("--d-min", type=float, default=1.0)
    p.add_argument("--horizon", type=int, default=None, help="tail periods evaluated term by term")
    p.add_argument("--numeric", action="store_true", help="skip the closed-form tail")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="walk a strategy or play the advice protocol")
    ssub = p.add_subparsers(dest="what", required=True)
    w = ssub.add_parser("walk")
    w.add_argument("strategy")
    w.add_argument("--ray", type=int, required=True)
    w.add_argument("--dist", type=float, required=True)
    w.add_argument("--d-min", type=float, default=1.0)
    w.set_defaults(func=cmd_simulate_walk)
    a = ssub.add_parser("advice")
    a.add_argument("--r", type=float, default=9.0)
    a.add_argument("--k", type=int, default=1)
    a.add_argument("--tolerance", type=int, default=0)
    a.add_argument("--branch", type=int, default=0)
    a.add_argument("--lies", default="", help="comma-separated query indices answered falsely")
    a.add_argument("--branch-rule", choices=adv.BRANCH_RULES, default="floor")
    a.set_defaults(func=cmd_simulate_advice)

    p = sub.add_parser("tradeoff", help="consistency/robustness tables")
    tsub = p.add_subparsers(dest="model", required=True)
    t = tsub.add_parser("advice")
    t.add_argument("--r", type=float, default=9.0)
    t.add_argument("--k", type=int, default=4, help="largest advice size; one row per k")
    t.add_argument("--tolerance", type=int, default=0)
    t.add_argument("--branch-rule", choices=adv.BRANCH_RULES, default="floor")
    t.add_argument("--verify", action="store_true", help="also run every lie pattern")
    _add_output(t)
    t.set_defaults(func=cmd_tradeoff_advice)

    t = tsub.add_parser("directional")
    t.add_argument("--m", type=int, default=2)
    t.add_argument("--b", type=float, default=None, help="base (default m/(m-1))")
    t.add_argument("--delta-list", type=_float_list, default=[1.0, 2.0, 5.0, 20.0])
    t.add_argument("--tolerance", type=int, default=0)
    _add_output(t)
    t.set_defaults(func=cmd_tradeoff_directional)

    t = tsub.add_parser("positional")
    t.add_argument("--m", type=int, default=2)
    t.add_argument("--r", type=float, default=9.0)
    t.add_argument("--tolerance", type=float, default=0.0)
    t.add_argument("--d-hint", type=float, default=10.0)
    t.add_argument("--ray-hint", type=int, default=0)
    t.add_argument("--d-min", type=float, default=1.0)
    t.add_argument("--eta-max", type=float, default=1.0)
    t.add_argument("--eta-steps", type=int, default=10)
    t.add_argument("--eta-list", type=_float_list, default=None)
    _add_output(t)
    t.set_defaults(func=cmd_tradeoff_positional)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("suite", choices=SUITES + ("all",), nargs="?", default="all")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance (negative forces failures)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    try:
        return args.func(args)
    except StarSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
