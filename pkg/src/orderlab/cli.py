"""Command-line front end.

Every run prints its resolved configuration as one JSON line, then a JSON
report.  Exit status: 0 when everything checked passes, 1 on a property
violation, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import aronszajn as A
from . import ordinal as O
from . import suites
from . import suslin as S
from . import tree as T
from .backforth import ExtensionStuck, back_and_forth, embed_into_rationals, is_order_preserving, write_transcript
from .order import BUILTIN, BudgetExhausted, Report, _jsonable, builtin, check_axioms, check_dense_unbounded, parse_rat

BUDGET_ENV = "ORDERLAB_BUDGET"
DEFAULT_BUDGET = 10_000


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _emit(obj) -> None:
    print(json.dumps(_jsonable(obj), sort_keys=True))


def _ordinal_list(flag: str, text: str):
    try:
        return O.parse_list(text)
    except (O.NotationError, ValueError) as exc:
        raise UsageError(flag, str(exc)) from None


def _rat_list(flag: str, text: str):
    try:
        return [parse_rat(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(flag, str(exc)) from None


def _order(flag: str, name: str):
    if name not in BUILTIN:
        raise UsageError(flag, f"unknown order {name!r}; choose from {', '.join(sorted(BUILTIN))}")
    return builtin(name)


def _need(args, attr: str, flag: str):
    value = getattr(args, attr)
    if value is None:
        raise UsageError(flag, "is required")
    return value


def _reports_status(reports: List[Report]) -> int:
    return 0 if all(r.ok for r in reports) else 1


# -- command handlers -------------------------------------------------------


def cmd_order_check(args) -> int:
    P = _order("--order", args.order)
    n = args.n
    reports = [check_axioms(P, n)]
    try:
        reports.append(check_dense_unbounded(P, min(n, 40), args.budget))
    except BudgetExhausted as exc:
        reports.append(Report(False, "dense-unbounded", exc.requirement, {"budget": exc.budget}))
    _emit({"reports": [r.to_json() for r in reports]})
    return _reports_status(reports)


def cmd_backforth_run(args) -> int:
    A_, B_ = _order("--left", args.left), _order("--right", args.right)
    try:
        iso = back_and_forth(A_, B_, args.rounds, budget=args.budget)
    except ExtensionStuck as exc:
        _emit({"ok": False, "error": "ExtensionStuck", "round": exc.round_no,
               "direction": exc.direction, "index": exc.index, "budget": exc.budget})
        return 1
    bad = is_order_preserving(A_, B_, iso)
    if args.emit:
        write_transcript(iso, args.emit)
    _emit({"ok": bad is None, "violation": bad, "transcript": iso.transcript_json(),
           "map": [[A_.element(i), B_.element(j)] for i, j in sorted(iso.forward.items())]})
    return 0 if bad is None else 1


def cmd_backforth_embed(args) -> int:
    P = _order("--order", args.order)
    img = embed_into_rationals(P, args.n)
    n = len(img)
    bad = next(((i, j) for i in range(n) for j in range(i + 1, n)
                if (P.compare(i, j) < 0) != (img[i] < img[j])), None)
    _emit({"ok": bad is None, "violation": bad, "image": [[i, img[i]] for i in range(n)]})
    return 0 if bad is None else 1


def cmd_aronszajn_build(args) -> int:
    support = _ordinal_list("--support", _need(args, "support", "--support"))
    grid = _rat_list("--grid", _need(args, "grid", "--grid"))
    try:
        b = A.build(support, grid, branching=args.branching)
    except (A.SupportGap, A.GridTooCoarse) as exc:
        raise UsageError("--support" if isinstance(exc, A.SupportGap) else "--grid", str(exc)) from None
    if args.out:
        A.dump(b, args.out)
    reports = A.check_all(b)
    _emit({"nodes": len(b), "levels": A.level_stats(b), "reports": [r.to_json() for r in reports]})
    return _reports_status(reports)


def cmd_aronszajn_check(args) -> int:
    b = A.load(_need(args, "inp", "--in"))
    reports = A.check_all(b)
    _emit({"nodes": len(b), "reports": [r.to_json() for r in reports]})
    return _reports_status(reports)


def cmd_tree_check(args) -> int:
    t = T.load(_need(args, "inp", "--in"))
    rep = T.check_normal(t, args.succ_width)
    _emit(rep.to_json())
    return 0 if rep.ok() else 1


def cmd_tree_normalize(args) -> int:
    t = T.load(_need(args, "inp", "--in"))
    try:
        out, log = T.normalize(t, args.succ_width)
    except T.Degenerate as exc:
        _emit({"ok": False, "error": "Degenerate", "stage": exc.stage,
               "log": [e.to_json() for e in exc.log or []]})
        return 1
    if args.out:
        T.dump(out, args.out)
    rep = T.check_normal(out, args.succ_width)
    _emit({"ok": rep.ok(("2", "5", "6")), "log": [e.to_json() for e in log], "report": rep.to_json()})
    return 0 if rep.ok(("2", "5", "6")) else 1


def cmd_tree_export(args) -> int:
    t = T.load(_need(args, "inp", "--in"))
    text = T.to_dot(t)
    if args.dot and args.dot != "-":
        with open(args.dot, "w") as fh:
            fh.write(text)
        _emit({"ok": True, "dot": args.dot, "nodes": len(t)})
    else:
        sys.stdout.write(text)
    return 0


def cmd_suslin_tree_to_line(args) -> int:
    t = T.load(_need(args, "inp", "--in"))
    try:
        L = S.tree_to_line(t)
    except S.MissingLabels as exc:
        raise UsageError("--in", str(exc)) from None
    if args.emit:
        with open(args.emit, "w") as fh:
            json.dump(S.line_to_json(L), fh, indent=1)
    reports = [S.check_total_order(L), S.check_intervals(L), S.check_disjointness(L),
               S.check_ccc_transfer(L, t.leaves())]
    _emit({"branches": [list(b) for b in L.elements], "reports": [r.to_json() for r in reports]})
    return _reports_status(reports)


def cmd_suslin_line_to_tree(args) -> int:
    if args.oracle == "honest-q":
        P = builtin("q")
        oracle = S.HonestRationalOracle(P, budget=args.window)
        res = S.line_to_tree(P, oracle, args.steps)
        reports = [S.check_nested_or_disjoint(P, res)]
    else:
        t = T.load(args.inp) if args.inp else T.complete_tree(3, 3)
        L = S.tree_to_line(t)
        oracle = S.BranchLineOracle(L)
        res = S.line_to_tree(L, oracle, args.steps)
        reports = [S.check_nested_or_disjoint(L, res), S.check_round_trip(L, res, oracle.chosen)]
    out = S.interval_tree_json(res)
    if args.emit:
        with open(args.emit, "w") as fh:
            json.dump(out, fh, indent=1)
    _emit({**out, "reports": [r.to_json() for r in reports]})
    return _reports_status(reports)


def cmd_check(args) -> int:
    names = ["all"] + sorted(suites.SUITES)
    if args.suite not in names:
        raise UsageError("--suite", f"unknown suite {args.suite!r}; choose from {', '.join(names)}")
    reports = suites.run(args.suite, seed=args.seed)
    _emit({"suite": args.suite, "seed": args.seed, "ok": all(r.ok for r in reports),
           "reports": [r.to_json() for r in reports]})
    return _reports_status(reports)


# -- parser -------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {v}")
    return v


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return _positive(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(BUDGET_ENV, str(exc)) from None


def build_parser(default_budget: int = DEFAULT_BUDGET) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg, default=0)
    common.add_argument("--budget", type=_positive, default=default_budget,
                        help=f"search budget (default from ${BUDGET_ENV} or {DEFAULT_BUDGET})")

    p = argparse.ArgumentParser(prog="orderlab", description="Countable orders, trees and lines.")
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(parent, name, handler, help_):
        q = parent.add_parser(name, parents=[common], help=help_)
        q.set_defaults(handler=handler)
        return q

    order = sub.add_parser("order", help="enumerated orders").add_subparsers(dest="action", required=True)
    q = leaf(order, "check", cmd_order_check, "order axioms, density and unboundedness on a prefix")
    q.add_argument("--order", required=True)
    q.add_argument("--n", type=_positive, default=200)

    bf = sub.add_parser("backforth", help="back-and-forth and embeddings").add_subparsers(dest="action", required=True)
    q = leaf(bf, "run", cmd_backforth_run, "run the back-and-forth alternation")
    q.add_argument("--left", required=True)
    q.add_argument("--right", required=True)
    q.add_argument("--rounds", type=_nonneg, default=64)
    q.add_argument("--emit")
    q = leaf(bf, "embed", cmd_backforth_embed, "embed a prefix of an order into Q")
    q.add_argument("--order", required=True)
    q.add_argument("--n", type=_positive, default=50)

    ar = sub.add_parser("aronszajn", help="the special tree of rational sequences").add_subparsers(dest="action", required=True)
    q = leaf(ar, "build", cmd_aronszajn_build, "build levels over a support and a grid")
    q.add_argument("--support")
    q.add_argument("--grid")
    q.add_argument("--out")
    q.add_argument("--branching", choices=[A.FULL, A.LEAN], default=A.FULL)
    q = leaf(ar, "check", cmd_aronszajn_check, "re-verify a saved build")
    q.add_argument("--in", dest="inp")

    tr = sub.add_parser("tree", help="leveled trees").add_subparsers(dest="action", required=True)
    for name, handler, help_ in (("check", cmd_tree_check, "normal-tree properties"),
                                 ("normalize", cmd_tree_normalize, "run the normalization stages"),
                                 ("export", cmd_tree_export, "Graphviz export")):
        q = leaf(tr, name, handler, help_)
        q.add_argument("--in", dest="inp")
        q.add_argument("--succ-width", type=_positive, default=2)
        if name == "normalize":
            q.add_argument("--out")
        if name == "export":
            q.add_argument("--dot", default="-")

    su = sub.add_parser("suslin", help="trees to lines and back").add_subparsers(dest="action", required=True)
    q = leaf(su, "tree-to-line", cmd_suslin_tree_to_line, "branch line of a labeled tree")
    q.add_argument("--in", dest="inp")
    q.add_argument("--emit")
    q = leaf(su, "line-to-tree", cmd_suslin_line_to_tree, "interval tree from a gap oracle")
    q.add_argument("--oracle", choices=["computable", "honest-q"], required=True)
    q.add_argument("--steps", type=_nonneg, default=16)
    q.add_argument("--window", type=_positive, default=64,
                   help="elements of Q visible to the honest oracle")
    q.add_argument("--in", dest="inp")
    q.add_argument("--emit")

    q = sub.add_parser("check", parents=[common], help="run a verification suite")
    q.set_defaults(handler=cmd_check)
    q.add_argument("--suite", default="all")
    return p


def _config(args) -> dict:
    skip = {"handler"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        parser = build_parser(_default_budget())
    except UsageError as exc:
        print(f"orderlab: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _emit({"config": _config(args)})
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"orderlab: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, T.TreeError, A.AronszajnError, KeyError) as exc:
        flag = "--in" if getattr(args, "inp", None) else args.command
        print(f"orderlab: error: {flag}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
