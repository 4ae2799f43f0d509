"""Command line: transform, verify, stats, show-algebra.

Exit status 0 on success, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import fixtures
from .algebra import AlgebraError, check_cmodel
from .labeling import LabelingError, classify
from .pipeline import FIXTURE_PREFIX, METHODS, Setup, prepare, read_input, read_sidecar, transform
from .redexalg import Mode, RedexAlgebraError
from .sidecar import SidecarError
from .stats import corpus_stats
from .term import TermError
from .tpdb import ParseError, write_cstrs
from .verify import (
    ExceededBound,
    bounded_explore,
    check_cxtext_simulation,
    check_dynlab_simulation,
    check_recognition,
    check_reverse_simulation,
    default_seeds,
    is_quasi_left_linear,
)

OK, CHECK_FAILED, BAD_INPUT = 0, 1, 2
INPUT_ERRORS = (
    OSError,
    KeyError,
    ParseError,
    TermError,
    SidecarError,
    AlgebraError,
    RedexAlgebraError,
    LabelingError,
    UnicodeDecodeError,
)


def _add_setup_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help=f"problem file, or {FIXTURE_PREFIX}NAME for a bundled example")
    p.add_argument("--labeling", choices=["min", "max"], help="labeling over the constructed algebra (default max)")
    p.add_argument("--algebra", choices=[m.value for m in Mode], default=Mode.LEFT_LINEAR.value,
                   help="redex-algebra construction (default left-linear)")
    p.add_argument("--minimize", action="store_true", help="minimize the constructed algebra")
    p.add_argument("--ground-extend", action="store_true", help="add a fresh constant and unary symbol first")
    p.add_argument("--algebra-file", metavar="PATH",
                   help=f"hand-written algebra sidecar (or {FIXTURE_PREFIX}NAME for a bundled one)")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="outercs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="turn a TRS into a context-sensitive TRS")
    _add_setup_args(t)
    t.add_argument("--method", choices=list(METHODS), default="dynamic-ext",
                   help="transformation to apply (default dynamic-ext)")
    t.add_argument("-o", "--output", help="write here instead of stdout")
    t.add_argument("--check-context-root", action="store_true",
                   help="static-ext: also drop rules whose prepended context is rooted by a redex symbol")
    t.add_argument("--keep-collapsing", action="store_true",
                   help="dynamic-ext: extend collapsing rules only when their value changes")
    t.add_argument("--no-top-relabel", action="store_true",
                   help="dynamic-label: omit the rules that remove relabel arrows under the top symbol")
    t.add_argument("--all-relabel", action="store_true",
                   help="dynamic-label: relabel rules for every pair of elements, not only reachable changes")

    v = sub.add_parser("verify", help="bounded checks of a transformation")
    _add_setup_args(v)
    v.add_argument("--simulate", type=int, metavar="BOUND", help="simulation checks over seeds up to this size")
    v.add_argument("--recognition", type=int, metavar="BOUND", help="redex recognition over terms up to this size")
    v.add_argument("--explore", type=int, metavar="LEN", help="search for a μ-derivation of this length")
    v.add_argument("--seed-size", type=int, default=5, help="seed size for --explore (default 5)")
    v.add_argument("--json", action="store_true", help="machine-readable output")

    s = sub.add_parser("stats", help="c-depths, algebra sizes and output sizes per file")
    s.add_argument("files", nargs="*", help=f"problem files ({FIXTURE_PREFIX}all for every bundled example)")
    s.add_argument("--algebra", choices=[m.value for m in Mode], default=Mode.LEFT_LINEAR.value)

    a = sub.add_parser("show-algebra", help="print the algebra, redex predicate and c-depths")
    _add_setup_args(a)
    a.add_argument("--bound", type=int, default=6, help="term size for the soundness/completeness check")
    return ap


def _setup(args) -> tuple[str, Setup]:
    inp = read_input(args.input)
    side = read_sidecar(args.algebra_file) if args.algebra_file else None
    setup = prepare(
        inp.problem.trs,
        labeling=args.labeling,
        mode=args.algebra,
        do_minimize=args.minimize,
        sidecar=side,
        extend=args.ground_extend,
    )
    return inp.name, setup


def cmd_transform(args, out) -> int:
    name, setup = _setup(args)
    cs = transform(
        setup,
        args.method,
        check_context_root=args.check_context_root,
        eliminate_collapsing=not args.keep_collapsing,
        top_relabel=not args.no_top_relabel,
        reachable_only=not args.all_relabel,
    )
    header = [f"{args.method} of {name}, {len(cs.rules)} rules", f"labeling: {setup.cl.kind}, algebra: {setup.source}"]
    text = write_cstrs(cs, header=header)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return OK


def cmd_verify(args, out) -> int:
    name, setup = _setup(args)
    trs, cl = setup.trs, setup.cl
    results: dict = {"input": name}
    lines = [f"{name}: {len(trs.rules)} rules, algebra {setup.source}, {cl.kind} labeling"]
    ok = True
    if args.simulate is not None:
        ext = transform(setup, "dynamic-ext")
        dl = transform(setup, "dynamic-label")
        reports = [
            check_cxtext_simulation(trs, cl, ext, bound=args.simulate),
            check_dynlab_simulation(trs, cl, dl, bound=args.simulate),
        ]
        qll = is_quasi_left_linear(trs)
        if qll and cl.kind == "maximal":
            reports.append(check_reverse_simulation(trs, cl, ext, bound=min(args.simulate, 4)))
        else:
            lines.append("reverse simulation skipped (needs a quasi-left-linear system and maximal labeling)")
        for r in reports:
            ok &= r.passed
            lines.extend(r.lines())
        results["simulation"] = [r.as_dict() for r in reports]
    if args.recognition is not None:
        mode = Mode(args.algebra) if setup.source.startswith("constructed") else Mode.FULL
        rep = check_recognition(trs, setup.redex_algebra, args.recognition, mode)
        # inexact recognition is only a failure where exactness is expected
        if mode is Mode.LEFT_LINEAR or trs.is_left_linear():
            ok &= rep.exact
        lines.extend(rep.lines())
        results["recognition"] = rep.as_dict()
    if args.explore is not None:
        ext = transform(setup, "dynamic-ext")
        seeds = [cl.label_top(s) for s in default_seeds(trs, args.seed_size)]
        res = bounded_explore(ext, seeds, args.explore)
        lines.append(f"exploration of the dynamic context extension: {res}")
        if isinstance(res, ExceededBound):
            lines.append("  witness: " + " ⇒ ".join(map(str, res.witness[:6])) + (" ⇒ ..." if res.length > 5 else ""))
        results["explore"] = {
            "exceeded": isinstance(res, ExceededBound),
            "length": res.length if isinstance(res, ExceededBound) else res.longest,
            "explored": res.explored,
        }
    if len(lines) == 1:
        lines.append("nothing to check; pass --simulate, --recognition or --explore")
    results["passed"] = ok
    if args.json:
        out.write(json.dumps(results, indent=2, sort_keys=True, default=str) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return OK if ok else CHECK_FAILED


def cmd_stats(args, out) -> int:
    items, unreadable = [], []
    for f in args.files:
        if f == FIXTURE_PREFIX + "all":
            items.extend((fixtures.load(n).name, fixtures.load(n).text) for n in fixtures.names())
        elif f.startswith(FIXTURE_PREFIX):
            fx = fixtures.load(f[len(FIXTURE_PREFIX):])
            items.append((fx.name, fx.text))
        else:
            try:
                with open(f, encoding="utf-8") as fh:
                    items.append((f, fh.read()))
            except (OSError, UnicodeDecodeError) as e:
                unreadable.append((f, str(e)))
    table = corpus_stats(items, Mode(args.algebra))
    table.rejected.extend(unreadable)
    out.write(table.format())
    return OK


def cmd_show_algebra(args, out) -> int:
    _, setup = _setup(args)
    cl, ra = setup.cl, setup.redex_algebra
    alg = ra.algebra
    lines = [f"algebra: {setup.source}, {len(alg)} elements"]
    if setup.size_before_minimize is not None and setup.size_before_minimize != len(alg):
        lines.append(f"  {setup.size_before_minimize} elements before minimization")
    lines.append("domain: " + " ".join(map(str, alg.domain)))
    for f in sorted(alg.arities, key=str):
        for a, v in alg.tables[f].items():
            args_ = "(" + ",".join(map(str, a)) + ")" if a else ""
            mark = "  redex" if ra.isredex(f, a) else ""
            lines.append(f"  {f}{args_} = {v}{mark}")
    lines.append("redex symbols: " + " ".join(sorted(map(str, cl.sigred))))
    report = check_cmodel(alg, setup.trs)
    for r in report.per_rule:
        lines.append(f"  c-depth {'∞' if r.cdepth is None else r.cdepth}: {r.rule}")
    lines.append(f"TRS c-depth: {report.trs_cdepth if report.is_cmodel else 'none (not a c-model)'}")
    lines.append("labeling: " + classify(cl, setup.trs, args.bound).summary())
    out.write("\n".join(lines) + "\n")
    return OK


COMMANDS = {
    "transform": cmd_transform,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "show-algebra": cmd_show_algebra,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    try:
        return COMMANDS[args.command](args, out)
    except INPUT_ERRORS as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"outercs: {msg}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
