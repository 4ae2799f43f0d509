"""TRS → CS-TRS transformations: static and dynamic context extension, dynamic labeling."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .algebra import Element, NotACModel, Pair, eval_term, propagate, require_cmodel
from .labeling import CLabeling, label_term
from .symbols import Up
from .term import (
    App,
    Context,
    CsTrs,
    FreshNames,
    ReplacementMap,
    Rule,
    Symbol,
    Trs,
    Var,
    dedup_rules,
    enumerate_flat_contexts,
    enumerate_thin_contexts,
    rename,
    signature_of,
    subterm_at,
    variables,
)


class CycleDetected(Exception):
    pass


# ---------------------------------------------------------------- shared plumbing


def assemble(rules: Iterable[Rule], cl: CLabeling, info: Mapping | None = None) -> CsTrs:
    """μ(f) = ∅ for redex symbols and relabel arrows, all arguments otherwise."""
    rules = tuple(rules)
    sig = signature_of([t for r in rules for t in (r.lhs, r.rhs)])
    mu = {
        f: () if (f in cl.sigred or isinstance(f, Up)) else range(1, n + 1)
        for f, n in sig.items()
    }
    return CsTrs(Trs(sig, rules), ReplacementMap(mu), dict(info or {}))


_NICE = ("x", "y", "z", "u", "v", "w")


def _nice_names():
    yield from _NICE
    for i in itertools.count(1):
        for n in _NICE:
            yield f"{n}{i}"


def tidy_rule(rule: Rule, keep: Iterable[str]) -> Rule:
    """Rename session-fresh variables to short names, keeping the original rule variables."""
    keep = set(keep)
    used = set(v for v in variables(rule.lhs) if v in keep)
    pool = (n for n in _nice_names() if n not in keep)
    mapping = {}
    for v in variables(rule.lhs):
        if v in keep:
            continue
        name = next(pool)
        while name in used:
            name = next(pool)
        mapping[v] = name
        used.add(name)
    return Rule(rename(rule.lhs, mapping), rename(rule.rhs, mapping)) if mapping else rule


def _label_rule(cl: CLabeling, rule: Rule, assign: Mapping[str, Element]) -> Rule:
    return Rule(label_term(cl, assign, rule.lhs), label_term(cl, assign, rule.rhs))


def _top_context(cl: CLabeling, inner: Context) -> Context:
    return Context(App(cl.top, [inner.term]))


# ---------------------------------------------------------------- static extension


def static_context_extension(trs: Trs, cl: CLabeling, *, check_context_root: bool = False) -> CsTrs:
    """Prepend every thin context of the rule's c-depth, label over all assignments, prune.

    A labeled rule is dropped when a redex symbol sits on the path of the prepended
    context strictly between its root and the hole. With ``check_context_root`` the
    context root is inspected as well.
    """
    report = require_cmodel(cl.algebra, trs)
    sig = trs.signature
    fresh = FreshNames(trs.variable_names())
    extended: list[tuple[Rule, Context]] = []
    for rd in report.per_rule:
        rule, n = rd.rule, rd.cdepth
        for c in enumerate_thin_contexts(sig, n, fresh=fresh):
            extended.append((Rule(c.fill(rule.lhs), c.fill(rule.rhs)), c))
        for k in range(n):
            for c in enumerate_thin_contexts(sig, k, fresh=fresh):
                tc = _top_context(cl, c)
                extended.append((Rule(tc.fill(rule.lhs), tc.fill(rule.rhs)), tc))

    labeled = []
    removed = 0
    for rule, ctx in extended:
        hole = ctx.hole_position
        path = [hole[:i] for i in range(0 if check_context_root else 1, len(hole))]
        for assign in cl.algebra.assignments(variables(rule.lhs)):
            lr = _label_rule(cl, rule, assign)
            if any(subterm_at(lr.lhs, p).fun in cl.sigred for p in path):
                removed += 1
                continue
            labeled.append(lr)
    total_labeled = len(labeled) + removed
    keep = trs.variable_names()
    rules = dedup_rules(tidy_rule(r, keep) for r in labeled)
    info = {
        "method": "static-ext",
        "extended": len(extended),
        "labeled": total_labeled,
        "removed": removed,
        "rules": len(rules),
        "trs_cdepth": report.trs_cdepth,
    }
    return assemble(rules, cl, info)


# ---------------------------------------------------------------- dynamic extension


@dataclass(frozen=True)
class ExtensionPair:
    rule: Rule
    assign: tuple[tuple[str, Element], ...]

    @property
    def assignment(self) -> dict[str, Element]:
        return dict(self.assign)

    def __str__(self):
        a = ", ".join(f"{k}↦{v}" for k, v in self.assign)
        return f"({self.rule}, {{{a}}})"


def _pair(rule: Rule, assign: Mapping[str, Element]) -> ExtensionPair:
    names = variables(rule.lhs)
    return ExtensionPair(rule, tuple((v, assign[v]) for v in names))


def _needs_extension(cl: CLabeling, p: ExtensionPair, eliminate_collapsing: bool) -> bool:
    rule = p.rule
    if rule.lhs.fun is cl.top:
        return False
    if eliminate_collapsing and isinstance(rule.rhs, Var):
        return True
    a = p.assignment
    return eval_term(cl.algebra, a, rule.lhs) != eval_term(cl.algebra, a, rule.rhs)


def prepend(trs: Trs, cl: CLabeling, p: ExtensionPair, fresh: FreshNames) -> list[ExtensionPair]:
    """Wrap a pair in every flat context (⊤ included) whose labeled root is not a redex symbol."""
    alg = cl.algebra
    rule, alpha = p.rule, p.assignment
    value = eval_term(alg, alpha, rule.lhs)
    out = []
    for c in enumerate_flat_contexts(trs.signature, include_top=True, top=cl.top, fresh=fresh):
        f = c.term.fun
        slot = c.hole_position[0] - 1
        cvars = c.variables()
        for beta in alg.assignments(cvars):
            vals = tuple(value if j == slot else beta[a.name] for j, a in enumerate(c.term.args))
            if cl.symbol_for(f, vals) in cl.sigred:
                continue
            out.append(_pair(Rule(c.fill(rule.lhs), c.fill(rule.rhs)), {**alpha, **beta}))
    return out


def dynamic_extension_pairs(trs: Trs, cl: CLabeling, *, eliminate_collapsing: bool = True) -> list[ExtensionPair]:
    """Least fixed point of on-demand context prepending, starting from all (rule, assignment) pairs."""
    report = require_cmodel(cl.algebra, trs)
    fresh = FreshNames(trs.variable_names())
    pairs = [_pair(r, a) for r in trs.rules for a in cl.algebra.assignments(variables(r.lhs))]
    # every prepend either removes a value difference one level up or ends at ⊤
    for _ in range(report.trs_cdepth + 3):
        nxt = []
        changed = False
        for p in pairs:
            if _needs_extension(cl, p, eliminate_collapsing):
                changed = True
                nxt.extend(prepend(trs, cl, p, fresh))
            else:
                nxt.append(p)
        pairs = nxt
        if not changed:
            return pairs
    raise NotACModel("context prepending did not reach a fixed point")


def dynamic_context_extension(trs: Trs, cl: CLabeling, *, eliminate_collapsing: bool = True) -> CsTrs:
    pairs = dynamic_extension_pairs(trs, cl, eliminate_collapsing=eliminate_collapsing)
    keep = trs.variable_names()
    rules = dedup_rules(tidy_rule(_label_rule(cl, p.rule, p.assignment), keep) for p in pairs)
    info = {
        "method": "dynamic-ext",
        "pairs": len(pairs),
        "rules": len(rules),
        "eliminate_collapsing": eliminate_collapsing,
    }
    return assemble(rules, cl, info)


# ---------------------------------------------------------------- dynamic labeling


def _admit(cl: CLabeling):
    return lambda f, args: cl.symbol_for(f, args) not in cl.sigred


def value_change_pairs(trs: Trs, cl: CLabeling) -> frozenset[Pair]:
    """Value changes a step can cause, closed under propagation through non-redex symbols."""
    alg = cl.algebra
    current: set[Pair] = set()
    for r in trs.rules:
        for a in alg.assignments(variables(r.lhs)):
            lv, rv = eval_term(alg, a, r.lhs), eval_term(alg, a, r.rhs)
            if lv != rv:
                current.add((lv, rv))
    syms = [f for f, n in trs.signature.items() if n > 0]
    admit = _admit(cl)
    while True:
        step = {p for p in propagate(alg, current, syms, admit) if p[0] != p[1]}
        if step <= current:
            break
        current |= step
    return frozenset(sorted(current, key=lambda p: (alg.order(p[0]), alg.order(p[1]))))


def leadsto_paths(pairs: Iterable[Pair], cl: CLabeling, symbols: Iterable[Symbol] | None = None) -> int:
    """Number of pairs on the longest ↝ chain; raises CycleDetected on a cycle."""
    alg = cl.algebra
    pairs = set(pairs)
    if symbols is None:
        symbols = [f for f, n in alg.arities.items() if n > 0]
    admit = _admit(cl)
    succ = {p: {q for q in propagate(alg, [p], symbols, admit) if q[0] != q[1] and q in pairs} for p in pairs}
    memo: dict[Pair, int] = {}
    active: set[Pair] = set()

    def longest(p: Pair) -> int:
        if p in memo:
            return memo[p]
        if p in active:
            raise CycleDetected(f"value-change pair {p} reaches itself")
        active.add(p)
        best = 1 + max((longest(q) for q in succ[p]), default=0)
        active.discard(p)
        memo[p] = best
        return best

    return max((longest(p) for p in pairs), default=0)


def _arg_names(n: int) -> list[str]:
    return list(itertools.islice(_nice_names(), n))


def dynamic_labeling(
    trs: Trs,
    cl: CLabeling,
    *,
    reachable_only: bool = True,
    top_relabel: bool = True,
) -> CsTrs:
    """Labeled rules that announce value changes with ↑, plus rules pushing ↑ upward.

    ``reachable_only=False`` generates relabel rules for every pair of distinct elements.
    ``top_relabel=False`` omits the rules that let ↑ vanish under ⊤.
    """
    alg = cl.algebra
    report = require_cmodel(alg, trs)
    vcp = value_change_pairs(trs, cl)
    org = []
    for r in trs.rules:
        for a in alg.assignments(variables(r.lhs)):
            lv, rv = eval_term(alg, a, r.lhs), eval_term(alg, a, r.rhs)
            lr = _label_rule(cl, r, a)
            if lv != rv:
                lr = Rule(lr.lhs, App(Up(lv, rv), [lr.rhs]))
            org.append(lr)
    org = dedup_rules(org)

    if reachable_only:
        pairs = list(vcp)
    else:
        pairs = [(b, b2) for b in alg.domain for b2 in alg.domain if b != b2]
    syms = [(f, n) for f, n in trs.signature.items() if n > 0]
    if top_relabel:
        syms.append((cl.top, 1))
    prp = []
    for f, n in syms:
        for i in range(n):
            names = _arg_names(n)
            for rest in itertools.product(alg.domain, repeat=n - 1):
                pre, post = rest[:i], rest[i:]
                for b, b2 in pairs:
                    args, args2 = pre + (b,) + post, pre + (b2,) + post
                    sym = cl.symbol_for(f, args)
                    if sym in cl.sigred:
                        continue
                    xs = [Var(v) for v in names]
                    lhs_args = list(xs)
                    lhs_args[i] = App(Up(b, b2), [xs[i]])
                    rhs: App = App(cl.symbol_for(f, args2), xs)
                    d, d2 = alg.apply(f, args), alg.apply(f, args2)
                    if d != d2:
                        rhs = App(Up(d, d2), [rhs])
                    prp.append(Rule(App(sym, lhs_args), rhs))
    prp = dedup_rules(prp)
    info = {
        "method": "dynamic-label",
        "labeled_rules": len(org),
        "relabel_rules": len(prp),
        "rules": len(org) + len(prp),
        "value_change_pairs": len(vcp),
        "trs_cdepth": report.trs_cdepth,
        "reachable_only": reachable_only,
        "top_relabel": top_relabel,
    }
    return assemble(list(org) + list(prp), cl, info)


def is_relabel_rule(rule: Rule) -> bool:
    return any(isinstance(s.fun, Up) for s in _apps(rule.lhs))


def _apps(t):
    if isinstance(t, App):
        yield t
        for a in t.args:
            yield from _apps(a)


# ---------------------------------------------------------------- ground extension


def ground_extend(trs: Trs, successor: str = "s", zero: str = "0") -> Trs:
    """Add a fresh constant and a fresh unary symbol; rules are unchanged."""
    taken = {str(f) for f in trs.signature} | trs.variable_names()

    def fresh(base: str) -> str:
        if base not in taken:
            taken.add(base)
            return base
        for i in itertools.count(1):
            cand = f"{base}{i}"
            if cand not in taken:
                taken.add(cand)
                return cand
        raise AssertionError

    s, z = fresh(successor), fresh(zero)
    return Trs(trs.signature.union({s: 1, z: 0}), trs.rules)


def ground_extend_algebra(alg, extended: Trs):
    """Interpret symbols added by ground_extend as constant functions to the least element."""
    added = {f: n for f, n in extended.signature.items() if f not in alg.arities}
    least = alg.least
    return alg.with_symbols({f: (n, lambda *_a: least) for f, n in added.items()})
