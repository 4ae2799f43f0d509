"""Finite Σ-algebras: evaluation, core, c-model checking, c-depth, value-pair propagation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .symbols import TOP
from .term import App, Rule, Symbol, Term, Trs, Var, symbol_key, variables

Element = Hashable
Assignment = Mapping[str, Element]
Pair = tuple[Element, Element]


class AlgebraError(Exception):
    pass


class UnboundVariable(AlgebraError):
    pass


class EmptyCore(AlgebraError):
    pass


class NotACModel(AlgebraError):
    pass


class SymbolClash(AlgebraError):
    pass


class PartialInterpretation(AlgebraError):
    pass


class FiniteAlgebra:
    """Domain in canonical order plus one total table per symbol."""

    def __init__(
        self,
        domain: Sequence[Element],
        tables: Mapping[Symbol, Mapping[tuple, Element]],
        arities: Mapping[Symbol, int],
    ):
        self.domain: tuple[Element, ...] = tuple(domain)
        if not self.domain:
            raise AlgebraError("domain must be non-empty")
        if len(set(self.domain)) != len(self.domain):
            raise AlgebraError("duplicate domain elements")
        self.arities = dict(sorted(arities.items(), key=lambda kv: symbol_key(kv[0])))
        self.tables = {f: dict(tables[f]) for f in self.arities if f in tables}
        self._index = {e: i for i, e in enumerate(self.domain)}
        self._validate()

    def _validate(self):
        dom = set(self.domain)
        for f, n in self.arities.items():
            table = self.tables.get(f)
            if table is None:
                raise PartialInterpretation(f"no interpretation for {f}")
            for args in itertools.product(self.domain, repeat=n):
                v = table.get(args, _MISSING)
                if v is _MISSING:
                    shown = ",".join(map(str, args))
                    raise PartialInterpretation(f"{f}({shown}) undefined")
                if v not in dom:
                    raise PartialInterpretation(f"{f} yields {v}, which is outside the domain")

    @classmethod
    def from_functions(
        cls,
        domain: Sequence[Element],
        funcs: Mapping[Symbol, tuple[int, Callable[..., Element]]],
    ) -> "FiniteAlgebra":
        tables = {
            f: {args: fn(*args) for args in itertools.product(domain, repeat=n)}
            for f, (n, fn) in funcs.items()
        }
        return cls(domain, tables, {f: n for f, (n, _) in funcs.items()})

    # -- basic access

    @property
    def symbols(self) -> list[Symbol]:
        return list(self.arities)

    def apply(self, f: Symbol, args: tuple) -> Element:
        return self.tables[f][args]

    def order(self, e: Element) -> int:
        return self._index[e]

    @property
    def least(self) -> Element:
        return self.domain[0]

    def __len__(self):
        return len(self.domain)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAlgebra)
            and self.domain == other.domain
            and self.arities == other.arities
            and self.tables == other.tables
        )

    def __repr__(self):
        return f"FiniteAlgebra(domain={[str(e) for e in self.domain]}, symbols={list(map(str, self.arities))})"

    def eval(self, t: Term, assign: Assignment | None = None) -> Element:
        return eval_term(self, assign or {}, t)

    def assignments(self, names: Sequence[str]) -> Iterator[dict[str, Element]]:
        """All assignments for ``names``, variables and elements in canonical order."""
        for vals in itertools.product(self.domain, repeat=len(names)):
            yield dict(zip(names, vals))

    def restrict(self, domain: Iterable[Element]) -> "FiniteAlgebra":
        keep = set(domain)
        dom = [e for e in self.domain if e in keep]
        tables = {
            f: {a: v for a, v in tab.items() if all(x in keep for x in a)}
            for f, tab in self.tables.items()
        }
        return FiniteAlgebra(dom, tables, self.arities)

    def without(self, *syms: Symbol) -> "FiniteAlgebra":
        return FiniteAlgebra(
            self.domain,
            {f: t for f, t in self.tables.items() if f not in syms},
            {f: n for f, n in self.arities.items() if f not in syms},
        )

    def with_symbols(self, extra: Mapping[Symbol, tuple[int, Callable[..., Element]]]) -> "FiniteAlgebra":
        tables = dict(self.tables)
        arities = dict(self.arities)
        for f, (n, fn) in extra.items():
            if f in arities:
                raise SymbolClash(f"{f} already interpreted")
            arities[f] = n
            tables[f] = {a: fn(*a) for a in itertools.product(self.domain, repeat=n)}
        return FiniteAlgebra(self.domain, tables, arities)


_MISSING = object()


def eval_term(alg: FiniteAlgebra, assign: Assignment, t: Term) -> Element:
    if isinstance(t, Var):
        try:
            return assign[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, App):
        return alg.tables[t.fun][tuple(eval_term(alg, assign, a) for a in t.args)]
    raise AlgebraError(f"cannot evaluate {t}")


def core(alg: FiniteAlgebra) -> FiniteAlgebra:
    """Restriction to the values of ground terms. A ⊤ interpretation is re-adjoined afterwards."""
    if TOP in alg.arities:
        return extend_with_top(core(alg.without(TOP)))
    reached = {alg.apply(f, ()) for f, n in alg.arities.items() if n == 0}
    if not reached:
        raise EmptyCore("signature has no constants, so there are no ground terms")
    while True:
        new = set()
        for f, n in alg.arities.items():
            if n == 0:
                continue
            for args in itertools.product(sorted(reached, key=alg.order), repeat=n):
                v = alg.apply(f, args)
                if v not in reached:
                    new.add(v)
        if not new:
            break
        reached |= new
    return alg.restrict(reached)


def is_core(alg: FiniteAlgebra) -> bool:
    try:
        return len(core(alg)) == len(alg)
    except EmptyCore:
        return False


def ground_witnesses(alg: FiniteAlgebra) -> dict[Element, Term]:
    """A smallest-depth ground term for every element of the core."""
    wit: dict[Element, Term] = {}
    for f, n in alg.arities.items():
        if n == 0 and f is not TOP:
            wit.setdefault(alg.apply(f, ()), App(f, ()))
    changed = True
    while changed:
        changed = False
        known = sorted(wit, key=alg.order)
        for f, n in alg.arities.items():
            if n == 0 or f is TOP:
                continue
            for args in itertools.product(known, repeat=n):
                v = alg.apply(f, args)
                if v not in wit:
                    wit[v] = App(f, [wit[a] for a in args])
                    changed = True
    return wit


def extend_with_top(alg: FiniteAlgebra, top: Symbol = TOP) -> FiniteAlgebra:
    """Adjoin a unary top symbol interpreted as the constant least element."""
    least = alg.least
    return alg.with_symbols({top: (1, lambda _x: least)})


# ---------------------------------------------------------------- propagation


def propagate(
    alg: FiniteAlgebra,
    pairs: Iterable[Pair],
    symbols: Iterable[Symbol],
    admit: Callable[[Symbol, tuple], bool] | None = None,
) -> set[Pair]:
    """One step: ``([f](ā,b,c̄), [f](ā,b',c̄))`` for every pair, symbol, slot and surrounding values.

    ``admit(f, args)`` filters the argument tuples (with ``b`` in the slot) through which a pair may pass.
    """
    out: set[Pair] = set()
    pairs = list(pairs)
    for f in symbols:
        n = alg.arities[f]
        table = alg.tables[f]
        for i in range(n):
            for rest in itertools.product(alg.domain, repeat=n - 1):
                pre, post = rest[:i], rest[i:]
                for b, b2 in pairs:
                    args = pre + (b,) + post
                    if admit is not None and not admit(f, args):
                        continue
                    out.add((table[args], table[pre + (b2,) + post]))
    return out


def initial_pairs(alg: FiniteAlgebra, rule: Rule) -> set[Pair]:
    names = variables(rule.lhs)
    return {
        (eval_term(alg, a, rule.lhs), eval_term(alg, a, rule.rhs))
        for a in alg.assignments(names)
    }


def _context_symbols(alg: FiniteAlgebra, symbols: Iterable[Symbol] | None) -> list[Symbol]:
    syms = alg.arities if symbols is None else symbols
    return [f for f in syms if f is not TOP and alg.arities[f] > 0]


def cdepth(alg: FiniteAlgebra, rule: Rule, symbols: Iterable[Symbol] | None = None) -> int:
    """Least n such that every depth-n context equalizes both sides, via value-pair propagation."""
    syms = _context_symbols(alg, symbols)
    current = frozenset(p for p in initial_pairs(alg, rule) if p[0] != p[1])
    seen = set()
    depth = 0
    while current:
        if current in seen:
            raise NotACModel(f"rule {rule} never becomes interpretation-preserving")
        seen.add(current)
        current = frozenset(p for p in propagate(alg, current, syms) if p[0] != p[1])
        depth += 1
    return depth


@dataclass(frozen=True)
class RuleDepth:
    rule: Rule
    cdepth: int | None

    @property
    def is_cmodel(self) -> bool:
        return self.cdepth is not None


@dataclass(frozen=True)
class CModelReport:
    per_rule: tuple[RuleDepth, ...]

    @property
    def is_cmodel(self) -> bool:
        return all(r.is_cmodel for r in self.per_rule)

    @property
    def trs_cdepth(self) -> int | None:
        if not self.is_cmodel:
            return None
        return max((r.cdepth for r in self.per_rule), default=0)

    def failures(self) -> list[Rule]:
        return [r.rule for r in self.per_rule if not r.is_cmodel]

    def histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for r in self.per_rule:
            if r.cdepth is not None:
                hist[r.cdepth] = hist.get(r.cdepth, 0) + 1
        return dict(sorted(hist.items()))


def check_cmodel(alg: FiniteAlgebra, trs: Trs) -> CModelReport:
    syms = _context_symbols(alg, [f for f in trs.signature if f in alg.arities])
    out = []
    for r in trs.rules:
        try:
            out.append(RuleDepth(r, cdepth(alg, r, syms)))
        except NotACModel:
            out.append(RuleDepth(r, None))
    return CModelReport(tuple(out))


def require_cmodel(alg: FiniteAlgebra, trs: Trs) -> CModelReport:
    rep = check_cmodel(alg, trs)
    if not rep.is_cmodel:
        bad = ", ".join(str(r) for r in rep.failures())
        raise NotACModel(f"algebra is not a c-model for: {bad}")
    return rep


def is_model(alg: FiniteAlgebra, trs: Trs) -> bool:
    return all(all(a == b for a, b in initial_pairs(alg, r)) for r in trs.rules)
