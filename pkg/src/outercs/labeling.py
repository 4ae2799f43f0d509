"""Semantic labeling over finite algebras and the minimal / maximal c-labelings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping

from .algebra import Assignment, Element, FiniteAlgebra, extend_with_top
from .redexalg import RedexAlgebra
from .symbols import EPS, STAR, TOP, Label, Labeled, base_symbol
from .term import App, Symbol, Term, Trs, Var, GroundTerms, is_redex, map_symbols


class LabelingError(Exception):
    pass


class UnsafeOverride(LabelingError):
    pass


@dataclass(frozen=True)
class LabelingSpec:
    """``π_f`` for every symbol, as total tables from argument values to labels."""

    tables: Mapping[Symbol, Mapping[tuple, Label]]

    def label(self, f: Symbol, args: tuple) -> Label:
        return self.tables[f][args]

    def labels_of(self, f: Symbol) -> set[Label]:
        return set(self.tables[f].values())


@dataclass(frozen=True)
class CLabeling:
    algebra: FiniteAlgebra  # includes ⊤
    spec: LabelingSpec
    sigred: frozenset
    kind: str = "custom"
    top: Symbol = TOP
    redex_algebra: RedexAlgebra | None = field(default=None, compare=False)

    def __post_init__(self):
        for s in self.sigred:
            if not isinstance(s, Labeled) or s.base is self.top:
                raise LabelingError(f"{s} cannot be a redex symbol")

    # -- labeling

    def symbol_for(self, f: Symbol, values: tuple) -> Labeled:
        return Labeled(f, self.spec.label(f, values))

    def is_redex_symbol(self, sym: Symbol) -> bool:
        return sym in self.sigred

    def label_term(self, t: Term, assign: Assignment | None = None) -> Term:
        return label_term(self, assign or {}, t)

    def label_top(self, t: Term) -> Term:
        """``lab(⊤(t))`` for a ground term."""
        return label_term(self, {}, App(self.top, [t]))

    def labeled_signature(self, sig: Mapping[Symbol, int]) -> dict[Labeled, int]:
        out: dict[Labeled, int] = {}
        alg = self.algebra
        for f, n in list(sig.items()) + [(self.top, 1)]:
            for args in itertools.product(alg.domain, repeat=n):
                out.setdefault(self.symbol_for(f, args), n)
        return out

    def with_sigred(self, sigred: Iterable[Labeled], trs: Trs | None = None, bound: int = 7) -> "CLabeling":
        """Replace Σred. Shrinking is always allowed; growing must pass a bounded soundness check."""
        new = frozenset(sigred)
        if not new <= self.sigred:
            if trs is None:
                raise UnsafeOverride("adding redex symbols requires a TRS to check soundness against")
            candidate = replace(self, sigred=new)
            report = classify(candidate, trs, bound)
            if not report.sound:
                raise UnsafeOverride(
                    f"override is unsound: {report.unsound_witness} would be marked but is not a redex"
                )
        return replace(self, sigred=new)


def label_term(cl: CLabeling, assign: Assignment, t: Term) -> Term:
    return _label(cl, assign, t)[0]


def _label(cl: CLabeling, assign: Assignment, t: Term) -> tuple[Term, Element]:
    if isinstance(t, Var):
        return t, assign[t.name]
    if isinstance(t, App):
        kids = [_label(cl, assign, a) for a in t.args]
        vals = tuple(v for _, v in kids)
        sym = cl.symbol_for(t.fun, vals)
        return App(sym, [k for k, _ in kids]), cl.algebra.apply(t.fun, vals)
    raise LabelingError(f"cannot label {t}")


def erase(t: Term) -> Term:
    """Drop labels (``⊤`` and relabel arrows are kept)."""
    return map_symbols(t, base_symbol)


def erase_top(t: Term, top: Symbol = TOP) -> Term:
    t = erase(t)
    if isinstance(t, App) and t.fun is top:
        return t.args[0]
    return t


def _spec(alg: FiniteAlgebra, fn: Callable[[Symbol, tuple], Label]) -> LabelingSpec:
    return LabelingSpec(
        {
            f: {a: fn(f, a) for a in itertools.product(alg.domain, repeat=n)}
            for f, n in alg.arities.items()
        }
    )


def _with_top(alg: FiniteAlgebra, top: Symbol) -> FiniteAlgebra:
    return alg if top in alg.arities else extend_with_top(alg, top)


def minimal_labeling(ra: RedexAlgebra, top: Symbol = TOP) -> CLabeling:
    alg = _with_top(ra.algebra, top)

    def pi(f, args):
        return STAR if f is not top and ra.isredex(f, args) else EPS

    spec = _spec(alg, pi)
    sigred = frozenset(Labeled(f, STAR) for f, ts in ra.redex.items() if ts)
    return CLabeling(alg, spec, sigred, "minimal", top, ra)


def maximal_labeling(ra: RedexAlgebra, top: Symbol = TOP) -> CLabeling:
    alg = _with_top(ra.algebra, top)
    spec = _spec(alg, lambda f, args: tuple(args))
    sigred = frozenset(Labeled(f, a) for f, ts in ra.redex.items() for a in ts)
    return CLabeling(alg, spec, sigred, "maximal", top, ra)


def make_labeling(ra: RedexAlgebra, kind: str, top: Symbol = TOP) -> CLabeling:
    if kind in ("min", "minimal"):
        return minimal_labeling(ra, top)
    if kind in ("max", "maximal"):
        return maximal_labeling(ra, top)
    raise LabelingError(f"unknown labeling {kind!r}")


@dataclass(frozen=True)
class Classification:
    sound: bool
    complete: bool
    bound: int
    checked: int
    unsound_witness: Term | None = None
    incomplete_witness: Term | None = None

    def summary(self) -> str:
        parts = [
            f"sound={'yes' if self.sound else 'no'}",
            f"complete={'yes' if self.complete else 'no'}",
            f"verified up to size {self.bound} ({self.checked} ground terms)",
        ]
        if self.unsound_witness is not None:
            parts.append(f"marked non-redex: {self.unsound_witness}")
        if self.incomplete_witness is not None:
            parts.append(f"unmarked redex: {self.incomplete_witness}")
        return "; ".join(parts)


def classify(cl: CLabeling, trs: Trs, bound: int = 7) -> Classification:
    """Bounded check that Σred-rooted labelings are exactly (or at least / at most) the redexes."""
    alg = cl.algebra
    unsound = incomplete = None
    checked = 0
    for t in GroundTerms(trs.signature).up_to(bound):
        checked += 1
        vals = tuple(alg.eval(a) for a in t.args)
        marked = cl.symbol_for(t.fun, vals) in cl.sigred
        redex = is_redex(trs, t)
        if marked and not redex and unsound is None:
            unsound = t
        if redex and not marked and incomplete is None:
            incomplete = t
        if unsound is not None and incomplete is not None:
            break
    return Classification(unsound is None, incomplete is None, bound, checked, unsound, incomplete)
