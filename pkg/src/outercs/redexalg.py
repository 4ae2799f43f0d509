"""Redex-recognizing algebras built from left-hand-side patterns, and their minimization."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .algebra import Element, FiniteAlgebra, core, is_core
from .symbols import BOT, TOP
from .term import App, Rule, Symbol, Term, Trs, Var, is_ground, subterms, term_key

BOT_TERM = App(BOT, ())


class RedexAlgebraError(Exception):
    pass


class Clash(RedexAlgebraError):
    pass


class PoolNotClosed(RedexAlgebraError):
    pass


class NonGround(RedexAlgebraError):
    pass


class NotCore(RedexAlgebraError):
    pass


class Mode(enum.Enum):
    LEFT_LINEAR = "left-linear"
    FULL = "full"


# ---------------------------------------------------------------- ⊥-terms


def cut(t: Term) -> Term:
    if isinstance(t, Var):
        return BOT_TERM
    return App(t.fun, [cut(a) for a in t.args])


def is_bot(t: Term) -> bool:
    return isinstance(t, App) and t.fun is BOT


def bot_match(s: Term, t: Term) -> bool:
    """True iff ``s`` arises from ``t`` by replacing subterms with ⊥."""
    if is_bot(s):
        return True
    if s.fun != t.fun or len(s.args) != len(t.args):
        return False
    return all(bot_match(a, b) for a, b in zip(s.args, t.args))


def merge(s: Term, t: Term) -> Term:
    """Most general common instance, ⊥ absorbing. Raises Clash on a symbol mismatch."""
    if is_bot(s):
        return t
    if is_bot(t):
        return s
    if s.fun != t.fun or len(s.args) != len(t.args):
        raise Clash(f"{s} and {t} clash")
    return App(s.fun, [merge(a, b) for a, b in zip(s.args, t.args)])


def try_merge(s: Term, t: Term) -> Term | None:
    try:
        return merge(s, t)
    except Clash:
        return None


def _weight(t: Term) -> int:
    # number of non-⊥ symbols
    return 0 if is_bot(t) else 1 + sum(_weight(a) for a in t.args)


def shrink(s: Term, pool: Iterable[Term]) -> Term:
    """The unique largest pool member that ⊥-matches ``s``."""
    best: list[Term] = []
    best_size = -1
    for p in pool:
        if bot_match(p, s):
            w = _weight(p)
            if w > best_size:
                best, best_size = [p], w
            elif w == best_size and p not in best:
                best.append(p)
    if len(best) != 1:
        if not best:
            raise PoolNotClosed(f"no pool element matches {s} (⊥ missing from the pool?)")
        raise PoolNotClosed(f"{s} has several largest matchers: {', '.join(map(str, best))}")
    return best[0]


def merge_closure(terms: Iterable[Term]) -> list[Term]:
    pool = set(terms) | {BOT_TERM}
    frontier = list(pool)
    while frontier:
        new = []
        snapshot = list(pool)
        for s in frontier:
            for t in snapshot:
                m = try_merge(s, t)
                if m is not None and m not in pool:
                    pool.add(m)
                    new.append(m)
        frontier = new
    return sorted(pool, key=term_key)


# ---------------------------------------------------------------- redex algebras


class RedexAlgebra:
    """An algebra with a redex predicate per symbol, stored as the set of argument tuples where it holds."""

    def __init__(self, algebra: FiniteAlgebra, redex: Mapping[Symbol, Iterable[tuple]]):
        self.algebra = algebra
        self.redex: dict[Symbol, frozenset[tuple]] = {
            f: frozenset(redex.get(f, ())) for f in algebra.arities if f is not TOP
        }
        dom = set(algebra.domain)
        for f, tuples in self.redex.items():
            for a in tuples:
                if len(a) != algebra.arities[f] or any(x not in dom for x in a):
                    raise RedexAlgebraError(f"redex entry {f}{a} outside the domain")

    def isredex(self, f: Symbol, args: tuple) -> bool:
        return args in self.redex.get(f, ())

    @property
    def domain(self) -> tuple[Element, ...]:
        return self.algebra.domain

    def __len__(self):
        return len(self.algebra)

    def __repr__(self):
        return f"RedexAlgebra({[str(e) for e in self.domain]})"

    def restrict(self, domain: Iterable[Element]) -> "RedexAlgebra":
        alg = self.algebra.restrict(domain)
        keep = set(alg.domain)
        return RedexAlgebra(
            alg,
            {f: [a for a in ts if all(x in keep for x in a)] for f, ts in self.redex.items()},
        )


def in_language(ra: RedexAlgebra, t: Term) -> bool:
    if not isinstance(t, App) or not is_ground(t):
        raise NonGround(f"{t} is not ground")
    alg = ra.algebra
    return ra.isredex(t.fun, tuple(alg.eval(a) for a in t.args))


def proper_subterms(t: Term) -> list[Term]:
    out = []
    if isinstance(t, App):
        for a in t.args:
            out.extend(subterms(a))
    return out


def recognised_rules(trs: Trs, mode: Mode) -> list[Rule]:
    if mode is Mode.LEFT_LINEAR:
        return [r for r in trs.rules if r.is_left_linear()]
    return list(trs.rules)


def build_uncored(trs: Trs, mode: Mode = Mode.LEFT_LINEAR) -> RedexAlgebra:
    """The pattern algebra before restricting to its core."""
    mode = Mode(mode)
    patterns = [cut(r.lhs) for r in recognised_rules(trs, mode)]
    seeds = [s for p in patterns for s in proper_subterms(p)]
    pool = merge_closure(seeds)
    sig = trs.signature
    tables = {}
    redex: dict[Symbol, list[tuple]] = {}
    by_root: dict[Symbol, list[Term]] = {}
    for p in patterns:
        by_root.setdefault(p.fun, []).append(p)
    for f, n in sig.items():
        table = {}
        for args in itertools.product(pool, repeat=n):
            t = App(f, args)
            table[args] = shrink(t, pool)
            if any(bot_match(p, t) for p in by_root.get(f, ())):
                redex.setdefault(f, []).append(args)
        tables[f] = table
    return RedexAlgebra(FiniteAlgebra(pool, tables, dict(sig)), redex)


def build(trs: Trs, mode: Mode | str = Mode.LEFT_LINEAR) -> RedexAlgebra:
    """The redex-algebra of ``trs`` restricted to its core."""
    ra = build_uncored(trs, Mode(mode))
    return ra.restrict(core(ra.algebra).domain)


# ---------------------------------------------------------------- minimization


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[Element, ...], ...]

    def block_of(self, e: Element) -> tuple[Element, ...]:
        for b in self.blocks:
            if e in b:
                return b
        raise KeyError(e)

    def as_sets(self) -> set[frozenset]:
        return {frozenset(b) for b in self.blocks}

    def __len__(self):
        return len(self.blocks)


def _slot_contexts(alg: FiniteAlgebra):
    """(f, slot, surrounding values) triples, in canonical order."""
    for f, n in alg.arities.items():
        if f is TOP:
            continue
        for i in range(n):
            for rest in itertools.product(alg.domain, repeat=n - 1):
                yield f, rest[:i], rest[i:]


def coarsest_partition(ra: RedexAlgebra) -> Partition:
    alg = ra.algebra
    slots = list(_slot_contexts(alg))
    sig0 = {
        e: tuple(ra.isredex(f, pre + (e,) + post) for f, pre, post in slots)
        for e in alg.domain
    }
    cls = _classes(alg.domain, sig0)
    while True:
        sig = {
            e: (cls[e],) + tuple(cls[alg.apply(f, pre + (e,) + post)] for f, pre, post in slots)
            for e in alg.domain
        }
        refined = _classes(alg.domain, sig)
        if len(set(refined.values())) == len(set(cls.values())):
            break
        cls = refined
    blocks: dict[int, list[Element]] = {}
    for e in alg.domain:
        blocks.setdefault(cls[e], []).append(e)
    return Partition(tuple(tuple(b) for b in blocks.values()))


def _classes(domain: Sequence[Element], signature: Mapping[Element, tuple]) -> dict[Element, int]:
    ids: dict[tuple, int] = {}
    return {e: ids.setdefault(signature[e], len(ids)) for e in domain}


def _element_key(alg: FiniteAlgebra, e: Element):
    return term_key(e) if isinstance(e, App) else (alg.order(e),)


def minimize(ra: RedexAlgebra) -> RedexAlgebra:
    """Quotient by the coarsest interp-stable refinement of redex-indistinguishability."""
    alg = ra.algebra
    if not is_core(alg):
        raise NotCore("minimization expects a core algebra")
    part = coarsest_partition(ra)
    rep = {}
    for block in part.blocks:
        r = min(block, key=lambda e: _element_key(alg, e))
        for e in block:
            rep[e] = r
    domain = [e for e in alg.domain if rep[e] == e]
    tables = {
        f: {args: rep[alg.apply(f, args)] for args in itertools.product(domain, repeat=n)}
        for f, n in alg.arities.items()
    }
    redex = {f: [a for a in ts if all(rep[x] == x for x in a)] for f, ts in ra.redex.items()}
    return RedexAlgebra(FiniteAlgebra(domain, tables, alg.arities), redex)


def find_isomorphism(a: RedexAlgebra | FiniteAlgebra, b: RedexAlgebra | FiniteAlgebra) -> dict | None:
    """A bijection preserving every interpretation (and redex predicate when both carry one)."""
    ra = a if isinstance(a, RedexAlgebra) else None
    rb = b if isinstance(b, RedexAlgebra) else None
    alg_a = a.algebra if ra else a
    alg_b = b.algebra if rb else b
    if len(alg_a) != len(alg_b) or alg_a.arities != alg_b.arities:
        return None
    dom_a = alg_a.domain
    for perm in itertools.permutations(alg_b.domain):
        h = dict(zip(dom_a, perm))
        if _homomorphic(alg_a, alg_b, h) and (
            ra is None or rb is None or _redex_preserved(ra, rb, h)
        ):
            return h
    return None


def _homomorphic(a: FiniteAlgebra, b: FiniteAlgebra, h: dict) -> bool:
    for f, table in a.tables.items():
        tb = b.tables[f]
        for args, v in table.items():
            if tb[tuple(h[x] for x in args)] != h[v]:
                return False
    return True


def _redex_preserved(ra: RedexAlgebra, rb: RedexAlgebra, h: dict) -> bool:
    for f, ts in ra.redex.items():
        if {tuple(h[x] for x in a) for a in ts} != set(rb.redex.get(f, ())):
            return False
    return True
