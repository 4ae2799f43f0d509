"""First-order terms, contexts, rules, and plain / outermost / context-sensitive rewriting.

Symbols are arbitrary hashable values. Plain input symbols are strings; the
labeling and transform modules introduce structured symbols (labeled symbols,
the top marker, relabel arrows). Every symbol must have a stable ``str`` and may
provide a ``sort_key`` attribute that overrides ``str`` for canonical ordering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .symbols import TOP

Symbol = Hashable
Position = tuple[int, ...]

EPSILON: Position = ()


class TermError(Exception):
    pass


class InvalidPosition(TermError):
    pass


class UnknownSymbol(TermError):
    pass


class ArityMismatch(TermError):
    pass


class IllFormedRule(TermError):
    pass


def symbol_key(sym: Symbol) -> str:
    key = getattr(sym, "sort_key", None)
    return key if key is not None else str(sym)


class Term:
    """Base class of Var, App and the context hole."""

    __slots__ = ()

    def is_var(self) -> bool:
        return False


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("V", name))

    def is_var(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return 1

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class _Hole(Term):
    __slots__ = ()
    size = 1

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return 0x5A5A

    def __repr__(self):
        return "HOLE"

    def __str__(self):
        return "□"


HOLE = _Hole()


class App(Term):
    """Application ``fun(args...)``. Hash and size are cached at construction."""

    __slots__ = ("fun", "args", "_hash", "size")

    def __init__(self, fun: Symbol, args: Sequence[Term] = ()):
        self.fun = fun
        self.args = tuple(args)
        self._hash = hash((fun, self.args))
        self.size = 1 + sum(a.size for a in self.args)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.fun == other.fun
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.fun!r}, {list(self.args)!r})"

    def __str__(self):
        if not self.args:
            return str(self.fun)
        return f"{self.fun}({','.join(str(a) for a in self.args)})"


def const(name: Symbol) -> App:
    return App(name, ())


def term_key(t: Term) -> tuple:
    """Canonical order: symbol name, then children lexicographically."""
    if isinstance(t, App):
        return (1, symbol_key(t.fun), tuple(term_key(a) for a in t.args))
    if isinstance(t, Var):
        return (0, t.name, ())
    return (-1, "", ())


def size_key(t: Term) -> tuple:
    return (t.size, term_key(t))


# ---------------------------------------------------------------- signatures


class Signature(Mapping):
    """Immutable map from symbol to arity."""

    def __init__(self, symbols: Mapping[Symbol, int] | Iterable[tuple[Symbol, int]] = ()):
        items = dict(symbols)
        for f, n in items.items():
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"bad arity {n!r} for {f}")
        self._arity = dict(sorted(items.items(), key=lambda kv: symbol_key(kv[0])))
        self._hash = hash(frozenset(self._arity.items()))

    def arity(self, f: Symbol) -> int:
        try:
            return self._arity[f]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {f}") from None

    def __getitem__(self, f):
        return self._arity[f]

    def __iter__(self):
        return iter(self._arity)

    def __len__(self):
        return len(self._arity)

    def __eq__(self, other):
        return isinstance(other, Signature) and self._arity == other._arity

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Signature({" + ", ".join(f"{f}/{n}" for f, n in self._arity.items()) + "})"

    def constants(self) -> list[Symbol]:
        return [f for f, n in self._arity.items() if n == 0]

    def union(self, other: Mapping[Symbol, int]) -> "Signature":
        merged = dict(self._arity)
        for f, n in other.items():
            if f in merged and merged[f] != n:
                raise ArityMismatch(f"{f} used with arities {merged[f]} and {n}")
            merged[f] = n
        return Signature(merged)

    def check(self, t: Term) -> None:
        for s in subterms(t):
            if isinstance(s, App):
                if self.arity(s.fun) != len(s.args):
                    raise ArityMismatch(f"{s.fun} expects {self.arity(s.fun)} arguments in {t}")


def signature_of(terms: Iterable[Term]) -> Signature:
    ar: dict[Symbol, int] = {}
    for t in terms:
        for s in subterms(t):
            if isinstance(s, App):
                if ar.setdefault(s.fun, len(s.args)) != len(s.args):
                    raise ArityMismatch(f"{s.fun} used with arities {ar[s.fun]} and {len(s.args)}")
    return Signature(ar)


# ---------------------------------------------------------------- traversal


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.extend(reversed(s.args))


def positions(t: Term) -> list[Position]:
    """All positions of ``t`` in pre-order."""
    out: list[Position] = []

    def go(s: Term, p: Position):
        out.append(p)
        if isinstance(s, App):
            for i, a in enumerate(s.args, 1):
                go(a, p + (i,))

    go(t, EPSILON)
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"position {format_position(p)} not in term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    if not isinstance(t, App) or not 1 <= p[0] <= len(t.args):
        raise InvalidPosition(f"position {format_position(p)} not in term")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], p[1:], s)
    return App(t.fun, args)


def format_position(p: Position) -> str:
    return "ε" if not p else "·".join(map(str, p))


def variables(t: Term) -> list[str]:
    """Variable names in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}
    for s in subterms(t):
        if isinstance(s, Var):
            seen.setdefault(s.name)
    return list(seen)


def is_ground(t: Term) -> bool:
    return not any(isinstance(s, (Var, _Hole)) for s in subterms(t))


def is_linear(t: Term) -> bool:
    names = [s.name for s in subterms(t) if isinstance(s, Var)]
    return len(names) == len(set(names))


def symbols_of(t: Term) -> set[Symbol]:
    return {s.fun for s in subterms(t) if isinstance(s, App)}


def map_symbols(t: Term, fn: Callable[[Symbol], Symbol]) -> Term:
    if isinstance(t, App):
        return App(fn(t.fun), [map_symbols(a, fn) for a in t.args])
    return t


# ---------------------------------------------------------------- substitution


Substitution = Mapping[str, Term]


def apply_subst(sigma: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, App):
        if not t.args:
            return t
        return App(t.fun, [apply_subst(sigma, a) for a in t.args])
    return t


def rename(t: Term, names: Mapping[str, str]) -> Term:
    return apply_subst({k: Var(v) for k, v in names.items()}, t)


def match(pattern: Term, subject: Term, sigma: dict | None = None) -> dict[str, Term] | None:
    """Return ``σ`` with ``σ(pattern) = subject`` or None. Non-linear variables must agree."""
    sigma = {} if sigma is None else sigma
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif isinstance(p, App):
            if not isinstance(s, App) or p.fun != s.fun or len(p.args) != len(s.args):
                return None
            stack.extend(zip(p.args, s.args))
        elif p is not s:
            return None
    return sigma


# ---------------------------------------------------------------- contexts


@dataclass(frozen=True)
class Context:
    """A term with exactly one occurrence of the hole."""

    term: Term

    def __post_init__(self):
        holes = [s for s in subterms(self.term) if s is HOLE]
        if len(holes) != 1:
            raise ValueError(f"context must contain exactly one hole, found {len(holes)}")

    @cached_property
    def hole_position(self) -> Position:
        for p in positions(self.term):
            if subterm_at(self.term, p) is HOLE:
                return p
        raise AssertionError("unreachable")

    @property
    def depth(self) -> int:
        return len(self.hole_position)

    def fill(self, t: Term) -> Term:
        return replace_at(self.term, self.hole_position, t)

    def variables(self) -> list[str]:
        return variables(self.term)

    def __str__(self):
        return str(self.term)


HOLE_CONTEXT = Context(HOLE)


def fill(c: Context, t: Term) -> Term:
    return c.fill(t)


def context_at(t: Term, p: Position) -> Context:
    subterm_at(t, p)
    return Context(replace_at(t, p, HOLE))


class FreshNames:
    """Per-session fresh variable supply. Names avoid everything passed to ``avoid``."""

    def __init__(self, avoid: Iterable[str] = (), prefix: str = "y"):
        self._used = set(avoid)
        self._prefix = prefix
        self._counter = itertools.count(1)

    def avoid(self, names: Iterable[str]) -> None:
        self._used.update(names)

    def __call__(self) -> str:
        while True:
            name = f"{self._prefix}{next(self._counter)}"
            if name not in self._used:
                self._used.add(name)
                return name


def _arg_symbols(sig: Mapping[Symbol, int]) -> list[tuple[Symbol, int]]:
    return [(f, n) for f, n in sorted(sig.items(), key=lambda kv: symbol_key(kv[0])) if n > 0]


def enumerate_flat_contexts(
    sig: Mapping[Symbol, int],
    avoid: Iterable[str] = (),
    include_top: bool = False,
    top: Symbol | None = None,
    fresh: FreshNames | None = None,
) -> list[Context]:
    """``f(x1,..,□,..,xn)`` for every symbol and slot, sibling variables fresh and distinct."""
    fresh = fresh or FreshNames(avoid)
    fresh.avoid(avoid)
    out = []
    for f, n in _arg_symbols(sig):
        for i in range(n):
            args = [HOLE if j == i else Var(fresh()) for j in range(n)]
            out.append(Context(App(f, args)))
    if include_top:
        out.append(Context(App(TOP if top is None else top, [HOLE])))
    return out


def enumerate_thin_contexts(
    sig: Mapping[Symbol, int],
    depth: int,
    avoid: Iterable[str] = (),
    fresh: FreshNames | None = None,
) -> list[Context]:
    """All thin contexts of exactly ``depth``; the outermost symbol varies slowest."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    fresh = fresh or FreshNames(avoid)
    fresh.avoid(avoid)
    shapes: list[list[tuple[Symbol, int, int]]] = [[]]
    steps = [(f, n, i) for f, n in _arg_symbols(sig) for i in range(n)]
    for _ in range(depth):
        shapes = [s + [step] for s in shapes for step in steps]
    out = []
    for shape in shapes:
        t: Term = HOLE
        for f, n, i in reversed(shape):
            t = App(f, [t if j == i else Var(fresh()) for j in range(n)])
        out.append(Context(t))
    return out


# ---------------------------------------------------------------- rules


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if not isinstance(self.lhs, App):
            raise IllFormedRule(f"left-hand side of {self} is a variable")
        extra = set(variables(self.rhs)) - set(variables(self.lhs))
        if extra:
            raise IllFormedRule(f"rule {self} has unbound right-hand side variables {sorted(extra)}")

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"

    def is_left_linear(self) -> bool:
        return is_linear(self.lhs)

    def is_collapsing(self) -> bool:
        return isinstance(self.rhs, Var)

    def variables(self) -> list[str]:
        return variables(self.lhs)


def canonical_rule(rule: Rule) -> Rule:
    """Variables renamed by first occurrence; equal results mean equal modulo renaming."""
    names = {v: f"_{i}" for i, v in enumerate(variables(rule.lhs))}
    return Rule(rename(rule.lhs, names), rename(rule.rhs, names))


def dedup_rules(rules: Iterable[Rule]) -> list[Rule]:
    seen = set()
    out = []
    for r in rules:
        k = canonical_rule(r)
        if k not in seen:
            seen.add(k)
            out.append(r)
    return out


@dataclass(frozen=True)
class Trs:
    signature: Signature
    rules: tuple[Rule, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        for r in self.rules:
            self.signature.check(r.lhs)
            self.signature.check(r.rhs)

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], extra: Mapping[Symbol, int] = ()) -> "Trs":
        rules = tuple(rules)
        sig = signature_of([t for r in rules for t in (r.lhs, r.rhs)]).union(dict(extra))
        return cls(sig, rules)

    @cached_property
    def by_root(self) -> dict[Symbol, tuple[Rule, ...]]:
        idx: dict[Symbol, list[Rule]] = {}
        for r in self.rules:
            idx.setdefault(r.lhs.fun, []).append(r)
        return {k: tuple(v) for k, v in idx.items()}

    def is_left_linear(self) -> bool:
        return all(r.is_left_linear() for r in self.rules)

    def restrict(self, rules: Iterable[Rule]) -> "Trs":
        return Trs(self.signature, tuple(rules))

    def variable_names(self) -> set[str]:
        return {v for r in self.rules for v in variables(r.lhs)}

    def __str__(self):
        return "\n".join(str(r) for r in self.rules)


def rules_at(trs: Trs, t: Term) -> Iterator[tuple[Rule, dict]]:
    if not isinstance(t, App):
        return
    for r in trs.by_root.get(t.fun, ()):
        sigma = match(r.lhs, t)
        if sigma is not None:
            yield r, sigma


def is_redex(trs: Trs, t: Term) -> bool:
    return any(True for _ in rules_at(trs, t))


def contract(trs: Trs, t: Term) -> list[Term]:
    return [apply_subst(sigma, r.rhs) for r, sigma in rules_at(trs, t)]


def rewrite_successors(trs: Trs, t: Term) -> set[tuple[Position, Term]]:
    out = set()
    for p in positions(t):
        for u in contract(trs, subterm_at(t, p)):
            out.add((p, replace_at(t, p, u)))
    return out


def outermost_successors(trs: Trs, t: Term) -> set[tuple[Position, Term]]:
    """Steps at redex positions with no redex strictly above; all matching rules are reported."""
    out: set[tuple[Position, Term]] = set()

    def go(s: Term, p: Position):
        results = contract(trs, s)
        if results:
            for u in results:
                out.add((p, replace_at(t, p, u)))
            return
        if isinstance(s, App):
            for i, a in enumerate(s.args, 1):
                go(a, p + (i,))

    go(t, EPSILON)
    return out


# ---------------------------------------------------------------- context-sensitive


class ReplacementMap(Mapping):
    """``μ``: symbol → allowed argument indices (1-based). Unlisted symbols are unrestricted."""

    def __init__(self, allowed: Mapping[Symbol, Iterable[int]] = ()):
        self._allowed = {f: frozenset(v) for f, v in dict(allowed).items()}

    def allowed(self, f: Symbol, arity: int) -> frozenset[int] | range:
        got = self._allowed.get(f)
        return range(1, arity + 1) if got is None else got

    def __getitem__(self, f):
        return self._allowed[f]

    def __iter__(self):
        return iter(self._allowed)

    def __len__(self):
        return len(self._allowed)

    def __eq__(self, other):
        return isinstance(other, ReplacementMap) and self._allowed == other._allowed

    def __hash__(self):
        return hash(frozenset(self._allowed.items()))

    def __repr__(self):
        body = ", ".join(f"{f}: {sorted(v)}" for f, v in self._allowed.items())
        return f"ReplacementMap({{{body}}})"

    @classmethod
    def full(cls, sig: Mapping[Symbol, int]) -> "ReplacementMap":
        return cls({f: range(1, n + 1) for f, n in sig.items()})


def mu_positions(mu: ReplacementMap, t: Term) -> list[Position]:
    out: list[Position] = []

    def go(s: Term, p: Position):
        out.append(p)
        if isinstance(s, App):
            for i in mu.allowed(s.fun, len(s.args)):
                go(s.args[i - 1], p + (i,))

    go(t, EPSILON)
    return out


@dataclass(frozen=True)
class CsTrs:
    """A TRS with a replacement map. ``info`` carries construction statistics."""

    trs: Trs
    mu: ReplacementMap
    info: Mapping = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        sig = self.trs.signature
        norm = {}
        for f, n in sig.items():
            allowed = frozenset(self.mu.allowed(f, n))
            if any(not 1 <= i <= n for i in allowed):
                raise ValueError(f"replacement map for {f} exceeds its arity {n}")
            norm[f] = allowed
        object.__setattr__(self, "mu", ReplacementMap(norm))

    @property
    def rules(self) -> tuple[Rule, ...]:
        return self.trs.rules

    @property
    def signature(self) -> Signature:
        return self.trs.signature


def cs_successors(cs: CsTrs, t: Term) -> set[tuple[Position, Term]]:
    out = set()
    for p in mu_positions(cs.mu, t):
        for u in contract(cs.trs, subterm_at(t, p)):
            out.add((p, replace_at(t, p, u)))
    return out


# ---------------------------------------------------------------- enumeration


class GroundTerms:
    """Ground terms by exact size, each size bucket in canonical order. Memoized."""

    def __init__(self, sig: Mapping[Symbol, int]):
        self._sig = sorted(sig.items(), key=lambda kv: symbol_key(kv[0]))
        self._by_size: dict[int, list[Term]] = {}

    def of_size(self, n: int) -> list[Term]:
        if n < 1:
            return []
        got = self._by_size.get(n)
        if got is not None:
            return got
        out: list[Term] = []
        for f, k in self._sig:
            if k == 0:
                if n == 1:
                    out.append(App(f, ()))
                continue
            for split in _compositions(n - 1, k):
                pools = [self.of_size(m) for m in split]
                if any(not p for p in pools):
                    continue
                for args in itertools.product(*pools):
                    out.append(App(f, args))
        out.sort(key=term_key)
        self._by_size[n] = out
        return out

    def up_to(self, bound: int) -> Iterator[Term]:
        for n in range(1, bound + 1):
            yield from self.of_size(n)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_ground_terms(sig: Mapping[Symbol, int], bound: int) -> list[Term]:
    return list(GroundTerms(sig).up_to(bound))
