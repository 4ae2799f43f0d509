"""Bounded evidence for the transformations: simulation checks, redex recognition, derivation search.

Nothing here proves anything. Every report says how far it looked.
"""

from __future__ import annotations

import sys
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .algebra import check_cmodel
from .labeling import CLabeling, erase_top
from .redexalg import Mode, RedexAlgebra, in_language, recognised_rules
from .symbols import Up
from .term import (
    App,
    CsTrs,
    GroundTerms,
    Position,
    Rule,
    Term,
    Trs,
    apply_subst,
    format_position,
    is_linear,
    is_redex,
    match,
    mu_positions,
    outermost_successors,
    replace_at,
    subterm_at,
)
from .transform import is_relabel_rule

DEFAULT_SEED_SIZE = 6
DEFAULT_NODE_CAP = 100_000


# ---------------------------------------------------------------- quasi-left-linearity


def is_quasi_left_linear(trs: Trs) -> bool:
    linear = [r.lhs for r in trs.rules if is_linear(r.lhs)]
    return all(
        is_linear(r.lhs) or any(match(p, r.lhs) is not None for p in linear) for r in trs.rules
    )


# ---------------------------------------------------------------- seeds and steps


def default_seeds(trs: Trs, bound: int = DEFAULT_SEED_SIZE, cap: int = DEFAULT_NODE_CAP) -> list[Term]:
    out = []
    for t in GroundTerms(trs.signature).up_to(bound):
        if len(out) >= cap:
            break
        out.append(t)
    return out


@dataclass(frozen=True)
class Step:
    position: Position
    rule: Rule
    result: Term


def mu_steps(cs: CsTrs, t: Term, rules: Iterable[Rule] | None = None) -> Iterator[Step]:
    """Every μ-step from ``t``, with the rule used."""
    pool = cs.rules if rules is None else tuple(rules)
    by_root: dict = {}
    for r in pool:
        by_root.setdefault(r.lhs.fun, []).append(r)
    for p in mu_positions(cs.mu, t):
        s = subterm_at(t, p)
        if not isinstance(s, App):
            continue
        for r in by_root.get(s.fun, ()):
            sigma = match(r.lhs, s)
            if sigma is not None:
                yield Step(p, r, replace_at(t, p, apply_subst(sigma, r.rhs)))


# ---------------------------------------------------------------- reports


@dataclass
class Failure:
    seed: Term
    detail: str
    path: tuple[Term, ...] = ()

    def __str__(self):
        trail = " ⇒ ".join(map(str, self.path))
        return f"seed {self.seed}: {self.detail}" + (f" [{trail}]" if trail else "")


@dataclass
class SimulationReport:
    check: str
    seed_bound: int | None
    seeds: int = 0
    steps: int = 0
    failures: list[Failure] = field(default_factory=list)
    histogram: Counter = field(default_factory=Counter)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        d = {
            "check": self.check,
            "passed": self.passed,
            "seed_bound": self.seed_bound,
            "seeds": self.seeds,
            "steps": self.steps,
            "failures": len(self.failures),
        }
        if self.histogram:
            d["histogram"] = dict(sorted(self.histogram.items()))
        if self.failures:
            d["first_failure"] = str(self.failures[0])
        return d

    def lines(self) -> list[str]:
        scope = f"seeds up to size {self.seed_bound}" if self.seed_bound is not None else "given seeds"
        verdict = "verified" if self.passed else "FAILED"
        out = [f"{self.check}: {verdict} up to bound ({scope}; {self.seeds} seeds, {self.steps} steps)"]
        if self.histogram:
            out.append("  histogram: " + ", ".join(f"{k}:{v}" for k, v in sorted(self.histogram.items())))
        out.extend(f"  note: {n}" for n in self.notes)
        out.extend(f"  failure: {f}" for f in self.failures[:10])
        if len(self.failures) > 10:
            out.append(f"  ... {len(self.failures) - 10} more failures")
        return out


def _seed_list(trs: Trs, seeds, bound):
    if seeds is None:
        return default_seeds(trs, bound), bound
    return sorted(seeds, key=lambda t: (t.size, str(t))), None


# ---------------------------------------------------------------- forward simulation


def check_cxtext_simulation(
    trs: Trs, cl: CLabeling, out: CsTrs, seeds: Sequence[Term] | None = None, bound: int = DEFAULT_SEED_SIZE
) -> SimulationReport:
    """Each outermost step s → t must become exactly one μ-step lab(⊤s) → lab(⊤t)."""
    seeds, seed_bound = _seed_list(trs, seeds, bound)
    rep = SimulationReport("context-extension simulation", seed_bound, len(seeds))
    for s in seeds:
        succ = None
        for p, t in sorted(outermost_successors(trs, s), key=lambda pt: (pt[0], str(pt[1]))):
            rep.steps += 1
            if succ is None:
                succ = {st.result for st in mu_steps(out, cl.label_top(s))}
            if cl.label_top(t) not in succ:
                rep.failures.append(
                    Failure(s, f"outermost step at {format_position(p)} to {t} has no single μ-step image")
                )
    return rep


def check_dynlab_simulation(
    trs: Trs,
    cl: CLabeling,
    out: CsTrs,
    seeds: Sequence[Term] | None = None,
    bound: int = DEFAULT_SEED_SIZE,
    slack: int = 2,
) -> SimulationReport:
    """Each outermost step s → t must become one labeled-rule μ-step then m ≤ c-depth relabel steps.

    The histogram counts the least m found per step. The relabel search goes ``slack``
    steps past the c-depth so that a too-long m is reported as such rather than as missing.
    """
    seeds, seed_bound = _seed_list(trs, seeds, bound)
    base = cl.algebra.without(cl.top) if cl.top in cl.algebra.arities else cl.algebra
    depth = check_cmodel(base, trs).trs_cdepth
    org = [r for r in out.rules if not is_relabel_rule(r)]
    relabel = [r for r in out.rules if is_relabel_rule(r)]
    rep = SimulationReport("dynamic-labeling simulation", seed_bound, len(seeds))
    rep.notes.append(f"c-depth bound {depth}")
    memo: dict[Term, dict[Term, int]] = {}
    limit = (depth or 0) + slack
    for s in seeds:
        start = cl.label_top(s)
        for p, t in sorted(outermost_successors(trs, s), key=lambda pt: (pt[0], str(pt[1]))):
            rep.steps += 1
            goal = cl.label_top(t)
            best = None
            for st in mu_steps(out, start, org):
                dist = memo.get(st.result)
                if dist is None:
                    dist = memo[st.result] = _relabel_distances(out, relabel, st.result, limit)
                m = dist.get(goal)
                if m is not None and (best is None or m < best):
                    best = m
            if best is None:
                rep.failures.append(Failure(s, f"outermost step at {format_position(p)} to {t} is not simulated"))
            else:
                rep.histogram[best] += 1
                if depth is None or best > depth:
                    rep.failures.append(Failure(s, f"step to {t} needs {best} relabel steps, bound is {depth}"))
    return rep


def _relabel_distances(out: CsTrs, relabel: list[Rule], start: Term, limit: int) -> dict[Term, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if dist[u] >= limit:
            continue
        for st in mu_steps(out, u, relabel):
            if st.result not in dist:
                dist[st.result] = dist[u] + 1
                queue.append(st.result)
    return dist


# ---------------------------------------------------------------- reverse simulation


def _outermost_results(trs: Trs, t: Term, cache: dict) -> set[Term]:
    got = cache.get(t)
    if got is None:
        got = cache[t] = {u for _, u in outermost_successors(trs, t)}
    return got


def check_reverse_simulation(
    trs: Trs,
    cl: CLabeling,
    out: CsTrs,
    seeds: Sequence[Term] | None = None,
    bound: int = DEFAULT_SEED_SIZE,
    depth: int = 3,
) -> SimulationReport:
    """Every μ-step reachable within ``depth`` steps of a seed image must erase to an outermost step.

    Terms reached along the way are also checked for correct labeling. The first mislabeled term
    on a failing path is named in the failure, since that is where the simulation breaks down.
    """
    seeds, seed_bound = _seed_list(trs, seeds, bound)
    rep = SimulationReport("reverse simulation", seed_bound, len(seeds))
    rep.notes.append(f"μ-derivations explored to depth {depth}")
    cache: dict = {}
    checked: set[tuple[Term, Term]] = set()
    for s in seeds:
        start = cl.label_top(s)
        parent: dict[Term, Term | None] = {start: None}
        frontier = [start]
        for _ in range(depth):
            nxt = []
            for u in frontier:
                eu = erase_top(u, cl.top)
                for st in mu_steps(out, u):
                    v = st.result
                    if (u, v) not in checked:
                        checked.add((u, v))
                        rep.steps += 1
                        ev = erase_top(v, cl.top)
                        if ev not in _outermost_results(trs, eu, cache):
                            path = _path(parent, u) + (v,)
                            rep.failures.append(
                                Failure(s, _reverse_detail(cl, path, st), path)
                            )
                            rep.histogram["non-outermost"] += 1
                        else:
                            rep.histogram["outermost"] += 1
                    if v not in parent:
                        parent[v] = u
                        nxt.append(v)
            frontier = nxt
    return rep


def _path(parent: dict, u: Term) -> tuple[Term, ...]:
    out = []
    while u is not None:
        out.append(u)
        u = parent[u]
    return tuple(reversed(out))


def _reverse_detail(cl: CLabeling, path: tuple[Term, ...], st: Step) -> str:
    msg = f"μ-step at {format_position(st.position)} with {st.rule} erases to a non-outermost step"
    for k, u in enumerate(path):
        if u != cl.label_top(erase_top(u, cl.top)):
            return msg + f"; term {k + 1} of the derivation ({u}) is labeled incorrectly"
    return msg


# ---------------------------------------------------------------- derivation search


@dataclass(frozen=True)
class LongestDerivation:
    longest: int
    path: tuple[Term, ...]
    exhausted: bool = True
    explored: int = 0

    def __str__(self):
        state = "exhausted" if self.exhausted else "node cap reached"
        return f"longest derivation {self.longest} ({state}, {self.explored} terms explored)"


@dataclass(frozen=True)
class ExceededBound:
    witness: tuple[Term, ...]
    explored: int = 0

    @property
    def length(self) -> int:
        return len(self.witness) - 1

    def __str__(self):
        return f"derivation of length {self.length} found ({self.explored} terms explored)"


class _CapReached(Exception):
    pass


def bounded_explore(
    cs: CsTrs, seeds: Iterable[Term], max_len: int = 100, node_cap: int = DEFAULT_NODE_CAP
) -> LongestDerivation | ExceededBound:
    """Depth-first search of μ-derivations, memoized on terms.

    Returns a derivation of length ``max_len`` as soon as one exists, otherwise the longest
    derivation from any seed.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    exact: dict[Term, int] = {}
    best: dict[Term, Term | None] = {}
    stack: list[Term] = []
    count = [0]

    def longest(t: Term, depth: int) -> int | None:
        # None signals that depth + longest(t) reached max_len; the stack holds the witness
        if t in exact:
            if depth + exact[t] >= max_len:
                stack.append(t)
                return None
            return exact[t]
        if depth >= max_len:
            stack.append(t)
            return None
        count[0] += 1
        if count[0] > node_cap:
            raise _CapReached
        stack.append(t)
        top, arg = 0, None
        for st in mu_steps(cs, t):
            n = longest(st.result, depth + 1)
            if n is None:
                return None
            if arg is None or n + 1 > top:
                top, arg = n + 1, st.result
        stack.pop()
        exact[t] = top
        best[t] = arg
        return top

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * max_len + 1000))
    champion: tuple[int, Term | None] = (-1, None)
    try:
        for s in seeds:
            stack.clear()
            n = longest(s, 0)
            if n is None:
                return ExceededBound(tuple(_extend_witness(stack, exact, best, max_len)), count[0])
            if n > champion[0]:
                champion = (n, s)
    except _CapReached:
        n, s = champion
        return LongestDerivation(max(n, 0), _follow(s, best) if s is not None else (), False, count[0])
    finally:
        sys.setrecursionlimit(old)
    n, s = champion
    return LongestDerivation(max(n, 0), _follow(s, best) if s is not None else (), True, count[0])


def _follow(t: Term, best: dict) -> tuple[Term, ...]:
    out = [t]
    while best.get(t) is not None:
        t = best[t]
        out.append(t)
    return tuple(out)


def _extend_witness(stack: list[Term], exact: dict, best: dict, max_len: int) -> list[Term]:
    path = list(stack)
    # the search may have stopped at a memoized term; continue along its best successors
    while len(path) - 1 < max_len and best.get(path[-1]) is not None:
        path.append(best[path[-1]])
    return path


def arrow_free(t: Term) -> bool:
    return not any(isinstance(s.fun, Up) for s in _apps(t))


def _apps(t: Term):
    if isinstance(t, App):
        yield t
        for a in t.args:
            yield from _apps(a)


# ---------------------------------------------------------------- recognition


@dataclass
class RecognitionReport:
    bound: int
    mode: Mode
    checked: int = 0
    sound: bool = True
    complete: bool = True
    unsound_witness: Term | None = None
    incomplete_witness: Term | None = None
    mismatches: int = 0

    @property
    def exact(self) -> bool:
        return self.sound and self.complete

    def as_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "bound": self.bound,
            "checked": self.checked,
            "sound": self.sound,
            "complete": self.complete,
            "mismatches": self.mismatches,
            "unsound_witness": str(self.unsound_witness) if self.unsound_witness else None,
            "incomplete_witness": str(self.incomplete_witness) if self.incomplete_witness else None,
        }

    def lines(self) -> list[str]:
        out = [
            f"recognition ({self.mode.value}): sound={'yes' if self.sound else 'no'}, "
            f"complete={'yes' if self.complete else 'no'}; verified up to size {self.bound} "
            f"({self.checked} ground terms, {self.mismatches} mismatches)"
        ]
        if self.unsound_witness is not None:
            out.append(f"  recognised but not a redex: {self.unsound_witness}")
        if self.incomplete_witness is not None:
            out.append(f"  redex not recognised: {self.incomplete_witness}")
        return out


def check_recognition(
    trs: Trs, ra: RedexAlgebra, bound: int = 7, mode: Mode | str = Mode.LEFT_LINEAR
) -> RecognitionReport:
    """Compare the algebra's language with actual redexes on all ground terms up to ``bound``.

    In left-linear mode only the left-linear rules count as defining redexes.
    """
    mode = Mode(mode)
    target = trs.restrict(recognised_rules(trs, mode))
    rep = RecognitionReport(bound, mode)
    for t in GroundTerms(trs.signature).up_to(bound):
        rep.checked += 1
        got = in_language(ra, t)
        want = is_redex(target, t)
        if got and not want:
            rep.sound = False
            rep.mismatches += 1
            rep.unsound_witness = rep.unsound_witness or t
        elif want and not got:
            rep.complete = False
            rep.mismatches += 1
            rep.incomplete_witness = rep.incomplete_witness or t
    return rep


def languages_agree(a: RedexAlgebra, b: RedexAlgebra, sig, bound: int = 7) -> Term | None:
    """First ground term (up to ``bound``) on which the two languages differ, if any."""
    for t in GroundTerms(sig).up_to(bound):
        if in_language(a, t) != in_language(b, t):
            return t
    return None
