import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import trs
from outercs.term import (
    HOLE,
    App,
    ArityMismatch,
    Context,
    CsTrs,
    GroundTerms,
    IllFormedRule,
    InvalidPosition,
    ReplacementMap,
    Rule,
    Signature,
    Var,
    apply_subst,
    canonical_rule,
    context_at,
    cs_successors,
    dedup_rules,
    enumerate_flat_contexts,
    enumerate_thin_contexts,
    fill,
    is_redex,
    match,
    mu_positions,
    outermost_successors,
    positions,
    rewrite_successors,
    subterm_at,
    variables,
)
from outercs.symbols import TOP

a, b = App("a", []), App("b", [])
x, y, z = Var("x"), Var("y"), Var("z")


def f(*args):
    return App("f", list(args))


def g(*args):
    return App("g", list(args))


R0 = trs("(VAR x) (RULES a -> f(a) f(f(x)) -> b)")

SIG = {"f": 2, "g": 1, "a": 0, "b": 0}


def terms(max_leaves=8, with_vars=True):
    leaves = [st.just(a), st.just(b)]
    if with_vars:
        leaves += [st.just(x), st.just(y)]
    return st.recursive(
        st.one_of(*leaves),
        lambda kids: st.one_of(
            st.builds(lambda s: App("g", [s]), kids),
            st.builds(lambda s, t: App("f", [s, t]), kids, kids),
        ),
        max_leaves=max_leaves,
    )


# ---------------------------------------------------------------- positions


def test_positions_examples():
    assert positions(x) == [()]
    assert positions(App("f", [App("g", [x])])) == [(), (1,), (1, 1)]
    assert positions(a) == [()]


def test_subterm_at_examples():
    t = App("f", [App("g", [a])])
    assert subterm_at(t, (1,)) == App("g", [a])
    assert subterm_at(t, ()) == t
    with pytest.raises(InvalidPosition):
        subterm_at(x, (1,))


def test_apply_subst_examples():
    assert apply_subst({"x": a}, f(x, x)) == f(a, a)
    assert apply_subst({}, f(x, y)) == f(x, y)
    assert apply_subst({"x": g(y)}, f(x, z)) == f(g(y), z)


def test_fill_examples():
    assert fill(Context(App("f", [HOLE])), a) == App("f", [a])
    assert fill(Context(HOLE), f(a, b)) == f(a, b)
    c = Context(f(f(HOLE, x), y))
    assert fill(c, g(x)) == f(f(g(x), x), y)


def test_match_examples():
    assert match(App("f", [x]), App("f", [a])) == {"x": a}
    assert match(App("h", [x, x]), App("h", [a, b])) is None
    assert match(App("h", [x, x]), App("h", [a, a])) == {"x": a}


@given(terms(), terms(with_vars=False), terms(with_vars=False))
def test_match_recovers_substitution(lhs, s1, s2):
    sigma = {"x": s1, "y": s2}
    got = match(lhs, apply_subst(sigma, lhs))
    assert got is not None
    assert {v: got[v] for v in variables(lhs)} == {v: sigma[v] for v in variables(lhs)}


@given(terms())
def test_context_at_fill_roundtrip(t):
    for p in positions(t):
        assert fill(context_at(t, p), subterm_at(t, p)) == t


# ---------------------------------------------------------------- redexes and outermost steps


def test_is_redex_examples():
    assert is_redex(R0, a)
    assert not is_redex(R0, App("f", [a]))
    assert is_redex(R0, App("f", [App("f", [a])]))


def test_outermost_successors_examples():
    fa = App("f", [a])
    assert outermost_successors(R0, fa) == {((1,), App("f", [fa]))}
    assert outermost_successors(R0, App("f", [fa])) == {((), b)}
    assert outermost_successors(R0, b) == set()


def test_all_rules_reported_at_one_position():
    r = trs("(VAR x) (RULES f(x) -> a f(x) -> b)")
    assert {t for _, t in outermost_successors(r, App("f", [b]))} == {a, b}


QLL = trs("(VAR x y) (RULES g(f(x), x) -> g(g(x, x), x) g(x, y) -> y f(a) -> a)")


@settings(max_examples=200)
@given(terms(with_vars=False))
def test_outermost_is_restriction_of_rewriting(t):
    r = trs("(VAR x y) (RULES f(x, g(y)) -> g(f(y, x)) g(g(x)) -> a f(a, x) -> x)")
    out = outermost_successors(r, t)
    assert out <= rewrite_successors(r, t)
    for p, _ in out:
        assert not any(is_redex(r, subterm_at(t, p[:k])) for k in range(len(p)))
    # every redex position not below another redex contributes
    redex_pos = [p for p in positions(t) if is_redex(r, subterm_at(t, p))]
    top = {p for p in redex_pos if not any(q == p[: len(q)] and q != p for q in redex_pos)}
    assert {p for p, _ in out} == top


# ---------------------------------------------------------------- context-sensitive rewriting


def test_mu_positions_examples():
    mu = ReplacementMap({"cons": [1]})
    t = App("cons", [b, a])
    assert mu_positions(mu, t) == [(), (1,)]
    assert mu_positions(ReplacementMap({"f": []}), App("f", [a])) == [()]


@given(terms())
def test_mu_positions_full_and_subset(t):
    assert mu_positions(ReplacementMap(), t) == positions(t)
    assert set(mu_positions(ReplacementMap({"f": [2]}), t)) <= set(positions(t))


def test_cs_successors_example():
    cs = CsTrs(trs("(RULES a -> cons(b, a))"), ReplacementMap({"cons": [1]}))
    t = App("cons", [b, a])
    assert cs_successors(cs, t) == set()
    assert cs_successors(cs, a) == {((), t)}
    assert cs_successors(cs, x) == set()


# ---------------------------------------------------------------- contexts


def test_flat_contexts_examples():
    sig = {"f": 1, "g": 1, "c": 0}
    assert [c.term for c in enumerate_flat_contexts(sig)] == [App("f", [HOLE]), App("g", [HOLE])]
    two = enumerate_flat_contexts({"f": 2}, avoid={"x"})
    assert [c.hole_position for c in two] == [(1,), (2,)]
    for c in two:
        assert "x" not in c.variables()
    tops = enumerate_flat_contexts({"f": 1}, include_top=True)
    assert [c.term for c in tops] == [App("f", [HOLE]), App(TOP, [HOLE])]


def test_flat_contexts_depth_one_distinct_fresh():
    cs = enumerate_flat_contexts({"f": 3, "g": 2}, avoid={"y1", "x"})
    assert len(cs) == 5
    for c in cs:
        assert c.depth == 1
        vs = c.variables()
        assert len(vs) == len(set(vs)) and not {"y1", "x"} & set(vs)


def test_thin_contexts_examples():
    sig = {"c": 0, "f": 1, "g": 1}
    assert [c.term for c in enumerate_thin_contexts(sig, 1)] == [App("f", [HOLE]), App("g", [HOLE])]
    two = {str(c.term) for c in enumerate_thin_contexts(sig, 2)}
    assert two == {"f(f(□))", "f(g(□))", "g(f(□))", "g(g(□))"}
    assert [c.term for c in enumerate_thin_contexts(sig, 0)] == [HOLE]


def test_thin_contexts_count_and_shape():
    sig = {"f": 2, "g": 1, "a": 0}
    for d in range(4):
        cs = enumerate_thin_contexts(sig, d)
        assert len(cs) == 3**d  # slots: f/1, f/2, g/1
        for c in cs:
            assert c.depth == d
            # one non-variable symbol per level: every sibling of the path is a variable
            t, p = c.term, c.hole_position
            for k in range(len(p)):
                node = subterm_at(t, p[:k])
                for i, arg in enumerate(node.args, 1):
                    if i != p[k]:
                        assert isinstance(arg, Var)


# ---------------------------------------------------------------- rules and enumeration


def test_ill_formed_rules():
    with pytest.raises(IllFormedRule):
        Rule(x, a)
    with pytest.raises(IllFormedRule):
        Rule(App("f", [x]), App("g", [x, y]))


def test_dedup_modulo_renaming():
    r1 = Rule(App("f", [x, y]), y)
    r2 = Rule(App("f", [z, x]), x)
    r3 = Rule(App("f", [x, y]), x)
    assert canonical_rule(r1) == canonical_rule(r2)
    assert dedup_rules([r1, r2, r3]) == [r1, r3]


def test_signature_arity_check():
    sig = Signature({"f": 1})
    with pytest.raises(ArityMismatch):
        sig.check(App("f", [a, b]))


def _count_terms(sig, n, memo={}):
    # independent oracle: number of ground terms of size exactly n
    key = (tuple(sorted(sig.items())), n)
    if key in memo:
        return memo[key]
    total = 0
    for sym, k in sig.items():
        if k == 0:
            total += n == 1
            continue
        for split in itertools.product(range(1, n), repeat=k):
            if sum(split) == n - 1:
                prod = 1
                for s in split:
                    prod *= _count_terms(sig, s)
                total += prod
    memo[key] = total
    return total


@pytest.mark.parametrize("sig", [SIG, {"f": 1, "g": 1, "c": 0}, {"h": 3, "a": 0, "s": 1}])
def test_ground_enumeration_counts(sig):
    gt = GroundTerms(sig)
    for n in range(1, 8):
        got = gt.of_size(n)
        assert len(got) == len(set(got)) == _count_terms(sig, n)
        assert all(t.size == n for t in got)
