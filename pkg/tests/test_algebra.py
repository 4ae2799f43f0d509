import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import trs
from outercs import fixtures
from outercs.algebra import (
    EmptyCore,
    FiniteAlgebra,
    NotACModel,
    PartialInterpretation,
    SymbolClash,
    cdepth,
    check_cmodel,
    core,
    eval_term,
    extend_with_top,
    ground_witnesses,
    is_core,
)
from outercs.symbols import TOP
from outercs.term import App, Rule, Var, apply_subst, enumerate_ground_terms, enumerate_thin_contexts, variables

x, y = Var("x"), Var("y")
a = App("a", ())


def f(*args):
    return App("f", list(args))


def g(*args):
    return App("g", list(args))


@pytest.fixture
def a0():
    return fixtures.load("r0").sidecar.algebra({"a": 0, "b": 0, "f": 1})


@pytest.fixture
def a1():
    return fixtures.load("r1").sidecar.algebra({"c": 0, "f": 1, "g": 1})


def test_eval_ground_and_open(a0, a1):
    assert eval_term(a0, {}, f(f(a))) == "1"
    assert eval_term(a1, {"x": "⊥"}, f(g(x))) == "f"
    assert eval_term(a1, {"x": "g"}, f(f(f(x)))) == "ff"


def test_partial_table_rejected():
    with pytest.raises(PartialInterpretation):
        FiniteAlgebra([0, 1], {"f": {(0,): 1}}, {"f": 1})


def test_value_outside_domain_rejected():
    with pytest.raises(PartialInterpretation):
        FiniteAlgebra([0, 1], {"f": {(0,): 1, (1,): 2}}, {"f": 1})


def test_core_drops_unreachable_values():
    # h counts up to 2, a sits apart; value 3 has no ground term
    alg = FiniteAlgebra.from_functions(
        [0, 1, 2, 3, 4],
        {"a": (0, lambda: 4), "h": (1, lambda v: {0: 1, 1: 2, 4: 1}.get(v, 2))},
    )
    c = core(alg)
    assert set(c.domain) == {1, 2, 4}
    assert not is_core(alg) and is_core(c)
    wit = ground_witnesses(alg)
    assert set(wit) == {1, 2, 4}
    assert all(alg.eval(t) == v for v, t in wit.items())


def test_core_of_r0_algebra_is_itself(a0):
    assert core(a0) == a0
    assert is_core(a0)


def test_core_needs_a_constant():
    alg = FiniteAlgebra.from_functions([0, 1], {"f": (1, lambda v: 1 - v)})
    with pytest.raises(EmptyCore):
        core(alg)
    assert not is_core(alg)


def test_core_keeps_top_interpretation(a1):
    ext = extend_with_top(a1)
    c = core(ext)
    assert TOP in c.arities
    assert c.apply(TOP, ("g",)) == c.least


def test_extend_with_top_is_constant_least(a1):
    ext = extend_with_top(a1)
    assert all(ext.apply(TOP, (e,)) == "⊥" for e in ext.domain)
    with pytest.raises(SymbolClash):
        extend_with_top(ext)


def test_cdepth_of_r1(a1):
    r = fixtures.load("r1").trs
    depths = [cdepth(a1, rule) for rule in r.rules]
    assert depths == [1, 2]
    rep = check_cmodel(a1, r)
    assert rep.is_cmodel and rep.trs_cdepth == 2
    assert rep.histogram() == {1: 1, 2: 1}


def test_model_has_cdepth_zero(a0):
    # a constant algebra is a model of everything
    alg = FiniteAlgebra.from_functions([0], {"a": (0, lambda: 0), "f": (1, lambda v: 0)})
    rep = check_cmodel(alg, trs("(VAR x)(RULES a -> f(a) f(x) -> a)"))
    assert rep.trs_cdepth == 0


def test_parity_is_not_a_cmodel():
    alg = FiniteAlgebra.from_functions([0, 1], {"a": (0, lambda: 0), "f": (1, lambda v: 1 - v)})
    rule = Rule(a, f(a))
    with pytest.raises(NotACModel):
        cdepth(alg, rule)
    rep = check_cmodel(alg, trs("(RULES a -> f(a))"))
    assert not rep.is_cmodel
    assert rep.failures() == [rule]
    assert rep.trs_cdepth is None


# ---------------------------------------------------------------- properties


SIG = {"a": 0, "f": 1, "g": 2}


@st.composite
def algebras(draw):
    n = draw(st.integers(1, 3))
    dom = list(range(n))
    tables = {}
    for sym, k in SIG.items():
        tables[sym] = {args: draw(st.sampled_from(dom)) for args in itertools.product(dom, repeat=k)}
    return FiniteAlgebra(dom, tables, SIG)


RULES = [
    Rule(f(x), x),
    Rule(g(x, y), g(y, x)),
    Rule(f(f(x)), a),
    Rule(g(x, a), f(x)),
    Rule(a, f(a)),
    Rule(g(x, x), x),
]


@settings(max_examples=60, deadline=None)
@given(algebras(), st.sampled_from(enumerate_ground_terms(SIG, 5)), st.data())
def test_substitution_lemma(alg, t, data):
    # [tσ]α = [t]([σ]α) for t with variables substituted by ground terms
    pattern = RULES[data.draw(st.integers(0, len(RULES) - 1))].lhs
    sigma = {v: t for v in variables(pattern)}
    assign = {v: alg.eval(t) for v in variables(pattern)}
    assert alg.eval(apply_subst(sigma, pattern)) == alg.eval(pattern, assign)


@settings(max_examples=60, deadline=None)
@given(algebras())
def test_core_is_idempotent_and_witnessed(alg):
    c = core(alg)
    assert core(c) == c
    wit = ground_witnesses(alg)
    assert set(wit) == set(c.domain)
    for v, t in wit.items():
        assert alg.eval(t) == v


def _equalized_at(alg, rule, depth):
    """Brute force: every thin context of this depth and every assignment equalizes both sides."""
    for ctx in enumerate_thin_contexts(SIG, depth, avoid=variables(rule.lhs)):
        lhs, rhs = ctx.fill(rule.lhs), ctx.fill(rule.rhs)
        names = sorted(set(variables(lhs)))
        for assign in alg.assignments(names):
            if alg.eval(lhs, assign) != alg.eval(rhs, assign):
                return False
    return True


@settings(max_examples=80, deadline=None)
@given(algebras(), st.sampled_from(RULES))
def test_cdepth_against_thin_contexts(alg, rule):
    try:
        n = cdepth(alg, rule)
    except NotACModel:
        assert not any(_equalized_at(alg, rule, k) for k in range(4))
        return
    if n <= 3:
        assert _equalized_at(alg, rule, n)
    if n >= 1:
        assert not _equalized_at(alg, rule, n - 1)
