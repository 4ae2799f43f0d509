import pytest

from conftest import constructed, lterm, manual, trs
from outercs import fixtures
from outercs.algebra import FiniteAlgebra, check_cmodel
from outercs.labeling import erase_top, make_labeling
from outercs.redexalg import Mode, RedexAlgebra, build
from outercs.symbols import TOP
from outercs.term import CsTrs, Trs, outermost_successors
from outercs.transform import dynamic_context_extension, dynamic_labeling, is_relabel_rule
from outercs.verify import (
    ExceededBound,
    LongestDerivation,
    arrow_free,
    bounded_explore,
    check_cxtext_simulation,
    check_dynlab_simulation,
    check_recognition,
    check_reverse_simulation,
    default_seeds,
    is_quasi_left_linear,
    mu_steps,
)

ALL = fixtures.names()
QLL = [n for n in ALL if is_quasi_left_linear(fixtures.load(n).trs)]


def test_quasi_left_linearity():
    assert is_quasi_left_linear(fixtures.load("qll").trs)
    assert not is_quasi_left_linear(trs("(VAR x)(RULES g(x,x) -> b)"))
    assert is_quasi_left_linear(fixtures.load("r1").trs)
    assert set(ALL) - set(QLL) == {"nonlin", "nonlinb", "nonlinc"}


def test_default_seeds_respect_cap():
    t = fixtures.load("r1").trs
    assert len(default_seeds(t, 6, cap=5)) == 5
    assert all(s.size <= 4 for s in default_seeds(t, 4))


# ---------------------------------------------------------------- forward simulation


def test_cxtext_simulation_r0(r0):
    t, cl = r0
    rep = check_cxtext_simulation(t, cl, dynamic_context_extension(t, cl), bound=6)
    assert rep.passed and rep.steps > 0
    assert "verified up to bound" in rep.lines()[0]


def test_cxtext_simulation_follows_outermost_sequence(r0):
    t, cl = r0
    out = dynamic_context_extension(t, cl)
    seq = [lterm(s, False) for s in ["a", "f(a)", "f(f(a))", "b"]]
    for s, u in zip(seq, seq[1:]):
        assert u in {v for _, v in outermost_successors(t, s)}
        images = {st.result for st in mu_steps(out, cl.label_top(s))}
        assert images == {cl.label_top(u)}


def test_empty_seed_set_passes_vacuously(r1):
    t, cl = r1
    out = dynamic_context_extension(t, cl)
    assert check_cxtext_simulation(t, cl, out, seeds=[]).passed
    assert check_dynlab_simulation(t, cl, dynamic_labeling(t, cl), seeds=[]).passed
    assert check_reverse_simulation(t, cl, out, seeds=[]).passed


def test_dynlab_simulation_r0_uses_one_relabel_step(r0):
    t, cl = r0
    rep = check_dynlab_simulation(t, cl, dynamic_labeling(t, cl), bound=6)
    assert rep.passed
    assert set(rep.histogram) == {1}


def test_dynlab_simulation_r1_within_cdepth(r1):
    t, cl = r1
    rep = check_dynlab_simulation(t, cl, dynamic_labeling(t, cl), bound=6)
    assert rep.passed
    assert max(rep.histogram) <= 2


def test_dynlab_simulation_model_needs_no_relabeling():
    alg = FiniteAlgebra.from_functions(["⊥"], {"a": (0, lambda: "⊥"), "b": (0, lambda: "⊥"), "f": (1, lambda v: "⊥")})
    t = trs("(VAR x)(RULES f(a) -> b)")
    cl = make_labeling(RedexAlgebra(alg, {"f": [("⊥",)]}), "min")
    # a one-element algebra is a model; marking every f is only sound on the seed f(a)
    out = dynamic_labeling(t, cl)
    assert not any(is_relabel_rule(r) for r in out.rules)
    rep = check_dynlab_simulation(t, cl, out, seeds=[lterm("f(a)", False)])
    assert rep.passed and set(rep.histogram) == {0}


def test_broken_transformation_is_caught(r1):
    t, cl = r1
    out = dynamic_context_extension(t, cl)
    crippled = CsTrs(Trs(out.signature, out.rules[1:]), out.mu)
    rep = check_cxtext_simulation(t, cl, crippled, bound=5)
    assert not rep.passed
    assert "no single μ-step image" in rep.failures[0].detail


@pytest.mark.parametrize("name", ALL)
def test_simulations_on_every_fixture(name):
    t, cl = constructed(name)
    assert check_cxtext_simulation(t, cl, dynamic_context_extension(t, cl), bound=6).passed
    assert check_dynlab_simulation(t, cl, dynamic_labeling(t, cl), bound=6).passed


# ---------------------------------------------------------------- reverse simulation


@pytest.mark.parametrize("name", QLL)
def test_reverse_simulation_on_quasi_left_linear(name):
    t, cl = constructed(name)
    rep = check_reverse_simulation(t, cl, dynamic_context_extension(t, cl), bound=4)
    assert rep.passed, rep.lines()


def test_reverse_simulation_fails_for_incomplete_labeling(inflist_min):
    t, cl = inflist_min
    rep = check_reverse_simulation(t, cl, dynamic_context_extension(t, cl), bound=4)
    assert not rep.passed
    f = rep.failures[0]
    assert "non-outermost" in f.detail
    assert "term 3 of the derivation" in f.detail
    # inf★ unfolds twice, leaving the third term mislabeled; the third unfolding sits under cons
    assert len(f.path) == 4
    third = f.path[2]
    assert str(third).count("cons") == 2
    assert third != cl.label_top(erase_top(third))


# ---------------------------------------------------------------- exploration


def test_explore_dynlab_r0(r0):
    t, cl = r0
    res = bounded_explore(dynamic_labeling(t, cl), [cl.label_top(lterm("a", False))], 100)
    assert isinstance(res, LongestDerivation)
    assert res.longest == 6 and res.exhausted
    assert res.path[-1] == cl.label_top(lterm("b", False))


def test_explore_finds_infinite_list(inflist_min):
    t, cl = inflist_min
    out = dynamic_context_extension(t, cl)
    res = bounded_explore(out, [cl.label_top(lterm("inf(nil)", False))], 20)
    assert isinstance(res, ExceededBound)
    assert res.length >= 20
    for u, v in zip(res.witness, res.witness[1:]):
        assert v in {st.result for st in mu_steps(out, u)}


def test_explore_normal_form(r0):
    t, cl = r0
    res = bounded_explore(dynamic_labeling(t, cl), [cl.label_top(lterm("b", False))], 10)
    assert res.longest == 0


def test_explore_rejects_bad_length(r0):
    with pytest.raises(ValueError):
        bounded_explore(dynamic_labeling(*r0), [], 0)


def test_explore_memo_matches_plain_search(r1):
    # unmemoized longest-derivation oracle on a small seed set
    t, cl = r1
    out = dynamic_context_extension(t, cl)
    seeds = [cl.label_top(s) for s in default_seeds(t, 4)]

    def plain(u):
        return max((1 + plain(st.result) for st in mu_steps(out, u)), default=0)

    res = bounded_explore(out, seeds, 100)
    assert res.longest == max(plain(s) for s in seeds)


@pytest.mark.parametrize("name", ["r0", "r1", "r2", "dupl_rhs", "afb"])
def test_relabel_arrows_vanish_within_cdepth(name):
    t, cl = manual(name) if fixtures.load(name).sidecar else constructed(name)
    depth = check_cmodel(cl.algebra.without(TOP), t).trs_cdepth
    out = dynamic_labeling(t, cl)
    org = [r for r in out.rules if not is_relabel_rule(r)]
    relabel = [r for r in out.rules if is_relabel_rule(r)]
    for s in default_seeds(t, 5):
        for st in mu_steps(out, cl.label_top(s), org):
            # every relabel-only derivation is short and ends without arrows
            frontier, steps = {st.result}, 0
            while frontier:
                nxt = set()
                for u in frontier:
                    succ = {x.result for x in mu_steps(out, u, relabel)}
                    if not succ:
                        assert arrow_free(u), u
                    nxt |= succ
                frontier = nxt
                steps += 1 if nxt else 0
                assert steps <= depth


# ---------------------------------------------------------------- recognition


def test_recognition_r1_exact():
    t = fixtures.load("r1").trs
    assert check_recognition(t, build(t), 7).exact


def test_recognition_nonlin_full_overapproximates():
    t = fixtures.load("nonlin").trs
    rep = check_recognition(t, build(t, Mode.FULL), 5, Mode.FULL)
    assert rep.complete and not rep.sound
    assert rep.unsound_witness.fun == "g"


def test_recognition_empty_rule_set():
    t = trs("(SIGNATURE (a 0) (f 1))(RULES)")
    rep = check_recognition(t, build(t), 5)
    assert rep.exact and rep.checked > 0
