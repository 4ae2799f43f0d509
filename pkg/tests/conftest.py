import re
import sys

import pytest

from outercs import fixtures
from outercs.labeling import make_labeling
from outercs.redexalg import build, minimize
from outercs.symbols import EPS, STAR, TOP, Labeled, Up
from outercs.term import App, Rule, Var, canonical_rule
from outercs.tpdb import parse_trs

_TOKEN = re.compile(r"\s*(up\[[^\]]*\]|[A-Za-z0-9_⊥]+\*?(?:<[^>]*>)?|[(),]|->)")
_VARS = re.compile(r"[xyzuvw][0-9]*")


def _tokens(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        assert m, f"cannot tokenize {text[pos:]!r}"
        out.append(m.group(1))
        pos = m.end()
    return out


def _symbol(tok, labeled):
    if tok.startswith("up["):
        a, b = tok[3:-1].split(">")
        return Up(a, b)
    m = re.fullmatch(r"([A-Za-z0-9_⊥]+)(\*)?(?:<([^>]*)>)?", tok)
    name, star, label = m.groups()
    base = TOP if name == "T" else name
    if not labeled:
        return base
    if star:
        return Labeled(base, STAR)
    if label is not None:
        return Labeled(base, tuple(e.strip() for e in label.split(",")) if label.strip() else ())
    return Labeled(base, EPS)


def lterm(text, labeled=True):
    """Terms in a compact test notation: ``f*`` is f★, ``f<a,b>`` is f⟨a,b⟩, ``T`` is ⊤,
    ``up[a>b]`` the relabel arrow, and x, y, z, u, v, w (optionally numbered) are variables."""
    toks = _tokens(text)
    pos = 0

    def term():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if _VARS.fullmatch(tok):
            return Var(tok)
        sym = _symbol(tok, labeled)
        args = []
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args.append(term())
            while toks[pos] == ",":
                pos += 1
                args.append(term())
            assert toks[pos] == ")"
            pos += 1
        return App(sym, args)

    t = term()
    assert pos == len(toks), f"trailing input in {text!r}"
    return t


def lrule(text, labeled=True):
    lhs, rhs = text.split("->")
    return Rule(lterm(lhs, labeled), lterm(rhs, labeled))


def canon(rules):
    return {canonical_rule(r) for r in rules}


def rules(text):
    """One rule per line, canonicalized."""
    return canon(lrule(line) for line in text.strip().splitlines())


def trs(text):
    return parse_trs(text)


def constructed(name, kind="max", do_minimize=True):
    fx = fixtures.load(name)
    ra = build(fx.trs)
    if do_minimize:
        ra = minimize(ra)
    return fx.trs, make_labeling(ra, kind)


def manual(name):
    fx = fixtures.load(name)
    return fx.trs, fx.sidecar.clabeling(fx.trs)


@pytest.fixture(scope="session")
def r0():
    return manual("r0")


@pytest.fixture(scope="session")
def r1():
    return constructed("r1")


@pytest.fixture(scope="session")
def r1_manual():
    return manual("r1")


@pytest.fixture(scope="session")
def dupl():
    return manual("dupl_rhs")


@pytest.fixture(scope="session")
def inflist_min():
    return constructed("inflist", "min")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.report():
        terminalreporter.write_line(line)
