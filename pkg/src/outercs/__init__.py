"""Outermost termination via context-sensitive rewriting: c-models, redex algebras, and the
static/dynamic context extension and dynamic labeling transformations."""

from .symbols import BOT, TOP, Labeled, Up
from .term import App, CsTrs, ReplacementMap, Rule, Signature, Trs, Var
from .tpdb import parse_cstrs, parse_problem, parse_trs, write_cstrs

__all__ = [
    "App",
    "BOT",
    "CsTrs",
    "Labeled",
    "ReplacementMap",
    "Rule",
    "Signature",
    "TOP",
    "Trs",
    "Up",
    "Var",
    "parse_cstrs",
    "parse_problem",
    "parse_trs",
    "write_cstrs",
]
