"""The bundled example systems, each a TPDB-style file plus an optional algebra sidecar."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .sidecar import Sidecar, parse_sidecar
from .tpdb import Problem, parse_problem

# name -> one-line description
CATALOG = {
    "r0": "a -> f(a), f(f(x)) -> b; outermost terminating but not terminating",
    "r1": "f(g(x)) -> f(f(g(x))), f(f(f(x))) -> x; rules of c-depth 1 and 2",
    "r2": "g(f(g(x))) -> f(g(g(f(x)))), f(x) -> x; static extension must drop a labeled instance",
    "dupl_rhs": "duplicating right-hand side, minimal labeling",
    "nonlin": "non-left-linear; only f is marked",
    "nonlinb": "non-left-linear; g(a,a) recognised through a singleton value",
    "nonlinc": "non-left-linear; no finite algebra recognises its redexes",
    "whycore": "complete maximal labeling that is not core",
    "merge": "pattern pool needs closure under merge",
    "ij": "minimization identifies i(a) and j(a)",
    "ha": "h/a system whose redex algebra has a proper core",
    "afb": "a/f/b system whose redex algebra has a proper core",
    "inflist": "infinite list; minimal labeling is incomplete",
    "qll": "quasi-left-linear system",
}


@dataclass(frozen=True)
class Fixture:
    name: str
    text: str
    problem: Problem
    sidecar: Sidecar | None

    @property
    def trs(self):
        return self.problem.trs


def names() -> list[str]:
    return list(CATALOG)


def _read(filename: str) -> str | None:
    res = resources.files(__package__).joinpath("fixtures", filename)
    return res.read_text(encoding="utf-8") if res.is_file() else None


def load(name: str) -> Fixture:
    if name not in CATALOG:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(CATALOG)}")
    text = _read(f"{name}.trs")
    side = _read(f"{name}.alg")
    return Fixture(name, text, parse_problem(text), parse_sidecar(side) if side else None)
