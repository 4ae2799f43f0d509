"""Shared plumbing for the CLI and corpus statistics: load an input, pick a c-labeling, transform."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from . import fixtures
from .labeling import CLabeling, make_labeling
from .redexalg import Mode, RedexAlgebra, build, minimize
from .sidecar import Sidecar, load_sidecar
from .term import CsTrs, Trs
from .tpdb import Problem, parse_problem
from .transform import dynamic_context_extension, dynamic_labeling, ground_extend, static_context_extension

METHODS: dict[str, Callable[[Trs, CLabeling], CsTrs]] = {
    "static-ext": static_context_extension,
    "dynamic-ext": dynamic_context_extension,
    "dynamic-label": dynamic_labeling,
}

FIXTURE_PREFIX = "fixture:"


@dataclass
class Input:
    name: str
    problem: Problem
    sidecar: Sidecar | None = None


def read_input(spec: str) -> Input:
    """A file path, or ``fixture:NAME`` for a bundled example (its sidecar comes along)."""
    if spec.startswith(FIXTURE_PREFIX):
        fx = fixtures.load(spec[len(FIXTURE_PREFIX):])
        return Input(fx.name, fx.problem, fx.sidecar)
    with open(spec, encoding="utf-8") as fh:
        text = fh.read()
    return Input(os.path.basename(spec), parse_problem(text))


def read_sidecar(spec: str) -> Sidecar:
    if spec.startswith(FIXTURE_PREFIX):
        fx = fixtures.load(spec[len(FIXTURE_PREFIX):])
        if fx.sidecar is None:
            raise KeyError(f"fixture {fx.name} has no algebra file")
        return fx.sidecar
    return load_sidecar(spec)


@dataclass
class Setup:
    trs: Trs
    cl: CLabeling
    redex_algebra: RedexAlgebra
    source: str
    size_before_minimize: int | None = None


def prepare(
    trs: Trs,
    *,
    labeling: str | None = None,
    mode: Mode | str = Mode.LEFT_LINEAR,
    do_minimize: bool = False,
    sidecar: Sidecar | None = None,
    extend: bool = False,
    bound: int = 7,
) -> Setup:
    """Choose the c-labeling: a hand-written one from ``sidecar``, else the constructed redex algebra."""
    original = trs
    if extend:
        trs = ground_extend(trs)
    if sidecar is not None:
        cl = sidecar.clabeling(original, bound, extended=trs if extend else None)
        return Setup(trs, cl, cl.redex_algebra, "hand-written")
    ra = build(trs, Mode(mode))
    before = len(ra)
    if do_minimize:
        ra = minimize(ra)
    cl = make_labeling(ra, labeling or "max")
    return Setup(trs, cl, ra, f"constructed ({Mode(mode).value})", before)


# keyword options each method understands
OPTIONS = {
    "static-ext": {"check_context_root"},
    "dynamic-ext": {"eliminate_collapsing"},
    "dynamic-label": {"reachable_only", "top_relabel"},
}


def transform(setup: Setup, method: str, **options) -> CsTrs:
    """Run ``method``; options meant for the other methods are ignored."""
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}") from None
    return fn(setup.trs, setup.cl, **{k: v for k, v in options.items() if k in OPTIONS[method]})
