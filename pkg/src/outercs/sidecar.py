"""Algebra sidecar files: hand-written algebras, redex predicates, labeling kind, Σred overrides.

Format (one directive per line, ``#`` starts a comment)::

    domain: ⊥ f ff g
    c = ⊥
    f(⊥) = f
    f(*) = ff          # '*' matches any element; more specific entries win
    g(*) = g
    redex: f(g) f(ff)  # argument tuples where the symbol roots a redex
    labeling: maximal  # or minimal
    sigred: f(g)       # optional override of the redex-symbol set

Constants may be written ``c`` or ``c()``. In ``sigred`` a minimal-labeling
symbol is written by its bare name (``f`` means f★), a maximal one as
``f(a,b)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .algebra import AlgebraError, FiniteAlgebra
from .labeling import CLabeling, make_labeling
from .redexalg import RedexAlgebra
from .symbols import STAR, Labeled
from .term import Trs
from .transform import ground_extend_algebra


class SidecarError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_ENTRY = re.compile(r"^\s*([^\s(),=]+)\s*(?:\(([^()]*)\))?\s*(?:=\s*(\S+))?\s*$")
_PATTERN = re.compile(r"([^\s(),]+)(?:\(([^()]*)\))?")


@dataclass
class Sidecar:
    domain: list[str]
    entries: list[tuple[int, str, tuple[str, ...], str]] = field(default_factory=list)
    redex: list[tuple[int, str, tuple[str, ...]]] = field(default_factory=list)
    labeling: str = "maximal"
    sigred: list[tuple[int, str, tuple[str, ...] | None]] | None = None

    def algebra(self, arities: dict[str, int]) -> FiniteAlgebra:
        tables: dict[str, dict[tuple, str]] = {f: {} for f in arities}
        ordered = sorted(
            enumerate(self.entries), key=lambda ie: (sum(a != "*" for a in ie[1][2]), ie[0])
        )
        for _, (line, f, args, value) in ordered:
            if f not in arities:
                raise SidecarError(line, f"symbol {f} is not in the signature")
            if len(args) != arities[f]:
                raise SidecarError(line, f"{f} takes {arities[f]} arguments, got {len(args)}")
            self._check_elements(line, args + (value,), allow_star=True)
            if value == "*":
                raise SidecarError(line, "result cannot be a wildcard")
            for tup in self._expand(args):
                tables[f][tup] = value
        try:
            return FiniteAlgebra(self.domain, tables, arities)
        except AlgebraError as e:
            raise SidecarError(0, f"interpretation is not total: {e}") from None

    def redex_algebra(self, trs: Trs) -> RedexAlgebra:
        arities = dict(trs.signature)
        alg = self.algebra(arities)
        red: dict[str, set[tuple]] = {}
        for line, f, args in self.redex:
            if f not in arities or len(args) != arities[f]:
                raise SidecarError(line, f"bad redex pattern for {f}")
            self._check_elements(line, args, allow_star=True)
            red.setdefault(f, set()).update(self._expand(args))
        return RedexAlgebra(alg, red)

    def clabeling(self, trs: Trs, bound: int = 7, extended: Trs | None = None) -> CLabeling:
        """The c-labeling described by the file.

        With ``extended`` (a ground extension of ``trs``) the added symbols are interpreted
        as the least element and never root a redex.
        """
        ra = self.redex_algebra(trs)
        if extended is not None:
            ra = RedexAlgebra(ground_extend_algebra(ra.algebra, extended), ra.redex)
            trs = extended
        cl = make_labeling(ra, self.labeling)
        if self.sigred is None:
            return cl
        chosen = set()
        for line, f, args in self.sigred:
            if args is None:
                if cl.kind != "minimal":
                    raise SidecarError(line, f"write {f}(...) with argument values for maximal labeling")
                chosen.add(Labeled(f, STAR))
            else:
                self._check_elements(line, args, allow_star=True)
                for tup in self._expand(args):
                    chosen.add(Labeled(f, tup))
        return cl.with_sigred(chosen, trs, bound)

    def _expand(self, args: tuple[str, ...]):
        pools = [self.domain if a == "*" else [a] for a in args]
        return itertools.product(*pools)

    def _check_elements(self, line: int, names, allow_star: bool):
        for a in names:
            if a == "*" and allow_star:
                continue
            if a not in self.domain:
                raise SidecarError(line, f"unknown element {a!r}")


def _args(text: str | None) -> tuple[str, ...]:
    if text is None or not text.strip():
        return ()
    return tuple(a.strip() for a in text.split(","))


def parse_sidecar(text: str) -> Sidecar:
    side: Sidecar | None = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if sep and key in ("domain", "redex", "labeling", "sigred"):
            if key == "domain":
                names = rest.split()
                if not names or len(set(names)) != len(names):
                    raise SidecarError(no, "domain must list distinct elements")
                side = Sidecar(names)
                continue
            if side is None:
                raise SidecarError(no, "the domain line must come first")
            if key == "labeling":
                kind = rest.strip().lower()
                if kind not in ("minimal", "maximal", "min", "max"):
                    raise SidecarError(no, f"unknown labeling {kind!r}")
                side.labeling = "minimal" if kind.startswith("min") else "maximal"
            elif key == "redex":
                for m in _PATTERN.finditer(rest):
                    side.redex.append((no, m.group(1), _args(m.group(2))))
            else:
                side.sigred = side.sigred or []
                for m in _PATTERN.finditer(rest):
                    side.sigred.append((no, m.group(1), None if m.group(2) is None else _args(m.group(2))))
            continue
        if side is None:
            raise SidecarError(no, "the domain line must come first")
        m = _ENTRY.match(line)
        if m is None or m.group(3) is None:
            raise SidecarError(no, f"cannot read {raw.strip()!r}")
        side.entries.append((no, m.group(1), _args(m.group(2)), m.group(3)))
    if side is None:
        raise SidecarError(0, "empty sidecar")
    return side


def load_sidecar(path) -> Sidecar:
    with open(path, encoding="utf-8") as fh:
        return parse_sidecar(fh.read())
