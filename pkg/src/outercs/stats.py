"""Corpus statistics: c-depth histogram, algebra sizes, and transformed-system sizes per file."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .algebra import AlgebraError, check_cmodel
from .pipeline import METHODS, prepare, transform
from .redexalg import Mode, RedexAlgebraError, minimize
from .term import TermError
from .tpdb import ParseError, parse_problem


@dataclass
class FileStats:
    name: str
    rules: int
    algebra_size: int
    minimized_size: int
    depths: tuple[int | None, ...]
    transformed: dict[str, int | str]

    @property
    def trs_cdepth(self) -> int | None:
        return None if any(d is None for d in self.depths) else max(self.depths, default=0)


@dataclass
class CorpusStats:
    files: list[FileStats] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)

    def histogram(self) -> Counter:
        """Rule counts per c-depth; ``None`` collects rules with no finite c-depth."""
        return Counter(d for f in self.files for d in f.depths)

    def ratios(self) -> dict:
        h = self.histogram()
        total = sum(h.values())
        return {d: h[d] / total for d in sorted(h, key=_depth_key)} if total else {}

    def average(self, attr: str) -> float | None:
        if not self.files:
            return None
        return sum(getattr(f, attr) for f in self.files) / len(self.files)

    def format(self) -> str:
        methods = list(METHODS)
        head = ["file", "rules", "alg", "min", "depths"] + methods
        rows = [head]
        for f in self.files:
            depths = ",".join("∞" if d is None else str(d) for d in f.depths)
            rows.append(
                [f.name, str(f.rules), str(f.algebra_size), str(f.minimized_size), depths]
                + [str(f.transformed.get(m, "-")) for m in methods]
            )
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        out = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        if self.files:
            out.append("")
            out.append("c-depth ratio: " + ", ".join(
                f"{'∞' if d is None else d}: {r:.2f}" for d, r in self.ratios().items()
            ))
            out.append(
                f"average algebra size: {self.average('algebra_size'):.2f} before minimization, "
                f"{self.average('minimized_size'):.2f} after"
            )
        out.append(f"files: {len(self.files)} processed, {len(self.rejected)} rejected")
        out.extend(f"  rejected {n}: {why}" for n, why in self.rejected)
        return "\n".join(out) + "\n"


def _depth_key(d):
    return (d is None, d or 0)


def file_stats(name: str, text: str, mode: Mode | str = Mode.LEFT_LINEAR) -> FileStats:
    problem = parse_problem(text)
    trs = problem.trs
    full = prepare(trs, mode=mode)
    small = minimize(full.redex_algebra)
    report = check_cmodel(small.algebra, trs)
    depths = tuple(r.cdepth for r in report.per_rule)
    setup = prepare(trs, mode=mode, do_minimize=True)
    transformed: dict[str, int | str] = {}
    for method in METHODS:
        try:
            transformed[method] = len(transform(setup, method).rules)
        except AlgebraError as e:
            transformed[method] = f"error: {e}"
    return FileStats(name, len(trs.rules), len(full.redex_algebra), len(small), depths, transformed)


def corpus_stats(files: Iterable[tuple[str, str]], mode: Mode | str = Mode.LEFT_LINEAR) -> CorpusStats:
    """Statistics over ``(name, text)`` pairs. Files that fail to parse or build are counted as rejected."""
    out = CorpusStats()
    for name, text in files:
        try:
            out.files.append(file_stats(name, text, mode))
        except (ParseError, TermError, AlgebraError, RedexAlgebraError) as e:
            out.rejected.append((name, str(e)))
    return out
