"""Structured symbols introduced by the constructions: ⊥, ⊤, labeled symbols, relabel arrows."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable


class _Sentinel:
    __slots__ = ("_text", "sort_key")

    def __init__(self, text: str, sort_key: str):
        self._text = text
        self.sort_key = sort_key

    def __str__(self):
        return self._text

    def __repr__(self):
        return self._text

    def __reduce__(self):
        return (_sentinel, (self._text,))


BOT = _Sentinel("⊥", "")            # sorts before every named symbol
TOP = _Sentinel("⊤", "\U0010ffff")  # sorts after every named symbol

_SENTINELS = {"⊥": BOT, "⊤": TOP}


def _sentinel(text):
    return _SENTINELS[text]


class Mark:
    """The two labels of minimal labeling."""

    __slots__ = ("_text",)

    def __init__(self, text: str):
        self._text = text

    def __str__(self):
        return self._text

    __repr__ = __str__


STAR = Mark("★")
EPS = Mark("ε")

Label = Hashable  # STAR, EPS, or a tuple of element ids


def element_name(e) -> str:
    return str(e)


@dataclass(frozen=True)
class Labeled:
    """``base^label``."""

    base: Hashable
    label: Label

    def __str__(self):
        if self.label is EPS or self.label == ():
            return str(self.base)
        if self.label is STAR:
            return f"{self.base}★"
        return f"{self.base}⟨{','.join(element_name(e) for e in self.label)}⟩"

    @property
    def sort_key(self) -> str:
        from .term import symbol_key

        lab = self.label
        if lab is EPS:
            tail = ""
        elif lab is STAR:
            tail = "\x01"
        else:
            tail = "\x02" + "\x03".join(element_name(e) for e in lab)
        return symbol_key(self.base) + "\x00" + tail


@dataclass(frozen=True)
class Up:
    """Relabel symbol ``↑_src^dst``: the subterm's value changed from src to dst."""

    src: Hashable
    dst: Hashable

    def __str__(self):
        return f"↑[{element_name(self.src)}→{element_name(self.dst)}]"

    @property
    def sort_key(self) -> str:
        return "\U0010fffe" + element_name(self.src) + "\x00" + element_name(self.dst)


def base_symbol(sym):
    """Strip labels; relabel arrows and ⊤ are returned unchanged."""
    while isinstance(sym, Labeled):
        sym = sym.base
    return sym
