"""TPDB-style problem files: parsing, CSR serialization, and output symbol naming."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .symbols import BOT, TOP, EPS, STAR, Labeled, Up, element_name
from .term import (
    App,
    CsTrs,
    IllFormedRule,
    ReplacementMap,
    Rule,
    Signature,
    Symbol,
    Term,
    Trs,
    Var,
    map_symbols,
    symbol_key,
    symbols_of,
    variables,
)


class ParseError(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class RuleError(IllFormedRule):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------- lexing

_TOKEN = re.compile(r"\s+|(?P<arrow>->=?)|(?P<punct>[(),])|(?P<ident>(?:[^\s(),\-]|-(?!>))+)")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the ident class accepts every other character
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        col = pos - line_start + 1
        if m.lastgroup == "arrow":
            out.append(Token("arrow", m.group(), line, col))
        elif m.lastgroup == "punct":
            out.append(Token(m.group(), m.group(), line, col))
        elif m.lastgroup == "ident":
            out.append(Token("ident", m.group(), line, col))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return out


# ---------------------------------------------------------------- parsing


# variable names assumed when a file declares no VAR section
_CONVENTIONAL_VAR = re.compile(r"[xyzuvw][0-9']*")


@dataclass
class Problem:
    trs: Trs
    variables: tuple[str, ...] = ()
    strategy: str | None = None
    mu: ReplacementMap | None = None
    comments: list[str] = field(default_factory=list)

    def cstrs(self) -> CsTrs:
        return CsTrs(self.trs, self.mu if self.mu is not None else ReplacementMap())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.vars: set[str] = set()
        self.var_order: list[str] = []
        self.rules: list[tuple[Rule, Token]] = []
        self.strategy: str | None = None
        self.mu: dict[str, list[int]] | None = None
        self.mu_tokens: dict[str, Token] = {}
        self.comments: list[str] = []
        self.arity: dict[str, tuple[int, Token]] = {}
        self.declared: list[tuple[Token, int]] = []

    # token helpers
    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def eof_error(self, what: str) -> ParseError:
        lines = self.text.split("\n")
        return ParseError(len(lines), len(lines[-1]) + 1, f"unexpected end of input, expected {what}")

    def take(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t is None:
            raise self.eof_error(what or kind)
        if t.kind != kind:
            raise ParseError(t.line, t.col, f"expected {what or kind}, found {t.text!r}")
        self.i += 1
        return t

    def parse(self) -> Problem:
        self.implicit_vars = not any(
            t.kind == "ident" and t.text.upper() == "VAR" and k > 0 and self.toks[k - 1].kind == "("
            for k, t in enumerate(self.toks)
        )
        while self.peek() is not None:
            self.take("(", "'(' opening a section")
            head = self.take("ident", "section name")
            name = head.text.upper()
            if name == "VAR":
                self.section_var()
            elif name == "RULES":
                self.section_rules()
            elif name == "STRATEGY":
                self.section_strategy()
            elif name == "SIGNATURE":
                self.section_signature()
            elif name == "COMMENT":
                self.section_comment(head)
                continue
            else:
                raise ParseError(head.line, head.col, f"unsupported section {head.text!r}")
            self.take(")", "')' closing the section")
        return self.finish()

    def section_var(self):
        while (t := self.peek()) is not None and t.kind == "ident":
            self.i += 1
            if t.text not in self.vars:
                self.vars.add(t.text)
                self.var_order.append(t.text)

    def section_rules(self):
        while (t := self.peek()) is not None and t.kind == "ident":
            lhs = self.term()
            arrow = self.take("arrow", "'->'")
            if arrow.text != "->":
                raise ParseError(arrow.line, arrow.col, "relative rules ('->=') are not supported")
            rhs = self.term()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "ident" and nxt.text == "|":
                raise ParseError(nxt.line, nxt.col, "conditional rules are not supported")
            try:
                rule = Rule(lhs, rhs)
            except IllFormedRule as e:
                raise RuleError(t.line, t.col, str(e)) from None
            self.rules.append((rule, t))

    def section_strategy(self):
        kind = self.take("ident", "strategy name")
        self.strategy = kind.text.upper()
        if self.strategy != "CONTEXTSENSITIVE":
            return
        self.mu = {}
        while (t := self.peek()) is not None and t.kind == "(":
            self.i += 1
            sym = self.take("ident", "symbol name")
            idx = []
            while (u := self.peek()) is not None and u.kind == "ident":
                self.i += 1
                if not u.text.isdigit() or int(u.text) < 1:
                    raise ParseError(u.line, u.col, f"bad argument index {u.text!r}")
                idx.append(int(u.text))
            self.take(")", "')' closing the replacement entry")
            self.mu[sym.text] = idx
            self.mu_tokens[sym.text] = sym

    def section_signature(self):
        # extra symbols that occur in no rule, as (name arity) entries
        while (t := self.peek()) is not None and t.kind == "(":
            self.i += 1
            sym = self.take("ident", "symbol name")
            n = self.take("ident", "arity")
            if not n.text.isdigit():
                raise ParseError(n.line, n.col, f"bad arity {n.text!r}")
            self.take(")", "')' closing the signature entry")
            self.declared.append((sym, int(n.text)))

    def section_comment(self, head: Token):
        depth = 1
        start = self.i
        while depth:
            t = self.peek()
            if t is None:
                raise self.eof_error("')' closing COMMENT")
            self.i += 1
            if t.kind == "(":
                depth += 1
            elif t.kind == ")":
                depth -= 1
        self.comments.append(" ".join(t.text for t in self.toks[start : self.i - 1]))

    def term(self) -> Term:
        t = self.take("ident", "a term")
        nxt = self.peek()
        bare = nxt is None or nxt.kind != "("
        if t.text in self.vars or (self.implicit_vars and bare and _CONVENTIONAL_VAR.fullmatch(t.text)):
            if nxt is not None and nxt.kind == "(":
                raise ParseError(nxt.line, nxt.col, f"variable {t.text} cannot take arguments")
            return Var(t.text)
        args: list[Term] = []
        if nxt is not None and nxt.kind == "(":
            self.i += 1
            if (u := self.peek()) is not None and u.kind == ")":
                self.i += 1
            else:
                args.append(self.term())
                while (u := self.peek()) is not None and u.kind == ",":
                    self.i += 1
                    args.append(self.term())
                self.take(")", "',' or ')'")
        known = self.arity.get(t.text)
        if known is not None and known[0] != len(args):
            raise ParseError(
                t.line,
                t.col,
                f"symbol {t.text} used with {len(args)} arguments, earlier with {known[0]}",
            )
        self.arity.setdefault(t.text, (len(args), t))
        return App(t.text, args)

    def finish(self) -> Problem:
        rules = tuple(r for r, _ in self.rules)
        for tok, n in self.declared:
            if tok.text in self.vars:
                raise ParseError(tok.line, tok.col, f"{tok.text} is declared as a variable")
            known = self.arity.get(tok.text)
            if known is not None and known[0] != n:
                raise ParseError(tok.line, tok.col, f"{tok.text} declared with arity {n}, used with {known[0]}")
            self.arity.setdefault(tok.text, (n, tok))
        sig = Signature({f: n for f, (n, _) in self.arity.items()})
        mu = None
        if self.mu is not None:
            for f, idx in self.mu.items():
                if f in sig and any(i > sig[f] for i in idx):
                    tok = self.mu_tokens[f]
                    raise ParseError(tok.line, tok.col, f"replacement entry for {f} exceeds its arity")
            mu = ReplacementMap({f: v for f, v in self.mu.items() if f in sig})
        return Problem(Trs(sig, rules), tuple(self.var_order), self.strategy, mu, self.comments)


def parse_problem(text: str) -> Problem:
    return _Parser(text).parse()


def parse_trs(text: str) -> Trs:
    return parse_problem(text).trs


def parse_cstrs(text: str) -> CsTrs:
    return parse_problem(text).cstrs()


# ---------------------------------------------------------------- naming


def sanitize(text: str) -> str:
    text = text.replace("⊥", "bot").replace("⊤", "top").replace("★", "star")
    text = text.replace("(", ".").replace(",", ".").replace(")", "")
    text = re.sub(r"[^A-Za-z0-9_.']", "", text)
    return text or "e"


def raw_name(sym: Symbol) -> str:
    if isinstance(sym, str):
        return sym
    if sym is TOP:
        return "TOP"
    if sym is BOT:
        return "bot"
    if isinstance(sym, Up):
        return f"up_{sanitize(element_name(sym.src))}_{sanitize(element_name(sym.dst))}"
    if isinstance(sym, Labeled):
        base = raw_name(sym.base)
        if sym.label is EPS or sym.label == ():
            return base
        if sym.label is STAR:
            return f"{base}_star"
        if isinstance(sym.label, tuple):
            return base + "".join("_" + sanitize(element_name(e)) for e in sym.label)
        return f"{base}_{sanitize(str(sym.label))}"
    return sanitize(str(sym))


RESERVED = {"VAR", "RULES", "STRATEGY", "SIGNATURE", "COMMENT", "THEORY", "CONTEXTSENSITIVE", "OUTERMOST", "INNERMOST"}


def symbol_names(symbols: Iterable[Symbol], reserved: Iterable[str] = ()) -> dict[Symbol, str]:
    """Injective plain identifiers. Input string symbols keep their names; clashes get a numeric suffix."""
    taken = set(reserved) | RESERVED
    syms = sorted(set(symbols), key=lambda s: (not isinstance(s, str), symbol_key(s)))
    out: dict[Symbol, str] = {}
    for s in syms:
        name = raw_name(s)
        if name in taken:
            k = 2
            while f"{name}_{k}" in taken:
                k += 1
            name = f"{name}_{k}"
        taken.add(name)
        out[s] = name
    return out


def rename_cstrs(cs: CsTrs, names: Mapping[Symbol, str]) -> CsTrs:
    rules = tuple(Rule(map_symbols(r.lhs, names.__getitem__), map_symbols(r.rhs, names.__getitem__)) for r in cs.rules)
    sig = Signature({names[f]: n for f, n in cs.signature.items()})
    mu = ReplacementMap({names[f]: v for f, v in cs.mu.items()})
    return CsTrs(Trs(sig, rules), mu, cs.info)


def _signature_lines(sig: Mapping[Symbol, int], rules, names) -> list[str]:
    used = {f for r in rules for t in (r.lhs, r.rhs) for f in symbols_of(t)}
    extra = sorted((names[f], n) for f, n in sig.items() if f not in used)
    if not extra:
        return []
    return ["(SIGNATURE " + " ".join(f"({f} {n})" for f, n in extra) + ")"]


def _var_names(rules: Iterable[Rule]) -> list[str]:
    seen: dict[str, None] = {}
    for r in rules:
        for v in variables(r.lhs):
            seen.setdefault(v)
    return list(seen)


def write_cstrs(cs: CsTrs, *, header: Iterable[str] = ()) -> str:
    """CSR text: symbol table comment, VAR, STRATEGY CONTEXTSENSITIVE (every symbol listed), RULES."""
    var_names = _var_names(cs.rules)
    names = symbol_names(cs.signature, reserved=var_names)
    out = []
    notes = list(header)
    table = [(names[s], str(s)) for s in cs.signature if names[s] != str(s)]
    if table:
        notes.append("symbol table:")
        notes.extend(f"  {n} = {orig}" for n, orig in sorted(table))
    if notes:
        out.append("(COMMENT")
        out.extend(_comment_safe(n) for n in notes)
        out.append(")")
    out.append("(VAR " + " ".join(var_names) + ")" if var_names else "(VAR)")
    out.extend(_signature_lines(cs.signature, cs.rules, names))
    out.append("(STRATEGY CONTEXTSENSITIVE")
    for f in sorted(cs.signature, key=lambda s: names[s]):
        idx = sorted(cs.mu.allowed(f, cs.signature[f]))
        out.append("  (" + " ".join([names[f]] + [str(i) for i in idx]) + ")")
    out.append(")")
    out.append("(RULES")
    for r in cs.rules:
        out.append(f"  {_show(r.lhs, names)} -> {_show(r.rhs, names)}")
    out.append(")")
    return "\n".join(out) + "\n"


def write_trs(trs: Trs) -> str:
    var_names = _var_names(trs.rules)
    names = symbol_names(trs.signature, reserved=var_names)
    lines = ["(VAR " + " ".join(var_names) + ")" if var_names else "(VAR)"]
    lines += _signature_lines(trs.signature, trs.rules, names)
    lines.append("(RULES")
    lines += [f"  {_show(r.lhs, names)} -> {_show(r.rhs, names)}" for r in trs.rules]
    lines.append(")")
    return "\n".join(lines) + "\n"


def _comment_safe(text: str) -> str:
    # keep parentheses balanced so the comment section parses back
    depth = 0
    kept = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                continue
            depth -= 1
        kept.append(ch)
    return "".join(kept) + ")" * depth


def _show(t: Term, names: Mapping[Symbol, str]) -> str:
    if isinstance(t, Var):
        return t.name
    assert isinstance(t, App)
    if not t.args:
        return names[t.fun]
    return f"{names[t.fun]}({','.join(_show(a, names) for a in t.args)})"


def show_term(t: Term) -> str:
    """Rendering with labels, ⊤ and relabel arrows as-is."""
    return str(t)
