"""Concrete syntax: tokenizer, parsers and printer for signatures and levels.

Grammar (``#`` starts a comment)::

    entry  := ident ':' term '.' | 'def' ident ':' term ':=' term '.'
    term   := '(' ident+ ':' term ')' '->' term | ident '=>' term | app ['->' term]
    app    := atom atom*
    atom   := ident ['@' tag (',' tag)*] | 'Type' | 'Kind' | '(' term ')'
    level  := sum ('⊔' sum)*
    sum    := 'S' sum | number '+' latom | latom
    latom  := ident | number | '(' level ')'

A binder whose domain is ``Lvl`` is a confined product.  A constant with
``k`` leading confined products takes its next ``k`` atoms as levels, and the
first ``k`` abstractions of a definition body are confined abstractions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import level as lv
from .kernel.signature import Entry
from .kernel.terms import (
    KIND,
    TYPE,
    Abs,
    App,
    CAbs,
    CApp,
    Const,
    CPi,
    Pi,
    Sort,
    Term,
    Var,
    constants,
    free_indices,
    is_level,
    leading_cpis,
    shift,
    unspine,
)
from .level import Level
from .pts import ProfileError, PTSProfile
from .unify import Equation


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->|→)
  | (?P<fat>=>)
  | (?P<defeq>:=)
  | (?P<eqeq>==)
  | (?P<max>⊔|\\/)
  | (?P<sym>[:.()@,+])
  | (?P<number>\d+)
  | (?P<ident>[a-zA-Z_][a-zA-Z0-9_']*|Ω|□)
    """,
    re.VERBOSE,
)

KEYWORDS = {"def", "Type", "Kind"}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            kind = chunk if kind == "sym" else kind
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str, arities: Mapping[str, int] | None = None, profile: PTSProfile | None = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.arities = dict(arities or {})
        self.profile = profile
        # (name, confined?) with the innermost binder last
        self.scope: list[tuple[str, bool]] = []

    # -- token helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def ident(self) -> str:
        tok = self.expect("ident")
        if tok.text in KEYWORDS:
            self.fail(f"keyword {tok.text!r} used as a name", tok)
        return tok.text

    # -- scope ------------------------------------------------------------

    def resolve(self, name: str) -> Var | None:
        index = 0
        for bound, confined in reversed(self.scope):
            if bound == name:
                if confined:
                    return None
                return Var(index, name)
            if not confined:
                index += 1
        return None

    def is_confined(self, name: str) -> bool:
        for bound, confined in reversed(self.scope):
            if bound == name:
                return confined
        return False

    # -- levels -----------------------------------------------------------

    def level(self) -> Level:
        l = self.level_sum()
        while self.at("max"):
            self.advance()
            l = lv.Max(l, self.level_sum())
        return l

    def level_sum(self) -> Level:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "S":
            self.advance()
            return lv.Succ(self.level_sum())
        if tok.kind == "number" and self.peek(1).kind == "+":
            self.advance()
            self.advance()
            return lv.nat(int(tok.text), self.level_atom())
        return self.level_atom()

    def level_atom(self) -> Level:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return lv.nat(int(tok.text))
        if tok.kind == "ident" and tok.text not in KEYWORDS and tok.text != "S":
            if self.resolve(tok.text) is not None:
                self.fail(f"regular variable {tok.text} used as a level")
            self.advance()
            return lv.Var(tok.text)
        if tok.kind == "(":
            self.advance()
            l = self.level()
            self.expect(")")
            return l
        self.fail(f"expected a level, found {tok.text or 'end of input'!r}")

    # -- terms ------------------------------------------------------------

    def _binder_ahead(self) -> bool:
        if not self.at("("):
            return False
        i = 1
        while self.peek(i).kind == "ident":
            i += 1
        return i > 1 and self.peek(i).kind == ":"

    def term(self) -> Term:
        if self._binder_ahead():
            self.advance()
            names = [self.ident()]
            while self.at("ident"):
                names.append(self.ident())
            self.expect(":")
            domain = self.term()
            self.expect(")")
            self.expect("arrow")
            return self._products(names, domain)
        if self.at("ident") and self.peek(1).kind == "fat":
            name = self.ident()
            self.advance()
            self.scope.append((name, False))
            body = self.term()
            self.scope.pop()
            return Abs(name, body)
        lhs = self.app()
        if self.at("arrow"):
            self.advance()
            self.scope.append(("_", False))
            rhs = self.term()
            self.scope.pop()
            return Pi("_", lhs, rhs)
        return lhs

    def _products(self, names: list[str], domain: Term) -> Term:
        confined = domain == Const("Lvl")
        for name in names:
            self.scope.append((name, confined))
        out = self.term()
        del self.scope[-len(names):]
        for n, name in reversed(list(enumerate(names))):
            # the n-th binder of a group sits under the n before it
            dom = domain if confined else shift(domain, n)
            out = CPi(name, dom, out) if confined else Pi(name, dom, out)
        return out

    def _starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind == "ident":
            return tok.text != "def" and self.peek(1).kind != "fat"
        return tok.kind == "("

    def app(self) -> Term:
        head = self.atom()
        if isinstance(head, Const) and not head.sorts:
            for _ in range(self.arities.get(head.name, 0)):
                if not (self.at("number", "ident", "(")):
                    self.fail(f"{head.name} expects {self.arities[head.name]} level argument(s)")
                head = CApp(head, self.level_atom())
        while True:
            if self._starts_atom():
                head = App(head, self.atom_or_app_head())
            elif self.at("ident") and self.peek(1).kind == "fat":
                # a trailing abstraction may be written without parentheses
                head = App(head, self.term())
                break
            else:
                break
        return head

    def atom_or_app_head(self) -> Term:
        # a constant with levels in argument position must be parenthesized,
        # except when it takes none
        t = self.atom()
        if isinstance(t, Const) and not t.sorts and self.arities.get(t.name, 0):
            self.fail(f"{t.name} takes level arguments; parenthesize the application")
        return t

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if tok.kind != "ident":
            self.fail(f"expected a term, found {tok.text or 'end of input'!r}")
        self.advance()
        if tok.text == "Type":
            return TYPE
        if tok.text == "Kind":
            return KIND
        if tok.text == "def":
            self.fail("unexpected 'def'", tok)
        var = self.resolve(tok.text)
        if var is not None:
            return var
        if self.is_confined(tok.text):
            self.fail(f"level variable {tok.text} used as a term", tok)
        if self.at("@"):
            self.advance()
            tags = [self._tag()]
            while self.at(","):
                self.advance()
                tags.append(self._tag())
            return Const(tok.text, tuple(tags))
        return Const(tok.text)

    def _tag(self) -> str:
        tok = self.peek()
        if tok.kind not in ("ident", "number"):
            self.fail("expected a sort tag")
        self.advance()
        if self.profile is None:
            return tok.text
        try:
            return self.profile.normalize(tok.text)
        except ProfileError as exc:
            self.fail(str(exc), tok)

    # -- entries ----------------------------------------------------------

    def body(self, k: int) -> Term:
        if k == 0:
            return self.term()
        if not (self.at("ident") and self.peek(1).kind == "fat"):
            self.fail(f"definition body must start with {k} level abstraction(s)")
        name = self.ident()
        self.advance()
        self.scope.append((name, True))
        inner = self.body(k - 1)
        self.scope.pop()
        return CAbs(name, inner)

    def entry(self) -> Entry:
        is_def = self.at("ident") and self.peek().text == "def"
        if is_def:
            self.advance()
        start = self.peek()
        name = self.ident()
        self.expect(":")
        ty = self.term()
        body = None
        if is_def:
            self.expect("defeq")
            body = self.body(len(leading_cpis(ty)))
        elif self.at("defeq"):
            self.fail("definitions must start with 'def'")
        self.expect(".")
        if name in self._seen:
            self.fail(f"duplicate entry {name}", start)
        self._seen.add(name)
        entry = Entry(name, ty, body)
        self.arities[name] = entry.arity
        return entry

    def signature(self) -> list[Entry]:
        self._seen: set[str] = set()
        entries = []
        while not self.at("eof"):
            entries.append(self.entry())
        return entries


def parse_signature(text: str, arities: Mapping[str, int] | None = None, profile: PTSProfile | None = None) -> list[Entry]:
    """Parse a sequence of entries; ``arities`` gives level arities of known constants."""
    return Parser(text, arities, profile).signature()


def parse_term(text: str, arities: Mapping[str, int] | None = None, profile: PTSProfile | None = None) -> Term:
    p = Parser(text, arities, profile)
    t = p.term()
    p.expect("eof")
    return t


def parse_level(text: str) -> Level:
    p = Parser(text)
    l = p.level()
    p.expect("eof")
    return l


def parse_constraints(text: str) -> list[tuple[str, Equation]]:
    """Parse lines ``entry : level == level .``."""
    p = Parser(text)
    out = []
    while not p.at("eof"):
        name = p.ident()
        p.expect(":")
        lhs = p.level()
        p.expect("eqeq")
        rhs = p.level()
        p.expect(".")
        out.append((name, Equation(lhs, rhs)))
    return out


# -- printing -------------------------------------------------------------

RESERVED = KEYWORDS | {"S", "def"}

_ATOM, _APP, _TOP = 2, 1, 0


def format_level_atom(l: Level) -> str:
    text = lv.format_level(l)
    match l:
        case lv.Var() | lv.Zero():
            return text
    n, base = lv._succ_depth(l)
    if isinstance(base, lv.Zero):
        return text
    return f"({text})"


class Printer:
    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid = set(avoid) | RESERVED

    def pick(self, hint: str, body: Term, names: list[str], confined: frozenset[str]) -> str:
        used = {names[k - 1] for k in free_indices(body) if 0 < k <= len(names)}
        taken = used | self.avoid | confined
        base = hint if hint and hint != "_" else "x"
        return _fresh_name(base, taken)

    def term(self, t: Term, names: list[str] | None = None, confined: frozenset[str] = frozenset(), prec: int = _TOP) -> str:
        names = names if names is not None else []
        match t:
            case Var(k):
                return names[k] if k < len(names) else f"#{k}"
            case Const(name, sorts):
                return f"{name}@{','.join(sorts)}" if sorts else name
            case Sort(kind):
                return kind
            case Pi(name, a, b):
                if 0 in free_indices(b):
                    x = self.pick(name, b, names, confined)
                    text = f"({x} : {self.term(a, names, confined)}) -> {self.term(b, [x] + names, confined)}"
                else:
                    text = f"{self.term(a, names, confined, _APP)} -> {self.term(b, ['_'] + names, confined)}"
                return _paren(text, prec > _TOP)
            case CPi(name, a, b):
                text = f"({name} : {self.term(a, names, confined)}) -> {self.term(b, names, confined | {name})}"
                return _paren(text, prec > _TOP)
            case Abs(name, body):
                x = self.pick(name, body, names, confined)
                return _paren(f"{x} => {self.term(body, [x] + names, confined)}", prec > _TOP)
            case CAbs(name, body):
                return _paren(f"{name} => {self.term(body, names, confined | {name})}", prec > _TOP)
            case App() | CApp():
                head, args = unspine(t)
                parts = [self.term(head, names, confined, _ATOM)]
                for a in args:
                    if is_level(a):
                        parts.append(format_level_atom(a))
                    else:
                        parts.append(self.term(a, names, confined, _ATOM))
                return _paren(" ".join(parts), prec >= _ATOM)
        raise TypeError(f"not a term: {t!r}")

    def entry(self, e: Entry) -> str:
        ty = self.term(e.type)
        if e.body is None:
            return f"{e.name} : {ty}."
        return f"def {e.name} : {ty}\n  := {self.term(e.body)}."


def _paren(text: str, wrap: bool) -> str:
    return f"({text})" if wrap else text


def _fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    stem = base.rstrip("0123456789") or base
    n = 1
    while f"{stem}{n}" in taken:
        n += 1
    return f"{stem}{n}"


def _constant_names(entries: Iterable[Entry]) -> set[str]:
    names = set()
    for e in entries:
        names.add(e.name)
        for t in (e.type, e.body):
            if t is not None:
                names |= {c.name for c in constants(t)}
    return names


def format_term(t: Term, names: list[str] | None = None) -> str:
    return Printer({c.name for c in constants(t)}).term(t, names)


def format_entry(e: Entry) -> str:
    return Printer(_constant_names([e])).entry(e)


def format_signature(entries: Iterable[Entry]) -> str:
    entries = list(entries)
    printer = Printer(_constant_names(entries))
    return "".join(printer.entry(e) + "\n" for e in entries)
