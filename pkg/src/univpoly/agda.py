"""Agda-flavoured rendering of an output signature.

Object types are read Russell-style: ``Tm l A`` and ``Ty l`` disappear into
``A`` and ``Set l``, ``U l`` becomes ``Set l``, and the encoded products,
abstractions and applications become native ones.  Purely textual; the
result is not re-parsed or checked here.
"""

from __future__ import annotations

import re
from typing import Iterable

from . import level as lv
from .kernel.signature import Entry
from .kernel.terms import Abs, App, CAbs, CApp, Const, CPi, Pi, Sort, Term, Var, constants, free_indices, is_level, shift, unspine
from .level import Level

_ATOM, _APP, _TOP = 2, 1, 0


def agda_level(l: Level, prec: int = _TOP) -> str:
    return _level(lv.normalize(l), prec)


def _level(l: Level, prec: int) -> str:
    match l:
        case lv.Var(name):
            return name
        case lv.Zero():
            return "lzero"
        case lv.Succ(arg):
            return _paren(f"lsuc {_level(arg, _ATOM)}", prec >= _ATOM)
        case lv.Max(left, right):
            # ⊔ is left-associative and binds looser than application
            return _paren(f"{_level(left, _TOP)} ⊔ {_level(right, _APP)}", prec >= _APP)
    raise TypeError(f"not a level: {l!r}")


class AgdaPrinter:
    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid = set(avoid)

    def _pick(self, hint: str, body: Term, names: list[str]) -> str:
        used = {names[k - 1] for k in free_indices(body) if 0 < k <= len(names)}
        base = hint if hint and hint != "_" else "x"
        name, n = base, 1
        while name in used | self.avoid:
            name = f"{base}{n}"
            n += 1
        return name

    def _binder(self, x: str, dom: str, cod: str, prec: int) -> str:
        return _paren(f"({x} : {dom}) → {cod}", prec > _TOP)

    def term(self, t: Term, names: list[str], prec: int = _TOP) -> str:
        head, args = unspine(t)
        if isinstance(head, Const) and not head.sorts:
            special = self._framework(head.name, args, names, prec)
            if special is not None:
                return special
        match t:
            case Var(k):
                return names[k] if k < len(names) else f"#{k}"
            case Const(name):
                return "Level" if name == "Lvl" else name
            case Sort("Type"):
                return "Set"
            case Sort(kind):
                return kind
            case Pi(name, a, b):
                return self._product(name, a, b, names, prec)
            case CPi(name, _, b):
                return self._binder(name, "Level", self.term(b, names), prec)
            case Abs(name, body):
                x = self._pick(name, body, names)
                return _paren(f"λ {x} → {self.term(body, [x] + names)}", prec > _TOP)
            case CAbs(name, body):
                return _paren(f"λ {name} → {self.term(body, names)}", prec > _TOP)
            case App() | CApp():
                return self._apply(self.term(head, names, _ATOM), args, names, prec)
        raise TypeError(f"not a term: {t!r}")

    def _apply(self, head: str, args: list, names: list[str], prec: int) -> str:
        parts = [head] + [agda_level(a, _ATOM) if is_level(a) else self.term(a, names, _ATOM) for a in args]
        return _paren(" ".join(parts), prec >= _ATOM and len(parts) > 1)

    def _product(self, name: str, a: Term, b: Term, names: list[str], prec: int) -> str:
        if 0 in free_indices(b):
            x = self._pick(name, b, names)
            return self._binder(x, self.term(a, names), self.term(b, [x] + names), prec)
        return _paren(f"{self.term(a, names, _APP)} → {self.term(b, ['_'] + names)}", prec > _TOP)

    def _framework(self, name: str, args: list, names: list[str], prec: int) -> str | None:
        match name, args:
            case ("Ty", [l]) | ("U", [l]):
                return _paren(f"Set {agda_level(l, _ATOM)}", prec >= _ATOM)
            case "Tm", [_, a, *rest]:
                return self._apply_rest(self.term(a, names, _ATOM if rest else prec), rest, names, prec)
            case "Pi", [_, _, a, Abs(x, b)]:
                return self._product(x, a, b, names, prec)
            case "Pi", [_, _, a, fam]:
                body = App(shift(fam, 1), Var(0))
                x = self._pick("x", body, names)
                return self._binder(x, self.term(a, names), self.term(body, [x] + names), prec)
            case "Lam", [_, _, _, _, t, *rest]:
                return self._apply_rest(self.term(t, names, _ATOM if rest else prec), rest, names, prec)
            case "App", [_, _, _, _, t, u, *rest]:
                return self._apply(self.term(t, names, _APP), [u, *rest], names, prec)
        return None

    def _apply_rest(self, head: str, rest: list, names: list[str], prec: int) -> str:
        return self._apply(head, rest, names, prec) if rest else head

    def entry(self, e: Entry) -> list[str]:
        lines = [f"{e.name} : {self.term(e.type, [])}"]
        if e.body is not None:
            lines.append(f"{e.name} = {self.term(e.body, [])}")
        return lines


def _paren(text: str, wrap: bool) -> str:
    return f"({text})" if wrap else text


def _module_name(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_]", "_", name) or "Output"
    return cleaned[0].upper() + cleaned[1:]


def export_agda_style(entries: Iterable[Entry], module: str = "Output") -> str:
    """Render entries as an Agda module: declarations under ``postulate``."""
    entries = list(entries)
    avoid = set()
    for e in entries:
        avoid.add(e.name)
        for t in (e.type, e.body):
            if t is not None:
                avoid |= {c.name for c in constants(t)}
    printer = AgdaPrinter(avoid)
    out = [f"module {_module_name(module)} where", "", "open import Agda.Primitive", ""]
    in_postulate = False
    for e in entries:
        lines = printer.entry(e)
        if e.body is None:
            if not in_postulate:
                out.append("postulate")
                in_postulate = True
            out.extend("  " + line for line in lines)
            continue
        if in_postulate:
            out.append("")
            in_postulate = False
        out.extend(lines)
        out.append("")
    if in_postulate:
        out.append("")
    return "\n".join(out)
