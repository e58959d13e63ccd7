"""Term syntax of the framework with confinement.

Regular variables are de Bruijn indices; binder names are kept only as
display hints and do not take part in equality.  Confined (level) variables
are named, since levels are first-order and their binders only occur in the
prenex position of an entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .. import level as lv
from ..level import Level


@dataclass(frozen=True)
class Var:
    index: int
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Const:
    name: str
    sorts: tuple[str, ...] = ()


@dataclass(frozen=True)
class Sort:
    kind: str  # "Type" or "Kind"


TYPE = Sort("Type")
KIND = Sort("Kind")


@dataclass(frozen=True)
class Pi:
    name: str = field(compare=False)
    domain: "Term"
    codomain: "Term"


@dataclass(frozen=True)
class Abs:
    name: str = field(compare=False)
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class CPi:
    name: str
    domain: "Term"
    codomain: "Term"


@dataclass(frozen=True)
class CAbs:
    name: str
    body: "Term"


@dataclass(frozen=True)
class CApp:
    fn: "Term"
    arg: Level


Term = Var | Const | Sort | Pi | Abs | App | CPi | CAbs | CApp

LEVEL_TYPES = (lv.Var, lv.Zero, lv.Succ, lv.Max)


def is_level(x) -> bool:
    return isinstance(x, LEVEL_TYPES)


def unspine(t: Term) -> tuple[Term, list]:
    """Split ``h a1 .. an`` into its head and arguments (terms or levels)."""
    args: list = []
    while isinstance(t, (App, CApp)):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def spine(head: Term, args: Sequence) -> Term:
    for a in args:
        head = CApp(head, a) if is_level(a) else App(head, a)
    return head


def apply_const(name: str, *args) -> Term:
    return spine(Const(name), args)


# -- de Bruijn plumbing -----------------------------------------------------


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t
    match t:
        case Var(k, name):
            return Var(k + d, name) if k >= cutoff else t
        case Const() | Sort():
            return t
        case Pi(name, a, b):
            return Pi(name, shift(a, d, cutoff), shift(b, d, cutoff + 1))
        case Abs(name, body):
            return Abs(name, shift(body, d, cutoff + 1))
        case App(f, a):
            return App(shift(f, d, cutoff), shift(a, d, cutoff))
        case CPi(name, a, b):
            return CPi(name, shift(a, d, cutoff), shift(b, d, cutoff))
        case CAbs(name, body):
            return CAbs(name, shift(body, d, cutoff))
        case CApp(f, l):
            return CApp(shift(f, d, cutoff), l)
    raise TypeError(f"not a term: {t!r}")


def _subst_indices(t: Term, terms: Mapping[int, Term], depth: int, down: int) -> Term:
    # Replace free index k (relative to depth) by terms[k]; other free indices
    # above the replaced ones are lowered by ``down``.
    match t:
        case Var(k, name):
            if k < depth:
                return t
            j = k - depth
            if j in terms:
                return shift(terms[j], depth)
            return Var(k - down, name) if down else t
        case Const() | Sort():
            return t
        case Pi(name, a, b):
            return Pi(name, _subst_indices(a, terms, depth, down), _subst_indices(b, terms, depth + 1, down))
        case Abs(name, body):
            return Abs(name, _subst_indices(body, terms, depth + 1, down))
        case App(f, a):
            return App(_subst_indices(f, terms, depth, down), _subst_indices(a, terms, depth, down))
        case CPi(name, a, b):
            return CPi(name, _subst_indices(a, terms, depth, down), _subst_indices(b, terms, depth, down))
        case CAbs(name, body):
            return CAbs(name, _subst_indices(body, terms, depth, down))
        case CApp(f, l):
            return CApp(_subst_indices(f, terms, depth, down), l)
    raise TypeError(f"not a term: {t!r}")


def instantiate(body: Term, arg: Term) -> Term:
    """``body[0 ↦ arg]`` for the body of a binder, removing that binder."""
    return _subst_indices(body, {0: arg}, 0, 1)


def free_indices(t: Term, depth: int = 0) -> set[int]:
    match t:
        case Var(k):
            return {k - depth} if k >= depth else set()
        case Const() | Sort():
            return set()
        case Pi(_, a, b):
            return free_indices(a, depth) | free_indices(b, depth + 1)
        case Abs(_, body):
            return free_indices(body, depth + 1)
        case App(f, a):
            return free_indices(f, depth) | free_indices(a, depth)
        case CPi(_, a, b):
            return free_indices(a, depth) | free_indices(b, depth)
        case CAbs(_, body) | CApp(body, _):
            return free_indices(body, depth)
    raise TypeError(f"not a term: {t!r}")


# -- level variables --------------------------------------------------------


def iter_level_vars(t: Term, bound: frozenset[str] = frozenset()) -> Iterator[str]:
    """Free level variables in left-to-right, depth-first occurrence order."""
    match t:
        case Var() | Const() | Sort():
            return
        case Pi(_, a, b) | App(a, b):
            yield from iter_level_vars(a, bound)
            yield from iter_level_vars(b, bound)
        case Abs(_, body):
            yield from iter_level_vars(body, bound)
        case CPi(name, a, b):
            yield from iter_level_vars(a, bound)
            yield from iter_level_vars(b, bound | {name})
        case CAbs(name, body):
            yield from iter_level_vars(body, bound | {name})
        case CApp(f, l):
            yield from iter_level_vars(f, bound)
            for name in lv.iter_vars(l):
                if name not in bound:
                    yield name


def level_vars(t: Term) -> list[str]:
    """Distinct free level variables of ``t`` in first-occurrence order."""
    return list(dict.fromkeys(iter_level_vars(t)))


def fresh_binder(name: str, avoid: set[str]) -> str:
    candidate = name
    n = 1
    while candidate in avoid:
        candidate = f"{name}{n}"
        n += 1
    return candidate


def subst_levels(t: Term, theta: Mapping[str, Level]) -> Term:
    """Apply a level substitution, renaming confined binders that would capture."""
    if not theta:
        return t
    match t:
        case Var() | Const() | Sort():
            return t
        case Pi(name, a, b):
            return Pi(name, subst_levels(a, theta), subst_levels(b, theta))
        case Abs(name, body):
            return Abs(name, subst_levels(body, theta))
        case App(f, a):
            return App(subst_levels(f, theta), subst_levels(a, theta))
        case CApp(f, l):
            return CApp(subst_levels(f, theta), lv.subst_level(l, theta))
        case CPi(name, _, _) | CAbs(name, _):
            inner = {k: v for k, v in theta.items() if k != name}
            captured = set()
            for v in inner.values():
                captured |= lv.free_vars(v)
            if name in captured:
                new = fresh_binder(name, captured | set(inner) | set(level_vars(t)))
                inner[name] = lv.Var(new)
                name_out = new
            else:
                name_out = name
            if isinstance(t, CPi):
                return CPi(name_out, subst_levels(t.domain, theta), subst_levels(t.codomain, inner))
            return CAbs(name_out, subst_levels(t.body, inner))
    raise TypeError(f"not a term: {t!r}")


def subst_term(
    t: Term,
    terms: Mapping[int, object] | None = None,
    levels: Mapping[str, object] | None = None,
) -> Term:
    """Simultaneous substitution of free regular indices and level variables.

    Regular variables may only be replaced by terms and level variables only
    by levels.
    """
    terms = terms or {}
    levels = levels or {}
    for k, v in terms.items():
        if is_level(v) or not isinstance(k, int):
            raise TypeError(f"regular variable {k} cannot be mapped to a level")
    for k, v in levels.items():
        if not is_level(v):
            raise TypeError(f"level variable {k} can only be mapped to a level, got {v!r}")
    out = _subst_indices(t, terms, 0, 0) if terms else t
    return subst_levels(out, levels)


def map_levels(t: Term, fn: Callable[[Level], Level]) -> Term:
    """Apply ``fn`` to every level argument (bound names are not renamed)."""
    match t:
        case Var() | Const() | Sort():
            return t
        case Pi(name, a, b):
            return Pi(name, map_levels(a, fn), map_levels(b, fn))
        case Abs(name, body):
            return Abs(name, map_levels(body, fn))
        case App(f, a):
            return App(map_levels(f, fn), map_levels(a, fn))
        case CPi(name, a, b):
            return CPi(name, map_levels(a, fn), map_levels(b, fn))
        case CAbs(name, body):
            return CAbs(name, map_levels(body, fn))
        case CApp(f, l):
            return CApp(map_levels(f, fn), fn(l))
    raise TypeError(f"not a term: {t!r}")


def constants(t: Term) -> Iterator[Const]:
    match t:
        case Const():
            yield t
        case Var() | Sort():
            return
        case Pi(_, a, b) | App(a, b) | CPi(_, a, b):
            yield from constants(a)
            yield from constants(b)
        case Abs(_, body) | CAbs(_, body) | CApp(body, _):
            yield from constants(body)


def leading_cpis(t: Term) -> list[str]:
    names = []
    while isinstance(t, CPi):
        names.append(t.name)
        t = t.codomain
    return names


def size(t: Term) -> int:
    match t:
        case Var() | Const() | Sort():
            return 1
        case Pi(_, a, b) | App(a, b) | CPi(_, a, b):
            return 1 + size(a) + size(b)
        case Abs(_, body) | CAbs(_, body) | CApp(body, _):
            return 1 + size(body)
    raise TypeError(f"not a term: {t!r}")
