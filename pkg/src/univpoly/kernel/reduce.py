"""Weak-head reduction and conversion for the predicative polymorphic theory."""

from __future__ import annotations

from typing import Callable

from ..level import Level, levels_equal
from ..level import Var as LVar
from .signature import Signature
from .terms import (
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
    fresh_binder,
    instantiate,
    is_level,
    level_vars,
    spine,
    subst_levels,
    unspine,
)

DEFAULT_FUEL = 10**6


class FuelExhausted(Exception):
    """Raised when head reduction runs past its step budget."""


def _rule_step(head: Const, args: list, sig: Signature, fuel: int) -> Term | None:
    # Tm l' (U l) --> Ty l
    if head.name == "Tm" and len(args) >= 2 and is_level(args[0]) and not is_level(args[1]):
        h, inner = unspine(whnf(args[1], sig, fuel))
        if isinstance(h, Const) and h.name == "U" and len(inner) == 1 and is_level(inner[0]):
            return spine(CApp(Const("Ty"), inner[0]), args[2:])
    # App l l' A B (Lam l'' l''' A' B' t) u --> t u
    if head.name == "App" and len(args) >= 6:
        h, inner = unspine(whnf(args[4], sig, fuel))
        if isinstance(h, Const) and h.name == "Lam" and len(inner) == 5:
            return spine(App(inner[4], args[5]), args[6:])
    return None


def whnf(t: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> Term:
    """Reduce ``t`` at the head with beta, confined beta, delta and the two theory rules."""
    steps = 0
    while True:
        head, args = unspine(t)
        nxt: Term | None = None
        match head:
            case Abs(_, body) if args and not is_level(args[0]):
                nxt = spine(instantiate(body, args[0]), args[1:])
            case CAbs(name, body) if args and is_level(args[0]):
                nxt = spine(subst_levels(body, {name: args[0]}), args[1:])
            case Const(name):
                entry = sig.get(name)
                if entry is not None and entry.body is not None:
                    nxt = spine(entry.body, args)
                else:
                    nxt = _rule_step(head, args, sig, fuel)
        if nxt is None:
            return t
        steps += 1
        if steps > fuel:
            raise FuelExhausted(f"head reduction exceeded {fuel} steps")
        t = nxt


LevelHook = Callable[[Level, Level], bool]


def _rename_confined(a_name: str, a_body: Term, b_name: str, b_body: Term) -> tuple[Term, Term]:
    # Bring two confined binders to a common name that is free in neither body.
    if a_name == b_name:
        return a_body, b_body
    avoid = (set(level_vars(a_body)) - {a_name}) | (set(level_vars(b_body)) - {b_name})
    common = a_name if a_name not in avoid else fresh_binder(a_name, avoid | {b_name})
    if common != a_name:
        a_body = subst_levels(a_body, {a_name: LVar(common)})
    return a_body, subst_levels(b_body, {b_name: LVar(common)})


def conv(a: Term, b: Term, sig: Signature, on_level: LevelHook, fuel: int = DEFAULT_FUEL) -> bool:
    """Conversion check shared by the kernel and the elaborator.

    Both sides are put in weak-head normal form and compared structurally;
    every pair of level arguments is handed to ``on_level``, which either
    decides it (kernel) or records it as a constraint (elaborator).
    """
    if a == b:
        return True
    return _conv_whnf(whnf(a, sig, fuel), whnf(b, sig, fuel), sig, on_level, fuel)


def _conv_whnf(a: Term, b: Term, sig: Signature, on_level: LevelHook, fuel: int) -> bool:
    match a, b:
        case Var(i), Var(j):
            return i == j
        case Const(c), Const(d):
            return c == d
        case Sort(s), Sort(r):
            return s == r
        case Abs(_, t), Abs(_, u):
            return conv(t, u, sig, on_level, fuel)
        case Pi(_, a1, b1), Pi(_, a2, b2):
            return conv(a1, a2, sig, on_level, fuel) and conv(b1, b2, sig, on_level, fuel)
        case App(f, x), App(g, y):
            return _conv_whnf(f, g, sig, on_level, fuel) and conv(x, y, sig, on_level, fuel)
        case CApp(f, l), CApp(g, m):
            return _conv_whnf(f, g, sig, on_level, fuel) and on_level(l, m)
        case CPi(i, a1, b1), CPi(j, a2, b2):
            b1, b2 = _rename_confined(i, b1, j, b2)
            return conv(a1, a2, sig, on_level, fuel) and conv(b1, b2, sig, on_level, fuel)
        case CAbs(i, t), CAbs(j, u):
            t, u = _rename_confined(i, t, j, u)
            return conv(t, u, sig, on_level, fuel)
    return False


def convert(a: Term, b: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> bool:
    """Decide ``a ≡ b``, comparing level arguments up to level equivalence."""
    return conv(a, b, sig, levels_equal, fuel)
