"""The fixed global signature of the universe-polymorphic predicative theory.

Levels (``Lvl`` with ``0``, ``S`` and ``⊔``) are built into the term syntax
and compared by :func:`univpoly.level.levels_equal`, which realizes the six
level equations below.  The two rewrite rules are hard-wired in
:mod:`univpoly.kernel.reduce`.
"""

from __future__ import annotations

from functools import lru_cache

from .signature import Signature

FRAMEWORK = ("Ty", "Tm", "U", "Pi", "Lam", "App")

UPP_TEXT = """
Lvl : Type.
Ty : (l : Lvl) -> Type.
Tm : (l : Lvl) -> Ty l -> Type.
U : (l : Lvl) -> Ty (S l).
Pi : (l : Lvl) -> (l' : Lvl) -> (A : Ty l) -> (B : Tm l A -> Ty l') -> Ty (l ⊔ l').
Lam : (l : Lvl) -> (l' : Lvl) -> (A : Ty l) -> (B : Tm l A -> Ty l')
  -> ((x : Tm l A) -> Tm l' (B x)) -> Tm (l ⊔ l') (Pi l l' A B).
App : (l : Lvl) -> (l' : Lvl) -> (A : Ty l) -> (B : Tm l A -> Ty l')
  -> (t : Tm (l ⊔ l') (Pi l l' A B)) -> (u : Tm l A) -> Tm l' (B u).
"""

REWRITE_RULES = (
    ("Tm l' (U l)", "Ty l"),
    ("App l l' A B (Lam l'' l''' A' B' t) u", "t u"),
)

LEVEL_EQUATIONS = (
    ("i1 ⊔ (i2 ⊔ i3)", "(i1 ⊔ i2) ⊔ i3"),
    ("i1 ⊔ i2", "i2 ⊔ i1"),
    ("S (i1 ⊔ i2)", "S i1 ⊔ S i2"),
    ("i ⊔ S i", "S i"),
    ("i ⊔ 0", "i"),
    ("i ⊔ i", "i"),
)


@lru_cache(maxsize=1)
def upp_signature() -> Signature:
    from ..syntax import parse_signature

    sig = Signature()
    for entry in parse_signature(UPP_TEXT):
        sig = sig.extend(entry)
    return sig


def upp_arities() -> dict[str, int]:
    return {e.name: e.arity for e in upp_signature()}
