"""Sort specifications for input theories.

An input theory is described by its sorts, axioms ``(s, s')`` and product
rules ``(s, s', s'')``.  The elaborator discards sort information, so a
profile is only used to validate the sort tags of framework constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class PTSProfile:
    name: str
    is_sort: Callable[[str], bool]
    axiom: Callable[[str], str | None]
    rule: Callable[[str, str], str | None]
    aliases: dict[str, str] = field(default_factory=dict)

    def normalize(self, tag: str) -> str:
        tag = self.aliases.get(tag, tag)
        if not self.is_sort(tag):
            raise ProfileError(f"unknown sort {tag!r} for profile {self.name}")
        return tag


def _finite(name: str, sorts, axioms, rules, aliases=None) -> PTSProfile:
    sorts = frozenset(sorts)
    ax = {}
    for s, t in axioms:
        if s in ax and ax[s] != t:
            raise ProfileError(f"axioms are not functional at {s}")
        ax[s] = t
    rl = {}
    for s, t, u in rules:
        if (s, t) in rl and rl[s, t] != u:
            raise ProfileError(f"rules are not functional at ({s}, {t})")
        rl[s, t] = u
    for s in list(ax) + list(ax.values()) + [x for k in rl for x in k] + list(rl.values()):
        if s not in sorts:
            raise ProfileError(f"sort {s} used but not declared")
    return PTSProfile(
        name,
        sorts.__contains__,
        ax.get,
        lambda s, t: rl.get((s, t)),
        dict(aliases or {}),
    )


IMPREDICATIVE = _finite(
    "I",
    {"o", "box"},
    [("o", "box")],
    [("o", "o", "o"), ("box", "o", "o"), ("box", "box", "box")],
    {"Ω": "o", "□": "box"},
)


def _is_nat(s: str) -> bool:
    return s.isdigit()


PREDICATIVE = PTSProfile(
    "P",
    _is_nat,
    lambda s: str(int(s) + 1),
    lambda s, t: str(max(int(s), int(t))),
)

PROFILES = {"I": IMPREDICATIVE, "P": PREDICATIVE}


def parse_inline(text: str) -> PTSProfile:
    """Parse ``sorts=a,b;axioms=a:b;rules=a,a,a|b,a,a`` into a finite profile."""
    parts = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        key, _, value = chunk.partition("=")
        parts[key.strip()] = value.strip()
    if "sorts" not in parts:
        raise ProfileError("inline profile needs sorts=...")
    sorts = [s.strip() for s in parts["sorts"].split(",") if s.strip()]
    axioms = []
    for a in filter(None, parts.get("axioms", "").split(",")):
        s, _, t = a.partition(":")
        axioms.append((s.strip(), t.strip()))
    rules = []
    for r in filter(None, parts.get("rules", "").split("|")):
        triple = [x.strip() for x in r.split(",")]
        if len(triple) != 3:
            raise ProfileError(f"rule {r!r} is not a triple")
        rules.append(tuple(triple))
    return _finite("inline", sorts, axioms, rules)


def get_profile(text: str) -> PTSProfile:
    if text in PROFILES:
        return PROFILES[text]
    if "=" in text:
        return parse_inline(text)
    raise ProfileError(f"unknown profile {text!r}; use one of {sorted(PROFILES)} or an inline description")
