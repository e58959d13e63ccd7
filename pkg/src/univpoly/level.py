"""Universe levels: syntax, canonical forms and semantics.

Levels are built from variables, ``0``, successor and binary max.  Two levels
are equivalent exactly when they agree under every valuation of their
variables into the naturals, and every level has a unique canonical form
``p ⊔ n1+i1 ⊔ ... ⊔ nm+im`` with every ``nk <= p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return format_level(self)


@dataclass(frozen=True)
class Zero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Succ:
    arg: "Level"

    def __str__(self) -> str:
        return format_level(self)


@dataclass(frozen=True)
class Max:
    left: "Level"
    right: "Level"

    def __str__(self) -> str:
        return format_level(self)


Level = Var | Zero | Succ | Max

ZERO = Zero()

LevelSubstitution = Mapping[str, Level]
Valuation = Mapping[str, int]


class ConstSlot:
    """Marker for the constant coefficient in :func:`coeff`."""

    def __repr__(self) -> str:
        return "CONST"


CONST = ConstSlot()

_NUM_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def var_order(name: str) -> tuple:
    """Total order on variable names; ``i2`` sorts before ``i10``."""
    m = _NUM_SUFFIX.match(name)
    if m:
        return (m.group(1), int(m.group(2)), name)
    return (name, -1, name)


def nat(n: int, base: Level = ZERO) -> Level:
    """``n + base``; with the default base this is the numeral ``n``."""
    for _ in range(n):
        base = Succ(base)
    return base


def join(levels: Iterable[Level]) -> Level:
    """Left-associated max of ``levels``; the empty join is ``0``."""
    result: Level | None = None
    for l in levels:
        result = l if result is None else Max(result, l)
    return ZERO if result is None else result


def free_vars(l: Level) -> set[str]:
    return set(iter_vars(l))


def iter_vars(l: Level) -> Iterator[str]:
    """Variables of ``l`` in left-to-right occurrence order (with repeats)."""
    stack = [l]
    while stack:
        match stack.pop():
            case Var(name):
                yield name
            case Succ(arg):
                stack.append(arg)
            case Max(left, right):
                stack.append(right)
                stack.append(left)
            case Zero():
                pass


@dataclass(frozen=True)
class CanonicalLevel:
    """Coefficient view of a level's canonical form.

    ``var_coeffs`` holds ``(name, n)`` pairs sorted by :func:`var_order`; a
    variable that is absent has coefficient minus infinity.
    """

    const_coeff: int
    var_coeffs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.const_coeff < 0:
            raise ValueError("negative constant coefficient")
        for name, n in self.var_coeffs:
            if not 0 <= n <= self.const_coeff:
                raise ValueError(f"coefficient {n} of {name} exceeds constant {self.const_coeff}")

    @classmethod
    def build(cls, const_coeff: int, coeffs: Mapping[str, int]) -> "CanonicalLevel":
        items = tuple(sorted(coeffs.items(), key=lambda kv: var_order(kv[0])))
        return cls(const_coeff, items)

    @property
    def coeffs(self) -> dict[str, int]:
        return dict(self.var_coeffs)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.var_coeffs)

    def all_coeffs(self) -> list[int]:
        return [self.const_coeff] + [n for _, n in self.var_coeffs]

    def __str__(self) -> str:
        return format_level(render(self))


def canonicalize(l: Level) -> CanonicalLevel:
    # Walk the tree tracking the successor depth; a variable under depth d
    # contributes d to its own coefficient and (via i ⊔ 0) to the constant.
    const = 0
    coeffs: dict[str, int] = {}
    stack: list[tuple[Level, int]] = [(l, 0)]
    while stack:
        node, depth = stack.pop()
        match node:
            case Var(name):
                if coeffs.get(name, -1) < depth:
                    coeffs[name] = depth
                const = max(const, depth)
            case Zero():
                const = max(const, depth)
            case Succ(arg):
                stack.append((arg, depth + 1))
            case Max(left, right):
                stack.append((right, depth))
                stack.append((left, depth))
    return CanonicalLevel.build(const, coeffs)


def coeff(c: CanonicalLevel, at: str | ConstSlot) -> int | float:
    """Coefficient of a variable (``-inf`` when absent) or of :data:`CONST`."""
    if isinstance(at, ConstSlot):
        return c.const_coeff
    for name, n in c.var_coeffs:
        if name == at:
            return n
    return float("-inf")


def levels_equal(l1: Level, l2: Level) -> bool:
    return canonicalize(l1) == canonicalize(l2)


def interpret(l: Level, valuation: Valuation) -> int:
    """Value of ``l`` with variables read from ``valuation`` (default 0)."""
    c = canonicalize(l)
    return max([c.const_coeff] + [n + valuation.get(name, 0) for name, n in c.var_coeffs])


def eval_level(l: Level, valuation: Valuation) -> int:
    """Direct structural evaluation, independent of canonical forms."""
    match l:
        case Var(name):
            return valuation.get(name, 0)
        case Zero():
            return 0
        case Succ(arg):
            return eval_level(arg, valuation) + 1
        case Max(left, right):
            return max(eval_level(left, valuation), eval_level(right, valuation))
    raise TypeError(f"not a level: {l!r}")


def subst_level(l: Level, theta: LevelSubstitution) -> Level:
    if not theta:
        return l
    match l:
        case Var(name):
            return theta.get(name, l)
        case Zero():
            return l
        case Succ(arg):
            return Succ(subst_level(arg, theta))
        case Max(left, right):
            return Max(subst_level(left, theta), subst_level(right, theta))
    raise TypeError(f"not a level: {l!r}")


def render(c: CanonicalLevel) -> Level:
    """Level of shape ``p ⊔ n1+i1 ⊔ ...`` with variables in :func:`var_order`."""
    return join([nat(c.const_coeff)] + [nat(n, Var(name)) for name, n in c.var_coeffs])


def normalize(l: Level) -> Level:
    """Compact representative: canonical form without a redundant ``0``."""
    c = canonicalize(l)
    parts: list[Level] = [nat(n, Var(name)) for name, n in c.var_coeffs]
    if not parts or c.const_coeff > max(n for _, n in c.var_coeffs):
        parts.insert(0, nat(c.const_coeff))
    return join(parts)


def compose(theta: LevelSubstitution, sigma: LevelSubstitution) -> dict[str, Level]:
    """``theta`` followed by ``sigma``: ``i ↦ i[theta][sigma]`` on both domains."""
    out = {name: subst_level(l, sigma) for name, l in theta.items()}
    for name, l in sigma.items():
        out.setdefault(name, l)
    return out


def is_idempotent(theta: LevelSubstitution) -> bool:
    return all(
        levels_equal(subst_level(l, theta), l) for l in theta.values()
    )


class FreshNames:
    """Counter-backed supply of fresh variable names."""

    def __init__(self, prefix: str = "u$", start: int = 1):
        self.prefix = prefix
        self.counter = start

    def __call__(self) -> str:
        name = f"{self.prefix}{self.counter}"
        self.counter += 1
        return name

    def var(self) -> Var:
        return Var(self())


def _succ_depth(l: Level) -> tuple[int, Level]:
    n = 0
    while isinstance(l, Succ):
        n += 1
        l = l.arg
    return n, l


def format_level(l: Level) -> str:
    """Render with the ``n + l`` / numeral sugar and infix ``⊔``."""
    match l:
        case Var(name):
            return name
        case Zero():
            return "0"
        case Succ():
            n, base = _succ_depth(l)
            if isinstance(base, Zero):
                return str(n)
            inner = format_level(base)
            if isinstance(base, Max):
                inner = f"({inner})"
            return f"{n}+{inner}"
        case Max(left, right):
            rhs = format_level(right)
            if isinstance(right, Max):
                rhs = f"({rhs})"
            return f"{format_level(left)} ⊔ {rhs}"
    raise TypeError(f"not a level: {l!r}")


def format_subst(theta: LevelSubstitution) -> str:
    items = sorted(theta.items(), key=lambda kv: var_order(kv[0]))
    return "{" + ", ".join(f"{k} ↦ {format_level(v)}" for k, v in items) + "}"
