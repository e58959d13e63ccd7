"""Elaboration of sort-annotated entries into universe-polymorphic ones.

The pipeline for one entry is: erase sort tags into fresh level variables,
collect level constraints with a bidirectional pass, solve them with
:func:`univpoly.unify.unify`, abstract the remaining level variables of the
type, and re-check the result with the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import level as lv
from .kernel.check import LVL, TypingError, check_entry
from .kernel.reduce import DEFAULT_FUEL, FuelExhausted, conv, whnf
from .kernel.signature import Context, Entry, Signature
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
    instantiate,
    level_vars,
    map_levels,
    spine,
    subst_levels,
)
from .kernel.upp import FRAMEWORK, upp_signature
from .level import FreshNames, Level, LevelSubstitution
from .unify import Equation, HeuristicSolution, NoSolution, Problem, Stuck, Success, unify


class ElabError(Exception):
    def __init__(self, message: str, path: tuple[str, ...] = ()):
        self.message = message
        self.path = path
        where = "/".join(path) or "<root>"
        super().__init__(f"at {where}: {message}")


class ConvError(ElabError):
    pass


class UnknownConstant(ElabError):
    pass


class UnifyFailed(ElabError):
    def __init__(self, message: str, equation: Equation | None = None):
        super().__init__(message)
        self.equation = equation


class UnifyStuck(ElabError):
    def __init__(self, message: str, remaining: Problem, partial: LevelSubstitution):
        super().__init__(message)
        self.remaining = remaining
        self.partial = partial


class PostCheckFailed(ElabError):
    """The kernel rejected an elaborated entry; this is always a bug."""


@dataclass
class ConstraintSet:
    """Equations in emission order, each tagged with where it came from."""

    equations: list[Equation] = field(default_factory=list)
    provenance: dict[Equation, str] = field(default_factory=dict)

    def add(self, eq: Equation, where: str) -> None:
        self.equations.append(eq)
        self.provenance.setdefault(eq, where)

    def extend(self, other: "ConstraintSet") -> None:
        for eq in other.equations:
            self.add(eq, other.provenance[eq])

    @property
    def problem(self) -> Problem:
        return Problem(tuple(self.equations))

    def __len__(self) -> int:
        return len(self.equations)


# -- erasure ---------------------------------------------------------------


def erase(t: Term, out_sig: Signature, fresh: FreshNames) -> Term:
    """Replace sort tags and missing level arguments by fresh level variables.

    Fresh variables are drawn left to right, depth first.
    """
    match t:
        case Var() | Sort():
            return t
        case Pi(name, a, b):
            return Pi(name, erase(a, out_sig, fresh), erase(b, out_sig, fresh))
        case Abs(name, body):
            return Abs(name, erase(body, out_sig, fresh))
        case App(f, a):
            head = erase(f, out_sig, fresh)
            return App(head, erase(a, out_sig, fresh))
        case Const(name, sorts):
            entry = out_sig.get(name)
            if entry is None or (sorts and name not in FRAMEWORK):
                raise UnknownConstant(f"unknown constant {name}")
            if sorts and len(sorts) != entry.arity:
                raise ElabError(f"{name} expects {entry.arity} sort tag(s), got {len(sorts)}")
            return spine(Const(name), [fresh.var() for _ in range(entry.arity)])
        case CPi() | CAbs() | CApp():
            raise ElabError("level abstractions and applications are not allowed in input terms")
    raise TypeError(f"not a term: {t!r}")


# -- constraint generation -------------------------------------------------


class Elaborator:
    """Bidirectional constraint generation over schematic terms."""

    def __init__(self, sig: Signature, fuel: int = DEFAULT_FUEL, origin: str = ""):
        self.sig = sig
        self.fuel = fuel
        self.origin = origin

    def whnf(self, t: Term) -> Term:
        return whnf(t, self.sig, self.fuel)

    def _where(self, path) -> str:
        return ":".join(filter(None, [self.origin, "/".join(path)])) or "<root>"

    def convert(self, a: Term, b: Term, out: ConstraintSet, path=()) -> None:
        found: list[Equation] = []

        def record(l1: Level, l2: Level) -> bool:
            found.append(Equation(l1, l2))
            return True

        if not conv(a, b, self.sig, record, self.fuel):
            raise ConvError("heads do not match in conversion", path)
        where = self._where(path)
        for eq in found:
            out.add(eq, where)

    def infer(self, ctx: Context, t: Term, out: ConstraintSet, path=()) -> Term:
        match t:
            case Var(k):
                return ctx.lookup(k)
            case Const(name):
                entry = self.sig.get(name)
                if entry is None:
                    raise UnknownConstant(f"unknown constant {name}", path)
                return entry.type
            case Sort("Type"):
                return KIND
            case Sort(_):
                raise ElabError("Kind has no type", path)
            case Pi(name, a, b):
                self.check(ctx, a, TYPE, out, path + ("Pi.dom",))
                s = self.whnf(self.infer(ctx.push(name, a), b, out, path + ("Pi.cod",)))
                if not isinstance(s, Sort):
                    raise ElabError("codomain of a product is not a type", path)
                return s
            case App(f, u):
                fty = self.whnf(self.infer(ctx, f, out, path + ("App.fn",)))
                if not isinstance(fty, Pi):
                    raise ElabError("applied term does not have a product type", path)
                self.check(ctx, u, fty.domain, out, path + ("App.arg",))
                return instantiate(fty.codomain, u)
            case CApp(f, l):
                fty = self.whnf(self.infer(ctx, f, out, path + ("CApp.fn",)))
                if not isinstance(fty, CPi):
                    raise ElabError("level applied to a term without a level product", path)
                return subst_levels(fty.codomain, {fty.name: l})
            case Abs():
                raise ElabError("cannot infer the type of an unannotated abstraction", path)
        raise ElabError(f"unexpected term {t!r}", path)

    def check(self, ctx: Context, t: Term, expected: Term, out: ConstraintSet, path=()) -> None:
        if isinstance(t, Abs):
            ty = self.whnf(expected)
            if not isinstance(ty, Pi):
                raise ElabError("abstraction checked against a non-product type", path)
            self.check(ctx.push(t.name, ty.domain), t.body, ty.codomain, out, path + ("Abs.body",))
            return
        actual = self.infer(ctx, t, out, path)
        self.convert(actual, expected, out, path)


def elab_infer(ctx: Context, assumed: ConstraintSet, t: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> tuple[Term, ConstraintSet]:
    """Infer a type for ``t`` and the constraints making it valid.

    ``assumed`` only documents the hypotheses under which ``ctx`` is valid;
    it does not influence the generated constraints.
    """
    out = ConstraintSet()
    ty = Elaborator(sig, fuel).infer(ctx, t, out)
    return ty, out


def elab_check(ctx: Context, assumed: ConstraintSet, t: Term, expected: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> ConstraintSet:
    out = ConstraintSet()
    Elaborator(sig, fuel).check(ctx, t, expected, out)
    return out


def elab_convert(a: Term, b: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> ConstraintSet:
    out = ConstraintSet()
    Elaborator(sig, fuel).convert(a, b, out)
    return out


# -- generalization --------------------------------------------------------

_PARAM_LETTERS = "ijklmn"


def param_names(k: int) -> list[str]:
    """``i, j, k, l, m, n, i1, j1, ...``: the names given to level parameters."""
    return [
        _PARAM_LETTERS[n % 6] + (str(n // 6) if n >= 6 else "")
        for n in range(k)
    ]


def _tidy(t: Term) -> Term:
    return map_levels(t, lv.normalize)


def generalize(name: str, type: Term, body: Term | None, theta: LevelSubstitution) -> Entry:
    """Apply ``theta``, abstract the type's level variables and zero the body-only ones."""
    ty = subst_levels(type, theta)
    params = level_vars(ty)
    b = subst_levels(body, theta) if body is not None else None
    zero: dict[str, Level] = {}
    if b is not None:
        zero = {v: lv.ZERO for v in level_vars(b) if v not in params}
    # a simultaneous renaming, so old and new names may overlap
    public = param_names(len(params))
    rename: dict[str, Level] = {p: lv.Var(q) for p, q in zip(params, public) if p != q}
    ty = _tidy(subst_levels(ty, rename))
    if b is not None:
        b = _tidy(subst_levels(b, {**zero, **rename}))
    for q in reversed(public):
        ty = CPi(q, LVL, ty)
        if b is not None:
            b = CAbs(q, b)
    return Entry(name, ty, b, tuple(public))


# -- whole entries ---------------------------------------------------------


@dataclass
class ElabOptions:
    heuristic: bool = False
    fuel: int = DEFAULT_FUEL


@dataclass
class ElabEntryResult:
    entry: Entry
    solved: dict[str, Level]
    diagnostics: list[str]
    erased_type: Term
    erased_body: Term | None
    constraints: ConstraintSet
    heuristic_rung: int | None = None


def erase_entry(out_sig: Signature, input: Entry) -> tuple[Term, Term | None]:
    fresh = FreshNames("i", 1)
    ty = erase(input.type, out_sig, fresh)
    body = erase(input.body, out_sig, fresh) if input.body is not None else None
    return ty, body


def elaborate_entry(
    out_sig: Signature,
    input: Entry,
    user_constraints: Problem | Iterable[Equation] = (),
    opts: ElabOptions | None = None,
) -> ElabEntryResult:
    opts = opts or ElabOptions()
    if input.name in out_sig:
        raise ElabError(f"duplicate entry {input.name}")
    ty, body = erase_entry(out_sig, input)
    constraints = ConstraintSet()
    el = Elaborator(out_sig, opts.fuel, input.name)
    try:
        s = el.whnf(el.infer(Context(), ty, constraints, ("type",)))
        if not isinstance(s, Sort):
            raise ElabError("declared type is not a type", ("type",))
        if body is not None:
            el.check(Context(), body, ty, constraints, ("body",))
    except FuelExhausted as exc:
        raise ElabError(str(exc)) from None

    known = set(level_vars(ty)) | (set(level_vars(body)) if body is not None else set())
    for eq in user_constraints:
        unknown = eq.free_vars() - known
        if unknown:
            raise ElabError(f"user constraint {eq} mentions unknown level variable(s) {sorted(unknown)}")
        constraints.add(eq, f"{input.name}:user")

    trace: list[str] = []
    outcome = unify(constraints.problem, FreshNames("u$", 1), opts.heuristic, trace)
    rung = None
    match outcome:
        case Success(theta):
            pass
        case HeuristicSolution(theta, r):
            rung = r
        case NoSolution(eq):
            raise UnifyFailed(f"level constraints of {input.name} have no solution", eq)
        case Stuck(remaining, partial):
            raise UnifyStuck(f"level constraints of {input.name} have no most general unifier", remaining, partial)

    entry = generalize(input.name, ty, body, theta)
    try:
        check_entry(out_sig, entry, opts.fuel)
    except (TypingError, FuelExhausted) as exc:
        raise PostCheckFailed(f"elaborated entry {input.name} does not typecheck: {exc}") from exc
    return ElabEntryResult(entry, dict(theta), trace, ty, body, constraints, rung)


def elaborate_signature(
    entries: Iterable[Entry],
    user_constraints: dict[str, list[Equation]] | None = None,
    opts: ElabOptions | None = None,
    base: Signature | None = None,
) -> tuple[Signature, list[ElabEntryResult]]:
    """Elaborate entries in order, stopping at the first failure."""
    sig = base if base is not None else upp_signature()
    results = []
    for e in entries:
        res = elaborate_entry(sig, e, (user_constraints or {}).get(e.name, ()), opts)
        sig = sig.extend(res.entry)
        results.append(res)
    return sig, results
