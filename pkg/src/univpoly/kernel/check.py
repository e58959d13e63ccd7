"""Bidirectional typechecker for entries of the output theory."""

from __future__ import annotations

from ..level import Level, Var as LVar, iter_vars
from .reduce import DEFAULT_FUEL, convert, whnf
from .signature import Context, DuplicateName, Entry, Signature
from .terms import KIND, TYPE, Abs, App, CAbs, CApp, Const, CPi, Pi, Sort, Term, Var, instantiate, subst_levels

LVL = Const("Lvl")


class TypingError(Exception):
    """A typing rule failed; ``path`` locates the offending subterm."""

    def __init__(self, rule: str, message: str, path: tuple[str, ...] = ()):
        self.rule = rule
        self.message = message
        self.path = path
        where = "/".join(path) or "<root>"
        super().__init__(f"[{rule}] at {where}: {message}")


class Checker:
    def __init__(self, sig: Signature, fuel: int = DEFAULT_FUEL):
        self.sig = sig
        self.fuel = fuel

    def whnf(self, t: Term) -> Term:
        return whnf(t, self.sig, self.fuel)

    def check_level(self, ctx: Context, l: Level, path) -> None:
        for name in iter_vars(l):
            ty = ctx.confined(name)
            if ty is None:
                raise TypingError("Level", f"unbound level variable {name}", path)

    def infer(self, ctx: Context, t: Term, path: tuple[str, ...] = ()) -> Term:
        match t:
            case Var(k):
                try:
                    return ctx.lookup(k)
                except LookupError as exc:
                    raise TypingError("Var", str(exc), path) from None
            case Const(name):
                entry = self.sig.get(name)
                if entry is None:
                    raise TypingError("Cons", f"unknown constant {name}", path)
                return entry.type
            case Sort("Type"):
                return KIND
            case Sort(_):
                raise TypingError("Sort", "Kind has no type", path)
            case Pi(name, a, b):
                self.check(ctx, a, TYPE, path + ("Pi.dom",))
                return self._sort_of(ctx.push(name, a), b, path + ("Pi.cod",), "Arrow")
            case CPi(name, a, b):
                self.check(ctx, a, TYPE, path + ("CPi.dom",))
                return self._sort_of(ctx.push_confined(name, a), b, path + ("CPi.cod",), "ArrowC")
            case App(f, u):
                fty = self.whnf(self.infer(ctx, f, path + ("App.fn",)))
                if not isinstance(fty, Pi):
                    raise TypingError("App", "function does not have a product type", path)
                self.check(ctx, u, fty.domain, path + ("App.arg",))
                return instantiate(fty.codomain, u)
            case CApp(f, l):
                fty = self.whnf(self.infer(ctx, f, path + ("CApp.fn",)))
                if not isinstance(fty, CPi):
                    raise TypingError("AppC", "function does not have a confined product type", path)
                self.check_level(ctx, l, path + ("CApp.arg",))
                return subst_levels(fty.codomain, {fty.name: l})
            case Abs() | CAbs():
                raise TypingError("Abs", "cannot infer the type of an unannotated abstraction", path)
        raise TypingError("Term", f"not a term: {t!r}", path)

    def _sort_of(self, ctx: Context, b: Term, path, rule: str) -> Term:
        s = self.whnf(self.infer(ctx, b, path))
        if not isinstance(s, Sort):
            raise TypingError(rule, "codomain is not a type", path)
        return s

    def check(self, ctx: Context, t: Term, expected: Term, path: tuple[str, ...] = ()) -> None:
        match t:
            case Abs(name, body):
                ty = self.whnf(expected)
                if not isinstance(ty, Pi):
                    raise TypingError("Abs", "abstraction checked against a non-product type", path)
                self.check(ctx.push(name, ty.domain), body, ty.codomain, path + ("Abs.body",))
            case CAbs(name, body):
                ty = self.whnf(expected)
                if not isinstance(ty, CPi):
                    raise TypingError("AbsC", "confined abstraction checked against a non-confined product", path)
                cod = ty.codomain if ty.name == name else subst_levels(ty.codomain, {ty.name: LVar(name)})
                self.check(ctx.push_confined(name, ty.domain), body, cod, path + ("CAbs.body",))
            case _:
                actual = self.infer(ctx, t, path)
                if not convert(actual, expected, self.sig, self.fuel):
                    raise TypingError("Conv", "inferred type is not convertible to the expected type", path)


def infer_type(ctx: Context, t: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> Term:
    return Checker(sig, fuel).infer(ctx, t)


def check_type(ctx: Context, t: Term, expected: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> None:
    Checker(sig, fuel).check(ctx, t, expected)


def check_entry(sig: Signature, e: Entry, fuel: int = DEFAULT_FUEL) -> Signature:
    """Validate ``e`` against ``sig`` and return the extended signature."""
    if e.name in sig:
        raise DuplicateName(e.name)
    checker = Checker(sig, fuel)
    s = checker.whnf(checker.infer(Context(), e.type, ("type",)))
    if not isinstance(s, Sort):
        raise TypingError("Entry", "declared type is not a type", ("type",))
    if e.body is not None:
        checker.check(Context(), e.body, e.type, ("body",))
    return sig.extend(e)


def check_signature(entries, base: Signature, fuel: int = DEFAULT_FUEL) -> Signature:
    sig = base
    for e in entries:
        sig = check_entry(sig, e, fuel)
    return sig
