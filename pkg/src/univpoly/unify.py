"""Unification of universe-level equations.

Single equations are classified by their canonical form into five verdicts:
trivial, solvable with one of two mgu shapes, unsolvable, or solvable without
an mgu.  Problems are solved by repeatedly discharging an equation that has
an mgu (or failing on an unsolvable one) and postponing the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .level import (
    ZERO,
    CanonicalLevel,
    FreshNames,
    Level,
    LevelSubstitution,
    Var,
    canonicalize,
    compose,
    format_level,
    format_subst,
    free_vars,
    is_idempotent,
    join,
    levels_equal,
    normalize,
    render,
    subst_level,
    var_order,
)


@dataclass(frozen=True)
class Equation:
    lhs: Level
    rhs: Level

    def subst(self, theta: LevelSubstitution) -> "Equation":
        return Equation(normalize(subst_level(self.lhs, theta)), normalize(subst_level(self.rhs, theta)))

    def free_vars(self) -> set[str]:
        return free_vars(self.lhs) | free_vars(self.rhs)

    def __str__(self) -> str:
        return f"{format_level(self.lhs)} ≐ {format_level(self.rhs)}"


@dataclass(frozen=True)
class Problem:
    """Ordered set of equations."""

    equations: tuple[Equation, ...] = ()

    def __post_init__(self):
        seen: dict[Equation, None] = dict.fromkeys(self.equations)
        object.__setattr__(self, "equations", tuple(seen))

    @classmethod
    def of(cls, *equations: Equation | tuple[Level, Level]) -> "Problem":
        return cls(tuple(e if isinstance(e, Equation) else Equation(*e) for e in equations))

    def __iter__(self) -> Iterator[Equation]:
        return iter(self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def __add__(self, other: "Problem") -> "Problem":
        return Problem(self.equations + other.equations)

    def subst(self, theta: LevelSubstitution) -> "Problem":
        return Problem(tuple(e.subst(theta) for e in self.equations))

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for e in self.equations:
            out |= e.free_vars()
        return out

    def __str__(self) -> str:
        return "{" + ", ".join(map(str, self.equations)) + "}"


@dataclass(frozen=True)
class CanonicalEquation:
    lhs: CanonicalLevel
    rhs: CanonicalLevel

    def check(self) -> None:
        left, right = self.lhs.coeffs, self.rhs.coeffs
        for name in left.keys() & right.keys():
            if left[name] != right[name]:
                raise ValueError(f"shared variable {name} has different coefficients")
        if min(self.lhs.all_coeffs() + self.rhs.all_coeffs()) != 0:
            raise ValueError("minimal coefficient is not 0")

    def swap(self) -> "CanonicalEquation":
        return CanonicalEquation(self.rhs, self.lhs)

    def as_equation(self) -> Equation:
        return Equation(render(self.lhs), render(self.rhs))

    def __str__(self) -> str:
        return str(self.as_equation())


def canonicalize_equation(e: Equation) -> CanonicalEquation:
    left = canonicalize(e.lhs).coeffs
    right = canonicalize(e.rhs).coeffs
    lconst, rconst = canonicalize(e.lhs).const_coeff, canonicalize(e.rhs).const_coeff
    for name in left.keys() & right.keys():
        if left[name] < right[name]:
            del left[name]
        elif right[name] < left[name]:
            del right[name]
    k = min([lconst, rconst, *left.values(), *right.values()])
    return CanonicalEquation(
        CanonicalLevel.build(lconst - k, {n: c - k for n, c in left.items()}),
        CanonicalLevel.build(rconst - k, {n: c - k for n, c in right.items()}),
    )


# -- classification ---------------------------------------------------------


@dataclass(frozen=True)
class Trivial:
    pass


@dataclass(frozen=True)
class MguCaseI:
    """``n ⊔ var ≐ target`` with ``n`` below the target's constant."""

    var: str
    target: Level
    swapped: bool = False


@dataclass(frozen=True)
class MguCaseII:
    """Flat equation ``0 ⊔ shared ⊔ left_only ≐ 0 ⊔ shared ⊔ right_only``."""

    shared: tuple[str, ...]
    left_only: tuple[str, ...]
    right_only: tuple[str, ...]


@dataclass(frozen=True)
class NoUnifier:
    pass


@dataclass(frozen=True)
class SolvableNoMgu:
    pass


Classification = Trivial | MguCaseI | MguCaseII | NoUnifier | SolvableNoMgu


def classify(e: CanonicalEquation) -> Classification:
    e.check()
    if e.lhs == e.rhs:
        return Trivial()
    lconst, rconst = e.lhs.const_coeff, e.rhs.const_coeff
    if lconst == rconst:
        if lconst > 0:
            return SolvableNoMgu()
        left, right = set(e.lhs.variables), set(e.rhs.variables)
        order = lambda names: tuple(sorted(names, key=var_order))  # noqa: E731
        return MguCaseII(order(left & right), order(left - right), order(right - left))
    # orient so that ``small`` has the smaller constant coefficient
    swapped = lconst > rconst
    big, small = (e.lhs, e.rhs) if swapped else (e.rhs, e.lhs)
    if not small.var_coeffs:
        return NoUnifier()
    if len(small.var_coeffs) > 1:
        return SolvableNoMgu()
    (name, n), = small.var_coeffs
    if n == 0:
        return MguCaseI(name, render(big), swapped)
    return SolvableNoMgu()


def build_mgu(c: Classification, fresh: Callable[[], str]) -> dict[str, Level]:
    """Most general unifier for an mgu verdict.

    The result's domain is exactly the equation's variables and its range
    only mentions fresh variables.
    """
    match c:
        case Trivial():
            return {}
        case MguCaseI(var, target):
            names = sorted(free_vars(target) | {var}, key=var_order)
            rename = {name: Var(fresh()) for name in names}
            return {
                name: normalize(subst_level(target if name == var else Var(name), rename))
                for name in names
            }
        case MguCaseII(shared, left_only, right_only):
            x = {k: Var(fresh()) for k in shared}
            y = {(k, n): Var(fresh()) for k in shared for n in left_only}
            z = {(k, m): Var(fresh()) for k in shared for m in right_only}
            v = {(n, m): Var(fresh()) for n in left_only for m in right_only}
            sigma: dict[str, Level] = {}
            for k in shared:
                sigma[k] = join([x[k], *(y[k, n] for n in left_only), *(z[k, m] for m in right_only)])
            for n in left_only:
                sigma[n] = join([*(y[k, n] for k in shared), *(v[n, m] for m in right_only)])
            for m in right_only:
                sigma[m] = join([*(z[k, m] for k in shared), *(v[n, m] for n in left_only)])
            return sigma
    raise ValueError(f"no most general unifier for verdict {c!r}")


def is_unifier(theta: LevelSubstitution, p: Problem | Iterable[Equation]) -> bool:
    return all(levels_equal(subst_level(e.lhs, theta), subst_level(e.rhs, theta)) for e in p)


# -- the algorithm ----------------------------------------------------------


@dataclass(frozen=True)
class Success:
    mgu: dict[str, Level]


@dataclass(frozen=True)
class NoSolution:
    equation: Equation | None = None


@dataclass(frozen=True)
class Stuck:
    remaining: Problem
    partial: dict[str, Level]


@dataclass(frozen=True)
class HeuristicSolution:
    unifier: dict[str, Level]
    rung: int = 0


UnifyOutcome = Success | NoSolution | Stuck | HeuristicSolution


@dataclass
class Configuration:
    """``pending; solution``, or bottom when ``pending`` is None."""

    pending: Problem | None
    solution: dict[str, Level] = field(default_factory=dict)
    failed: Equation | None = None

    @property
    def is_bottom(self) -> bool:
        return self.pending is None

    def invariants_hold(self) -> bool:
        if self.pending is None:
            return True
        return is_idempotent(self.solution) and not (self.solution.keys() & self.pending.free_vars())

    def free_vars(self) -> set[str]:
        out = set(self.solution)
        for l in self.solution.values():
            out |= free_vars(l)
        if self.pending is not None:
            out |= self.pending.free_vars()
        return out


def _step(config: Configuration, fresh: Callable[[], str], trace: list[str] | None) -> Configuration | None:
    """One Solve/Fail transition, or None when no rule applies."""
    assert config.pending is not None
    eqs = config.pending.equations
    for idx, eq in enumerate(eqs):
        verdict = classify(canonicalize_equation(eq))
        if isinstance(verdict, SolvableNoMgu):
            continue
        if isinstance(verdict, NoUnifier):
            if trace is not None:
                trace.append(f"FAIL {eq}")
            return Configuration(None, config.solution, eq)
        sigma = build_mgu(verdict, fresh)
        if trace is not None:
            trace.append(f"SOLVE {eq} => {format_subst(sigma)}")
        rest = Problem(eqs[:idx] + eqs[idx + 1:]).subst(sigma)
        solution = {name: normalize(subst_level(l, sigma)) for name, l in config.solution.items()}
        solution.update(sigma)
        return Configuration(rest, solution)
    return None


def redundant_variables(levels: Iterable[Level], protected: set[str] = frozenset()) -> dict[str, Level]:
    """Substitution sending redundant range variables to 0.

    A variable ``v`` is redundant when some set ``U`` of other variables
    satisfies: wherever a member of ``U`` occurs, ``v`` occurs with at least
    the same coefficient; and wherever ``v`` occurs, some member of ``U``
    occurs with exactly ``v``'s coefficient.  Then ``u ↦ u ⊔ v`` for ``u`` in
    ``U`` turns the levels with ``v ↦ 0`` back into the originals, so
    dropping ``v`` loses no generality.  Two variables that always occur
    together with equal coefficients are the simplest case.
    """
    canon = [canonicalize(l).coeffs for l in levels]
    removed: set[str] = set()
    out: dict[str, Level] = {}
    names = sorted(set().union(*(c.keys() for c in canon)) - set(protected), key=var_order)
    for v in reversed(names):
        live = [{n: k for n, k in c.items() if n not in removed} for c in canon]
        others = set().union(*(c.keys() for c in live)) - {v}
        cover = {
            u for u in others
            if all(v in c and c[u] <= c[v] for c in live if u in c)
        }
        if all(max((c[u] for u in cover if u in c), default=-1) == c[v] for c in live if v in c):
            if any(v in c for c in live):
                removed.add(v)
                out[v] = ZERO
    return out


def _compact(config: Configuration, names: set[str]) -> Configuration:
    """Drop bindings of intermediate variables and prune redundant ones.

    Case II mgus multiply variable groups, so without this the levels of
    later equations grow quickly.  Only the problem's own variables are
    observable; they are never pruned.
    """
    if config.pending is None:
        return config
    solution = {k: v for k, v in config.solution.items() if k in names}
    levels = list(solution.values())
    for e in config.pending:
        levels += [e.lhs, e.rhs]
    merge = redundant_variables(levels, names | set(solution))
    if not merge:
        return Configuration(config.pending, solution)
    return Configuration(
        config.pending.subst(merge),
        {k: normalize(subst_level(l, merge)) for k, l in solution.items()},
    )


def unify_steps(
    p: Problem, fresh: Callable[[], str], trace: list[str] | None = None
) -> Iterator[Configuration]:
    """Yield every configuration reached from ``p; ∅`` until no rule applies."""
    names = p.free_vars()
    config = Configuration(p, {})
    yield config
    while config.pending is not None and len(config.pending):
        nxt = _step(config, fresh, trace)
        if nxt is None:
            return
        config = _compact(nxt, names)
        yield config


def unify(
    p: Problem,
    fresh: Callable[[], str] | None = None,
    heuristic: bool = False,
    trace: list[str] | None = None,
) -> UnifyOutcome:
    fresh = fresh or FreshNames()
    config = None
    for config in unify_steps(p, fresh, trace):
        pass
    assert config is not None
    if config.pending is None:
        return NoSolution(config.failed)
    if not len(config.pending):
        names = p.free_vars()
        return Success(simplify_unifier({k: v for k, v in config.solution.items() if k in names}))
    if heuristic:
        return heuristic_step(config.pending, config.solution, fresh, trace)
    if trace is not None:
        trace.append(f"STUCK {len(config.pending)} remaining")
    return Stuck(config.pending, config.solution)


def simplify_unifier(theta: LevelSubstitution) -> dict[str, Level]:
    """An equally general unifier with redundant range variables removed."""
    drop = redundant_variables(theta.values())
    if not drop:
        return dict(theta)
    return {k: normalize(subst_level(l, drop)) for k, l in theta.items()}


def heuristic_step(
    remaining: Problem,
    partial: LevelSubstitution,
    fresh: Callable[[], str] | None = None,
    trace: list[str] | None = None,
) -> UnifyOutcome:
    """Try the candidate ladder on a stuck problem.

    Rungs: (1) every variable to 0; (2) per equation, send each one-sided
    variable to the join of the other side's bare variables, then resume
    solving; (3) every variable to one shared fresh variable.  A candidate is
    only reported after :func:`is_unifier` accepts it.
    """
    fresh = fresh or FreshNames()
    names = sorted(remaining.free_vars(), key=var_order)

    def candidates() -> Iterator[tuple[int, dict[str, Level]]]:
        yield 1, {name: ZERO for name in names}
        for eq in remaining:
            ce = canonicalize_equation(eq)
            left, right = ce.lhs.coeffs, ce.rhs.coeffs
            bare_left = [Var(n) for n, c in ce.lhs.var_coeffs if c == 0 and n not in right]
            bare_right = [Var(n) for n, c in ce.rhs.var_coeffs if c == 0 and n not in left]
            sigma: dict[str, Level] = {}
            for n in left.keys() - right.keys():
                sigma[n] = join(bare_right)
            for n in right.keys() - left.keys():
                sigma[n] = join(bare_left)
            if not sigma:
                continue
            # simultaneous substitution may leave variables of its own range
            # unresolved; resume ordinary solving on the rest
            outcome = unify(remaining.subst(sigma), fresh)
            if isinstance(outcome, Success):
                yield 2, compose(sigma, outcome.mgu)
        shared = Var(fresh())
        yield 3, {name: shared for name in names}

    for rung, tau in candidates():
        if is_unifier(tau, remaining):
            unifier = {name: normalize(subst_level(l, tau)) for name, l in partial.items()}
            for name, l in tau.items():
                unifier.setdefault(name, normalize(l))
            if trace is not None:
                trace.append(f"HEURISTIC {rung} {format_subst(tau)}")
            return HeuristicSolution(simplify_unifier(unifier), rung)
    if trace is not None:
        trace.append(f"STUCK {len(remaining)} remaining")
    return Stuck(remaining, dict(partial))
