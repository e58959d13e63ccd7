"""The eight acceptance criteria, each printing one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as
they are produced; a summary is also printed at the end of every run.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

import oracles
from corpus import ID_TO_ID, NAT, NAT_CONSTRAINTS, PROFILE_I, RUNNING, EXTRA, TALLY
from report import record
from univpoly import level as lv
from univpoly.elab import ConstraintSet, UnifyFailed, elab_infer, elaborate_entry, erase, erase_entry
from univpoly.kernel import Const, Context, CApp, CPi, Entry, TypingError, check_entry, check_signature, subst_levels, upp_signature
from univpoly.kernel.terms import is_level, level_vars
from univpoly.kernel.upp import upp_arities
from univpoly.level import FreshNames, Var
from univpoly.syntax import parse_level, parse_signature, parse_term
from univpoly.unify import (
    Equation,
    MguCaseI,
    MguCaseII,
    NoUnifier,
    Problem,
    SolvableNoMgu,
    Stuck,
    build_mgu,
    canonicalize_equation,
    classify,
    is_unifier,
    unify,
)

L = parse_level


def _eq(lhs: str, rhs: str) -> Equation:
    return Equation(L(lhs), L(rhs))


def _capps(t, name):
    """Level arguments of every occurrence of constant ``name`` in ``t``."""
    out = []

    def walk(u):
        match u:
            case CApp(Const(n), l) if n == name:
                out.append(l)
                return
        for f in ("domain", "codomain", "body", "fn", "arg"):
            child = getattr(u, f, None)
            if child is not None and not is_level(child):
                walk(child)

    walk(t)
    return out


def _strip_params(e: Entry, values: dict[str, lv.Level]) -> Entry:
    ty, body = e.type, e.body
    for _ in e.level_params:
        assert isinstance(ty, CPi)
        ty = ty.codomain
        body = body.body if body is not None else None
    return Entry(f"{e.name}_ground", subst_levels(ty, values), subst_levels(body, values) if body is not None else None)


# -- 1 ----------------------------------------------------------------------


def test_criterion_1_canonical_form_oracle():
    rng = random.Random(20261018)
    pairs = 10_000
    disagreements = []
    for _ in range(pairs):
        l1, l2 = oracles.random_pair(rng, max_depth=6)
        if lv.levels_equal(l1, l2) != oracles.semantically_equal(l1, l2, slack=5):
            disagreements.append((l1, l2))
    ok = not disagreements
    record(1, ok, f"{pairs} random pairs, {len(disagreements)} disagreement(s) with exhaustive valuation")
    assert ok, disagreements[:3]


# -- 2 ----------------------------------------------------------------------

BOUND = 6


def test_criterion_2_single_equation_verdicts():
    rng = random.Random(7)
    pool = ("i", "j", "k", "m")
    n = 2_000
    violations = []
    counts: dict[str, int] = {}
    for _ in range(n):
        eq = Equation(oracles.random_side(rng, pool), oracles.random_side(rng, pool))
        verdict = classify(canonicalize_equation(eq))
        counts[type(verdict).__name__] = counts.get(type(verdict).__name__, 0) + 1
        match verdict:
            case NoUnifier():
                if next(oracles.ground_unifiers(eq.lhs, eq.rhs, BOUND), None) is not None:
                    violations.append(("NoUnifier has a ground unifier", eq))
            case SolvableNoMgu():
                if next(oracles.ground_unifiers(eq.lhs, eq.rhs, BOUND), None) is None:
                    violations.append(("SolvableNoMgu without ground unifier", eq))
            case _:
                theta = build_mgu(verdict, FreshNames("f", 1))
                if not is_unifier(theta, [eq]):
                    violations.append(("mgu is not a unifier", eq))
                    continue
                for tau in oracles.ground_unifiers(eq.lhs, eq.rhs, 3):
                    if not oracles.instance_of(theta, tau):
                        violations.append(("ground unifier is not an instance", eq, tau))
                        break
    ok = not violations
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    record(2, ok, f"{n} random equations ({summary}), {len(violations)} violation(s)")
    assert ok, violations[:3]


# -- 3 ----------------------------------------------------------------------


def _same_up_to_renaming(theta: dict, expected: dict) -> bool:
    ours = sorted(set().union(*(lv.free_vars(l) for l in theta.values())))
    theirs = sorted(set().union(*(lv.free_vars(l) for l in expected.values())))
    if len(ours) != len(theirs) or theta.keys() != expected.keys():
        return False
    for perm in itertools.permutations(theirs):
        rename = {a: Var(b) for a, b in zip(ours, perm)}
        if all(lv.levels_equal(lv.subst_level(theta[k], rename), expected[k]) for k in theta):
            return True
    return False


# (input equation, displayed canonical form, verdict class)
EXAMPLES = [
    (("i0 ⊔ i1", "i0 ⊔ i2"), ("0 ⊔ i0 ⊔ i1", "0 ⊔ i0 ⊔ i2"), MguCaseII),
    (("i ⊔ 1+(j ⊔ 2)", "1+(2 ⊔ i ⊔ j)"), ("2 ⊔ j", "2 ⊔ i ⊔ j"), SolvableNoMgu),
    (("i ⊔ 1+(j ⊔ 1)", "1+(2 ⊔ i ⊔ j)"), ("1 ⊔ j", "2 ⊔ i ⊔ j"), MguCaseI),
    (("i ⊔ 1+(j ⊔ 1)", "2+(1 ⊔ i ⊔ j)"), ("0", "1 ⊔ i ⊔ j"), NoUnifier),
]


def test_criterion_3_four_equation_examples():
    problems = []
    for (lhs, rhs), (clhs, crhs), kind in EXAMPLES:
        ce = canonicalize_equation(_eq(lhs, rhs))
        expected = (lv.canonicalize(L(clhs)), lv.canonicalize(L(crhs)))
        if (ce.lhs, ce.rhs) != expected:
            problems.append(f"{lhs} ≐ {rhs}: canonical form {ce}")
        if not isinstance(classify(ce), kind):
            problems.append(f"{lhs} ≐ {rhs}: verdict {classify(ce)}")
    ce = canonicalize_equation(_eq("i0 ⊔ i1", "i0 ⊔ i2"))
    theta = build_mgu(classify(ce), FreshNames("f", 1))
    expected = {"i0": L("x ⊔ y ⊔ z"), "i1": L("y ⊔ v"), "i2": L("z ⊔ v")}
    if not _same_up_to_renaming(theta, expected):
        problems.append(f"case II mgu {lv.format_subst(theta)}")
    ok = not problems
    record(3, ok, "four example equations: canonical forms, verdicts and case II mgu" + ("" if ok else f" ({problems})"))
    assert ok, problems


# -- 4 ----------------------------------------------------------------------


def test_criterion_4_running_example():
    sig, results = TALLY.signature(RUNNING)
    id_prime = results[1].entry
    arities = {**upp_arities(), "id": 1}
    expected_type = parse_term("(i : Lvl) -> Tm (1+i) (Pi (1+i) i (U i) (A => Pi i i A (x => A)))", arities)
    instances = sorted(map(lv.format_level, _capps(id_prime.body, "id")))
    problems = []
    if id_prime.level_params != ("i",) or id_prime.type != expected_type:
        problems.append("type of id' differs")
    if instances != ["1+i", "i"]:
        problems.append(f"id instances {instances}")
    try:
        check_signature([r.entry for r in results], upp_signature())
    except TypingError as exc:
        problems.append(f"re-typecheck: {exc}")
    ok = not problems
    record(4, ok, "id' : (i : Lvl) -> Tm (Pi A : U i. A -> A) with body using id (S i) and id i; re-typechecks" + ("" if ok else f" ({problems})"))
    assert ok, problems


# -- 5 ----------------------------------------------------------------------

_RT = "(Pi@o,o (U@o) (C => Pi@o,o C (c => Pi@o,o C (d => U@o))))"
# Lam A : U_{i1}. Lam B : U_{i2}. Lam R : (Pi C : U_{i3}. C -> C -> U_{i4}). R U_{i6} U_{i7} (A -> B)
# with every implicit argument written out; the tags m1, m2, m6 and m7 mark
# the universes whose levels the statement is about.
WITNESS = f"""
Lam@o,o (U@m1) (A => Pi@o,o (U@o) (B => Pi@o,o {_RT} (R => U@o)))
 (A => Lam@o,o (U@m2) (B => Pi@o,o {_RT} (R => U@o))
   (B => Lam@o,o {_RT} (R => U@o)
      (R => App@o,o (U@o) (d => U@o)
         (App@o,o (U@o) (c => Pi@o,o (U@o) (d => U@o))
            (App@o,o (U@o) (C => Pi@o,o C (c => Pi@o,o C (d => U@o))) R (U@m6))
            (U@m7))
         (Pi@o,o A (x => B)))))
"""


def _marks(source, erased, out):
    """Pair the tags of ``U`` occurrences with the level variables erasure chose."""
    match source:
        case Const("U", (tag,)):
            out.setdefault(tag, erased.arg)
            return
    for f in ("domain", "codomain", "body", "fn", "arg"):
        child = getattr(source, f, None)
        if child is not None:
            _marks(child, getattr(erased, f), out)


def witness_residual():
    sig = upp_signature()
    source = parse_term(WITNESS)
    erased = erase(source, sig, FreshNames("k", 1))
    marks: dict[str, lv.Level] = {}
    _marks(source, erased, marks)
    _, constraints = elab_infer(Context(), ConstraintSet(), erased, sig)
    return marks, unify(constraints.problem)


def _projection_matches(residual: Problem, i1, i2, i7, bound: int = 3) -> bool:
    """Ground solutions of ``residual`` seen through ``(i1, i2, i7)`` are exactly those of ``S i7 = i1 ⊔ i2``."""
    names = sorted(residual.free_vars() | lv.free_vars(i1) | lv.free_vars(i2) | lv.free_vars(i7))
    columns, size = oracles.grid(names, bound)
    ok = np.ones(size, dtype=bool)
    for e in residual:
        ok &= oracles.evaluate_grid(e.lhs, columns, size) == oracles.evaluate_grid(e.rhs, columns, size)
    triples = np.stack([oracles.evaluate_grid(l, columns, size) for l in (i1, i2, i7)], axis=1)[ok]
    seen = {tuple(t) for t in triples.tolist()}
    want = {(a, b, c) for a in range(bound + 1) for b in range(bound + 1) for c in range(bound) if max(a, b) == c + 1}
    return seen == want


def test_criterion_5_negative_witnesses():
    problems = []
    # (a)
    p = Problem.of((L("S i1"), L("i2 ⊔ i3")))
    if not isinstance(unify(p), Stuck) or not isinstance(classify(canonicalize_equation(p.equations[0])), SolvableNoMgu):
        problems.append("(a) S i1 ≐ i2 ⊔ i3 is not stuck/SolvableNoMgu")
    # (b)
    marks, outcome = witness_residual()
    if not isinstance(outcome, Stuck):
        problems.append(f"(b) expected Stuck, got {type(outcome).__name__}")
    else:
        i1, i2, i7 = (lv.subst_level(marks[t], outcome.partial) for t in ("m1", "m2", "m7"))
        target = canonicalize_equation(Equation(lv.Succ(i7), lv.Max(i1, i2)))
        residual = [canonicalize_equation(e) for e in outcome.remaining]
        if residual not in ([target], [target.swap()]):
            problems.append(f"(b) residual {outcome.remaining}")
        if not _projection_matches(outcome.remaining, i1, i2, i7):
            problems.append("(b) residual is not equivalent to S i7 ≐ i1 ⊔ i2")
    # (c)
    c = Problem.of((L("1+i0"), L("i2 ⊔ 1+i1")), (L("1+i0"), L("i1 ⊔ 1+i2")))
    theta = {"i1": L("0 ⊔ i2"), "i0": L("0 ⊔ i2")}
    if not isinstance(unify(c, heuristic=False), Stuck):
        problems.append("(c) not stuck")
    if not is_unifier(theta, c):
        problems.append("(c) θ is not a unifier")
    ok = not problems
    record(5, ok, "(a) S i1 ≐ i2 ⊔ i3 stuck, (b) witness residual ≃ {S i7 ≐ i1 ⊔ i2}, (c) two-equation problem stuck with θ a unifier" + ("" if ok else f" ({problems})"))
    assert ok, problems


# -- 6 ----------------------------------------------------------------------


def test_criterion_6_nat():
    problems = []
    arities = {**upp_arities(), "Nat": 1}
    _, free = TALLY.signature(NAT)
    _, tied = TALLY.signature(NAT, NAT_CONSTRAINTS)
    succ_free, succ_tied = free[2].entry, tied[2].entry
    want_free = parse_term("(i : Lvl) -> (j : Lvl) -> Tm i (Nat i) -> Tm j (Nat j)", arities)
    want_tied = parse_term("(i : Lvl) -> Tm i (Nat i) -> Tm i (Nat i)", arities)
    if succ_free.type != want_free:
        problems.append("unconstrained succ type")
    if succ_tied.type != want_tied:
        problems.append("constrained succ type")
    for results in (free, tied):
        try:
            check_signature([r.entry for r in results], upp_signature())
        except TypingError as exc:
            problems.append(f"re-typecheck: {exc}")
    ok = not problems
    record(6, ok, "succ has parameters (i, j) without and (i) with the constraint file; both re-typecheck" + ("" if ok else f" ({problems})"))
    assert ok, problems


# -- 7 ----------------------------------------------------------------------


def test_criterion_7_naive_contrast():
    problems = []
    base_text = RUNNING.split("def id'")[0]
    sig, results = TALLY.signature(base_text + ID_TO_ID)
    id_to_id = results[1].entry
    # the instance of id used must sit strictly above the universe of its argument
    (inst,) = _capps(id_to_id.body, "id")
    i = Var(id_to_id.level_params[0])
    if not lv.levels_equal(inst, lv.Succ(i)):
        problems.append(f"id_to_id uses id at {lv.format_level(inst)}")

    # Naive translation: a single fixed level for id.  Its type and body are
    # those of the polymorphic id at level 0.
    poly_id = results[0].entry
    mono = _strip_params(poly_id, {"i": lv.ZERO})
    mono = Entry("id", mono.type, mono.body)
    mono_sig = upp_signature().extend(mono)
    id_prime = parse_signature(RUNNING, profile=PROFILE_I)[1]
    try:
        elaborate_entry(mono_sig, id_prime)
        problems.append("id' elaborated against a monomorphic id")
    except UnifyFailed:
        pass

    # every level of id' forced to 0 (id itself still polymorphic)
    id_sig = upp_signature().extend(poly_id)
    ty, body = erase_entry(id_sig, id_prime)
    zero = {v: lv.ZERO for v in set(level_vars(ty)) | set(level_vars(body))}
    try:
        check_entry(id_sig, Entry("id'", subst_levels(ty, zero), subst_levels(body, zero)))
        problems.append("all-zero id' typechecks")
        error = None
    except TypingError as exc:
        error = exc
    ok = not problems
    record(7, ok, f"id_to_id uses id at S i; naive id' rejected (no unifier; all-zero instance: {error})" if ok else str(problems))
    assert ok, problems


# -- 8 ----------------------------------------------------------------------


def test_criterion_8_soundness_gate():
    corpora = [
        (RUNNING, None),
        (NAT, None),
        (NAT, NAT_CONSTRAINTS),
        (RUNNING.split("def id'")[0] + ID_TO_ID, None),
        (EXTRA, None),
    ]
    ground_checked = 0
    ground_failures = []
    for text, constraints in corpora:
        sig, results = TALLY.signature(text, constraints)
        for r in results:
            e = r.entry
            for values in itertools.product(range(3), repeat=len(e.level_params)):
                inst = _strip_params(e, {p: lv.nat(v) for p, v in zip(e.level_params, values)})
                try:
                    check_entry(sig, inst)
                except TypingError as exc:
                    ground_failures.append(f"{e.name}{values}: {exc}")
                ground_checked += 1
    fails = TALLY.postcheck_failures
    ok = not fails and not ground_failures
    record(8, ok, f"{TALLY.entries} elaborations, {len(fails)} post-check failure(s); {ground_checked} ground instances, {len(ground_failures)} rejected")
    assert ok, fails + ground_failures
