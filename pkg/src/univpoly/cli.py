"""Command-line front end: elaborate a signature file entry by entry."""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from .agda import export_agda_style
from .elab import (
    ConvError,
    ElabError,
    ElabOptions,
    PostCheckFailed,
    UnifyFailed,
    UnifyStuck,
    elaborate_entry,
)
from .kernel.check import TypingError, check_signature
from .kernel.reduce import DEFAULT_FUEL, FuelExhausted
from .kernel.signature import DuplicateName
from .kernel.upp import upp_arities, upp_signature
from .level import format_subst
from .pts import ProfileError, get_profile
from .syntax import ParseError, format_signature, format_term, parse_constraints, parse_signature
from .unify import Equation

EXIT_OK = 0
EXIT_FAILURE = 1


@dataclass
class RunConfig:
    input_path: Path
    output_path: Path | None = None
    constraints_path: Path | None = None
    agda_out_path: Path | None = None
    heuristic: bool = False
    trace: bool = False
    fuel: int = DEFAULT_FUEL
    pts_profile: str = "I"
    dry_run: bool = False

    def __post_init__(self):
        if self.fuel < 1:
            raise ValueError("fuel must be at least 1")


class RunError(Exception):
    def __init__(self, code: str, message: str, entry: str | None = None, details: list[str] | None = None):
        self.code = code
        self.entry = entry
        self.details = details or []
        super().__init__(message)

    def report(self) -> str:
        where = f" {self.entry}" if self.entry else ""
        lines = [f"error[{self.code}]{where}: {self}"]
        lines.extend("  " + d for d in self.details)
        return "\n".join(lines)


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _classify(exc: Exception, entry: str) -> RunError:
    match exc:
        case UnifyStuck(remaining=remaining, partial=partial):
            details = ["residual problem:"] + [f"  {eq}" for eq in remaining]
            details.append(f"partial solution: {format_subst(partial)}")
            return RunError("STUCK", str(exc), entry, details)
        case UnifyFailed(equation=eq):
            details = [f"unsolvable equation: {eq}"] if eq is not None else []
            return RunError("NO_SOLUTION", str(exc), entry, details)
        case PostCheckFailed():
            return RunError("POSTCHECK_BUG", str(exc), entry)
        case ConvError():
            return RunError("CONV", str(exc), entry)
        case ElabError() | FuelExhausted() | DuplicateName():
            return RunError("ELAB", str(exc), entry)
    raise exc


def load_constraints(path: Path, names: set[str]) -> dict[str, list[Equation]]:
    try:
        pairs = parse_constraints(Path(path).read_text(encoding="utf-8"))
    except ParseError as exc:
        raise RunError("PARSE", f"{path}:{exc}") from None
    out: dict[str, list[Equation]] = {}
    for name, eq in pairs:
        if name not in names:
            raise RunError("PARSE", f"{path}: constraint refers to unknown entry {name}")
        out.setdefault(name, []).append(eq)
    return out


def run(cfg: RunConfig, stdout: TextIO | None = None) -> int:
    """Run the pipeline; raises :class:`RunError` on the first failure."""
    stdout = stdout or sys.stdout
    try:
        profile = get_profile(cfg.pts_profile)
    except ProfileError as exc:
        raise RunError("PARSE", str(exc)) from None
    try:
        entries = parse_signature(Path(cfg.input_path).read_text(encoding="utf-8"), profile=profile)
    except ParseError as exc:
        raise RunError("PARSE", f"{cfg.input_path}:{exc}") from None
    user = load_constraints(cfg.constraints_path, {e.name for e in entries}) if cfg.constraints_path else {}

    opts = ElabOptions(heuristic=cfg.heuristic, fuel=cfg.fuel)
    sig = upp_signature()
    out_entries = []
    trace: list[str] = []
    for e in entries:
        try:
            res = elaborate_entry(sig, e, user.get(e.name, ()), opts)
        except Exception as exc:
            raise _classify(exc, e.name) from exc
        trace.append(f"# {e.name}")
        trace.extend(res.diagnostics)
        if cfg.dry_run:
            print(f"{e.name} : {format_term(res.erased_type)}", file=stdout)
            if res.erased_body is not None:
                print(f"  := {format_term(res.erased_body)}", file=stdout)
        if res.heuristic_rung is not None:
            print(f"warning: {e.name} solved by heuristic rung {res.heuristic_rung}; result may not be most general", file=sys.stderr)
        sig = sig.extend(res.entry)
        out_entries.append(res.entry)

    if cfg.dry_run:
        return EXIT_OK

    text = format_signature(out_entries)
    # the written text is re-read and re-checked from scratch before exit 0
    try:
        reparsed = parse_signature(text, arities=upp_arities())
        check_signature(reparsed, upp_signature(), cfg.fuel)
    except (ParseError, TypingError, DuplicateName, FuelExhausted) as exc:
        raise RunError("POSTCHECK_BUG", f"output does not re-typecheck: {exc}") from exc

    if cfg.output_path is not None:
        atomic_write(cfg.output_path, text)
    else:
        stdout.write(text)
    if cfg.trace:
        target = Path(f"{cfg.output_path}.trace") if cfg.output_path else None
        trace_text = "\n".join(trace) + "\n"
        if target:
            atomic_write(target, trace_text)
        else:
            stdout.write(trace_text)
    if cfg.agda_out_path is not None:
        module = Path(cfg.agda_out_path).stem
        atomic_write(cfg.agda_out_path, export_agda_style(out_entries, module))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="univpoly",
        description="Elaborate an impredicative signature into universe-polymorphic predicative entries.",
    )
    p.add_argument("--input", required=True, type=Path, help="input signature file")
    p.add_argument("--output", type=Path, help="output signature file (stdout when omitted)")
    p.add_argument("--constraints", type=Path, help="user constraint file (lines 'entry : l == l .')")
    p.add_argument("--agda-out", type=Path, help="also write an Agda-style rendering here")
    p.add_argument("--heuristic", action="store_true", help="try heuristic unifiers when no mgu is found")
    p.add_argument("--trace", action="store_true", help="write unification steps to OUTPUT.trace")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="head-reduction step budget (default %(default)s)")
    p.add_argument("--pts", default="I", help="input sort profile: I, P, or 'sorts=..;axioms=..;rules=..'")
    p.add_argument("--dry-run", action="store_true", help="print erased entries with their level variable names; write nothing")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.fuel < 1:
        print("error: --fuel must be at least 1", file=sys.stderr)
        return 2
    cfg = RunConfig(
        input_path=args.input,
        output_path=args.output,
        constraints_path=args.constraints,
        agda_out_path=args.agda_out,
        heuristic=args.heuristic,
        trace=args.trace,
        fuel=args.fuel,
        pts_profile=args.pts,
        dry_run=args.dry_run,
    )
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        return run(cfg)
    except RunError as exc:
        if cfg.output_path is not None and not cfg.dry_run and Path(cfg.output_path).exists():
            # a stale output would contradict the failing exit status
            Path(cfg.output_path).unlink()
        print(exc.report(), file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
