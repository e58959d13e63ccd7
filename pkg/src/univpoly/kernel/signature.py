from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .terms import Term, leading_cpis, shift


@dataclass(frozen=True)
class Entry:
    """``name : type`` (declaration) or ``name : type := body`` (definition)."""

    name: str
    type: Term
    body: Term | None = None
    level_params: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.level_params:
            object.__setattr__(self, "level_params", tuple(leading_cpis(self.type)))

    @property
    def is_definition(self) -> bool:
        return self.body is not None

    @property
    def arity(self) -> int:
        return len(self.level_params)


class DuplicateName(Exception):
    pass


@dataclass(frozen=True)
class Signature:
    entries: tuple[Entry, ...] = ()
    _index: dict[str, Entry] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self._index and self.entries:
            index = {}
            for e in self.entries:
                if e.name in index:
                    raise DuplicateName(e.name)
                index[e.name] = e
            object.__setattr__(self, "_index", index)

    def extend(self, entry: Entry) -> "Signature":
        if entry.name in self._index:
            raise DuplicateName(entry.name)
        index = dict(self._index)
        index[entry.name] = entry
        return Signature(self.entries + (entry,), index)

    def get(self, name: str) -> Entry | None:
        return self._index.get(name)

    def __getitem__(self, name: str) -> Entry:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def arity(self, name: str) -> int:
        e = self._index.get(name)
        return e.arity if e else 0


@dataclass(frozen=True)
class Context:
    """Ordered ``x : A`` / ``i : A`` entries; the last entry is innermost.

    Regular entries are addressed by de Bruijn index, confined ones by name.
    """

    entries: tuple[tuple[str, Term, bool], ...] = ()

    def push(self, name: str, type: Term) -> "Context":
        return Context(self.entries + ((name, type, False),))

    def push_confined(self, name: str, type: Term) -> "Context":
        return Context(self.entries + ((name, type, True),))

    def lookup(self, index: int) -> Term:
        """Type of regular variable ``index``, valid in the full context."""
        seen = 0
        for name, ty, confined in reversed(self.entries):
            if confined:
                continue
            if seen == index:
                return shift(ty, index + 1)
            seen += 1
        raise LookupError(f"unbound variable #{index}")

    def confined(self, name: str) -> Term | None:
        for n, ty, confined in reversed(self.entries):
            if confined and n == name:
                return ty
        return None

    def confined_names(self) -> set[str]:
        return {n for n, _, c in self.entries if c}

    def regular_names(self) -> list[str]:
        """Display names, innermost first (index order)."""
        return [n for n, _, c in reversed(self.entries) if not c]
