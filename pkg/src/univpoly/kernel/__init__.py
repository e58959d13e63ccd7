from .check import TypingError, check_entry, check_signature, check_type, infer_type
from .reduce import DEFAULT_FUEL, FuelExhausted, conv, convert, whnf
from .signature import Context, DuplicateName, Entry, Signature
from .terms import (
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
    subst_levels,
    subst_term,
)
from .upp import upp_signature

__all__ = [
    "Abs",
    "App",
    "CAbs",
    "CApp",
    "CPi",
    "Const",
    "Context",
    "DEFAULT_FUEL",
    "DuplicateName",
    "Entry",
    "FuelExhausted",
    "KIND",
    "Pi",
    "Signature",
    "Sort",
    "TYPE",
    "Term",
    "TypingError",
    "Var",
    "check_entry",
    "check_signature",
    "check_type",
    "conv",
    "convert",
    "infer_type",
    "subst_levels",
    "subst_term",
    "upp_signature",
    "whnf",
]
