import pytest

from corpus import NAT, NAT_CONSTRAINTS, RUNNING, TALLY
from univpoly import level as lv
from univpoly.agda import agda_level, export_agda_style
from univpoly.kernel.upp import upp_arities
from univpoly.syntax import parse_level, parse_signature

# Hand translations of the elaborated outputs under the symbol map
# Lvl -> Level, U l / Ty l -> Set l, Tm l A -> A, S -> lsuc, 0 -> lzero.
RUNNING_AGDA = """\
module Running where

open import Agda.Primitive

id : (i : Level) → (A : Set i) → A → A
id = λ i → λ A → λ x → x

id' : (i : Level) → (A : Set i) → A → A
id' = λ i → id (lsuc i) ((A : Set i) → A → A) (id i)
"""

NAT_AGDA = """\
module Nat where

open import Agda.Primitive

postulate
  Nat : (i : Level) → Set i
  zero : (i : Level) → Nat i
  succ : (i : Level) → Nat i → Nat i
"""


def test_running_example_golden():
    _, results = TALLY.signature(RUNNING)
    assert export_agda_style([r.entry for r in results], "running") == RUNNING_AGDA


def test_nat_golden():
    _, results = TALLY.signature(NAT, NAT_CONSTRAINTS)
    assert export_agda_style([r.entry for r in results], "Nat") == NAT_AGDA


def test_empty_signature_has_only_the_header():
    assert export_agda_style([], "Empty") == "module Empty where\n\nopen import Agda.Primitive\n"


def test_small_universe_is_set_at_lzero():
    entries = parse_signature("B : Ty 0.\nb : Tm 1 (U 0).", upp_arities())
    text = export_agda_style(entries)
    assert "  B : Set lzero\n  b : Set lzero\n" in text


@pytest.mark.parametrize(
    "level, expected",
    [
        ("0", "lzero"),
        ("2", "lsuc (lsuc lzero)"),
        ("1+(i ⊔ j)", "lsuc i ⊔ lsuc j"),
        ("i ⊔ (j ⊔ 1+k)", "i ⊔ j ⊔ lsuc k"),
        ("0 ⊔ i", "i"),
    ],
)
def test_levels(level, expected):
    assert agda_level(parse_level(level)) == expected


def test_joins_are_parenthesized_as_arguments():
    entries = parse_signature("c : (i : Lvl) -> (j : Lvl) -> Ty (1+(i ⊔ j)).", upp_arities())
    assert "c : (i : Level) → (j : Level) → Set (lsuc i ⊔ lsuc j)" in export_agda_style(entries)


def test_module_name_is_sanitized():
    assert export_agda_style([], "my-out").startswith("module My_out where")


def test_level_printing_preserves_meaning():
    # re-read the Agda rendering with the level parser and compare semantically
    for text in ["1+(i ⊔ 2)", "i ⊔ 1+j ⊔ 3", "S (S i) ⊔ 0"]:
        l = parse_level(text)
        back = agda_level(l).replace("lsuc", "S").replace("lzero", "0")
        assert lv.levels_equal(parse_level(back), l)
