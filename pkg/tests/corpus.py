"""Input signatures shared by the elaboration and acceptance tests."""

from __future__ import annotations

from importlib.resources import files

from univpoly.elab import PostCheckFailed, elaborate_entry
from univpoly.kernel import upp_signature
from univpoly.pts import get_profile
from univpoly.syntax import parse_constraints, parse_signature

PROFILE_I = get_profile("I")


def example(name: str) -> str:
    return (files("univpoly") / "examples" / name).read_text(encoding="utf-8")


RUNNING = example("running.sig")
NAT = example("nat.sig")
NAT_CONSTRAINTS = example("nat.constraints")

# ``id`` applied to its own type: the argument lives one universe below
# the instance of ``id`` that receives it.
ID_TO_ID = """
def id_to_id : Tm@o (Pi@o,o (Pi@box,o (U@o) (A => Pi@o,o A (x => A))) (x => Pi@box,o (U@o) (A => Pi@o,o A (x => A))))
  := App@box,o (U@o) (A => Pi@o,o A (x => A)) id (Pi@box,o (U@o) (A => Pi@o,o A (x => A))).
"""

# A few more entries that exercise products over types and definitions
# in the predicative fragment.
EXTRA = """
Eq : Tm@box (Pi@box,box (U@o) (A => Pi@o,box A (x => Pi@o,box A (y => U@o)))).
refl : Tm@o (Pi@box,o (U@o) (A => Pi@o,o A (x => App@o,box A (y => U@o) (App@o,box A (x => Pi@o,box A (y => U@o)) (App@box,box (U@o) (A => Pi@o,box A (x => Pi@o,box A (y => U@o))) Eq A) x) x))).
def const : Tm@o (Pi@box,o (U@o) (A => Pi@box,o (U@o) (B => Pi@o,o A (x => Pi@o,o B (y => A)))))
  := Lam@box,o (U@o) (A => Pi@box,o (U@o) (B => Pi@o,o A (x => Pi@o,o B (y => A))))
       (A => Lam@box,o (U@o) (B => Pi@o,o A (x => Pi@o,o B (y => A)))
         (B => Lam@o,o A (x => Pi@o,o B (y => A)) (x => Lam@o,o B (y => A) (y => x)))).
"""


class Tally:
    """Count post-check failures over every elaboration routed through it."""

    def __init__(self):
        self.entries = 0
        self.postcheck_failures: list[str] = []

    def elaborate(self, sig, entry, user=(), opts=None):
        self.entries += 1
        try:
            return elaborate_entry(sig, entry, user, opts)
        except PostCheckFailed as exc:
            self.postcheck_failures.append(f"{entry.name}: {exc}")
            raise

    def signature(self, text: str, constraints: str | None = None, opts=None, base=None):
        entries = parse_signature(text, profile=PROFILE_I)
        user: dict = {}
        for name, eq in parse_constraints(constraints or ""):
            user.setdefault(name, []).append(eq)
        sig = base if base is not None else upp_signature()
        results = []
        for e in entries:
            res = self.elaborate(sig, e, user.get(e.name, ()), opts)
            sig = sig.extend(res.entry)
            results.append(res)
        return sig, results


TALLY = Tally()
