"""Classes in the stable Grothendieck group Z/len(A)Z and the subgroups families generate."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .errors import RingMismatchError, UsageError
from .module import Module
from .ring import CIRing


@dataclass(frozen=True, order=True)
class GClass:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or not 0 <= self.value < self.modulus:
            raise UsageError(f"bad class {self.value} mod {self.modulus}")

    def __add__(self, other: "GClass") -> "GClass":
        if self.modulus != other.modulus:
            raise RingMismatchError("classes from different groups")
        return GClass((self.value + other.value) % self.modulus, self.modulus)

    def __neg__(self) -> "GClass":
        return GClass(-self.value % self.modulus, self.modulus)

    def __sub__(self, other: "GClass") -> "GClass":
        return self + (-other)


def gclass(m: Module) -> GClass:
    """[M] = len(M) mod len(A)."""
    return GClass(m.dim % m.ring.length, m.ring.length)


def _family_ring(family: Sequence[Module], ring: Optional[CIRing]) -> CIRing:
    if ring is None:
        if not family:
            raise UsageError("an empty family needs an explicit ring")
        ring = family[0].ring
    for m in family:
        if m.ring != ring:
            raise RingMismatchError(f"family mixes {ring.spec} and {m.ring.spec}")
    return ring


def subgroup_of_lengths(family: Sequence[Module], ring: Optional[CIRing] = None) -> Tuple[int, int]:
    """(generator, index) of the subgroup of Z/len(A)Z generated by the classes of ``family``.

    Subgroups of a cyclic group are gZ/len(A)Z for divisors g of len(A), so the
    generator is gcd(len(A), all lengths) and the index equals it.
    """
    ring = _family_ring(family, ring)
    g = ring.length
    for m in family:
        g = gcd(g, m.dim)
    return g, g


@dataclass
class DivisibilityRow:
    hash: str
    length: int
    gclass: int
    passed: bool


@dataclass
class DivisibilityReport:
    ring: str
    divisor: int
    rows: List[DivisibilityRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failures(self) -> List[DivisibilityRow]:
        return [r for r in self.rows if not r.passed]

    def to_json(self):
        return {
            "ring": self.ring,
            "divisor": self.divisor,
            "passed": self.passed,
            "count": len(self.rows),
            "failures": [r.hash for r in self.failures],
            "rows": [
                {"hash": r.hash, "length": r.length, "class": r.gclass, "verdict": "pass" if r.passed else "fail"}
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["hash", "length", "class", "verdict"])
        for r in self.rows:
            w.writerow([r.hash, r.length, r.gclass, "pass" if r.passed else "fail"])
        return buf.getvalue()

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def divisibility_report(family: Sequence[Module], d: int, ring: Optional[CIRing] = None) -> DivisibilityReport:
    """Check d | len(M) for every module in ``family``."""
    if d < 2:
        raise UsageError("divisor must be at least 2")
    ring = _family_ring(family, ring)
    rep = DivisibilityReport(ring.spec, d)
    for m in family:
        rep.rows.append(DivisibilityRow(m.content_hash, m.dim, gclass(m).value, m.dim % d == 0))
    return rep
