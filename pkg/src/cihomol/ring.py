"""Monomial complete intersections k[X_1..X_c]/(X_1^a_1, ..., X_c^a_c) over GF(p)."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidEmbeddingError, ParseError, UsageError
from .exactalg import FieldSpec

_SPEC_RE = re.compile(r"p=(\d+);exps=(\d+(?:,\d+)*)")


@dataclass(frozen=True)
class CIRing:
    """The ring A = GF(p)[X_1..X_c]/(X_i^{a_i}).

    The k-basis of A is the set of monomials ``X^e`` with ``0 <= e_i < a_i``,
    listed in lexicographic order of exponent vectors. Every matrix in the
    library is written relative to this order.
    """

    p: int
    exps: Tuple[int, ...]
    field: FieldSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        exps = tuple(int(a) for a in self.exps)
        if not exps:
            raise UsageError("a ring needs at least one variable")
        if any(a < 2 for a in exps):
            raise UsageError(f"every exponent must be >= 2, got {exps}")
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "field", FieldSpec(self.p))
        object.__setattr__(self, "p", self.field.p)

    @classmethod
    def parse(cls, text: str) -> "CIRing":
        """Parse ``"p=<prime>;exps=<a1>,<a2>,..."``."""
        s = text.strip()
        m = _SPEC_RE.fullmatch(s)
        if m is None:
            raise ParseError(f"malformed ring spec {text!r}", position=_first_mismatch(s))
        exps = tuple(int(a) for a in m.group(2).split(","))
        try:
            return cls(int(m.group(1)), exps)
        except UsageError as exc:
            raise ParseError(f"invalid ring spec {text!r}: {exc}") from None

    @property
    def spec(self) -> str:
        return f"p={self.p};exps=" + ",".join(str(a) for a in self.exps)

    def __str__(self):
        return self.spec

    @property
    def c(self) -> int:
        return len(self.exps)

    @property
    def length(self) -> int:
        return prod(self.exps)

    @cached_property
    def basis(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(itertools.product(*(range(a) for a in self.exps)))

    @cached_property
    def _index(self):
        return {e: i for i, e in enumerate(self.basis)}

    def monomial_index(self, e: Sequence[int]) -> int:
        return self._index[tuple(e)]

    @cached_property
    def mult_matrices(self) -> Tuple[np.ndarray, ...]:
        """Multiplication by each variable on the monomial basis."""
        n = self.length
        mats = []
        for i in range(self.c):
            x = np.zeros((n, n), dtype=np.int64)
            for col, e in enumerate(self.basis):
                if e[i] + 1 < self.exps[i]:
                    f = e[:i] + (e[i] + 1,) + e[i + 1:]
                    x[self._index[f], col] = 1
            x.flags.writeable = False
            mats.append(x)
        return tuple(mats)

    def variable(self, i: int) -> "LinearForm":
        coeffs = [0] * self.c
        coeffs[i] = 1
        return LinearForm(tuple(coeffs), self.p)

    def variable_names(self) -> List[str]:
        if self.c <= 3:
            return list("xyz"[: self.c])
        return [f"x{i + 1}" for i in range(self.c)]

    def parse_form(self, text: str) -> "LinearForm":
        """A variable name (``x``, ``y``, ``z`` or ``x1``..) or comma-separated coefficients."""
        s = text.strip()
        names = self.variable_names()
        if s in names:
            return self.variable(names.index(s))
        try:
            coeffs = tuple(int(t) for t in s.split(","))
        except ValueError:
            raise ParseError(f"cannot read linear form {text!r}; use one of {names} or coefficients") from None
        if len(coeffs) != self.c:
            raise ParseError(f"linear form {text!r} has {len(coeffs)} coefficients, ring has {self.c} variables")
        return LinearForm(coeffs, self.p)


def _first_mismatch(s: str) -> int:
    """Character offset where ``s`` stops matching the ring spec grammar."""
    pos = 0

    def literal(text):
        nonlocal pos
        for ch in text:
            if pos >= len(s) or s[pos] != ch:
                return False
            pos += 1
        return True

    def number():
        nonlocal pos
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        return pos > start

    if not (literal("p=") and number() and literal(";exps=") and number()):
        return pos
    while pos < len(s) and s[pos] == ",":
        pos += 1
        if not number():
            return pos
    return pos


@dataclass(frozen=True)
class LinearForm:
    """A nonzero linear form sum(alpha_i X_i), scaled so its first nonzero coefficient is 1.

    Equal forms are the same point of projective space over GF(p).
    """

    coeffs: Tuple[int, ...]
    p: int

    def __post_init__(self):
        p = int(self.p)
        cs = tuple(int(a) % p for a in self.coeffs)
        lead = next((a for a in cs if a), 0)
        if lead == 0:
            raise UsageError("a linear form must have a nonzero coefficient")
        inv = pow(lead, p - 2, p)
        object.__setattr__(self, "coeffs", tuple(a * inv % p for a in cs))
        object.__setattr__(self, "p", p)

    def __str__(self):
        return "(" + ":".join(str(a) for a in self.coeffs) + ")"

    def operator(self, actions: Sequence[np.ndarray]) -> np.ndarray:
        """The matrix of sum(alpha_i X_i) given the action matrices of the X_i."""
        if len(actions) != len(self.coeffs):
            raise UsageError("linear form and module have different numbers of variables")
        n = actions[0].shape[0] if actions else 0
        out = np.zeros((n, n), dtype=np.int64)
        for a, x in zip(self.coeffs, actions):
            if a:
                out = (out + a * x) % self.p
        return out


def enumerate_points(ring: CIRing) -> List[LinearForm]:
    """All points of P^{c-1}(GF(p)) as normalized linear forms."""
    p, c = ring.p, ring.c
    pts = []
    for lead in range(c):
        for tail in itertools.product(range(p), repeat=c - lead - 1):
            pts.append(LinearForm((0,) * lead + (1,) + tail, p))
    return pts


@dataclass(frozen=True)
class Embedding:
    """The subring generated by X_i^{u_i}, viewed as a ring in its own variables Y_i."""

    ambient: CIRing
    sub: CIRing
    powers: Tuple[int, ...]

    @property
    def rank(self) -> int:
        """Rank of the ambient ring as a free module over the subring."""
        return prod(self.powers)


def power_subring_embedding(ring: CIRing, powers: Sequence[int]) -> Tuple[CIRing, Embedding]:
    """R = k[Y_1..Y_c]/(Y_i^{a_i/u_i}) with Y_i acting as X_i^{u_i}."""
    u = tuple(int(x) for x in powers)
    if len(u) != ring.c:
        raise InvalidEmbeddingError(f"need {ring.c} powers, got {len(u)}")
    for i, (a, ui) in enumerate(zip(ring.exps, u)):
        if ui < 1 or a % ui:
            raise InvalidEmbeddingError(f"power u_{i + 1}={ui} does not divide exponent a_{i + 1}={a}")
        if a // ui < 2:
            raise InvalidEmbeddingError(
                f"subring exponent a_{i + 1}/u_{i + 1} = {a // ui} < 2; quotient is not a complete intersection of this shape"
            )
    sub = CIRing(ring.p, tuple(a // ui for a, ui in zip(ring.exps, u)))
    return sub, Embedding(ring, sub, u)


def regular_module(ring: CIRing):
    """A as a module over itself."""
    from .module import Module

    return Module(ring, ring.mult_matrices, check=False)
