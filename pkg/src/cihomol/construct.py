"""Module families used by the verification suites.

Every generator is seeded and deterministic. Families are grown only by
operations that keep modules inside a certifiable class (syzygies,
cosyzygies, direct sums, extensions, quotients by powers of a variable), and
each member is re-certified before it is returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import exactalg as ea
from .errors import UsageError
from .homalg import (
    DEFAULT_MAX_DEG,
    ComplexityVerdict,
    ResolutionCache,
    classify_complexity,
    cosyzygy,
    extension,
    syzygy,
)
from .module import (
    HomSpace,
    Module,
    ModuleMap,
    direct_sum,
    nilpotency_order,
    quotient,
    quotient_by_form_power,
    residue_field,
    restrict_scalars,
)
from .ring import CIRing, LinearForm, power_subring_embedding, regular_module
from .support import Disjointness, supports_disjoint


class FamilyKind(enum.Enum):
    H_FAMILY = "h"
    AXIS_QUOTIENTS = "axis"
    SYZYGY_CLOSURE = "syzygy"
    EXTENSION_CLOSURE = "extension"
    RESTRICTION_CHAIN = "restriction"
    MIXED = "mixed"


@dataclass(frozen=True)
class FamilySpec:
    kind: FamilyKind = FamilyKind.MIXED
    g: Optional[LinearForm] = None  # H_FAMILY
    depth: int = 2  # SYZYGY_CLOSURE
    count: int = 10  # EXTENSION_CLOSURE
    seed: int = 0  # EXTENSION_CLOSURE
    powers: Optional[Tuple[int, ...]] = None  # RESTRICTION_CHAIN


def _as_form(ring: CIRing, g: Union[LinearForm, Sequence[int]]) -> LinearForm:
    form = g if isinstance(g, LinearForm) else LinearForm(tuple(g), ring.p)
    if len(form.coeffs) != ring.c or form.p != ring.p:
        raise UsageError(f"linear form {form} does not belong to {ring.spec}")
    return form


def h_family(ring: CIRing, g: Union[LinearForm, Sequence[int]]) -> List[Module]:
    """[A/(g), A/(g^2), ..., A/(g^(r-1))] where r is the nilpotency order of g."""
    form = _as_form(ring, g)
    r = nilpotency_order(ring, form)
    if r < 2:
        raise UsageError(f"{form} has nilpotency order {r} < 2")
    return [quotient_by_form_power(ring, form, i) for i in range(1, r)]


def axis_quotients(ring: CIRing) -> List[Tuple[Module, int]]:
    """A/(X_j^t) for every variable j and 1 <= t < a_j, tagged with j."""
    out = []
    for j, a in enumerate(ring.exps):
        x = ring.variable(j)
        out.extend((quotient_by_form_power(ring, x, t), j) for t in range(1, a))
    return out


class _Grower:
    """Seeded random closure of a pool of modules under cx-preserving operations."""

    OPS = ("syzygy", "cosyzygy", "sum", "extension")

    def __init__(self, ring, rng, max_dim, accept, cache):
        self.ring = ring
        self.rng = rng
        self.max_dim = max_dim
        self.accept = accept
        self.cache = cache
        self.pool: List[Tuple[Module, object]] = []
        self.verdicts = {}
        self.seen = set()

    def offer(self, m: Module, tag) -> bool:
        if m.dim == 0 or m.dim > self.max_dim or m.content_hash in self.seen:
            return False
        self.seen.add(m.content_hash)
        verdict = self.accept(m)
        if verdict is None:
            return False
        self.pool.append((m, tag))
        self.verdicts[m.content_hash] = verdict
        return True

    def step(self) -> bool:
        op = self.OPS[int(self.rng.integers(len(self.OPS)))]
        m, tag = self.pool[int(self.rng.integers(len(self.pool)))]
        if op == "syzygy":
            return self.offer(syzygy(m, self.cache), tag)
        if op == "cosyzygy":
            return self.offer(cosyzygy(m, self.cache), tag)
        if op == "sum":
            n, tag2 = self.pool[int(self.rng.integers(len(self.pool)))]
            return self.offer(direct_sum(m, n), tag if tag == tag2 else "mixed")
        # extension: prefer a partner with the same support tag; free modules only split
        if tag == "free":
            return False
        partners = [(n, t) for n, t in self.pool if t == tag] or [(n, t) for n, t in self.pool if t != "free"]
        n, _ = partners[int(self.rng.integers(len(partners)))]
        omega = syzygy(m, self.cache)
        if omega.dim == 0:
            return False
        hom = HomSpace(omega, n)
        if hom.dim == 0:
            return False
        phi = hom.random(self.rng)
        if not phi.mat.any():
            phi = hom.random(self.rng)
        return self.offer(extension(phi, m, self.cache), tag)


def _certifier(max_deg, trials, seed, cache):
    def accept(m):
        v = classify_complexity(m, max_deg, trials, seed, cache)
        return v if v.certified else None

    return accept


def _default_max_dim(ring: CIRing) -> int:
    return max(3 * ring.length, 24)


def cx1_family(
    ring: CIRing,
    spec: Optional[FamilySpec] = None,
    budget: int = 50,
    seed: int = 0,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    max_dim: Optional[int] = None,
    cache: Optional[ResolutionCache] = None,
) -> List[Tuple[Module, ComplexityVerdict]]:
    """Up to ``budget`` distinct modules, each with a Free or periodic certificate.

    For ``RESTRICTION_CHAIN`` the members are restrictions to the power
    subring and are certified over that subring.
    """
    spec = spec or FamilySpec()
    if budget <= 0:
        return []
    max_dim = max_dim or _default_max_dim(ring)
    rng = np.random.default_rng(seed)
    accept = _certifier(max_deg, trials, seed, cache)
    grower = _Grower(ring, rng, max_dim, accept, cache)

    if spec.kind is FamilyKind.H_FAMILY:
        if spec.g is None:
            raise UsageError("H family needs a linear form g")
        for m in h_family(ring, spec.g):
            grower.offer(m, "h")
    elif spec.kind is FamilyKind.RESTRICTION_CHAIN:
        if spec.powers is None:
            raise UsageError("restriction chain needs powers")
        sub, emb = power_subring_embedding(ring, spec.powers)
        inner = cx1_family(ring, FamilySpec(), budget, seed, max_deg, trials, max_dim, cache)
        out = []
        for m, _ in inner:
            r = restrict_scalars(m, emb)
            v = classify_complexity(r, max_deg, trials, seed, cache)
            if v.certified:
                out.append((r, v))
        return out[:budget]
    else:
        grower.offer(regular_module(ring), "free")
        for m, j in axis_quotients(ring):
            grower.offer(m, j)
        if spec.kind is FamilyKind.SYZYGY_CLOSURE:
            frontier = list(grower.pool)
            for _ in range(spec.depth):
                nxt = []
                for m, tag in frontier:
                    for op in (syzygy, cosyzygy):
                        s = op(m, cache)
                        if grower.offer(s, tag):
                            nxt.append((s, tag))
                frontier = nxt
        elif spec.kind is FamilyKind.EXTENSION_CLOSURE:
            grower.rng = np.random.default_rng(spec.seed)
            grower.OPS = ("extension",)
            for _ in range(spec.count * 4):
                if len(grower.pool) >= spec.count + len(axis_quotients(ring)) + 1:
                    break
                grower.step()
        elif spec.kind is FamilyKind.MIXED:
            attempts = 0
            while len(grower.pool) < budget and attempts < 20 * budget:
                attempts += 1
                grower.step()
    return [(m, grower.verdicts[m.content_hash]) for m, _ in grower.pool[:budget]]


def avoiding_family(
    ring: CIRing,
    alpha: Union[LinearForm, Sequence[int]],
    budget: int = 50,
    seed: int = 0,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    max_dim: Optional[int] = None,
    cache: Optional[ResolutionCache] = None,
) -> List[Module]:
    """Modules certified to avoid the support point of H = A/(alpha).

    Certification: supports_disjoint(M, H) is DISJOINT.
    """
    form = _as_form(ring, alpha)
    witness = quotient_by_form_power(ring, form, 1)
    if budget <= 0:
        return []

    def accept(m):
        res = supports_disjoint(m, witness, max_deg, trials, seed, cache)
        return res if res.verdict is Disjointness.DISJOINT else None

    grower = _Grower(ring, np.random.default_rng(seed), max_dim or _default_max_dim(ring), accept, cache)
    grower.offer(regular_module(ring), "free")
    for m, j in axis_quotients(ring):
        grower.offer(m, j)
    attempts = 0
    while len(grower.pool) < budget and attempts < 20 * budget:
        attempts += 1
        grower.step()
    return [m for m, _ in grower.pool[:budget]]


def random_ideal_quotient(ring: CIRing, rng: np.random.Generator, gens: int = 2) -> Module:
    """A/I for I generated by ``gens`` random elements of the maximal ideal."""
    a = regular_module(ring)
    vecs = rng.integers(0, ring.p, size=(gens, ring.length), dtype=np.int64)
    vecs[:, 0] = 0
    # sparsify so the quotient is usually not tiny
    vecs *= rng.random(size=vecs.shape) < 0.3
    return quotient(a, vecs).module


def random_modules(
    ring: CIRing, count: int, seed: int = 0, max_dim: Optional[int] = None, cache: Optional[ResolutionCache] = None
) -> List[Module]:
    """Seeded uncertified modules: cyclic quotients, k, syzygies, cosyzygies, sums, extensions."""
    rng = np.random.default_rng(seed)
    max_dim = max_dim or _default_max_dim(ring)
    pool: List[Module] = [residue_field(ring)]
    pool.extend(m for m, _ in axis_quotients(ring))
    out: List[Module] = []
    attempts = 0
    while len(out) < count and attempts < 50 * count + 100:
        attempts += 1
        op = int(rng.integers(6))
        m = pool[int(rng.integers(len(pool)))]
        if op == 0:
            new = random_ideal_quotient(ring, rng, gens=int(rng.integers(1, 3)))
        elif op == 1:
            new = syzygy(m, cache)
        elif op == 2:
            new = cosyzygy(m, cache)
        elif op == 3:
            new = direct_sum(m, pool[int(rng.integers(len(pool)))])
        elif op == 4:
            n = pool[int(rng.integers(len(pool)))]
            omega = syzygy(m, cache)
            hom = HomSpace(omega, n) if omega.dim else None
            if hom is None or hom.dim == 0:
                continue
            new = extension(hom.random(rng), m, cache)
        else:
            new = random_ideal_quotient(ring, rng, gens=1)
        if new.dim == 0 or new.dim > max_dim:
            continue
        pool.append(new)
        out.append(new)
    return out


def power_quotient(x: Module, g: Union[LinearForm, Sequence[int]], j: int):
    """X / g^j X together with its projection and section."""
    form = _as_form(x.ring, g)
    gj = ea.matpow(form.operator(x.actions), j, x.ring.p)
    return quotient(x, gj.T, closed=True)


def power_quotient_sequence(x: Module, g: Union[LinearForm, Sequence[int]], j: int) -> Tuple[ModuleMap, ModuleMap]:
    """The maps of 0 -> X/g^(j-1)X --g--> X/g^jX --> X/gX -> 0 for j >= 2."""
    if j < 2:
        raise UsageError("sequence is defined for j >= 2")
    form = _as_form(x.ring, g)
    p = x.ring.p
    lower, mid, top = power_quotient(x, form, j - 1), power_quotient(x, form, j), power_quotient(x, form, 1)
    op = form.operator(x.actions)
    v = ModuleMap(lower.module, mid.module, ea.matmul(mid.projection, ea.matmul(op, lower.section, p), p))
    w = ModuleMap(mid.module, top.module, ea.matmul(top.projection, mid.section, p))
    return v, w
