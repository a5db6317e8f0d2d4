"""Support-variety questions answered through Tor vanishing and rank varieties."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import List, Optional

from . import exactalg as ea
from .errors import UnsupportedRingError, UsageError
from .homalg import DEFAULT_MAX_DEG, ComplexityKind, ComplexityVerdict, ResolutionCache, classify_complexity, tor_dims
from .module import Module, _same_ring, quotient_by_form_power
from .ring import CIRing, LinearForm, enumerate_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportQuery:
    module: Module
    point: LinearForm
    max_deg: int = DEFAULT_MAX_DEG


class Disjointness(enum.Enum):
    DISJOINT = "disjoint"
    NOT_DISJOINT = "not_disjoint"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class DisjointResult:
    verdict: Disjointness
    index: Optional[int] = None  # first i >= 1 with Tor_i != 0
    bound: int = 0  # largest Tor index inspected
    certificate: Optional[str] = None

    def to_json(self):
        out = {"verdict": self.verdict.value, "bound": self.bound}
        if self.index is not None:
            out["index"] = self.index
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def supports_disjoint(
    m: Module,
    n: Module,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    seed: int = 0,
    cache: Optional[ResolutionCache] = None,
) -> DisjointResult:
    """Decide V(M) and V(N) disjoint, i.e. Tor_i(M, N) = 0 for every i >= 1.

    If one argument has a certified period d from step s, Tor is periodic past
    s and only indices 1..s+d need checking. Without a certificate a zero Tor
    window proves nothing, so the verdict is UNDETERMINED.
    """
    _same_ring(m, n)
    for name, a, b in (("first", m, n), ("second", n, m)):
        v = classify_complexity(a, max_deg, trials, seed, cache)
        if v.kind is ComplexityKind.FREE:
            return DisjointResult(Disjointness.DISJOINT, bound=0, certificate=f"{name} argument is free")
        if v.kind is ComplexityKind.PERIODIC:
            bound = v.start + v.period
            dims = tor_dims(a, b, bound, cache)
            for i in range(1, bound + 1):
                if dims[i]:
                    return DisjointResult(Disjointness.NOT_DISJOINT, index=i, bound=bound, certificate=str(v))
            return DisjointResult(Disjointness.DISJOINT, bound=bound, certificate=f"{name} argument {v}")
    dims = tor_dims(m, n, max_deg, cache)
    for i in range(1, max_deg + 1):
        if dims[i]:
            return DisjointResult(Disjointness.NOT_DISJOINT, index=i, bound=max_deg)
    return DisjointResult(Disjointness.UNDETERMINED, bound=max_deg)


def _require_rank_ring(ring: CIRing):
    if any(a != ring.p for a in ring.exps):
        raise UnsupportedRingError(f"rank varieties need every exponent equal to p={ring.p}, ring is {ring.spec}")


def rank_point_membership(m: Module, alpha: LinearForm) -> bool:
    """Is alpha in the rank variety of M?

    True iff sum(alpha_i X_i) does not act freely over k[t]/(t^p), which is
    the case iff p * rank(op^(p-1)) < dim M.
    """
    ring = m.ring
    _require_rank_ring(ring)
    if len(alpha.coeffs) != ring.c or alpha.p != ring.p:
        raise UsageError("point does not belong to the module's ring")
    if m.dim == 0:
        return False
    op = alpha.operator(m.actions)
    top = ea.matpow(op, ring.p - 1, ring.p)
    return ring.p * ea.rank(top, ring.p) < m.dim


def rank_variety(m: Module) -> List[LinearForm]:
    return [a for a in enumerate_points(m.ring) if rank_point_membership(m, a)]


def axis_witness(ring: CIRing, j: int) -> Module:
    """A/(X_j): periodic, with support at the point labelled by the j-th coordinate axis."""
    return quotient_by_form_power(ring, ring.variable(j), 1)


def tor_point_membership(
    m: Module, j: int, max_deg: int = DEFAULT_MAX_DEG, trials: int = 16, seed: int = 0, cache=None
) -> Optional[bool]:
    """Whether V(M) meets V(A/(X_j)); ``None`` when undetermined."""
    res = supports_disjoint(m, axis_witness(m.ring, j), max_deg, trials, seed, cache)
    if res.verdict is Disjointness.UNDETERMINED:
        return None
    return res.verdict is Disjointness.NOT_DISJOINT


def locate_periodic_support(
    m: Module,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    seed: int = 0,
    verdict: Optional[ComplexityVerdict] = None,
    cache: Optional[ResolutionCache] = None,
) -> Optional[LinearForm]:
    """The single support point of a periodic module, or ``None`` if it cannot be pinned.

    On rings with every exponent equal to p the rank variety is swept over all
    points. Elsewhere the module is tested against the axis quotients A/(X_j),
    whose supports are distinct points, so only axis points can be found.
    """
    v = verdict or classify_complexity(m, max_deg, trials, seed, cache)
    if v.kind is not ComplexityKind.PERIODIC:
        raise UsageError(f"locate_periodic_support needs a periodic module, got {v}")
    ring = m.ring
    if all(a == ring.p for a in ring.exps):
        hits = rank_variety(m)
        if len(hits) == 1:
            return hits[0]
        logger.info("rank variety has %d points: %s", len(hits), ", ".join(map(str, hits)))
        return None
    hits = []
    for j in range(ring.c):
        member = tor_point_membership(m, j, max_deg, trials, seed, cache)
        if member is None:
            logger.info("membership at axis %d undetermined", j)
            return None
        if member:
            hits.append(ring.variable(j))
    if len(hits) == 1:
        return hits[0]
    logger.info("axis test found %d support points", len(hits))
    return None
