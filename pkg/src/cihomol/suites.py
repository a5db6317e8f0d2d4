"""Verification suites: each runs a batch of exact checks and returns a SuiteReport.

A check passes only on a definite positive answer. Undetermined complexity,
UNKNOWN isomorphism verdicts and unpinned supports all count as failures.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from .construct import (
    FamilySpec,
    _as_form,
    avoiding_family,
    cx1_family,
    h_family,
    power_quotient,
    power_quotient_sequence,
    random_modules,
)
from .errors import UsageError
from .gk import subgroup_of_lengths
from .homalg import (
    DEFAULT_MAX_DEG,
    ComplexityKind,
    ResolutionCache,
    betti_numbers,
    classify_complexity,
    is_exact,
    stable_reduce,
    syzygy,
    tensor,
    tor,
    tor_dims,
)
from .module import (
    IsoVerdict,
    Module,
    free_module,
    is_free,
    iso_test,
    min_generators,
    nilpotency_order,
    quotient_by_form_power,
    residue_field,
    restrict_scalars,
)
from .ring import CIRing, LinearForm, power_subring_embedding, regular_module
from .support import Disjointness, locate_periodic_support, supports_disjoint

REPORT_SCHEMA = "cihomol-report/1"

Form = Union[LinearForm, Sequence[int]]


@dataclass
class Check:
    id: str
    description: str
    anchor: str
    passed: bool
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_json(self):
        return {
            "id": self.id,
            "description": self.description,
            "anchor": self.anchor,
            "verdict": "pass" if self.passed else "fail",
            "witness": self.witness,
        }


@dataclass
class SuiteReport:
    suite: str
    ring: str
    params: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, description: str, anchor: str, passed: bool, **witness) -> Check:
        check = Check(f"{len(self.checks) + 1:03d}", description, anchor, bool(passed), witness)
        self.checks.append(check)
        return check

    def to_json(self, include_runtime: bool = False) -> Dict[str, Any]:
        out = {
            "schema": REPORT_SCHEMA,
            "suite": self.suite,
            "ring": self.ring,
            "params": self.params,
            "aggregate": "pass" if self.passed else "fail",
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.id)],
            "notes": self.notes,
        }
        if include_runtime:
            out["runtime_s"] = round(self.runtime, 3)
        return out

    def dumps(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_json(include_runtime), indent=2, sort_keys=False) + "\n"

    def to_text(self, include_runtime: bool = True) -> str:
        head = f"{self.suite} on {self.ring}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks) - len(self.failures)}/{len(self.checks)} checks"
        head += f", {self.runtime:.2f}s)" if include_runtime else ")"
        lines = [head]
        for c in sorted(self.checks, key=lambda c: c.id):
            lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.id} {c.description}  <{c.anchor}>")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def _timed(fn: Callable[..., SuiteReport]) -> Callable[..., SuiteReport]:
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.runtime = time.perf_counter() - t0
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _iso(m: Module, n: Module, trials: int, seed: int) -> str:
    return iso_test(m, n, trials=trials, seed=seed).verdict.value


def _no_free_summand(m: Module, cache) -> Dict[str, Any]:
    """M has no free summand iff stable_reduce(M) has the same length (it is then isomorphic)."""
    red = stable_reduce(m, cache)
    return {"length": m.dim, "reduced_length": red.dim, "ok": red.dim == m.dim}


# -- H family ----------------------------------------------------------------------


@_timed
def suite_lemma_h(
    ring: CIRing,
    g: Form,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    seed: int = 0,
    cache: Optional[ResolutionCache] = None,
) -> SuiteReport:
    """Structure of H_i = A/(g^i): lengths, generators, syzygies and support."""
    form = _as_form(ring, g)
    hs = h_family(ring, form)
    r = len(hs) + 1
    rep = SuiteReport("lemma-h", ring.spec, {"g": str(form), "max_deg": max_deg, "trials": trials, "seed": seed})
    l1 = hs[0].dim

    lengths = [h.dim for h in hs]
    rep.add("len(H_i) = i * len(H_1)", "len(B/(g^i)) = i*len(B/(g))", lengths == [i * l1 for i in range(1, r)], lengths=lengths)
    rep.add("len(A) = r * len(H_1)", "len(A) = r*len(H_1)", ring.length == r * l1, length_A=ring.length, r=r, length_H1=l1)

    mus = [min_generators(h) for h in hs]
    rep.add("every H_i is cyclic", "mu(H_i) = 1", all(m == 1 for m in mus), mu=mus)

    free = [_no_free_summand(h, cache) for h in hs]
    rep.add(
        "no H_i has a free summand",
        "H_i has no free summand",
        all(f["ok"] for f in free),
        reduced_lengths=[f["reduced_length"] for f in free],
    )

    verdicts = [_iso(syzygy(hs[i - 1], cache), hs[r - i - 1], trials, seed) for i in range(1, r)]
    rep.add(
        "Omega(H_i) is isomorphic to H_(r-i)",
        "Omega(H_i) = H_(r-i)",
        all(v == IsoVerdict.ISO.value for v in verdicts),
        iso=verdicts,
    )

    desc, anchor, ok, witness = _common_support(hs, max_deg, trials, seed, cache)
    rep.add(desc, anchor, ok, **witness)
    rep.notes.append(f"H family of {form} has {r - 1} members")
    return rep


def _common_support(hs, max_deg, trials, seed, cache):
    """All H_i share a support point.

    Each H_i is periodic, so its support is a single point. If the point of
    H_1 can be located every member must locate to it; otherwise two
    one-point supports meet iff some Tor_i (i >= 1) is nonzero.
    """
    desc, anchor = "all H_i share one support point", "V(H_i) = V(H_1)"
    kinds = [classify_complexity(h, max_deg, trials, seed, cache) for h in hs]
    if not all(k.kind is ComplexityKind.PERIODIC for k in kinds):
        return desc, anchor, False, {"complexity": [str(k) for k in kinds]}
    points = [locate_periodic_support(h, max_deg, trials, seed, k, cache) for h, k in zip(hs, kinds)]
    if all(pt is not None for pt in points):
        names = [str(pt) for pt in points]
        return desc, anchor, len(set(names)) == 1, {"method": "locate", "points": names}
    meets = [supports_disjoint(h, hs[0], max_deg, trials, seed, cache).verdict.value for h in hs]
    ok = all(v == Disjointness.NOT_DISJOINT.value for v in meets)
    return desc, anchor, ok, {"method": "tor-against-H_1", "verdicts": meets}


# -- disjoint supports -------------------------------------------------------------


@_timed
def suite_disjoint(
    ring: CIRing,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    seed: int = 0,
    tor_upto: int = 6,
    cache: Optional[ResolutionCache] = None,
) -> SuiteReport:
    """M = A/(x) and N = A/(y) over k[x,y]/(x^r, y^s) have disjoint supports."""
    if ring.c != 2 or min(ring.exps) < 2:
        raise UsageError(f"disjoint suite needs two variables with exponents >= 2, got {ring.spec}")
    r, s = ring.exps
    m = quotient_by_form_power(ring, ring.variable(0), 1)
    n = quotient_by_form_power(ring, ring.variable(1), 1)
    rep = SuiteReport("disjoint", ring.spec, {"max_deg": max_deg, "trials": trials, "seed": seed, "tor_upto": tor_upto})

    rep.add("M and N are cyclic", "mu(M) = mu(N) = 1", min_generators(m) == 1 and min_generators(n) == 1)
    fm, fn = _no_free_summand(m, cache), _no_free_summand(n, cache)
    rep.add("neither M nor N has a free summand", "M, N have no free summand", fm["ok"] and fn["ok"])

    vm, vn = classify_complexity(m, max_deg, trials, seed, cache), classify_complexity(n, max_deg, trials, seed, cache)
    rep.add(
        "M and N are periodic",
        "Omega^2(M) = M",
        vm.kind is ComplexityKind.PERIODIC and vn.kind is ComplexityKind.PERIODIC,
        M=str(vm),
        N=str(vn),
    )

    om = syzygy(m, cache)
    expect_om = quotient_by_form_power(ring, ring.variable(0), r - 1)
    iso = _iso(om, expect_om, trials, seed)
    rep.add("Omega(M) is A/(x^(r-1))", "Omega(M) = Q/(f^(r-1), g^s)", iso == IsoVerdict.ISO.value, iso=iso)

    t_mn = tensor(m, n, cache).dim
    t_om_n = tensor(om, n, cache).dim
    rep.add("len(M (x) N) = 1", "len(M (x) N) = len(Q/(f, g))", t_mn == 1, length=t_mn)
    rep.add("len(Omega(M) (x) N) = r - 1", "len(Omega(M) (x) N) = (r-1) len(Q/(f, g))", t_om_n == r - 1, length=t_om_n)

    # 0 -> Tor_1(M,N) -> Omega(M) (x) N -> N -> M (x) N -> 0
    predicted = t_om_n - n.dim + t_mn
    dims = tor_dims(m, n, tor_upto, cache)
    rep.add(
        "alternating sum predicts len(Tor_1(M, N)) = 0 and Tor_1 agrees",
        "len(Tor_1(M, N)) = 0",
        predicted == 0 and dims[1] == 0,
        predicted=predicted,
        computed=dims[1],
    )
    rep.add(
        f"Tor_i(M, N) = 0 for 1 <= i <= {tor_upto}",
        "Tor_i(M, N) = 0, i >= 1",
        not any(dims[1:]),
        tor_dims=dims[1:],
    )
    res = supports_disjoint(m, n, max_deg, trials, seed, cache)
    rep.add("supports are certified disjoint", "V(M) and V(N) disjoint", res.verdict is Disjointness.DISJOINT, **res.to_json())
    return rep


# -- length identity ---------------------------------------------------------------


def _sample_modules(ring: CIRing, g: LinearForm, sample: int, seed: int, max_deg, trials, cache) -> List[Module]:
    base = [residue_field(ring), regular_module(ring), free_module(ring, 2)]
    quarter = max(sample // 4, 1)
    pools = [
        base,
        avoiding_family(ring, g, quarter, seed, max_deg, trials, cache=cache),
        [m for m, _ in cx1_family(ring, FamilySpec(), quarter, seed, max_deg, trials, cache=cache)],
        random_modules(ring, sample, seed, cache=cache),
    ]
    out, seen = [], set()
    for pool in pools:
        for m in pool:
            if m.content_hash not in seen:
                seen.add(m.content_hash)
                out.append(m)
    extra_seed = seed + 1
    while len(out) < sample and extra_seed < seed + 20:
        for m in random_modules(ring, sample, extra_seed, cache=cache):
            if m.content_hash not in seen:
                seen.add(m.content_hash)
                out.append(m)
        extra_seed += 1
    return out[:sample]


@_timed
def suite_length_identity(
    ring: CIRing,
    g: Form,
    sample: int = 100,
    seed: int = 0,
    power: int = 1,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    cache: Optional[ResolutionCache] = None,
) -> SuiteReport:
    """dim Tor_1(X, H) + mu(H) len(X) = 2 len(H (x) X) for H = A/(g^power) and sampled X.

    The identity needs Omega(H) ~= H; that precondition is itself a check, and
    the identity is still evaluated when it fails so the report shows where.
    """
    form = _as_form(ring, g)
    order = nilpotency_order(ring, form)
    if not 1 <= power < order:
        raise UsageError(f"power must lie in 1..{order - 1}")
    h = quotient_by_form_power(ring, form, power)
    mu = min_generators(h)
    rep = SuiteReport(
        "length-identity",
        ring.spec,
        {"g": str(form), "power": power, "sample": sample, "seed": seed, "max_deg": max_deg, "trials": trials},
    )
    iso = _iso(syzygy(h, cache), h, trials, seed)
    rep.add("Omega(H) is isomorphic to H", "Omega(H) = H", iso == IsoVerdict.ISO.value, iso=iso, length_H=h.dim)

    xs = _sample_modules(ring, form, sample, seed, max_deg, trials, cache)
    rep.add(f"at least {sample} sample modules", "sample size", len(xs) >= sample, count=len(xs))
    exact_form = 0
    for x in xs:
        t1 = tor_dims(x, h, 1, cache)[1]
        tens = tensor(h, x, cache).dim
        lhs, rhs = t1 + mu * x.dim, 2 * tens
        anchor = "dim Tor_1(X, H) + mu(H) len(X) = 2 len(H (x) X)"
        if t1 == mu and not any(a.any() for a in tor(x, h, 1, cache=cache).actions):
            exact_form += 1
            anchor = "r + r len(X) = 2 len(H (x) X)"
        rep.add(
            f"identity for X {x.content_hash[:12]}",
            anchor,
            lhs == rhs,
            length_X=x.dim,
            tor1=t1,
            tensor=tens,
            lhs=lhs,
            rhs=rhs,
        )
    rep.notes.append(f"{len(xs)} modules: k, A, A^2, avoiding family, cx <= 1 family, random constructions")
    rep.notes.append(f"{exact_form} modules have Tor_1(X, H) = k^mu(H)")
    return rep


# -- filtration by powers of g -----------------------------------------------------


@_timed
def suite_claim_sec5(
    ring: CIRing,
    g: Form,
    x_sample: int = 20,
    seed: int = 0,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    cache: Optional[ResolutionCache] = None,
) -> SuiteReport:
    """Betti numbers of H_s and the g-adic filtration of modules avoiding V(H_1)."""
    form = _as_form(ring, g)
    r = nilpotency_order(ring, form)
    if r < 3:
        raise UsageError(f"{form} has nilpotency order {r}; this suite needs at least 3")
    rep = SuiteReport("claim-sec5", ring.spec, {"g": str(form), "x_sample": x_sample, "seed": seed, "max_deg": max_deg, "trials": trials})

    for s, h in enumerate(h_family(ring, form), start=1):
        b = betti_numbers(h, max_deg, cache)
        rep.add(f"beta_l(H_{s}) = 1 for l <= {max_deg}", "Tor_l(B/(g^s), k) = k", all(v == 1 for v in b), betti=b)

    xs = [regular_module(ring)] + [
        m for m in avoiding_family(ring, form, x_sample, seed, max_deg, trials, cache=cache) if m.dim and is_free(m) is None
    ]
    for x in xs:
        tag = x.content_hash[:12]
        exact = {j: is_exact(list(power_quotient_sequence(x, form, j))) for j in range(2, r)}
        rep.add(
            f"0 -> X/g^(j-1)X -> X/g^jX -> X/gX -> 0 exact for X {tag}",
            "0 -> X/g^(j-1)X -> X/g^jX -> X/gX -> 0",
            all(exact.values()),
            exact=[exact[j] for j in sorted(exact)],
        )
        lengths = [power_quotient(x, form, j).module.dim for j in range(1, r)]
        rep.add(
            f"len(X/g^jX) = j len(X/gX) for X {tag}",
            "len(X/g^jX) = j*len(X/gX)",
            lengths == [j * lengths[0] for j in range(1, r)],
            lengths=lengths,
        )
    rep.notes.append(f"X ranges over A and {len(xs) - 1} non-free modules certified to avoid V(A/({form}))")
    return rep


# -- restriction to a power subring ------------------------------------------------


def m3_powers(ring: CIRing, p: int) -> tuple:
    """u_i = a_i/p on the first two exponents divisible by p, 1 elsewhere."""
    idx = [i for i, a in enumerate(ring.exps) if a % p == 0]
    if len(idx) < 2:
        raise UsageError(f"{p} divides fewer than two exponents of {ring.spec}")
    return tuple(ring.exps[i] // p if i in idx[:2] else 1 for i in range(ring.c))


@_timed
def suite_thm_m3(
    ring: CIRing,
    p: int,
    budget: int = 50,
    seed: int = 0,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    cache: Optional[ResolutionCache] = None,
) -> SuiteReport:
    """p divides len(E) for certified cx <= 1 modules E, checked through a power subring."""
    powers = m3_powers(ring, p)
    sub, emb = power_subring_embedding(ring, powers)
    rep = SuiteReport("thm-m3", ring.spec, {"p": p, "budget": budget, "seed": seed, "max_deg": max_deg, "trials": trials})

    a_over_r = restrict_scalars(regular_module(ring), emb)
    rank = is_free(a_over_r)
    rep.add(
        "A is free over the power subring R",
        "A free over R",
        rank == emb.rank,
        subring=sub.spec,
        powers=list(powers),
        rank=rank,
    )

    family = cx1_family(ring, FamilySpec(), budget, seed, max_deg, trials, cache=cache)
    rep.add(f"family has {budget} certified members", "cx E <= 1", len(family) == budget, count=len(family))
    for e, verdict in family:
        tag = e.content_hash[:12]
        er = restrict_scalars(e, emb)
        b_a = list(verdict.betti_prefix)
        b_r = betti_numbers(er, max_deg, cache)
        bound = max(b_a) * emb.rank
        rep.add(
            f"Betti numbers over R stay bounded for E {tag}",
            "beta^R_i(E) <= rank_R(A) beta^A_i(E)",
            all(x <= emb.rank * y for x, y in zip(b_r, b_a)),
            betti_A=b_a,
            betti_R=b_r,
            bound=bound,
        )
        rep.add(f"len_R(E) = len_A(E) for E {tag}", "len_R(E) = len_A(E)", er.dim == e.dim, length=e.dim)
        rep.add(f"{p} divides len(E) for E {tag}", "p | len(E)", e.dim % p == 0, length=e.dim, verdict=str(verdict))
    rep.notes.append(f"{len(family)} modules from the seeded syzygy/cosyzygy/sum/extension closure of A and the A/(X_j^t)")
    return rep


# -- Grothendieck gap --------------------------------------------------------------


@_timed
def suite_thm_main_gap(
    ring: CIRing,
    g: Form,
    budget: int = 50,
    seed: int = 0,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    cache: Optional[ResolutionCache] = None,
) -> SuiteReport:
    """Lengths of modules avoiding V(A/(g)) generate a proper subgroup of Z/len(A)Z."""
    form = _as_form(ring, g)
    order = nilpotency_order(ring, form)
    if order < 2:
        raise UsageError(f"{form} has nilpotency order {order} < 2")
    h = quotient_by_form_power(ring, form, 1)
    rep = SuiteReport("thm-main-gap", ring.spec, {"g": str(form), "budget": budget, "seed": seed, "max_deg": max_deg, "trials": trials})

    vh = classify_complexity(h, max_deg, trials, seed, cache)
    rep.add("H = A/(g) is periodic and cyclic", "cx H = 1, mu(H) = 1", vh.kind is ComplexityKind.PERIODIC and min_generators(h) == 1, H=str(vh))

    family = avoiding_family(ring, form, budget, seed, max_deg, trials, cache=cache)
    verdicts = [supports_disjoint(m, h, max_deg, trials, seed, cache).verdict for m in family]
    rep.add(
        "every family member avoids V(H)",
        "alpha not in V(M)",
        all(v is Disjointness.DISJOINT for v in verdicts),
        count=len(family),
    )
    gen, index = subgroup_of_lengths(family, ring)
    rep.add(
        "the lengths generate a proper subgroup of Z/len(A)Z",
        "m_A >= 2 divides len(M)",
        index >= 2,
        generator=gen,
        index=index,
        empirical_m_A=index,
        lengths=sorted({m.dim for m in family}),
    )
    rep.notes.append(f"family: {len(family)} modules closed under syzygy, cosyzygy, sum and extension, each certified disjoint from A/({form})")
    rep.notes.append("a sampled family can only corroborate divisibility for every module avoiding the point")
    return rep


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "lemma-h": suite_lemma_h,
    "disjoint": suite_disjoint,
    "length-identity": suite_length_identity,
    "claim-sec5": suite_claim_sec5,
    "thm-m3": suite_thm_m3,
    "thm-main-gap": suite_thm_main_gap,
}
