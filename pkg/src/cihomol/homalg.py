"""Minimal free resolutions, syzygies, Tor, extensions and complexity.

Free modules are ordinary :class:`Module` objects with basis ordered by
(generator, monomial). A free module of rank ``b`` therefore has dimension
``b * len(A)``, and the constant monomial of generator ``j`` sits at
coordinate ``j * len(A)``.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import tempfile
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exactalg as ea
from .errors import ParseError, UsageError
from .module import (
    IsoVerdict,
    Module,
    ModuleMap,
    _same_ring,
    block_operator,
    dual,
    free_module,
    iso_test,
    quotient,
    zero_module,
)
from .ring import CIRing

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEG = 8
CACHE_FORMAT = "cihomol-cache/1"


# -- one step of a resolution ---------------------------------------------------


@dataclass
class _Step:
    """Minimal cover of one module and the kernel of that cover."""

    module: Module
    gens: Tuple[int, ...]
    kernel: Optional[np.ndarray] = None  # rows: basis of the kernel inside A^mu
    kernel_free: Optional[Tuple[int, ...]] = None  # coordinates identifying kernel vectors

    @property
    def rank(self) -> int:
        return len(self.gens)


def _generators(m: Module) -> Tuple[int, ...]:
    """Indices of standard basis vectors spanning a complement of mM."""
    piv = set(m.radical_basis[1])
    return tuple(i for i in range(m.dim) if i not in piv)


def _cover_matrix(m: Module, gens: Sequence[int]) -> np.ndarray:
    """Matrix of A^mu -> M, column ``j*len(A) + mono`` = mono * (generator j)."""
    L = m.ring.length
    stack = m.monomial_actions
    if not gens:
        return np.zeros((m.dim, 0), dtype=np.int64)
    return np.ascontiguousarray(stack[:, :, list(gens)].transpose(1, 2, 0)).reshape(m.dim, len(gens) * L)


def _kernel_module(ring: CIRing, rank: int, kernel: np.ndarray, free: Sequence[int]) -> Module:
    """The kernel subspace of A^rank as a module, with coordinates read at ``free``."""
    p, L = ring.p, ring.length
    d = kernel.shape[0]
    if d == 0:
        return zero_module(ring)
    kt = kernel.T.reshape(rank, L, d).transpose(1, 0, 2).reshape(L, rank * d)
    acts = []
    for x in ring.mult_matrices:
        moved = ea.matmul(x, kt, p).reshape(L, rank, d).transpose(1, 0, 2).reshape(rank * L, d)
        acts.append(moved[list(free), :])
    return Module(ring, acts, dim=d, check=False)


def _expand(step: _Step) -> Module:
    ring = step.module.ring
    cover = _cover_matrix(step.module, step.gens)
    kernel, free = ea.null_space(cover, ring.p)
    step.kernel = kernel
    step.kernel_free = tuple(free)
    step.kernel.flags.writeable = False
    return _kernel_module(ring, step.rank, kernel, free)


# -- cache ----------------------------------------------------------------------


class ResolutionCache:
    """Content-addressed store of partial resolutions.

    Lookups are serialized by a lock; two threads may still compute the same
    resolution concurrently, which is harmless because results are
    deterministic. An optional directory persists entries across processes.
    """

    def __init__(self, maxsize: int = 256, directory: Optional[os.PathLike] = None, enabled: bool = True):
        self.maxsize = maxsize
        self.enabled = enabled
        self.directory = Path(directory) if directory is not None else None
        self._mem: "OrderedDict[str, List[_Step]]" = OrderedDict()
        self._lock = threading.RLock()

    def clear(self):
        with self._lock:
            self._mem.clear()

    def get(self, key: str, module: Module) -> Optional[List[_Step]]:
        if not self.enabled:
            return None
        with self._lock:
            steps = self._mem.get(key)
            if steps is not None:
                self._mem.move_to_end(key)
                return steps
        steps = self._load(key, module) if self.directory is not None else None
        if steps is not None:
            self._remember(key, steps)
        return steps

    def put(self, key: str, steps: List[_Step]):
        if not self.enabled:
            return
        self._remember(key, steps)
        if self.directory is not None:
            self._store(key, steps)

    def remember_suffix(self, key: str, steps: List[_Step]):
        if not self.enabled:
            return
        with self._lock:
            known = self._mem.get(key)
            if known is None or len(known) < len(steps):
                self._remember(key, list(steps))

    def _remember(self, key, steps):
        with self._lock:
            self._mem[key] = steps
            self._mem.move_to_end(key)
            while len(self._mem) > self.maxsize:
                self._mem.popitem(last=False)

    # on-disk format: {"format", "module", "betti", "syzygies", "embeddings", "checksum"}
    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def _store(self, key: str, steps: List[_Step]):
        complete = [s for s in steps if s.kernel is not None]
        payload = {
            "format": CACHE_FORMAT,
            "module": steps[0].module.to_json(),
            "betti": [s.rank for s in steps],
            "syzygies": [s.module.to_json() for s in steps],
            "embeddings": [
                {"free": list(s.kernel_free), "rows": [[int(v) for v in row] for row in s.kernel]} for s in complete
            ],
        }
        body = json.dumps(payload, separators=(",", ":"), sort_keys=True)
        payload["checksum"] = hashlib.sha256(body.encode()).hexdigest()
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, separators=(",", ":"), sort_keys=True)
        os.replace(tmp, self._path(key))

    def _load(self, key: str, module: Module) -> Optional[List[_Step]]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            return read_cache_entry(path, expect=module)
        except (ParseError, ValueError, KeyError, TypeError, OSError) as exc:
            logger.info("ignoring cache entry %s: %s", path.name, exc)
            return None

    def gc(self) -> Tuple[int, int]:
        """Delete unreadable, corrupt or outdated entries. Returns (kept, removed)."""
        kept = removed = 0
        if self.directory is None or not self.directory.exists():
            return kept, removed
        for path in sorted(self.directory.iterdir()):
            if path.suffix == ".tmp":
                path.unlink()
                removed += 1
                continue
            if path.suffix != ".json":
                continue
            try:
                read_cache_entry(path)
                kept += 1
            except (ParseError, ValueError, KeyError, TypeError, OSError):
                path.unlink()
                removed += 1
        return kept, removed


def read_cache_entry(path: Path, expect: Optional[Module] = None) -> List[_Step]:
    raw = json.loads(Path(path).read_text())
    if raw.get("format") != CACHE_FORMAT:
        raise ParseError(f"unsupported cache format {raw.get('format')!r}")
    checksum = raw.pop("checksum", None)
    body = json.dumps(raw, separators=(",", ":"), sort_keys=True)
    if checksum != hashlib.sha256(body.encode()).hexdigest():
        raise ParseError("checksum mismatch")
    module = Module.from_json(raw["module"])
    if module.content_hash != Path(path).stem:
        raise ParseError("file name does not match module hash")
    if expect is not None and module != expect:
        raise ParseError("cached module differs from requested module")
    syz = [Module.from_json(s) for s in raw["syzygies"]]
    steps = []
    for i, s in enumerate(syz):
        step = _Step(s, _generators(s))
        if step.rank != raw["betti"][i]:
            raise ParseError("betti number disagrees with stored syzygy")
        steps.append(step)
    for i, emb in enumerate(raw["embeddings"]):
        width = steps[i].rank * module.ring.length
        steps[i].kernel = np.array(emb["rows"], dtype=np.int64).reshape(len(emb["rows"]), width)
        steps[i].kernel_free = tuple(emb["free"])
    return steps


_default_cache = ResolutionCache()


def default_cache() -> ResolutionCache:
    return _default_cache


def set_default_cache(cache: ResolutionCache) -> ResolutionCache:
    global _default_cache
    old, _default_cache = _default_cache, cache
    return old


def _steps(m: Module, depth: int, cache: Optional[ResolutionCache]) -> List[_Step]:
    """Steps 0..depth with kernels known for steps 0..depth-1."""
    cache = _default_cache if cache is None else cache
    key = m.content_hash
    cached = cache.get(key, m)
    steps = list(cached) if cached is not None else [_Step(m, _generators(m))]
    grew = False
    for i in range(depth):
        s = steps[i]
        if s.kernel is not None and i + 1 < len(steps):
            continue
        if s.kernel is None:
            nxt = _expand(s)
        else:
            nxt = _kernel_module(m.ring, s.rank, s.kernel, s.kernel_free)
        del steps[i + 1:]
        steps.append(_Step(nxt, _generators(nxt)))
        grew = True
    if grew:
        cache.put(key, steps)
        # each syzygy's own resolution is a suffix of this one
        for j in range(1, len(steps)):
            cache.remember_suffix(steps[j].module.content_hash, steps[j:])
    return steps


# -- public API -------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """Minimal generators of M, relations among them, and a section of the cover."""

    gens: Tuple[int, ...]
    cover: np.ndarray  # (dim M, mu * len A)
    section: np.ndarray  # (mu * len A, dim M)
    relations: np.ndarray  # (beta_1, mu, len A): relation r = sum_j sum_mono rel[r,j,mono] mono e_j


def presentation(m: Module, cache: Optional[ResolutionCache] = None) -> Presentation:
    p, L = m.ring.p, m.ring.length
    steps = _steps(m, 1, cache)
    s0, s1 = steps[0], steps[1]
    cover = _cover_matrix(m, s0.gens)
    mu = s0.rank
    if m.dim:
        _, piv, _ = ea.rref(cover, p)
        sec = np.zeros((mu * L, m.dim), dtype=np.int64)
        sec[piv, :] = ea.inverse(cover[:, piv], p)
    else:
        sec = np.zeros((mu * L, 0), dtype=np.int64)
    rel = _relation_coeffs(s0, s1)
    return Presentation(s0.gens, cover, sec, rel.transpose(1, 0, 2))


def _relation_coeffs(prev: _Step, cur: _Step) -> np.ndarray:
    """Generators of ``cur.module`` written in the free module covering ``prev.module``.

    Shape ``(prev.rank, cur.rank, len A)``.
    """
    L = prev.module.ring.length
    if cur.rank == 0 or prev.rank == 0:
        return np.zeros((prev.rank, cur.rank, L), dtype=np.int64)
    cols = prev.kernel.T[:, list(cur.gens)]  # (prev.rank * L, cur.rank)
    return cols.reshape(prev.rank, L, cur.rank).transpose(0, 2, 1)


@dataclass(frozen=True)
class Resolution:
    """A minimal free resolution truncated at ``max_deg``."""

    target: Module
    syzygies: Tuple[Module, ...]
    betti: Tuple[int, ...]
    covers: Tuple[ModuleMap, ...]
    _steps: Tuple[_Step, ...] = field(repr=False, compare=False)

    @property
    def max_deg(self) -> int:
        return len(self.betti) - 1

    def differential(self, i: int) -> np.ndarray:
        """Coefficients of d_i: F_i -> F_{i-1}, shape ``(beta_{i-1}, beta_i, len A)``."""
        if i < 1 or i > len(self._steps) - 1:
            raise UsageError(f"differential d_{i} is outside the computed range")
        return _relation_coeffs(self._steps[i - 1], self._steps[i])

    def differential_map(self, i: int) -> ModuleMap:
        ring = self.target.ring
        co = self.differential(i)
        src, dst = free_module(ring, co.shape[1]), free_module(ring, co.shape[0])
        return ModuleMap(src, dst, block_operator(co, _regular_stack(ring), ring.p), check=False)

    def is_minimal(self) -> bool:
        L = self.target.ring.length
        for s in self._steps:
            if s.kernel is not None and s.kernel.size and s.kernel[:, ::L].any():
                return False
        return True


def _regular_stack(ring: CIRing) -> np.ndarray:
    from .ring import regular_module

    return regular_module(ring).monomial_actions


def minimal_cover(m: Module, cache: Optional[ResolutionCache] = None) -> ModuleMap:
    """Surjection A^mu(M) -> M sending generator j to a coset representative of M/mM."""
    gens = _generators(m)
    return ModuleMap(free_module(m.ring, len(gens)), m, _cover_matrix(m, gens), check=False)


def syzygy(m: Module, cache: Optional[ResolutionCache] = None) -> Module:
    return _steps(m, 1, cache)[1].module


def resolve(m: Module, max_deg: int = DEFAULT_MAX_DEG, cache: Optional[ResolutionCache] = None) -> Resolution:
    if max_deg < 0:
        raise UsageError("max_deg must be non-negative")
    steps = _steps(m, max_deg, cache)[: max_deg + 1]
    ring = m.ring
    covers = tuple(
        ModuleMap(free_module(ring, s.rank), s.module, _cover_matrix(s.module, s.gens), check=False) for s in steps
    )
    full = tuple(_steps(m, max_deg, cache))
    return Resolution(
        target=m,
        syzygies=tuple(s.module for s in steps),
        betti=tuple(s.rank for s in steps),
        covers=covers,
        _steps=full,
    )


def betti_numbers(m: Module, max_deg: int = DEFAULT_MAX_DEG, cache: Optional[ResolutionCache] = None) -> List[int]:
    return [s.rank for s in _steps(m, max_deg, cache)[: max_deg + 1]]


def nth_syzygy(m: Module, n: int, cache: Optional[ResolutionCache] = None) -> Module:
    return _steps(m, n, cache)[n].module


def cosyzygy(m: Module, cache: Optional[ResolutionCache] = None) -> Module:
    return dual(syzygy(dual(m), cache))


def stable_reduce(m: Module, cache: Optional[ResolutionCache] = None) -> Module:
    """Strip free summands: cosyzygy of the syzygy."""
    return cosyzygy(syzygy(m, cache), cache)


def tensor(m: Module, n: Module, cache: Optional[ResolutionCache] = None) -> Module:
    """M (x)_A N, computed as the cokernel of (relations of M) (x) N."""
    ring = _same_ring(m, n)
    steps = _steps(m, 1, cache)
    d1 = block_operator(_relation_coeffs(steps[0], steps[1]), n.monomial_actions, ring.p)
    ambient = _diagonal(n, steps[0].rank)
    return quotient(ambient, d1.T, closed=True).module


def _diagonal(n: Module, copies: int) -> Module:
    eye = np.eye(copies, dtype=np.int64)
    return Module(n.ring, [np.kron(eye, a) for a in n.actions], dim=copies * n.dim, check=False)


def _tensored_differentials(m: Module, n: Module, upto: int, cache) -> List[np.ndarray]:
    """Matrices of d_i (x) N for i = 1..upto."""
    p = m.ring.p
    steps = _steps(m, upto, cache)
    stack = n.monomial_actions
    return [block_operator(_relation_coeffs(steps[i - 1], steps[i]), stack, p) for i in range(1, upto + 1)]


def tor_dims(m: Module, n: Module, upto: int, cache: Optional[ResolutionCache] = None) -> List[int]:
    """dim Tor_i(M, N) for i = 0..upto, from the resolution of M."""
    _same_ring(m, n)
    p = m.ring.p
    steps = _steps(m, upto + 1, cache)
    ds = _tensored_differentials(m, n, upto + 1, cache)
    ranks = [0] + [ea.rank(d, p) if d.size else 0 for d in ds]
    return [steps[i].rank * n.dim - ranks[i] - ranks[i + 1] for i in range(upto + 1)]


def tor(m: Module, n: Module, i: int, max_deg: Optional[int] = None, cache: Optional[ResolutionCache] = None) -> Module:
    """Tor_i^A(M, N) as a module: homology of F(M) (x) N at position i."""
    _same_ring(m, n)
    if i < 0:
        raise UsageError("Tor index must be non-negative")
    if max_deg is not None and i > max_deg:
        raise UsageError(f"Tor index {i} exceeds max_deg {max_deg}")
    if i == 0:
        return tensor(m, n, cache)
    p = m.ring.p
    steps = _steps(m, i + 1, cache)
    d_in, d_out = _tensored_differentials(m, n, i + 1, cache)[i - 1:i + 1]
    ambient = _diagonal(n, steps[i].rank)
    cycles_rows = ea.kernel_basis(d_in, p) if d_in.size else np.eye(ambient.dim, dtype=np.int64)
    from .module import submodule

    cycles, incl = submodule(ambient, cycles_rows, closed=True)
    if cycles.dim == 0:
        return cycles
    # boundaries are columns of d_out; express them in cycle coordinates
    _, piv = ea.row_space(cycles_rows, p)
    bounds = d_out[piv, :].T if d_out.size else np.zeros((0, cycles.dim), dtype=np.int64)
    return quotient(cycles, bounds, closed=True).module


# -- extensions and exactness -----------------------------------------------------


@dataclass(frozen=True)
class ExtensionSequence:
    """0 -> N --inclusion--> E --projection--> M -> 0."""

    module: Module
    inclusion: ModuleMap
    projection: ModuleMap


def extension_sequence(phi: ModuleMap, target: Module, cache: Optional[ResolutionCache] = None) -> ExtensionSequence:
    """Pushout of Omega(M) -> F_0 along ``phi``: Omega(M) -> N."""
    ring = _same_ring(phi.src, phi.dst, target)
    p = ring.p
    steps = _steps(target, 1, cache)
    s0, omega = steps[0], steps[1].module
    if phi.src != omega:
        raise UsageError("phi must start at the syzygy module of the target computed by syzygy()")
    n = phi.dst
    f0 = free_module(ring, s0.rank)
    ambient = Module(
        ring,
        [np.block([[a, np.zeros((f0.dim, n.dim), dtype=np.int64)], [np.zeros((n.dim, f0.dim), dtype=np.int64), b]])
         for a, b in zip(f0.actions, n.actions)],
        dim=f0.dim + n.dim,
        check=False,
    )
    incl = s0.kernel.T if omega.dim else np.zeros((f0.dim, 0), dtype=np.int64)
    rel = np.concatenate([incl, np.mod(-phi.mat, p)], axis=0)
    q = quotient(ambient, rel.T, closed=True)
    cover = _cover_matrix(target, s0.gens)
    to_m = np.concatenate([cover, np.zeros((target.dim, n.dim), dtype=np.int64)], axis=1)
    proj = ModuleMap(q.module, target, ea.matmul(to_m, q.section, p))
    inc = ModuleMap(n, q.module, q.projection[:, f0.dim:])
    return ExtensionSequence(q.module, inc, proj)


def extension(phi: ModuleMap, target: Module, cache: Optional[ResolutionCache] = None) -> Module:
    """Middle term E of the extension 0 -> N -> E -> M -> 0 classified by ``phi``."""
    return extension_sequence(phi, target, cache).module


def is_exact(seq: Sequence[ModuleMap], short: bool = True) -> bool:
    """Exactness of M_0 -> M_1 -> ... at every interior term.

    With ``short=True`` the sequence is read with zeros at both ends, so the
    first map must be injective and the last surjective.
    """
    if not seq:
        raise UsageError("empty sequence")
    for f, g in zip(seq, seq[1:]):
        if f.dst.dim != g.src.dim or f.dst != g.src:
            raise UsageError("maps are not composable")
    p = seq[0].src.ring.p
    ranks = [f.rank for f in seq]
    for k, (f, g) in enumerate(zip(seq, seq[1:])):
        if ea.matmul(g.mat, f.mat, p).any():
            return False
        if ranks[k] + ranks[k + 1] != f.dst.dim:
            return False
    if short:
        if ranks[0] != seq[0].src.dim or ranks[-1] != seq[-1].dst.dim:
            return False
    return True


# -- complexity ---------------------------------------------------------------------


class ComplexityKind(enum.Enum):
    FREE = "free"
    PERIODIC = "periodic"
    UNBOUNDED_EVIDENCE = "unbounded_evidence"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ComplexityVerdict:
    kind: ComplexityKind
    betti_prefix: Tuple[int, ...]
    start: Optional[int] = None
    period: Optional[int] = None

    @property
    def certified(self) -> bool:
        """True when cx <= 1 has been certified (free or periodic)."""
        return self.kind in (ComplexityKind.FREE, ComplexityKind.PERIODIC)

    def to_json(self):
        out = {"kind": self.kind.value, "betti_prefix": list(self.betti_prefix)}
        if self.kind is ComplexityKind.PERIODIC:
            out.update(start=self.start, period=self.period)
        return out

    def __str__(self):
        if self.kind is ComplexityKind.PERIODIC:
            return f"PeriodicFrom({self.start}, {self.period})"
        return {"free": "Free", "unbounded_evidence": "UnboundedEvidence", "undetermined": "Undetermined"}[self.kind.value]


def classify_complexity(
    m: Module,
    max_deg: int = DEFAULT_MAX_DEG,
    trials: int = 16,
    seed: int = 0,
    cache: Optional[ResolutionCache] = None,
) -> ComplexityVerdict:
    """Certify cx M <= 1 by finding Omega^{i+d} M ~= Omega^i M with d in {1, 2}.

    Syzygies are computed lazily; once a period is certified the remaining
    Betti numbers of the window are read off from it.
    """
    if max_deg < 2:
        raise UsageError("classify_complexity needs max_deg >= 2")
    steps = _steps(m, 1, cache)
    if steps[1].module.dim == 0:
        betti = [steps[0].rank] + [0] * max_deg
        return ComplexityVerdict(ComplexityKind.FREE, tuple(betti))
    for i in range(0, max_deg - 1):
        for d in (1, 2):
            steps = _steps(m, i + d, cache)
            a, b = steps[i + d].module, steps[i].module
            if a.dim != b.dim:
                continue
            res = iso_test(a, b, trials=trials, seed=seed)
            if res.verdict is IsoVerdict.ISO:
                betti = [s.rank for s in steps[: i + d + 1]]
                while len(betti) <= max_deg:
                    betti.append(betti[-d])
                return ComplexityVerdict(ComplexityKind.PERIODIC, tuple(betti[: max_deg + 1]), start=i, period=d)
    betti = tuple(s.rank for s in _steps(m, max_deg, cache)[: max_deg + 1])
    half = max_deg // 2
    tail = betti[half:]
    if all(x < y for x, y in zip(tail, tail[1:])):
        return ComplexityVerdict(ComplexityKind.UNBOUNDED_EVIDENCE, betti)
    return ComplexityVerdict(ComplexityKind.UNDETERMINED, betti)
