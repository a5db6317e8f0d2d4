"""Command-line frontend.

Exit codes: 0 success or pass, 1 suite failure or a negative answer to an
asserting command (iso, disjoint), 2 usage or parse error, 3 undetermined.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import construct, gk, homalg, support, suites
from .errors import CIHomolError, ParseError, UsageError
from .homalg import ComplexityKind, ResolutionCache, set_default_cache
from .module import IsoVerdict, Module, iso_test, residue_field
from .ring import CIRing, regular_module

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDETERMINED = 0, 1, 2, 3
DEFAULT_CACHE_DIR = ".cihomol-cache"

# default ring and form for each suite when --ring / --g are omitted
SUITE_DEFAULTS = {
    "lemma-h": ("p=5;exps=2,4", "y"),
    "disjoint": ("p=5;exps=3,4", None),
    "length-identity": ("p=5;exps=2,4", "y"),
    "claim-sec5": ("p=5;exps=2,4", "y"),
    "thm-m3": ("p=5;exps=5,5", None),
    "thm-main-gap": ("p=5;exps=2,2", "y"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, ring_required: bool = True):
    p.add_argument("--ring", required=ring_required, help='ring spec, e.g. "p=5;exps=2,4"')
    p.add_argument("--max-degree", type=int, default=homalg.DEFAULT_MAX_DEG)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--format", choices=("json", "text"), default=None)
    p.add_argument("--cache-dir", default=DEFAULT_CACHE_DIR)
    p.add_argument("--no-cache", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cihomol", description="Homological algebra over k[X1..Xc]/(X1^a1, ..., Xc^ac).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ring-info", help="basic data of a ring")
    _common(p)

    p = sub.add_parser("gen", help="write a module family to files")
    _common(p)
    p.add_argument("--family", choices=("h", "axis", "cx1", "avoiding", "random", "k", "free"), required=True)
    p.add_argument("--g", help="linear form: variable name or comma-separated coefficients")
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--out", default=".", help="output directory")

    for name, help_ in (
        ("resolve", "minimal free resolution summary"),
        ("betti", "Betti numbers"),
        ("syzygy", "first syzygy module"),
        ("cosyzygy", "first cosyzygy module"),
        ("gclass", "class in Z/len(A)Z"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p, ring_required=False)
        p.add_argument("--module", required=True)
        if name in ("syzygy", "cosyzygy"):
            p.add_argument("--out")

    for name, help_ in (("tensor", "tensor product"), ("tor", "Tor dimension"), ("iso", "isomorphism test"), ("disjoint", "support disjointness")):
        p = sub.add_parser(name, help=help_)
        _common(p, ring_required=False)
        p.add_argument("--module", required=True)
        p.add_argument("--module2", required=True)
        if name == "tor":
            p.add_argument("--i", type=int, required=True)
        if name == "tensor":
            p.add_argument("--out")

    p = sub.add_parser("support", help="complexity and support point of a module")
    _common(p, ring_required=False)
    p.add_argument("--module", required=True)
    p.add_argument("--point", help="test membership of this point instead of locating")

    p = sub.add_parser("subgroup", help="subgroup of Z/len(A)Z generated by module lengths")
    _common(p)
    p.add_argument("--module", nargs="*", default=[])

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(suites.SUITES))
    _common(p, ring_required=False)
    p.add_argument("--g")
    p.add_argument("--p", type=int, help="prime for thm-m3 (defaults to the field characteristic)")
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--sample", type=int, default=100)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--include-runtime", action="store_true")

    p = sub.add_parser("cache", help="cache maintenance")
    p.add_argument("action", choices=("gc",))
    p.add_argument("--cache-dir", default=DEFAULT_CACHE_DIR)
    p.add_argument("--format", choices=("json", "text"), default=None)
    return parser


# -- helpers ---------------------------------------------------------------------


def parse_module_file(path: str, ring: Optional[CIRing] = None) -> Module:
    """Read and validate a module file; ParseError names the file and the failed invariant."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read module file {path}: {exc.strerror}") from None
    try:
        m = Module.loads(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if ring is not None and m.ring != ring:
        raise UsageError(f"{path} is over {m.ring.spec}, expected {ring.spec}")
    return m


def _ring(args) -> Optional[CIRing]:
    return CIRing.parse(args.ring) if getattr(args, "ring", None) else None


def _write_module(m: Module, out: Optional[str]) -> Optional[str]:
    if out:
        Path(out).write_text(m.dumps())
    return out


def _module_summary(m: Module) -> Dict[str, Any]:
    return {"ring": m.ring.spec, "length": m.dim, "hash": m.content_hash}


def _emit(payload: Dict[str, Any], text: str, fmt: str):
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- commands --------------------------------------------------------------------


def _cmd_ring_info(args, fmt):
    r = _ring(args)
    payload = {"ring": r.spec, "p": r.p, "exps": list(r.exps), "length": r.length, "variables": r.variable_names()}
    _emit(payload, f"{r}  length {r.length}  variables {', '.join(r.variable_names())}", fmt)
    return EXIT_OK


def _cmd_gen(args, fmt):
    r = _ring(args)
    fam = args.family
    if fam in ("h", "avoiding") and not args.g:
        raise UsageError(f"--family {fam} needs --g")
    if fam == "h":
        mods = construct.h_family(r, r.parse_form(args.g))
    elif fam == "axis":
        mods = [m for m, _ in construct.axis_quotients(r)]
    elif fam == "cx1":
        mods = [m for m, _ in construct.cx1_family(r, budget=args.budget, seed=args.seed, max_deg=args.max_degree, trials=args.trials)]
    elif fam == "avoiding":
        mods = construct.avoiding_family(r, r.parse_form(args.g), args.budget, args.seed, args.max_degree, args.trials)
    elif fam == "random":
        mods = construct.random_modules(r, args.budget, args.seed)
    elif fam == "k":
        mods = [residue_field(r)]
    else:
        mods = [regular_module(r)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, m in enumerate(mods):
        path = out / f"{fam}-{i:03d}-{m.content_hash[:12]}.json"
        path.write_text(m.dumps())
        files.append(str(path))
    _emit({"family": fam, "ring": r.spec, "count": len(files), "files": files}, "\n".join(files) or "(empty family)", fmt)
    return EXIT_OK


def _cmd_resolve(args, fmt):
    m = parse_module_file(args.module, _ring(args))
    res = homalg.resolve(m, args.max_degree)
    lengths = [s.dim for s in res.syzygies]
    payload = {**_module_summary(m), "betti": list(res.betti), "syzygy_lengths": lengths, "minimal": res.is_minimal()}
    text = "\n".join(f"F_{i} = A^{b}   len(Omega^{i}) = {n}" for i, (b, n) in enumerate(zip(res.betti, lengths)))
    _emit(payload, text, fmt)
    return EXIT_OK


def _cmd_betti(args, fmt):
    m = parse_module_file(args.module, _ring(args))
    b = homalg.betti_numbers(m, args.max_degree)
    _emit({**_module_summary(m), "betti": b}, ",".join(map(str, b)), fmt)
    return EXIT_OK


def _cmd_syzygy(args, fmt, op=homalg.syzygy):
    m = parse_module_file(args.module, _ring(args))
    s = op(m)
    if fmt == "json" and not args.out:
        sys.stdout.write(s.dumps())
        return EXIT_OK
    _write_module(s, args.out)
    payload = {**_module_summary(s), "out": args.out}
    _emit(payload, f"length {s.dim}  hash {s.content_hash}" + (f"  written to {args.out}" if args.out else ""), fmt)
    return EXIT_OK


def _cmd_tensor(args, fmt):
    ring = _ring(args)
    m, n = parse_module_file(args.module, ring), parse_module_file(args.module2, ring)
    t = homalg.tensor(m, n)
    if fmt == "json" and not args.out:
        sys.stdout.write(t.dumps())
        return EXIT_OK
    _write_module(t, args.out)
    _emit({**_module_summary(t), "out": args.out}, f"length {t.dim}  hash {t.content_hash}", fmt)
    return EXIT_OK


def _cmd_tor(args, fmt):
    ring = _ring(args)
    m, n = parse_module_file(args.module, ring), parse_module_file(args.module2, ring)
    if args.i < 0:
        raise UsageError("--i must be non-negative")
    d = homalg.tor_dims(m, n, args.i)[args.i]
    _emit({"i": args.i, "dim": d}, f"dim Tor_{args.i} = {d}", fmt)
    return EXIT_OK


def _cmd_iso(args, fmt):
    ring = _ring(args)
    m, n = parse_module_file(args.module, ring), parse_module_file(args.module2, ring)
    res = iso_test(m, n, trials=args.trials, seed=args.seed)
    payload = {"verdict": res.verdict.value}
    if res.witness:
        payload["witness"] = res.witness
    _emit(payload, res.verdict.value + (f" ({res.witness})" if res.witness else ""), fmt)
    return {IsoVerdict.ISO: EXIT_OK, IsoVerdict.NOT_ISO: EXIT_FAIL}.get(res.verdict, EXIT_UNDETERMINED)


def _cmd_disjoint(args, fmt):
    ring = _ring(args)
    m, n = parse_module_file(args.module, ring), parse_module_file(args.module2, ring)
    res = support.supports_disjoint(m, n, args.max_degree, args.trials, args.seed)
    payload = res.to_json()
    text = res.verdict.value + (f" (Tor_{res.index} != 0)" if res.index else "") + (f" [{res.certificate}]" if res.certificate else "")
    _emit(payload, text, fmt)
    return {
        support.Disjointness.DISJOINT: EXIT_OK,
        support.Disjointness.NOT_DISJOINT: EXIT_FAIL,
    }.get(res.verdict, EXIT_UNDETERMINED)


def _cmd_support(args, fmt):
    m = parse_module_file(args.module, _ring(args))
    v = homalg.classify_complexity(m, args.max_degree, args.trials, args.seed)
    if args.point:
        point = m.ring.parse_form(args.point)
        if all(a == m.ring.p for a in m.ring.exps):
            member: Optional[bool] = support.rank_point_membership(m, point)
        else:
            axes = [j for j in range(m.ring.c) if m.ring.variable(j) == point]
            if not axes:
                raise UsageError("on this ring only coordinate-axis points can be tested")
            member = support.tor_point_membership(m, axes[0], args.max_degree, args.trials, args.seed)
        payload = {"complexity": v.to_json(), "point": str(point), "member": member}
        _emit(payload, f"{point} {'in' if member else 'not in' if member is not None else 'undetermined for'} V(M)", fmt)
        return EXIT_OK if member is not None else EXIT_UNDETERMINED
    if v.kind is ComplexityKind.PERIODIC:
        pt = support.locate_periodic_support(m, args.max_degree, args.trials, args.seed, v)
    else:
        pt = None
    payload = {"complexity": v.to_json(), "point": str(pt) if pt is not None else None}
    text = f"{v}" + (f"  support {pt}" if pt is not None else "")
    _emit(payload, text, fmt)
    if v.kind is ComplexityKind.UNDETERMINED or (v.kind is ComplexityKind.PERIODIC and pt is None):
        return EXIT_UNDETERMINED
    return EXIT_OK


def _cmd_gclass(args, fmt):
    m = parse_module_file(args.module, _ring(args))
    c = gk.gclass(m)
    _emit({"length": m.dim, "class": c.value, "modulus": c.modulus}, f"[M] = {c.value} mod {c.modulus}", fmt)
    return EXIT_OK


def _cmd_subgroup(args, fmt):
    r = _ring(args)
    mods = [parse_module_file(path, r) for path in args.module]
    gen, index = gk.subgroup_of_lengths(mods, r)
    payload = {"ring": r.spec, "count": len(mods), "generator": gen, "index": index}
    _emit(payload, f"generated by {gen} in Z/{r.length}Z, index {index}", fmt)
    return EXIT_OK


def _cmd_verify(args, fmt):
    ring_spec, g_default = SUITE_DEFAULTS[args.suite]
    r = CIRing.parse(args.ring or ring_spec)
    common = dict(max_deg=args.max_degree, trials=args.trials)
    g_text = args.g or g_default
    name = args.suite
    if name == "lemma-h":
        rep = suites.suite_lemma_h(r, r.parse_form(g_text), seed=args.seed, **common)
    elif name == "disjoint":
        rep = suites.suite_disjoint(r, seed=args.seed, **common)
    elif name == "length-identity":
        rep = suites.suite_length_identity(r, r.parse_form(g_text), args.sample, args.seed, args.power, **common)
    elif name == "claim-sec5":
        rep = suites.suite_claim_sec5(r, r.parse_form(g_text), min(args.sample, 20), args.seed, **common)
    elif name == "thm-m3":
        rep = suites.suite_thm_m3(r, args.p or r.p, args.budget, args.seed, **common)
    else:
        rep = suites.suite_thm_main_gap(r, r.parse_form(g_text), args.budget, args.seed, **common)
    if fmt == "json":
        sys.stdout.write(rep.dumps(args.include_runtime))
    else:
        sys.stdout.write(rep.to_text(args.include_runtime))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_cache(args, fmt):
    cache = ResolutionCache(directory=args.cache_dir)
    kept, removed = cache.gc()
    _emit({"kept": kept, "removed": removed}, f"kept {kept}, removed {removed}", fmt)
    return EXIT_OK


COMMANDS = {
    "ring-info": _cmd_ring_info,
    "gen": _cmd_gen,
    "resolve": _cmd_resolve,
    "betti": _cmd_betti,
    "syzygy": _cmd_syzygy,
    "cosyzygy": lambda a, f: _cmd_syzygy(a, f, homalg.cosyzygy),
    "tensor": _cmd_tensor,
    "tor": _cmd_tor,
    "iso": _cmd_iso,
    "support": _cmd_support,
    "disjoint": _cmd_disjoint,
    "gclass": _cmd_gclass,
    "subgroup": _cmd_subgroup,
    "verify": _cmd_verify,
    "cache": _cmd_cache,
}


def run(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format or ("json" if args.command == "verify" else "text")
        if args.command != "cache":
            cache = ResolutionCache(directory=None if args.no_cache else args.cache_dir, enabled=not args.no_cache)
            previous = set_default_cache(cache)
            try:
                return COMMANDS[args.command](args, fmt)
            finally:
                set_default_cache(previous)
        return COMMANDS[args.command](args, fmt)
    except CIHomolError as exc:
        sys.stderr.write(f"cihomol: error: {exc}\n")
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    code = run(argv)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
