"""Reference computations that share no code with the package.

Everything here is plain Python over lists of ints: a separate Gaussian
elimination, brute-force enumeration over small fields, and a resolution
builder that works with submodules of free modules instead of action matrices.
"""

from __future__ import annotations

import itertools
from typing import List, Sequence


def gf_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [[v % p for v in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [v * inv % p for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def gf_row_basis(rows: Sequence[Sequence[int]], p: int) -> List[List[int]]:
    basis: List[List[int]] = []
    for r in rows:
        if gf_rank(basis + [list(r)], p) > len(basis):
            basis.append([v % p for v in r])
    return basis


def image_size(mat: Sequence[Sequence[int]], p: int) -> int:
    """Number of distinct vectors mat @ x over all x in F_p^n (brute force)."""
    n = len(mat[0])
    seen = set()
    for x in itertools.product(range(p), repeat=n):
        seen.add(tuple(sum(a * b for a, b in zip(row, x)) % p for row in mat))
    return len(seen)


def kernel_vectors(mat: Sequence[Sequence[int]], p: int) -> List[tuple]:
    n = len(mat[0])
    return [x for x in itertools.product(range(p), repeat=n) if all(sum(a * b for a, b in zip(row, x)) % p == 0 for row in mat)]


# -- the ring, without the package -----------------------------------------------


def monomials(exps: Sequence[int]) -> List[tuple]:
    return list(itertools.product(*(range(a) for a in exps)))


def mult_by_var(exps, i: int, vec: Sequence[int], p: int) -> List[int]:
    """x_i * f for f in A given in the lex monomial basis."""
    mons = monomials(exps)
    index = {m: k for k, m in enumerate(mons)}
    out = [0] * len(mons)
    for k, m in enumerate(mons):
        if vec[k] and m[i] + 1 < exps[i]:
            e = list(m)
            e[i] += 1
            out[index[tuple(e)]] = (out[index[tuple(e)]] + vec[k]) % p
    return out


def act_free(exps, i, vec, rank, p):
    """x_i on A^rank, coordinates grouped by generator."""
    L = len(monomials(exps))
    out = []
    for j in range(rank):
        out.extend(mult_by_var(exps, i, vec[j * L:(j + 1) * L], p))
    return out


def submodule_closure(exps, gens, rank, p):
    """k-basis of the A-submodule of A^rank spanned by ``gens``."""
    basis = gf_row_basis(gens, p)
    frontier = list(basis)
    while frontier:
        new = []
        for v in frontier:
            for i in range(len(exps)):
                w = act_free(exps, i, v, rank, p)
                if any(w) and gf_rank(basis + [w], p) > len(basis):
                    basis.append(w)
                    new.append(w)
        frontier = new
    return basis


def betti_via_submodules(exps, p: int, start_gens, start_rank: int, depth: int) -> List[int]:
    """Betti numbers of A^start_rank / <start_gens> by repeated minimal covers of submodules.

    The syzygy N of the current module is kept as a submodule of A^b.
    beta = dim N - dim mN; minimal generators complete mN to N; the next
    syzygy is the kernel of A^beta -> A^b, found by linear algebra.
    """
    L = len(monomials(exps))
    n_basis = submodule_closure(exps, start_gens, start_rank, p) if start_gens else []
    rank = start_rank
    betti = [rank]
    for _ in range(depth):
        if not n_basis:
            betti.append(0)
            continue
        m_n = gf_row_basis([act_free(exps, i, v, rank, p) for v in n_basis for i in range(len(exps))], p)
        gens = list(m_n)
        chosen = []
        for v in n_basis:
            if gf_rank(gens + [v], p) > len(gens):
                gens.append(v)
                chosen.append(v)
        b = len(chosen)
        betti.append(b)
        # images of the k-basis {mono * e_j} of A^b inside A^rank
        images = []
        mons = monomials(exps)
        for j in range(b):
            for mono in mons:
                v = chosen[j]
                for i, e in enumerate(mono):
                    for _ in range(e):
                        v = act_free(exps, i, v, rank, p)
                images.append(v)
        # kernel of the linear map: vectors c with sum c_k images[k] = 0
        cols = [[images[k][r] for k in range(len(images))] for r in range(rank * L)]
        kern = _kernel_basis(cols, len(images), p)
        n_basis = kern
        rank = b
    return betti


def _kernel_basis(rows, n, p) -> List[List[int]]:
    m = [[v % p for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = -m[i][f] % p
        basis.append(v)
    return basis


def residue_field_betti(exps, p, depth):
    """Betti numbers of k = A/m: start from the maximal ideal inside A."""
    mons = monomials(exps)
    gens = []
    for i in range(len(exps)):
        e = [0] * len(exps)
        e[i] = 1
        v = [0] * len(mons)
        v[mons.index(tuple(e))] = 1
        gens.append(v)
    return betti_via_submodules(exps, p, gens, 1, depth)


# -- modules as action matrices ----------------------------------------------------


def tensor_dim(actions_m, actions_n, p) -> int:
    """dim of M (x)_A N = (M (x)_k N) / span{x m (x) n - m (x) x n}."""
    dm = len(actions_m[0]) if actions_m and len(actions_m[0]) else 0
    dn = len(actions_n[0]) if actions_n and len(actions_n[0]) else 0
    if dm == 0 or dn == 0:
        return 0
    rels = []
    for a, b in zip(actions_m, actions_n):
        for i in range(dm):
            for j in range(dn):
                # image of e_i (x) f_j under (a (x) 1 - 1 (x) b)
                v = [0] * (dm * dn)
                for r in range(dm):
                    if a[r][i]:
                        v[r * dn + j] = (v[r * dn + j] + a[r][i]) % p
                for s in range(dn):
                    if b[s][j]:
                        v[i * dn + s] = (v[i * dn + s] - b[s][j]) % p
                rels.append(v)
    return dm * dn - gf_rank(rels, p)


def hom_dim(actions_m, actions_n, p) -> int:
    """dim of {f : f a_i = b_i f} by solving the commutation equations directly."""
    dm, dn = len(actions_m[0]), len(actions_n[0])
    if dm == 0 or dn == 0:
        return 0
    eqs = []
    for a, b in zip(actions_m, actions_n):
        for r in range(dn):
            for c in range(dm):
                # (f a)[r][c] - (b f)[r][c] = sum_k f[r][k] a[k][c] - sum_k b[r][k] f[k][c]
                row = [0] * (dn * dm)
                for k in range(dm):
                    row[r * dm + k] = (row[r * dm + k] + a[k][c]) % p
                for k in range(dn):
                    row[k * dm + c] = (row[k * dm + c] - b[r][k]) % p
                eqs.append(row)
    return dn * dm - gf_rank(eqs, p)


def jordan_blocks(mat, p) -> List[int]:
    """Jordan block sizes of a nilpotent matrix from ranks of its powers."""
    n = len(mat)
    ranks = [n]
    power = [[int(i == j) for j in range(n)] for i in range(n)]
    while ranks[-1]:
        power = [[sum(power[i][k] * mat[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]
        ranks.append(gf_rank(power, p))
    # number of blocks of size >= s is ranks[s-1] - ranks[s]
    at_least = [ranks[s - 1] - ranks[s] for s in range(1, len(ranks))]
    sizes = []
    for s in range(len(at_least), 0, -1):
        exact = at_least[s - 1] - (at_least[s] if s < len(at_least) else 0)
        sizes.extend([s] * exact)
    return sizes
