"""Dense linear algebra over prime fields GF(p).

Matrices are plain 2-D ``numpy.int64`` arrays whose entries lie in ``[0, p)``.
Every routine takes the modulus explicitly and returns fresh arrays; inputs
are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import UsageError

_INT64_MAX = np.iinfo(np.int64).max
# float64 represents every integer below 2**53 exactly.
_FLOAT_EXACT = 2**53
MAX_PRIME = 2**31 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field GF(p)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise UsageError(f"field modulus must be prime, got {self.p!r}")
        if self.p > MAX_PRIME:
            raise UsageError(f"modulus {self.p} does not fit the int64 kernels")
        object.__setattr__(self, "p", int(self.p))

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def reduce(self, m) -> np.ndarray:
        return as_mat(m, self.p)


def as_mat(m, p: int) -> np.ndarray:
    """Copy ``m`` into a 2-D int64 array reduced mod ``p``."""
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    if a.ndim != 2:
        raise UsageError(f"expected a matrix, got array of shape {a.shape}")
    return np.mod(a, p)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product ``a @ b`` mod ``p`` without int64 overflow."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[0]:
        raise UsageError(f"cannot multiply {a.shape} by {b.shape}")
    inner = a.shape[-1]
    sq = (p - 1) ** 2
    if inner == 0 or sq == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    if inner * sq < _FLOAT_EXACT:
        # BLAS path, exact because every partial sum stays below 2**53.
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return np.mod(prod.astype(np.int64), p)
    chunk = max(1, (_INT64_MAX - p) // sq)
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for start in range(0, inner, chunk):
        stop = min(inner, start + chunk)
        out = np.mod(out + a[..., start:stop] @ b[start:stop], p)
    return out


def matpow(a: np.ndarray, k: int, p: int) -> np.ndarray:
    n = a.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64)
    while k:
        if k & 1:
            result = matmul(result, base, p)
        k >>= 1
        if k:
            base = matmul(base, base, p)
    return result


def rref(m, p: int) -> Tuple[np.ndarray, List[int], int]:
    """Reduced row-echelon form of ``m`` over GF(p).

    Returns ``(reduced, pivot_columns, rank)``. Pivots are taken column by
    column, using the topmost nonzero entry among the unreduced rows.
    """
    a = as_mat(m, p)
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = a[r, c:] * pow(lead, p - 2, p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots, r


def rank(m, p: int) -> int:
    a = as_mat(m, p)
    # Eliminating along the shorter side is cheaper; rank is transpose-invariant.
    if a.shape[0] > a.shape[1]:
        a = a.T
    return rref(a, p)[2]


def null_space(m, p: int) -> Tuple[np.ndarray, List[int]]:
    """Right null space basis together with the free columns it is keyed on.

    Row ``k`` of the basis has a 1 in free column ``free[k]`` and 0 in every
    other free column, so the coordinates of a null vector in this basis are
    just its entries at the free columns.
    """
    a = as_mat(m, p)
    cols = a.shape[1]
    red, pivots, r = rref(a, p)
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    if free:
        basis[np.arange(len(free)), free] = 1
        if r:
            basis[:, pivots] = np.mod(-red[:r, free].T, p)
    return basis, free


def kernel_basis(m, p: int) -> np.ndarray:
    """Rows spanning the right null space of ``m`` (``m @ v == 0``)."""
    return null_space(m, p)[0]


def solve(m, b, p: int) -> Optional[np.ndarray]:
    """One solution ``x`` of ``m @ x == b`` mod ``p``, or ``None`` if inconsistent."""
    a = as_mat(m, p)
    vec = np.mod(np.asarray(b, dtype=np.int64).reshape(-1), p)
    rows, cols = a.shape
    if vec.shape[0] != rows:
        raise UsageError(f"right-hand side has length {vec.shape[0]}, matrix has {rows} rows")
    aug = np.concatenate([a, vec.reshape(-1, 1)], axis=1)
    red, pivots, r = rref(aug, p)
    if pivots and pivots[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    x[pivots] = red[:r, cols]
    return x


def inverse(m, p: int) -> np.ndarray:
    a = as_mat(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise UsageError(f"inverse of non-square matrix {a.shape}")
    red, pivots, r = rref(np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1), p)
    if r < n or pivots[n - 1] != n - 1:
        raise UsageError("matrix is singular")
    return red[:, n:].copy()


def row_space(m, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced basis of the row space and its pivot columns."""
    red, pivots, r = rref(m, p)
    return red[:r].copy(), pivots


def column_space(m, p: int) -> Tuple[np.ndarray, List[int]]:
    """Like :func:`row_space` for the span of the columns; basis vectors are rows."""
    return row_space(as_mat(m, p).T, p)
