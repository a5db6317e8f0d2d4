from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cihomol import exactalg as ea
from cihomol.errors import UsageError

import oracles

P = 5


def mats(max_rows=5, max_cols=5, p=P):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    ).map(lambda rows: np.array(rows, dtype=np.int64))


def test_field_spec_rejects_composites():
    with pytest.raises(UsageError):
        ea.FieldSpec(6)
    assert ea.FieldSpec(7).inv(3) == 5


def test_rref_identity_and_zero():
    red, piv, rk = ea.rref(np.eye(3, dtype=np.int64), P)
    assert (red == np.eye(3)).all() and list(piv) == [0, 1, 2] and rk == 3
    red, piv, rk = ea.rref(np.zeros((2, 4), dtype=np.int64), P)
    assert not red.any() and list(piv) == [] and rk == 0


def test_rref_hand_example():
    red, piv, rk = ea.rref(np.array([[2, 4], [1, 2]]), P)
    assert red.tolist() == [[1, 2], [0, 0]] and rk == 1 and list(piv) == [0]


def test_kernel_examples():
    assert ea.kernel_basis(np.eye(4, dtype=np.int64), P).shape[0] == 0
    k = ea.kernel_basis(np.zeros((2, 3), dtype=np.int64), P)
    assert sorted(map(tuple, k.tolist())) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    k = ea.kernel_basis(np.array([[1, 2]]), P)
    assert k.shape[0] == 1
    # oracle: the kernel over F_5^2 by enumeration is the line through (3, 1)
    kern = set(oracles.kernel_vectors([[1, 2]], P))
    assert len(kern) == P
    assert tuple(int(v) for v in k[0]) in kern and (3, 1) in kern


def test_solve_examples():
    assert ea.solve(np.eye(3, dtype=np.int64), np.array([1, 2, 3]), P).tolist() == [1, 2, 3]
    assert ea.solve(np.zeros((2, 2), dtype=np.int64), np.array([1, 0]), P) is None
    x = ea.solve(np.array([[2]]), np.array([3]), P)
    assert x.tolist() == [4]
    assert [v for v in range(P) if 2 * v % P == 3] == [4]
    with pytest.raises(UsageError):
        ea.solve(np.eye(2, dtype=np.int64), np.array([1, 2, 3]), P)


@settings(max_examples=60, deadline=None)
@given(mats(4, 4))
def test_rank_matches_enumeration(m):
    size = oracles.image_size(m.tolist(), P)
    assert P ** ea.rank(m, P) == size
    assert ea.rank(m, P) == oracles.gf_rank(m.tolist(), P)


@settings(max_examples=80, deadline=None)
@given(mats(6, 6))
def test_rank_nullity_and_transpose(m):
    r = ea.rank(m, P)
    assert r == ea.rank(m.T, P)
    k = ea.kernel_basis(m, P)
    assert r + k.shape[0] == m.shape[1]
    if k.shape[0]:
        assert not ea.matmul(m, k.T, P).any()


@settings(max_examples=60, deadline=None)
@given(mats(5, 5))
def test_rref_idempotent(m):
    red, piv, rk = ea.rref(m, P)
    again, piv2, rk2 = ea.rref(red, P)
    assert (again == red).all() and list(piv) == list(piv2) and rk == rk2


@settings(max_examples=60, deadline=None)
@given(mats(5, 5), st.lists(st.integers(0, P - 1), min_size=5, max_size=5))
def test_solve_is_checked(m, x):
    b = ea.matmul(m, np.array(x[: m.shape[1]], dtype=np.int64).reshape(-1, 1), P).reshape(-1)
    sol = ea.solve(m, b, P)
    assert sol is not None
    assert (ea.matmul(m, sol.reshape(-1, 1), P).reshape(-1) == b).all()


@settings(max_examples=40, deadline=None)
@given(mats(4, 4))
def test_inverse_when_invertible(m):
    if m.shape[0] != m.shape[1] or ea.rank(m, P) < m.shape[0]:
        return
    inv = ea.inverse(m, P)
    assert (ea.matmul(m, inv, P) == np.eye(m.shape[0])).all()


def test_large_prime_matmul_exact():
    p = 2_147_483_647
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, size=(30, 40), dtype=np.int64)
    b = rng.integers(0, p, size=(40, 20), dtype=np.int64)
    got = ea.matmul(a, b, p)
    want = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(40)) % p for j in range(20)] for i in range(30)]
    assert got.tolist() == want
