import numpy as np
import pytest

from ellsec import modmat
from ellsec.field import PrimeField


def test_vec_mulmod_matches_python(field, alt_field, rng):
    for f in (field, alt_field, PrimeField(1000003)):
        a = np.array([rng.randrange(f.p) for _ in range(500)], dtype=np.uint64)
        b = np.array([rng.randrange(f.p) for _ in range(500)], dtype=np.uint64)
        got = modmat.vec_mulmod(a, b, f)
        want = [(int(x) * int(y)) % f.p for x, y in zip(a, b)]
        assert [int(v) for v in got] == want


def test_vec_add_sub(field, rng):
    a = np.array([rng.randrange(field.p) for _ in range(200)], dtype=np.uint64)
    b = np.array([rng.randrange(field.p) for _ in range(200)], dtype=np.uint64)
    assert [int(v) for v in modmat.vec_addmod(a, b, field)] == [
        (int(x) + int(y)) % field.p for x, y in zip(a, b)
    ]
    assert [int(v) for v in modmat.vec_submod(a, b, field)] == [
        (int(x) - int(y)) % field.p for x, y in zip(a, b)
    ]


def test_rref_hand_example(field):
    p = field.p
    A = modmat.as_matrix([[2, 4, 6], [1, 2, 4]], field)
    R, piv, rk = modmat.rref(A, field)
    assert rk == 2 and piv == [0, 2]
    assert [int(x) for x in R[0]] == [1, 2, 0]
    assert [int(x) for x in R[1]] == [0, 0, 1]


def test_nullspace_annihilates(field, rng):
    for _ in range(10):
        m, n = rng.randrange(3, 9), rng.randrange(3, 9)
        A = np.array([[rng.randrange(field.p) for _ in range(n)] for _ in range(m)], dtype=np.uint64)
        N = modmat.nullspace(A, field)
        if N.shape[0]:
            prod = modmat.matmul(A, N.T.copy(), field)
            assert not prod.any()
        R, piv, rk = modmat.rref(A, field)
        assert N.shape[0] == n - rk


def test_nullspace_is_canonical_under_row_shuffle(field, rng):
    A = np.array([[rng.randrange(field.p) for _ in range(7)] for _ in range(4)], dtype=np.uint64)
    N1 = modmat.nullspace(A, field)
    order = list(range(4))
    rng.shuffle(order)
    scale = np.array([[rng.randrange(1, field.p)] for _ in range(4)], dtype=np.uint64)
    A2 = modmat.vec_mulmod(A[order], scale, field)
    N2 = modmat.nullspace(A2, field)
    assert (N1 == N2).all()


def test_matmul_matches_python(field, rng):
    A = [[rng.randrange(field.p) for _ in range(4)] for _ in range(3)]
    B = [[rng.randrange(field.p) for _ in range(5)] for _ in range(4)]
    got = modmat.matmul(modmat.as_matrix(A, field), modmat.as_matrix(B, field), field)
    for i in range(3):
        for j in range(5):
            want = sum(A[i][k] * B[k][j] for k in range(4)) % field.p
            assert int(got[i, j]) == want


def test_solve_unique(field, rng):
    n = 6
    A = [[rng.randrange(field.p) for _ in range(n)] for _ in range(n + 5)]
    x = [rng.randrange(field.p) for _ in range(n)]
    b = [sum(A[i][k] * x[k] for k in range(n)) % field.p for i in range(len(A))]
    got = modmat.solve_unique(modmat.as_matrix(A, field), np.array(b, dtype=np.uint64), field)
    assert [int(v) for v in got] == x


def test_solve_inconsistent_raises(field):
    A = modmat.as_matrix([[1, 0], [1, 0]], field)
    b = np.array([1, 2], dtype=np.uint64)
    with pytest.raises(modmat.LinearAlgebraError):
        modmat.solve_unique(A, b, field)


def test_solve_underdetermined_raises(field):
    A = modmat.as_matrix([[1, 1]], field)
    b = np.array([1], dtype=np.uint64)
    with pytest.raises(modmat.LinearAlgebraError):
        modmat.solve_unique(A, b, field)


def test_det_hand_and_random(field, rng):
    assert modmat.det([[2, 1], [7, 4]], field) == 1
    assert modmat.det([[1, 2], [2, 4]], field) == 0
    for _ in range(5):
        n = 4
        A = [[rng.randrange(field.p) for _ in range(n)] for _ in range(n)]
        B = [[rng.randrange(field.p) for _ in range(n)] for _ in range(n)]
        AB = [[sum(A[i][k] * B[k][j] for k in range(n)) % field.p for j in range(n)] for i in range(n)]
        assert modmat.det(AB, field) == field.mul(modmat.det(A, field), modmat.det(B, field))


def test_rank_bounds(field, rng):
    A = np.array([[rng.randrange(field.p) for _ in range(6)] for _ in range(6)], dtype=np.uint64)
    assert modmat.rank(A, field) == 6  # random square matrix is invertible
    assert modmat.rank(np.zeros((3, 4), dtype=np.uint64), field) == 0
    assert modmat.rank(np.zeros((0, 4), dtype=np.uint64), field) == 0
