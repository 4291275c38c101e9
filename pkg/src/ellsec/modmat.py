"""Dense exact linear algebra over F_p.

Matrices are numpy uint64 arrays of reduced residues; the hot elimination
loops are numba-jitted and use Montgomery multiplication so that products
of residues (p < 2^62) never leave uint64.  Everything runs sequentially
with a fixed first-nonzero pivot rule, so results are bit-identical from
run to run.

Row reduction is the one workhorse: nullspaces, ranks and linear solves
for the interpolation and syzygy stages all reduce to `rref`.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

from .field import PrimeField


class LinearAlgebraError(Exception):
    pass


@njit(uint64(uint64, uint64), inline="always", cache=True)
def _mulhi(a, b):
    a_lo = a & uint64(0xFFFFFFFF)
    a_hi = a >> uint64(32)
    b_lo = b & uint64(0xFFFFFFFF)
    b_hi = b >> uint64(32)
    t = ((a_lo * b_lo) >> uint64(32)) + a_lo * b_hi
    t2 = (t & uint64(0xFFFFFFFF)) + a_hi * b_lo
    return a_hi * b_hi + (t >> uint64(32)) + (t2 >> uint64(32))


@njit(uint64(uint64, uint64, uint64, uint64), inline="always", cache=True)
def _montmul(a, b, p, ninv):
    # (a * b / 2^64) mod p, valid for odd p < 2^63.
    t_lo = a * b
    m = t_lo * ninv
    u = _mulhi(a, b) + _mulhi(m, p) + (uint64(1) if t_lo != uint64(0) else uint64(0))
    if u >= p:
        u -= p
    return u


@njit(uint64(uint64, uint64, uint64, uint64), inline="always", cache=True)
def _inv_mod(a, p, ninv, r2):
    # Fermat inverse via Montgomery ladder; a must be nonzero mod p.
    base = _montmul(a, r2, p, ninv)
    acc = _montmul(uint64(1), r2, p, ninv)
    e = p - uint64(2)
    while e > uint64(0):
        if e & uint64(1):
            acc = _montmul(acc, base, p, ninv)
        base = _montmul(base, base, p, ninv)
        e >>= uint64(1)
    return _montmul(acc, uint64(1), p, ninv)


@njit(cache=True)
def _rref(A, pivots, p, ninv, r2):
    """In-place reduced row echelon form; returns the rank.

    pivots must be a preallocated int64 array of length >= min(m, n);
    pivot columns are written to its prefix.
    """
    m, n = A.shape
    rank = 0
    for col in range(n):
        sel = -1
        for r in range(rank, m):
            if A[r, col] != uint64(0):
                sel = r
                break
        if sel < 0:
            continue
        if sel != rank:
            for c in range(col, n):
                tmp = A[rank, c]
                A[rank, c] = A[sel, c]
                A[sel, c] = tmp
        inv_m = _montmul(_inv_mod(A[rank, col], p, ninv, r2), r2, p, ninv)
        A[rank, col] = uint64(1)
        for c in range(col + 1, n):
            if A[rank, c] != uint64(0):
                A[rank, c] = _montmul(A[rank, c], inv_m, p, ninv)
        for r in range(rank + 1, m):
            f = A[r, col]
            if f == uint64(0):
                continue
            f_m = _montmul(f, r2, p, ninv)
            A[r, col] = uint64(0)
            for c in range(col + 1, n):
                piv = A[rank, c]
                if piv != uint64(0):
                    prod = _montmul(f_m, piv, p, ninv)
                    v = A[r, c]
                    A[r, c] = v - prod if v >= prod else v + (p - prod)
        pivots[rank] = col
        rank += 1
        if rank == m:
            break
    # back-substitution: clear entries above each pivot
    for k in range(rank - 1, -1, -1):
        col = pivots[k]
        for r in range(k):
            f = A[r, col]
            if f == uint64(0):
                continue
            f_m = _montmul(f, r2, p, ninv)
            A[r, col] = uint64(0)
            for c in range(col + 1, n):
                piv = A[k, c]
                if piv != uint64(0):
                    prod = _montmul(f_m, piv, p, ninv)
                    v = A[r, c]
                    A[r, c] = v - prod if v >= prod else v + (p - prod)
    return rank


@njit(cache=True)
def _matmul(A, B, out, p, ninv, r2):
    m, k = A.shape
    n = B.shape[1]
    for i in range(m):
        for j in range(n):
            acc = uint64(0)
            for t in range(k):
                a = A[i, t]
                if a == uint64(0):
                    continue
                prod = _montmul(_montmul(a, B[t, j], p, ninv), r2, p, ninv)
                acc += prod
                if acc >= p:
                    acc -= p
            out[i, j] = acc


def as_matrix(rows, field: PrimeField) -> np.ndarray:
    """uint64 matrix from an iterable of rows of ints (already reduced)."""
    return np.array([[int(x) % field.p for x in row] for row in rows], dtype=np.uint64)


def rref(mat: np.ndarray, field: PrimeField, copy: bool = True):
    """Reduced row echelon form.  Returns (R, pivot_columns, rank)."""
    A = np.array(mat, dtype=np.uint64, copy=copy)
    if A.ndim != 2:
        raise LinearAlgebraError("rref expects a 2-d matrix")
    if A.size == 0:
        return A, [], 0
    pivots = np.empty(min(A.shape), dtype=np.int64)
    rank = _rref(A, pivots, np.uint64(field.p), np.uint64(field.mont_ninv), np.uint64(field.mont_r2))
    return A, [int(c) for c in pivots[:rank]], int(rank)


def rank(mat: np.ndarray, field: PrimeField) -> int:
    if mat.size == 0:
        return 0
    return rref(mat, field)[2]


def nullspace(mat: np.ndarray, field: PrimeField) -> np.ndarray:
    """Canonical basis of {v : mat @ v = 0}, as rows of a (dim x n) matrix.

    The basis is itself row-reduced, so equal subspaces always yield the
    identical matrix regardless of how the input rows were sampled.
    """
    A = np.asarray(mat, dtype=np.uint64)
    n = A.shape[1]
    R, piv, rk = rref(A, field)
    free = [c for c in range(n) if c not in set(piv)]
    if not free:
        return np.zeros((0, n), dtype=np.uint64)
    p = field.p
    basis = np.zeros((len(free), n), dtype=np.uint64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for r, pc in enumerate(piv):
            v = int(R[r, fc])
            if v:
                basis[bi, pc] = p - v
    B, _, _ = rref(basis, field, copy=False)
    return B


def matmul(A: np.ndarray, B: np.ndarray, field: PrimeField) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.uint64)
    B = np.ascontiguousarray(B, dtype=np.uint64)
    if A.shape[1] != B.shape[0]:
        raise LinearAlgebraError(f"shape mismatch {A.shape} @ {B.shape}")
    out = np.empty((A.shape[0], B.shape[1]), dtype=np.uint64)
    _matmul(A, B, out, np.uint64(field.p), np.uint64(field.mont_ninv), np.uint64(field.mont_r2))
    return out


def solve_unique(A: np.ndarray, b: np.ndarray, field: PrimeField) -> np.ndarray:
    """Solve A x = b with A of full column rank; exact, possibly overdetermined.

    Raises LinearAlgebraError if the system is inconsistent or the solution
    is not unique.
    """
    A = np.asarray(A, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64).reshape(-1, 1)
    aug = np.hstack([A, b])
    n = A.shape[1]
    R, piv, rk = rref(aug, field, copy=False)
    if n in piv:
        raise LinearAlgebraError("inconsistent linear system")
    if rk < n:
        raise LinearAlgebraError(f"solution not unique: rank {rk} < {n} unknowns")
    x = np.zeros(n, dtype=np.uint64)
    for r, pc in enumerate(piv):
        x[pc] = R[r, n]
    return x


def det(mat, field: PrimeField) -> int:
    """Determinant of a small square matrix, plain-int elimination."""
    A = [[int(x) % field.p for x in row] for row in mat]
    n = len(A)
    if any(len(row) != n for row in A):
        raise LinearAlgebraError("det expects a square matrix")
    p = field.p
    d = 1
    for col in range(n):
        sel = next((r for r in range(col, n) if A[r][col]), None)
        if sel is None:
            return 0
        if sel != col:
            A[col], A[sel] = A[sel], A[col]
            d = p - d
        pivot = A[col][col]
        d = d * pivot % p
        inv = field.inv(pivot)
        for r in range(col + 1, n):
            f = A[r][col] * inv % p
            if f:
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[col])]
    return d


# -- vectorized coefficient arithmetic (numpy, broadcast-aware) -------------

_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)


def _vec_mulhi(a, b):
    a_lo = a & _MASK32
    a_hi = a >> _S32
    b_lo = b & _MASK32
    b_hi = b >> _S32
    t = ((a_lo * b_lo) >> _S32) + a_lo * b_hi
    t2 = (t & _MASK32) + a_hi * b_lo
    return a_hi * b_hi + (t >> _S32) + (t2 >> _S32)


def _vec_montmul(a, b, p, ninv):
    t_lo = a * b
    m = t_lo * ninv
    u = _vec_mulhi(a, b) + _vec_mulhi(m, p) + (t_lo != 0).astype(np.uint64)
    return np.where(u >= p, u - p, u)


def vec_mulmod(a, b, field: PrimeField):
    """Elementwise (broadcasting) a * b mod p on uint64 arrays."""
    p = np.uint64(field.p)
    ninv = np.uint64(field.mont_ninv)
    with np.errstate(over="ignore"):
        t = _vec_montmul(np.asarray(a, dtype=np.uint64), np.asarray(b, dtype=np.uint64), p, ninv)
        return _vec_montmul(t, np.uint64(field.mont_r2), p, ninv)


def vec_addmod(a, b, field: PrimeField):
    p = np.uint64(field.p)
    with np.errstate(over="ignore"):
        s = np.asarray(a, dtype=np.uint64) + np.asarray(b, dtype=np.uint64)
        return np.where(s >= p, s - p, s)


def vec_submod(a, b, field: PrimeField):
    p = np.uint64(field.p)
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return np.where(a >= b, a - b, a + (p - b))
