"""Pfaffians of skew matrices with polynomial entries.

Computed by expansion along the first remaining index with memoization on
index subsets, which is exact and comfortably fast for the matrix sizes
that occur here (n <= 9).  The signed submaximal pfaffians of an odd skew
matrix M form the canonical vector annihilated by M.
"""

from __future__ import annotations

from .poly import MultiPoly, PolyMap
from .skewsolve import SkewPolyMatrix

SIGN_CONVENTION = "component i = (-1)^(i+1) * Pf(M without row/column i), 1-based"


class PfaffianError(Exception):
    pass


def _pf(M: SkewPolyMatrix, idx, memo, field, nvars):
    if not idx:
        return MultiPoly.constant(field, nvars, 1)
    cached = memo.get(idx)
    if cached is not None:
        return cached
    i0 = idx[0]
    acc = MultiPoly.zero(field, nvars)
    for t in range(1, len(idx)):
        j = idx[t]
        entry = M.entry(i0, j, field=field, nvars=nvars)
        if entry.is_zero():
            continue
        rest = tuple(k for k in idx if k != i0 and k != j)
        term = entry * _pf(M, rest, memo, field, nvars)
        acc = acc + term if t % 2 == 1 else acc - term
    memo[idx] = acc
    return acc


def pfaffian(M: SkewPolyMatrix) -> MultiPoly:
    """Pf(M) for even-sized M; Pf(M)^2 = det(M)."""
    if M.n % 2 != 0:
        raise PfaffianError(f"pfaffian needs even size, got {M.n}")
    field = M.field
    nvars = next(iter(M.upper.values())).nvars
    return _pf(M, tuple(range(M.n)), {}, field, nvars)


class PfaffianVector:
    """Signed submaximal pfaffians of an odd skew matrix."""

    __slots__ = ("components", "sign_convention")

    def __init__(self, components, sign_convention=SIGN_CONVENTION):
        self.components = components
        self.sign_convention = sign_convention

    def as_map(self) -> PolyMap:
        return PolyMap(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)


def sub_pfaffians(M: SkewPolyMatrix) -> PfaffianVector:
    """The vector v with v_i = (-1)^(i+1) Pf(M_i) for odd-sized M.

    M . v = 0 is re-checked symbolically before returning; a failure would
    mean a broken sign convention, so it raises rather than reports.
    """
    if M.n % 2 != 1:
        raise PfaffianError(f"sub_pfaffians needs odd size, got {M.n}")
    field = M.field
    nvars = next(iter(M.upper.values())).nvars
    memo = {}
    comps = []
    for i in range(M.n):
        idx = tuple(k for k in range(M.n) if k != i)
        v = _pf(M, idx, memo, field, nvars)
        comps.append(v if i % 2 == 0 else -v)
    for i in range(M.n):
        acc = MultiPoly.zero(field, nvars)
        for j in range(M.n):
            e = M.entry(i, j, field=field, nvars=nvars)
            if not e.is_zero() and not comps[j].is_zero():
                acc = acc + e * comps[j]
        if not acc.is_zero():
            raise PfaffianError("M . sub_pfaffians(M) != 0; sign convention broken")
    return PfaffianVector(comps)
