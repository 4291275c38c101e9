"""Skew-symmetric matrices of forms annihilated by given row vectors.

Given rows v (length-n vectors of forms of one degree) and a target entry
degree d, the solver finds every skew n x n matrix M of degree-d forms
with v . M = 0 identically, for every row.  The identity in each
component is expanded coefficient-by-coefficient into one big linear
system over F_p whose unknowns are the entry coefficients; the nullspace
of that system is the answer.  Each returned matrix is re-verified
symbolically before it leaves this module.

Unknown ordering (also the serialization order): entries (i, j) with
i < j in lexicographic order, then monomials graded-lex descending.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import modmat
from .poly import MultiPoly, monomial_index, monomials


class SkewSolveError(Exception):
    pass


class SkewPolyMatrix:
    """n x n skew matrix of homogeneous forms; only i < j entries stored."""

    __slots__ = ("n", "entry_degree", "upper")

    def __init__(self, n: int, entry_degree: int, upper: dict):
        self.n = n
        self.entry_degree = entry_degree
        self.upper = {}
        for (i, j), f in upper.items():
            if not 0 <= i < j < n:
                raise ValueError(f"bad entry index ({i}, {j})")
            if not f.is_zero():
                if not f.is_homogeneous() or f.degree() != entry_degree:
                    raise ValueError(f"entry ({i}, {j}) not homogeneous of degree {entry_degree}")
                self.upper[(i, j)] = f

    @property
    def field(self):
        for f in self.upper.values():
            return f.field
        raise ValueError("zero matrix carries no field")

    def entry(self, i: int, j: int, field=None, nvars=None) -> MultiPoly:
        if i == j:
            return MultiPoly.zero(field or self.field, nvars or self.n)
        if i < j:
            f = self.upper.get((i, j))
        else:
            f = self.upper.get((j, i))
            f = -f if f is not None else None
        if f is None:
            return MultiPoly.zero(field or self.field, nvars or self.n)
        return f

    def evaluate(self, point):
        """Numeric skew matrix at a point, as a list of lists of residues."""
        field = self.field
        p = field.p
        out = [[0] * self.n for _ in range(self.n)]
        for (i, j), f in self.upper.items():
            v = f.evaluate(point)
            out[i][j] = v
            out[j][i] = (p - v) % p
        return out

    def coefficient_vector(self, nvars: int = None):
        """Flat coefficient vector in the documented unknown order."""
        nv = nvars or self.n
        mons = monomials(nv, self.entry_degree)
        vec = []
        for i, j in combinations(range(self.n), 2):
            f = self.upper.get((i, j))
            if f is None:
                vec.extend([0] * len(mons))
            else:
                vec.extend(f.terms.get(m, 0) for m in mons)
        return vec

    @classmethod
    def from_coefficient_vector(cls, field, n, entry_degree, vec, nvars=None):
        nv = nvars or n
        mons = monomials(nv, entry_degree)
        upper = {}
        k = 0
        for i, j in combinations(range(n), 2):
            chunk = vec[k : k + len(mons)]
            k += len(mons)
            terms = {m: int(c) for m, c in zip(mons, chunk) if int(c) % field.p}
            if terms:
                upper[(i, j)] = MultiPoly(field, nv, terms, _clean=True)
        return cls(n, entry_degree, upper)

    def normalized(self):
        """Scale so the first nonzero coefficient (unknown order) is 1."""
        vec = self.coefficient_vector()
        lead = next((c for c in vec if c), None)
        if lead is None:
            raise ValueError("cannot normalize the zero matrix")
        inv = self.field.inv(lead)
        return SkewPolyMatrix(
            self.n, self.entry_degree, {k: f.scale(inv) for k, f in self.upper.items()}
        )

    def perturbed(self, i, j, exp, delta):
        """Copy with entry (i, j) shifted by delta on one monomial (for probes)."""
        field = self.field
        upper = dict(self.upper)
        base = upper.get((min(i, j), max(i, j)), MultiPoly.zero(field, self.n))
        bump = MultiPoly.monomial(field, base.nvars if not base.is_zero() else self.n, exp, delta)
        upper[(min(i, j), max(i, j))] = base + bump
        return SkewPolyMatrix(self.n, self.entry_degree, upper)

    def to_json_dict(self):
        return {
            "n": self.n,
            "degree": self.entry_degree,
            "upper": {
                f"{i+1},{j+1}": self.upper[(i, j)].to_json_dict()
                for (i, j) in sorted(self.upper)
            },
        }

    @classmethod
    def from_json_dict(cls, data, field):
        upper = {}
        for key, poly in data["upper"].items():
            i, j = (int(t) - 1 for t in key.split(","))
            upper[(i, j)] = MultiPoly.from_json_dict(poly, field)
        return cls(int(data["n"]), int(data["degree"]), upper)


class SyzygyProblem:
    """Rows to annihilate plus the requested entry degree."""

    __slots__ = ("rows", "entry_degree", "n", "nvars", "field", "row_degree")

    def __init__(self, rows, entry_degree: int):
        if entry_degree < 1:
            raise ValueError("entry degree must be >= 1")
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("need at least one nonempty row")
        self.n = len(rows[0])
        f0 = rows[0][0]
        self.field = f0.field
        self.nvars = f0.nvars
        degs = set()
        for r in rows:
            if len(r) != self.n:
                raise ValueError("rows of unequal length")
            for f in r:
                if f.nvars != self.nvars or f.field.p != self.field.p:
                    raise ValueError("mixed rings in syzygy rows")
                if not f.is_homogeneous():
                    raise ValueError("row entries must be homogeneous")
                if not f.is_zero():
                    degs.add(f.degree())
        if len(degs) != 1:
            raise ValueError(f"rows must share one degree, found {sorted(degs)}")
        self.rows = rows
        self.entry_degree = entry_degree
        self.row_degree = degs.pop()


def skew_syzygy(problem: SyzygyProblem):
    """All skew matrices of the requested degree killed by every row.

    Returns the canonical (row-reduced coefficient) basis as a list of
    SkewPolyMatrix; an empty list means only the zero matrix works.
    """
    field = problem.field
    n = problem.n
    nvars = problem.nvars
    d = problem.entry_degree
    mons_d = monomials(nvars, d)
    pairs = list(combinations(range(n), 2))
    ncols = len(pairs) * len(mons_d)
    deg_id = problem.row_degree + d
    mons_id = monomials(nvars, deg_id)
    idx_id = monomial_index(nvars, deg_id)
    nid = len(mons_id)

    blocks = []
    for row in problem.rows:
        block = np.zeros((n * nid, ncols), dtype=np.uint64)
        for pi, (i, j) in enumerate(pairs):
            base = pi * len(mons_d)
            for mi, m in enumerate(mons_d):
                col = base + mi
                # unknown (i, j, m): contributes +row[i]*m to component j
                # and -row[j]*m to component i
                for e, c in row[i].terms.items():
                    key = tuple(a + b for a, b in zip(e, m))
                    block[j * nid + idx_id[key], col] = c
                for e, c in row[j].terms.items():
                    key = tuple(a + b for a, b in zip(e, m))
                    block[i * nid + idx_id[key], col] = field.p - c
        blocks.append(block)
    system = np.vstack(blocks)
    basis = modmat.nullspace(system, field)
    out = []
    for vec in basis:
        M = SkewPolyMatrix.from_coefficient_vector(field, n, d, [int(x) for x in vec], nvars=nvars)
        report = verify_complex(problem, M)
        if not report.ok:
            raise SkewSolveError("solver output failed symbolic re-verification")
        out.append(M)
    return out


class ComplexReport:
    """Per-(row, component) residual polynomials of v . M."""

    __slots__ = ("residuals",)

    def __init__(self, residuals):
        self.residuals = residuals

    @property
    def ok(self):
        return all(r.is_zero() for row in self.residuals for r in row)

    def failures(self):
        return [
            (ri, j)
            for ri, row in enumerate(self.residuals)
            for j, r in enumerate(row)
            if not r.is_zero()
        ]


def verify_complex(problem: SyzygyProblem, M: SkewPolyMatrix) -> ComplexReport:
    """Symbolic check that every row annihilates M."""
    field = problem.field
    nvars = problem.nvars
    residuals = []
    for row in problem.rows:
        comps = []
        for j in range(problem.n):
            acc = MultiPoly.zero(field, nvars)
            for i in range(problem.n):
                f = M.entry(i, j, field=field, nvars=nvars)
                if not f.is_zero():
                    acc = acc + row[i] * f
            comps.append(acc)
        residuals.append(comps)
    return ComplexReport(residuals)
