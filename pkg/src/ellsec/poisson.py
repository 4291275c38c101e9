"""The quadratic bracket {x_i, x_j} = Omega_ij and its verification.

The bracket extends to arbitrary polynomials as the biderivation
{g, h} = sum_ij (dg/dx_i) Omega_ij (dh/dx_j).  The engine deliberately
accepts any skew matrix of quadrics, Poisson or not, so that negative
probes (perturbed matrices must fail Jacobi) are expressible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .poly import MultiPoly
from .skewsolve import SkewPolyMatrix


class QuadraticBracket:
    """Bracket defined by a skew n x n matrix of quadratic forms."""

    __slots__ = ("omega", "n", "field")

    def __init__(self, omega: SkewPolyMatrix):
        if omega.entry_degree != 2:
            raise ValueError("quadratic bracket needs entry degree 2")
        self.omega = omega
        self.n = omega.n
        self.field = omega.field

    def bracket(self, g: MultiPoly, h: MultiPoly) -> MultiPoly:
        """{g, h}; exact, bilinear, skew, Leibniz in each slot."""
        out = MultiPoly.zero(self.field, g.nvars)
        dg = [g.partial_derivative(i) for i in range(self.n)]
        dh = [h.partial_derivative(j) for j in range(self.n)]
        for i, j in combinations(range(self.n), 2):
            w = self.omega.entry(i, j, field=self.field, nvars=g.nvars)
            if w.is_zero():
                continue
            t = dg[i] * dh[j] - dg[j] * dh[i]
            if not t.is_zero():
                out = out + w * t
        return out

    def jacobiator(self, i: int, j: int, k: int) -> MultiPoly:
        """J(x_i, x_j, x_k); identically zero iff Jacobi holds on that triple."""
        if len({i, j, k}) != 3:
            raise ValueError("indices must be distinct")
        f = self.field
        n = self.n
        xi = MultiPoly.variable(f, n, i)
        xj = MultiPoly.variable(f, n, j)
        xk = MultiPoly.variable(f, n, k)
        return (
            self.bracket(self.bracket(xi, xj), xk)
            + self.bracket(self.bracket(xj, xk), xi)
            + self.bracket(self.bracket(xk, xi), xj)
        )

    def jacobi_all(self):
        """Indices of triples with nonzero jacobiator (empty = Jacobi holds)."""
        return [
            (i, j, k)
            for i, j, k in combinations(range(self.n), 3)
            if not self.jacobiator(i, j, k).is_zero()
        ]


@dataclass
class CasimirReport:
    failures: list  # (coordinate index, casimir index) with nonzero bracket

    @property
    def ok(self):
        return not self.failures


def casimir_check(B: QuadraticBracket, casimirs) -> CasimirReport:
    """All {x_i, C} must vanish identically for each claimed casimir C."""
    failures = []
    for ci, C in enumerate(casimirs):
        for i in range(B.n):
            xi = MultiPoly.variable(B.field, C.nvars, i)
            if not B.bracket(xi, C).is_zero():
                failures.append((i, ci))
    return CasimirReport(failures)


def caslem_engine_identity(B: QuadraticBracket, d: int, rng) -> bool:
    """Self-test of the biderivation engine on random linear forms.

    For any skew quadric matrix (Poisson or not) the jacobiator satisfies
    J(x^d, x^(d-1) y, x^(d-1) z) = d x^(3d-3) J(x, y, z) for linear x, y, z.
    A mismatch means the bracket engine itself is broken.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    f = B.field
    n = B.n

    def rand_linear():
        return MultiPoly(
            f, n, {tuple(int(a == i) for a in range(n)): f.rand_elem(rng) for i in range(n)}
        )

    x, y, z = rand_linear(), rand_linear(), rand_linear()

    def J(a, b, c):
        return (
            B.bracket(B.bracket(a, b), c)
            + B.bracket(B.bracket(b, c), a)
            + B.bracket(B.bracket(c, a), b)
        )

    xp = MultiPoly.constant(f, n, 1)
    for _ in range(d - 1):
        xp = xp * x  # x^(d-1)
    lhs = J(xp * x, xp * y, xp * z)
    x3 = MultiPoly.constant(f, n, 1)
    for _ in range(3 * d - 3):
        x3 = x3 * x
    rhs = (x3 * J(x, y, z)).scale(d)
    return lhs == rhs


def poisson_report(B: QuadraticBracket, casimirs) -> dict:
    """The JSON-shaped verification summary for a pipeline run."""
    jac_failures = B.jacobi_all()
    cas = casimir_check(B, casimirs)
    return {
        "jacobi_zero": not jac_failures,
        "casimirs_zero": cas.ok,
        "failures": [
            *(f"jacobiator({i+1},{j+1},{k+1}) != 0" for i, j, k in jac_failures),
            *(f"{{x_{i+1}, casimir_{ci+1}}} != 0" for i, ci in cas.failures),
        ],
    }
