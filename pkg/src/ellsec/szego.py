"""Independent recomputation of the bracket from the curve's pair kernel.

On the short-Weierstrass model with the differential dx/2y, the unique
antisymmetric kernel with residue 1 on the diagonal is the rational
function S(Q1, Q2) = (y1 + y2)/(x2 - x1).  For a functional phi on the
degree-n function space and s1, s2 in ker(phi), the product

    T(Q1, Q2) = S(Q1, Q2) * (s1(Q1) s2(Q2) - s2(Q1) s1(Q2))

has pole order at most n+1 at O in each slot, so it expands over the
(n+1)-dimensional pole-order basis in each factor.  Pairing any extension
of phi against both slots of T gives the bracket value of (s1, s2) at phi;
the result must not depend on the extension, and must agree with the
matrix route up to one global scalar across all inputs.  That scalar is
the content of `compare_brackets`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modmat
from .curve import Curve, CurveError, combine, rr_basis
from .skewsolve import SkewPolyMatrix


class SzegoError(Exception):
    pass


class Functional:
    """Point of the dual space, stored with first nonzero coordinate 1."""

    __slots__ = ("coords",)

    def __init__(self, coords, field):
        coords = [c % field.p for c in coords]
        lead = next((c for c in coords if c), None)
        if lead is None:
            raise ValueError("zero functional")
        inv = field.inv(lead)
        self.coords = [c * inv % field.p for c in coords]

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)


def szego_value(curve: Curve, Q1, Q2) -> int:
    """(y1 + y2)/(x2 - x1); rejects x1 = x2 where the formula degenerates."""
    if Q1.is_infinity or Q2.is_infinity:
        raise CurveError("kernel values need affine points")
    f = curve.field
    if Q1.x == Q2.x:
        raise SzegoError("x1 = x2 is outside the kernel formula's domain")
    return f.div(f.add(Q1.y, Q2.y), f.sub(Q2.x, Q1.x))


def _distinct_x_pair(curve: Curve, rng):
    while True:
        Q1 = curve.random_point(rng)
        Q2 = curve.random_point(rng)
        if Q1.x != Q2.x:
            return Q1, Q2


def expand_product(curve: Curve, n: int, s1_coords, s2_coords, rng, margin: int = 25):
    """Coefficients t[a][b] of T over the (n+1)-basis in each slot.

    Solved from evaluations at (n+1)^2 + margin random point pairs with
    distinct x; the overdetermined solve doubles as the structural check
    that T really lives in the expected space.  Returns an
    (n+1) x (n+1) numpy array.
    """
    field = curve.field
    basis = rr_basis(field, n + 1)
    s1 = combine(field, s1_coords, basis[:n])
    s2 = combine(field, s2_coords, basis[:n])
    nb = n + 1
    count = nb * nb + margin
    rows = np.empty((count, nb * nb), dtype=np.uint64)
    rhs = np.empty(count, dtype=np.uint64)
    p = field.p
    for r in range(count):
        Q1, Q2 = _distinct_x_pair(curve, rng)
        e1 = [g.evaluate(Q1) for g in basis]
        e2 = [g.evaluate(Q2) for g in basis]
        rows[r] = [e1[a] * e2[b] % p for a in range(nb) for b in range(nb)]
        anti = (s1.evaluate(Q1) * s2.evaluate(Q2) - s2.evaluate(Q1) * s1.evaluate(Q2)) % p
        rhs[r] = szego_value(curve, Q1, Q2) * anti % p
    try:
        t = modmat.solve_unique(rows, rhs, field)
    except modmat.LinearAlgebraError as exc:
        raise SzegoError(f"pair-kernel product fell outside the basis space: {exc}") from exc
    return t.reshape(nb, nb)


def pi_phi(curve: Curve, n: int, phi: Functional, s1_coords, s2_coords, rng, margin: int = 25) -> int:
    """Bracket value of (s1, s2) at phi via the pair kernel.

    phi is extended to the enlarged basis by 0 and, independently, by 1;
    the two pairings must agree (they do exactly when s1, s2 lie in
    ker(phi)), and that agreement is enforced here.
    """
    field = curve.field
    p = field.p
    if sum(c * v for c, v in zip(s1_coords, phi)) % p or sum(
        c * v for c, v in zip(s2_coords, phi)
    ) % p:
        raise SzegoError("sections must lie in the kernel of phi")
    t = expand_product(curve, n, s1_coords, s2_coords, rng, margin)
    vals = []
    for ext in (0, 1):
        pe = list(phi) + [ext]
        acc = 0
        for a in range(n + 1):
            if not pe[a]:
                continue
            for b in range(n + 1):
                c = int(t[a, b])
                if c and pe[b]:
                    acc = (acc + c * pe[a] % p * pe[b]) % p
        vals.append(acc)
    if vals[0] != vals[1]:
        raise SzegoError("pairing depended on the choice of extension")
    return vals[0]


def kernel_vector(phi: Functional, field, rng):
    """Random coefficient vector of a section in ker(phi)."""
    n = len(phi)
    pivot = next(i for i in range(n) if phi[i])
    while True:
        c = [field.rand_elem(rng) for _ in range(n)]
        c[pivot] = 0
        s = sum(ci * vi for ci, vi in zip(c, phi)) % field.p
        c[pivot] = field.neg(s) * field.inv(phi[pivot]) % field.p
        if any(c):
            return c


@dataclass
class SzegoReport:
    ratio: int
    trials: int
    used: int
    passed: bool

    def to_json_dict(self):
        return {"ratio": str(self.ratio), "trials": self.trials, "pass": self.passed}


def compare_brackets(
    curve: Curve,
    omega: SkewPolyMatrix,
    n: int,
    rng,
    trials: int = 25,
    margin: int = 25,
) -> SzegoReport:
    """Matrix bracket vs kernel bracket at random (phi, s1, s2): one ratio.

    For each trial, v1 = sum c1_i c2_j Omega_ij(phi) and v2 = the kernel
    pairing; trials with v2 = 0 are excluded from the ratio set.  The run
    passes iff all surviving ratios coincide.
    """
    field = curve.field
    p = field.p
    ratios = set()
    used = 0
    for _ in range(trials):
        phi = Functional([field.rand_elem(rng) for _ in range(n)], field)
        c1 = kernel_vector(phi, field, rng)
        c2 = kernel_vector(phi, field, rng)
        v2 = pi_phi(curve, n, phi, c1, c2, rng, margin)
        if v2 == 0:
            continue
        v1 = 0
        point = list(phi)
        for i in range(n):
            for j in range(i + 1, n):
                w = omega.entry(i, j)
                if w.is_zero():
                    continue
                wv = w.evaluate(point)
                v1 = (v1 + wv * (c1[i] * c2[j] - c1[j] * c2[i])) % p
        used += 1
        ratios.add(v1 * field.inv(v2) % p)
    passed = len(ratios) == 1
    ratio = ratios.pop() if passed else -1
    return SzegoReport(ratio, trials, used, passed)
