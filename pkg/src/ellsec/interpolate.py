"""Spaces of forms vanishing on sampled subvarieties.

A vanishing space is the nullspace of a point-evaluation matrix: rows are
samples, columns the degree-d monomials.  Each space is recomputed against
a fresh, independent sample batch and intersected until its dimension
stops moving, which guards against an under-sampled or broken sampler.
Bases are kept in reduced row echelon form under the graded-lex monomial
order so that reruns (any seed, any batch) give the identical artifact.
"""

from __future__ import annotations

import numpy as np

from . import modmat
from .curve import Curve, make_sampler
from .field import PrimeField
from .poly import MultiPoly, PolyMap, monomials


class InterpolationError(Exception):
    pass


class DimensionError(InterpolationError):
    def __init__(self, what, expected, found):
        self.expected = expected
        self.found = found
        super().__init__(
            f"{what}: expected dimension {expected}, found {found}; "
            "rerun with a fresh seed or a different prime"
        )


class VanishingSpace:
    """Canonical basis of the degree-d forms vanishing on a point source."""

    __slots__ = ("degree", "basis", "sample_count", "stabilized")

    def __init__(self, degree, basis, sample_count, stabilized):
        self.degree = degree
        self.basis = list(basis)
        self.sample_count = sample_count
        self.stabilized = stabilized
        for f in self.basis:
            if not f.is_homogeneous() or (not f.is_zero() and f.degree() != degree):
                raise ValueError("basis element of wrong degree")

    @property
    def dim(self):
        return len(self.basis)

    def to_json_dict(self):
        return {
            "degree": self.degree,
            "dim": self.dim,
            "basis": [f.to_json_dict() for f in self.basis],
            "samples": self.sample_count,
            "stabilized": self.stabilized,
        }

    @classmethod
    def from_json_dict(cls, data, field):
        basis = [MultiPoly.from_json_dict(d, field) for d in data["basis"]]
        return cls(data["degree"], basis, data["samples"], data["stabilized"])


def evaluation_matrix(field: PrimeField, points: np.ndarray, degree: int) -> np.ndarray:
    """Rows: points; columns: degree-d monomial values, in canonical order."""
    pts = np.asarray(points, dtype=np.uint64)
    m, nvars = pts.shape
    mons = monomials(nvars, degree)
    # tables of v_i^e for e <= degree
    powers = []
    for i in range(nvars):
        col = pts[:, i]
        tab = [np.ones(m, dtype=np.uint64)]
        for _ in range(degree):
            tab.append(modmat.vec_mulmod(tab[-1], col, field))
        powers.append(tab)
    out = np.empty((m, len(mons)), dtype=np.uint64)
    for j, e in enumerate(mons):
        col = None
        for i, k in enumerate(e):
            if k:
                col = powers[i][k] if col is None else modmat.vec_mulmod(col, powers[i][k], field)
        out[:, j] = col if col is not None else 1
    return out


def _sample_batch(sampler, count, nvars):
    pts = np.empty((count, nvars), dtype=np.uint64)
    for i in range(count):
        v = sampler()
        if len(v) != nvars:
            raise InterpolationError("sampler returned a vector of wrong length")
        pts[i] = v
    return pts


def vanishing_forms(
    field: PrimeField,
    nvars: int,
    degree: int,
    sampler,
    margin: int = 25,
    max_rounds: int = 5,
) -> VanishingSpace:
    """Nullspace of the evaluation matrix, stabilized over fresh batches.

    Each round draws #monomials + margin fresh samples.  Round one solves
    the nullspace outright; later rounds intersect the current space with
    the vanishing condition on the new batch, which only needs the small
    system basis-values-at-new-points.  Stabilized means a round left the
    dimension unchanged.
    """
    if margin < 1:
        raise ValueError("margin must be >= 1")
    mons = monomials(nvars, degree)
    batch = len(mons) + margin
    pts = _sample_batch(sampler, batch, nvars)
    basis = modmat.nullspace(evaluation_matrix(field, pts, degree), field)
    total = batch
    stabilized = False
    for _ in range(max_rounds - 1):
        if basis.shape[0] == 0:
            stabilized = True  # the zero space cannot shrink further
            break
        pts = _sample_batch(sampler, batch, nvars)
        total += batch
        values = modmat.matmul(evaluation_matrix(field, pts, degree), basis.T.copy(), field)
        combos = modmat.nullspace(values, field)
        if combos.shape[0] == basis.shape[0]:
            stabilized = True
            break
        basis = modmat.matmul(combos, basis, field)
        basis, _, _ = modmat.rref(basis, field, copy=False)
    if not stabilized:
        raise InterpolationError(
            f"vanishing space of degree {degree} did not stabilize in {max_rounds} rounds"
        )
    polys = [
        MultiPoly.from_coefficient_vector(field, nvars, degree, [int(x) for x in row])
        for row in basis
    ]
    return VanishingSpace(degree, polys, total, stabilized)


def secant_ideal_generators(curve: Curve, n: int, rng, margin: int = 25):
    """The n degree-r forms cutting out the span-of-(r-1)-points variety, odd n.

    r = (n-1)/2.  Returns (PolyMap of the canonical echelon basis, the
    VanishingSpace).  Any dimension other than n aborts.
    """
    if n % 2 == 0 or n < 5:
        raise ValueError("odd n >= 5 required")
    r = (n - 1) // 2
    space = vanishing_forms(curve.field, n, r, make_sampler(curve, r - 1, n, rng), margin)
    if space.dim != n:
        raise DimensionError(f"degree-{r} ideal slice", n, space.dim)
    return PolyMap(space.basis), space


def secant_hypersurface(curve: Curve, n: int, rng, margin: int = 25):
    """The degree-n equation of the span-of-r-points hypersurface, odd n."""
    if n % 2 == 0 or n < 5:
        raise ValueError("odd n >= 5 required")
    r = (n - 1) // 2
    space = vanishing_forms(curve.field, n, n, make_sampler(curve, r, n, rng), margin)
    if space.dim != 1:
        raise DimensionError("secant hypersurface equation", 1, space.dim)
    return space.basis[0], space


def secant_ci_pair(curve: Curve, n: int, rng, margin: int = 25):
    """The two degree-(r+1) equations of the codimension-2 secant variety, even n."""
    if n % 2 == 1 or n < 6:
        raise ValueError("even n >= 6 required")
    r = (n - 2) // 2
    space = vanishing_forms(curve.field, n, r + 1, make_sampler(curve, r, n, rng), margin)
    if space.dim != 2:
        raise DimensionError("complete-intersection pair", 2, space.dim)
    return (space.basis[0], space.basis[1]), space
