"""The forward/inverse Cremona pair attached to a skew matrix of linear forms.

Index conventions, fixed once here.  The matrix couples two n-dimensional
spaces A and B through one coefficient tensor c[i][j][k], skew in (i, j):

 * x-view: the skew n x n matrix over A-indices whose (i, j) entry is the
   linear form sum_k c[i][j][k] x_k in the coordinates x on B*.  Its signed
   submaximal pfaffians are the forward map p (degree (n-1)/2 forms in x).

 * y-view: the n x n matrix nu with rows indexed by B and columns by A,
   entry (k, j) = sum_i c[i][j][k] y_i, linear in the coordinates y on A.
   It is the family of linear maps a |-> (pairing of a against each column),
   and is generally not skew.

The inverse map f comes out of the y-view: restrict nu to the columns
complementary to a chosen coordinate xi, take the n maximal minors with
alternating signs, divide each by xi exactly, and read off n forms of
degree n-2 in y.  The quotient tuple does not depend on the choice of xi
except for one overall scalar, which is checked, as is the identity
f . nu = 0 in every component.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import modmat
from .field import PrimeField
from .pfaffian import sub_pfaffians
from .poly import MultiPoly, NonDivisibleError, PolyMap
from .skewsolve import SkewPolyMatrix


class CremonaError(Exception):
    pass


class KleinTensor:
    """Coefficient tensor of a skew matrix of linear forms, with both views."""

    __slots__ = ("field", "n", "coeffs")

    def __init__(self, field: PrimeField, n: int, coeffs: dict):
        # coeffs: (i, j, k) -> residue, for 0 <= i < j < n, 0 <= k < n
        self.field = field
        self.n = n
        self.coeffs = {}
        for (i, j, k), c in coeffs.items():
            if not (0 <= i < j < n and 0 <= k < n):
                raise ValueError(f"bad tensor index {(i, j, k)}")
            c = int(c) % field.p
            if c:
                self.coeffs[(i, j, k)] = c

    @classmethod
    def from_skew_matrix(cls, M: SkewPolyMatrix):
        field = M.field
        coeffs = {}
        for (i, j), f in M.upper.items():
            if f.degree() != 1:
                raise ValueError("Klein tensor needs linear entries")
            for e, c in f.terms.items():
                coeffs[(i, j, e.index(1))] = c
        return cls(field, M.n, coeffs)

    def x_view(self) -> SkewPolyMatrix:
        upper = {}
        bucket = {}
        for (i, j, k), c in self.coeffs.items():
            bucket.setdefault((i, j), {})[_unit(self.n, k)] = c
        for ij, terms in bucket.items():
            upper[ij] = MultiPoly(self.field, self.n, terms, _clean=True)
        return SkewPolyMatrix(self.n, 1, upper)

    def y_matrix(self):
        """The y-view as a dense n x n list of linear MultiPoly in y."""
        n = self.n
        rows = [[MultiPoly.zero(self.field, n) for _ in range(n)] for _ in range(n)]
        for (i, j, k), c in self.coeffs.items():
            rows[k][j] = rows[k][j] + MultiPoly.monomial(self.field, n, _unit(n, i), c)
            rows[k][i] = rows[k][i] + MultiPoly.monomial(self.field, n, _unit(n, j), self.field.p - c)
        return rows

    def y_matrix_at(self, a):
        """Numeric y-view at a point a of A: entry (k, j) = nu(a)[k][j]."""
        n = self.n
        p = self.field.p
        out = [[0] * n for _ in range(n)]
        for (i, j, k), c in self.coeffs.items():
            out[k][j] = (out[k][j] + c * a[i]) % p
            out[k][i] = (out[k][i] - c * a[j]) % p
        return out


def _unit(n, k):
    e = [0] * n
    e[k] = 1
    return tuple(e)


def _minor_vector(rows_mat, n, xi_index, field):
    """Signed maximal minors of the y-view restricted away from column xi."""
    cols = tuple(j for j in range(n) if j != xi_index)
    memo = {}

    def det(rows):
        if not rows:
            return MultiPoly.constant(field, n, 1)
        cached = memo.get(rows)
        if cached is not None:
            return cached
        ci = cols[len(cols) - len(rows)]
        acc = MultiPoly.zero(field, n)
        for t, ri in enumerate(rows):
            entry = rows_mat[ri][ci]
            if entry.is_zero():
                continue
            term = entry * det(rows[:t] + rows[t + 1 :])
            acc = acc + term if t % 2 == 0 else acc - term
        memo[rows] = acc
        return acc

    out = []
    for k in range(n):
        mk = det(tuple(r for r in range(n) if r != k))
        out.append(mk if k % 2 == 0 else -mk)
    return out


def sigma(phi: KleinTensor) -> PolyMap:
    """The degree-(n-2) inverse tuple extracted from the y-view minors.

    Uses xi = the last y-coordinate, cross-checks against xi = the first
    one (the results must agree up to a single scalar), and verifies the
    annihilation identity f . nu = 0 in all components.  Any failure means
    the tensor is degenerate and aborts.
    """
    n = phi.n
    if n < 3:
        raise ValueError("need n >= 3")
    field = phi.field
    rows_mat = phi.y_matrix()

    def quotients(xi_index):
        minors = _minor_vector(rows_mat, n, xi_index, field)
        xi = MultiPoly.variable(field, n, xi_index)
        try:
            return [m.exact_divide(xi) if not m.is_zero() else m for m in minors]
        except NonDivisibleError as exc:
            raise CremonaError(f"minor not divisible by coordinate {xi_index}: {exc}") from exc

    f_last = quotients(n - 1)
    f_first = quotients(0)
    scalar = None
    for a, b in zip(f_last, f_first):
        if a.is_zero() and b.is_zero():
            continue
        if a.is_zero() != b.is_zero():
            raise CremonaError("inverse-map cross-check failed: support mismatch")
        ea, ca = a.leading_term()
        lam = field.div(b.terms.get(ea, 0), ca)
        if scalar is None:
            scalar = lam
        if lam != scalar or b != a.scale(scalar):
            raise CremonaError("inverse-map cross-check failed: not a single scalar")
    if scalar is None:
        raise CremonaError("inverse map is identically zero")
    # annihilation identity: the composite with every y-view column vanishes
    for j in range(n):
        acc = MultiPoly.zero(field, n)
        for k in range(n):
            if not f_last[k].is_zero() and not rows_mat[k][j].is_zero():
                acc = acc + f_last[k] * rows_mat[k][j]
        if not acc.is_zero():
            raise CremonaError(f"annihilation identity failed in component {j}")
    return PolyMap(f_last).normalized()


def forward_map(phi: KleinTensor, reference: PolyMap) -> PolyMap:
    """Signed submaximal pfaffians of the x-view, as a map of degree (n-1)/2.

    The span of the components must match the span of the reference
    generators exactly (identical reduced echelon coefficient matrices);
    the two bases may differ, the subspace may not.
    """
    spf = sub_pfaffians(phi.x_view()).as_map().normalized()
    field = phi.field
    d = spf.degree
    if reference.degree != d:
        raise CremonaError(f"reference degree {reference.degree} != pfaffian degree {d}")
    ours = modmat.as_matrix([f.coefficient_vector(d) for f in spf], field)
    theirs = modmat.as_matrix([f.coefficient_vector(d) for f in reference], field)
    e1, _, r1 = modmat.rref(ours, field)
    e2, _, r2 = modmat.rref(theirs, field)
    if r1 != r2 or (e1[:r1] != e2[:r2]).any():
        raise CremonaError("pfaffian span differs from the interpolated generators")
    return spf


@dataclass
class CompositionResult:
    factor: MultiPoly
    reverse_factor: MultiPoly
    factor_degree: int
    factor_matches: dict = dc_field(default_factory=dict)

    def record_comparison(self, name: str, other: MultiPoly):
        """Record (not assert) whether the factor is a scalar multiple of other."""
        c = self.factor
        if c.is_zero() or other.is_zero() or c.degree() != other.degree():
            self.factor_matches[name] = None
            return None
        e, lead = other.leading_term()
        lam = c.field.div(c.terms.get(e, 0), lead)
        ok = c == other.scale(lam)
        self.factor_matches[name] = str(lam) if ok else None
        return self.factor_matches[name]


def composition_check(p_map: PolyMap, f_map: PolyMap) -> CompositionResult:
    """Verify f(p(x)) = c(x) * (x_1, ..., x_n) and the reverse, return the factors.

    Both compositions must be exact scalar-function multiples of the
    identity; the common factor c is homogeneous of degree
    deg(p) * deg(f) - 1 and is returned for inspection.
    """
    c_fwd = _identity_factor(f_map, p_map)
    c_rev = _identity_factor(p_map, f_map)
    expected = p_map.degree * f_map.degree - 1
    if c_fwd.degree() != expected or c_rev.degree() != expected:
        raise CremonaError(
            f"composition factor degree {c_fwd.degree()}/{c_rev.degree()} != {expected}"
        )
    return CompositionResult(c_fwd, c_rev, expected)


def _identity_factor(outer: PolyMap, inner: PolyMap) -> MultiPoly:
    from .poly import compose_many

    field = outer.field
    n = len(outer)
    comps = compose_many(list(outer), list(inner))
    for i in range(n):
        xi = MultiPoly.variable(field, n, i)
        for j in range(i + 1, n):
            xj = MultiPoly.variable(field, n, j)
            if comps[i] * xj != comps[j] * xi:
                raise CremonaError(f"composition is not proportional to the identity ({i}, {j})")
    i0 = next((i for i in range(n) if not comps[i].is_zero()), None)
    if i0 is None:
        raise CremonaError("composition collapsed to zero")
    c = comps[i0].exact_divide(MultiPoly.variable(field, n, i0))
    for j in range(n):
        if comps[j] != c * MultiPoly.variable(field, n, j):
            raise CremonaError(f"composition component {j} is not c * x_{j+1}")
    if c.is_zero():
        raise CremonaError("composition factor is zero")
    return c


def pointwise_identity_probe(p_map: PolyMap, f_map: PolyMap, rng, trials: int = 20) -> bool:
    """f(p(v)) must be projectively equal to v at random points."""
    field = p_map.field
    n = p_map.nvars
    for _ in range(trials):
        v = [field.rand_elem(rng) for _ in range(n)]
        w = f_map.evaluate(p_map.evaluate(v))
        if not any(w):
            return False
        for i in range(n):
            for j in range(i + 1, n):
                if (v[i] * w[j] - v[j] * w[i]) % field.p:
                    return False
    return True


@dataclass
class RankProfileReport:
    secant_ranks: list
    generic_xi_ranks: list
    generic_a_ranks: list
    inverse_nonzero_at_forward: list
    n: int

    @property
    def ok(self):
        bound = self.n - 3
        return (
            all(r <= bound for r in self.secant_ranks)
            and all(r == self.n - 1 for r in self.generic_xi_ranks)
            and all(r == self.n - 1 for r in self.generic_a_ranks)
            and all(self.inverse_nonzero_at_forward)
        )

    def to_json_dict(self):
        return {
            "secant_ranks": self.secant_ranks,
            "generic_xi_ranks": self.generic_xi_ranks,
            "generic_a_ranks": self.generic_a_ranks,
            "inverse_nonzero_at_forward": self.inverse_nonzero_at_forward,
            "ok": self.ok,
        }


def rank_profile(
    phi: KleinTensor,
    p_map: PolyMap,
    f_map: PolyMap,
    secant_sampler,
    rng,
    samples: int = 20,
) -> RankProfileReport:
    """Rank behaviour of both views at special and generic points.

    At points of the sampled secant variety the x-view drops to rank
    <= n-3; at generic points of either space both views have the maximal
    odd-skew rank n-1, and the inverse tuple is nonzero at forward images.
    """
    field = phi.field
    n = phi.n
    xv = phi.x_view()
    sec_ranks = []
    for _ in range(samples):
        xi = secant_sampler()
        sec_ranks.append(modmat.rank(modmat.as_matrix(xv.evaluate(xi), field), field))
    gen_xi = []
    gen_a = []
    inv_nonzero = []
    for _ in range(samples):
        xi = [field.rand_elem(rng) for _ in range(n)]
        gen_xi.append(modmat.rank(modmat.as_matrix(xv.evaluate(xi), field), field))
        a = [field.rand_elem(rng) for _ in range(n)]
        gen_a.append(modmat.rank(modmat.as_matrix(phi.y_matrix_at(a), field), field))
        b_star = [field.rand_elem(rng) for _ in range(n)]
        fw = p_map.evaluate(b_star)
        inv_nonzero.append(any(f_map.evaluate(fw)))
    return RankProfileReport(sec_ranks, gen_xi, gen_a, inv_nonzero, n)
