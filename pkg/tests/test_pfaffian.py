import pytest

from ellsec import modmat
from ellsec.pfaffian import PfaffianError, pfaffian, sub_pfaffians
from ellsec.poly import MultiPoly, monomials
from ellsec.skewsolve import SkewPolyMatrix


def skew_from_numbers(field, vals, n):
    """Constant skew matrix from the upper-triangle values, row-major."""
    it = iter(vals)
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            upper[(i, j)] = MultiPoly.constant(field, n, next(it))
    return SkewPolyMatrix(n, 0, upper)


def rand_skew_numeric(field, n, rng):
    return skew_from_numbers(field, [field.rand_elem(rng) for _ in range(n * (n - 1) // 2)], n)


def rand_skew_poly(field, n, degree, rng):
    mons = monomials(n, degree)
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            upper[(i, j)] = MultiPoly(
                field, n, {m: field.rand_elem(rng) for m in mons if rng.random() < 0.6}
            )
    return SkewPolyMatrix(n, degree, upper)


def full_matrix(M, field):
    n = M.n
    return [[M.entry(i, j, field=field, nvars=n).evaluate([0] * n) for j in range(n)] for i in range(n)]


def test_two_by_two(field):
    a = MultiPoly.variable(field, 2, 0)
    M = SkewPolyMatrix(2, 1, {(0, 1): a})
    assert pfaffian(M) == a


def test_four_by_four_classical_expansion(field):
    # entries m12..m34 as six independent variables
    n = 6
    xs = [MultiPoly.variable(field, n, i) for i in range(n)]
    m12, m13, m14, m23, m24, m34 = xs
    M = SkewPolyMatrix(
        4, 1, {(0, 1): m12, (0, 2): m13, (0, 3): m14, (1, 2): m23, (1, 3): m24, (2, 3): m34}
    )
    assert pfaffian(M) == m12 * m34 - m13 * m24 + m14 * m23


def test_pfaffian_squared_is_determinant(field, rng):
    for n in (2, 4, 6):
        M = rand_skew_numeric(field, n, rng)
        pf = pfaffian(M).evaluate([0] * n)
        d = modmat.det(full_matrix(M, field), field)
        assert field.mul(pf, pf) == d


def test_congruence_covariance(field, rng):
    # Pf(P M P^T) = det(P) Pf(M) on numeric matrices
    for n in (4, 6):
        M = rand_skew_numeric(field, n, rng)
        P = [[field.rand_elem(rng) for _ in range(n)] for _ in range(n)]
        Mf = full_matrix(M, field)
        PM = [[sum(P[i][k] * Mf[k][j] for k in range(n)) % field.p for j in range(n)] for i in range(n)]
        PMPT = [
            [sum(PM[i][k] * P[j][k] for k in range(n)) % field.p for j in range(n)] for i in range(n)
        ]
        vals = []
        it = [PMPT[i][j] for i in range(n) for j in range(i + 1, n)]
        congruent = skew_from_numbers(field, it, n)
        lhs = pfaffian(congruent).evaluate([0] * n)
        rhs = field.mul(modmat.det(P, field), pfaffian(M).evaluate([0] * n))
        assert lhs == rhs


def test_odd_even_size_errors(field, rng):
    with pytest.raises(PfaffianError):
        pfaffian(rand_skew_numeric(field, 3, rng))
    with pytest.raises(PfaffianError):
        sub_pfaffians(rand_skew_numeric(field, 4, rng))


def test_annihilation_identity_numeric(field, rng):
    M = rand_skew_numeric(field, 5, rng)
    v = sub_pfaffians(M)
    Mf = full_matrix(M, field)
    vals = [c.evaluate([0] * 5) for c in v]
    for i in range(5):
        assert sum(Mf[i][j] * vals[j] for j in range(5)) % field.p == 0


def test_annihilation_identity_polynomial(field, rng):
    # exact polynomial identity for linear and quadratic entries
    for degree in (1, 2):
        M = rand_skew_poly(field, 5, degree, rng)
        v = sub_pfaffians(M)  # raises internally if M . v != 0
        assert len(v) == 5
        for comp in v:
            assert comp.is_zero() or comp.degree() == 2 * degree


def test_subpfaffian_degree_law(pipeline5):
    run = pipeline5
    spf = sub_pfaffians(run.phi)
    assert all(c.degree() == 2 for c in spf)  # (n-1)/2 * entry degree
    spf_omega = sub_pfaffians(run.omega)
    assert all(c.degree() == 4 for c in spf_omega)


def test_phi_pfaffians_span_the_ideal(pipeline5):
    run = pipeline5
    field = run.field
    spf = sub_pfaffians(run.phi).as_map().normalized()
    ours = modmat.as_matrix([f.coefficient_vector(2) for f in spf], field)
    ref = modmat.as_matrix([f.coefficient_vector(2) for f in run.ideal_map], field)
    r1, _, k1 = modmat.rref(ours, field)
    r2, _, k2 = modmat.rref(ref, field)
    assert k1 == k2 == 5 and (r1 == r2).all()


def test_omega_pfaffians_match_gradient(pipeline5):
    run = pipeline5
    field = run.field
    F = run.secant_eq
    spf = sub_pfaffians(run.omega)
    lams = set()
    for i in range(5):
        dF = F.partial_derivative(i)
        e, c = dF.leading_term()
        lam = field.div(spf[i].terms.get(e, 0), c)
        assert spf[i] == dF.scale(lam)
        lams.add(lam)
    assert len(lams) == 1
