import pytest

from ellsec.poly import (
    IntegrabilityError,
    MultiPoly,
    NonDivisibleError,
    PolyMap,
    compose_many,
    euler_integrate,
    monomials,
)


def V(field, n, i):
    return MultiPoly.variable(field, n, i)


def rand_poly(field, nvars, degree, rng, terms=6):
    mons = monomials(nvars, degree)
    picks = rng.sample(range(len(mons)), min(terms, len(mons)))
    return MultiPoly(field, nvars, {mons[i]: rng.randrange(1, field.p) for i in picks})


def rand_any(field, nvars, rng, maxdeg=3):
    out = MultiPoly.zero(field, nvars)
    for d in range(maxdeg + 1):
        if rng.random() < 0.7:
            out = out + rand_poly(field, nvars, d, rng, terms=3)
    return out


def test_monomial_order_explicit():
    assert monomials(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert monomials(3, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    # graded-lex leading term of x1 + x2 is x1
    assert monomials(2, 1)[0] == (1, 0)


def test_product_of_variables(field):
    x1, x2 = V(field, 3, 0), V(field, 3, 1)
    assert (x1 * x2).terms == {(1, 1, 0): 1}


def test_add_negation_cancels(field, rng):
    P = rand_poly(field, 4, 3, rng)
    assert (P + (-P)).is_zero()


def test_square_of_sum(field):
    x1, x2 = V(field, 2, 0), V(field, 2, 1)
    s = x1 + x2
    assert (s * s).terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_ring_axioms_random(field, rng):
    for _ in range(60):
        A = rand_any(field, 3, rng)
        B = rand_any(field, 3, rng)
        C = rand_any(field, 3, rng)
        assert (A + B) + C == A + (B + C)
        assert A + B == B + A
        assert (A * B) * C == A * (B * C)
        assert A * B == B * A
        assert A * (B + C) == A * B + A * C


def test_packed_mul_agrees_with_dict_path(field, rng):
    A = rand_poly(field, 5, 4, rng, terms=40)
    B = rand_poly(field, 5, 5, rng, terms=40)
    packed = A._mul_packed(B)
    direct = MultiPoly.zero(field, 5)
    for e, c in A.terms.items():
        direct = direct + B.scale(c) * MultiPoly.monomial(field, 5, e)
    assert packed == direct


def test_nvars_mismatch_rejected(field):
    with pytest.raises(ValueError):
        V(field, 2, 0) + V(field, 3, 0)


def test_partial_derivative_examples(field):
    x1 = V(field, 2, 0)
    cube = x1 * x1 * x1
    assert cube.partial_derivative(0).terms == {(2, 0): 3}
    assert V(field, 2, 1).partial_derivative(0).is_zero()


def test_euler_identity_random(field, rng):
    for d in (2, 3, 5):
        P = rand_poly(field, 4, d, rng, terms=8)
        acc = MultiPoly.zero(field, 4)
        for i in range(4):
            acc = acc + V(field, 4, i) * P.partial_derivative(i)
        assert acc == P.scale(d)


def test_evaluate_examples(field):
    x1x2 = V(field, 4, 0) * V(field, 4, 1)
    assert x1x2.evaluate([2, 3, 99, 5]) == 6
    assert x1x2.evaluate([0, 0, 0, 0]) == 0


def test_evaluate_homogeneity(field, rng):
    P = rand_poly(field, 3, 4, rng)
    v = [rng.randrange(field.p) for _ in range(3)]
    lam = rng.randrange(1, field.p)
    scaled = P.evaluate([lam * x % field.p for x in v])
    assert scaled == field.mul(pow(lam, 4, field.p), P.evaluate(v))


def test_evaluate_length_mismatch(field):
    with pytest.raises(ValueError):
        V(field, 3, 0).evaluate([1, 2])


def test_exact_divide_monomial(field):
    x1, x2 = V(field, 2, 0), V(field, 2, 1)
    q = (x1 * x1 * x2).exact_divide(x1)
    assert q == x1 * x2
    with pytest.raises(NonDivisibleError):
        (x1 + x2).exact_divide(x1)


def test_exact_divide_roundtrip_random(field, rng):
    for _ in range(100):
        P = rand_poly(field, 3, rng.randrange(1, 4), rng, terms=4)
        D = rand_poly(field, 3, rng.randrange(1, 3), rng, terms=3)
        if D.is_zero():
            continue
        assert (P * D).exact_divide(D) == P


def test_exact_divide_general_non_divisible(field):
    x1, x2 = V(field, 2, 0), V(field, 2, 1)
    with pytest.raises(NonDivisibleError):
        (x1 * x1 + x2 * x2).exact_divide(x1 + x2)
    assert (x1 * x1 - x2 * x2).exact_divide(x1 + x2) == x1 - x2


def test_divide_by_zero(field):
    with pytest.raises(ZeroDivisionError):
        V(field, 2, 0).exact_divide(MultiPoly.zero(field, 2))


def test_compose_projection_and_swap(field):
    n = 3
    maps = [V(field, n, 1), V(field, n, 0), V(field, n, 2)]
    x1, x2 = V(field, n, 0), V(field, n, 1)
    assert x1.compose(maps) == V(field, n, 1)
    assert (x1 + x2).compose(maps) == x1 + x2


def test_compose_evaluation_consistency(field, rng):
    n = 3
    P = rand_poly(field, n, 3, rng)
    maps = [rand_poly(field, n, 2, rng) for _ in range(n)]
    comp = P.compose(maps)
    for _ in range(10):
        v = [rng.randrange(field.p) for _ in range(n)]
        assert comp.evaluate(v) == P.evaluate([m.evaluate(v) for m in maps])


def test_compose_many_shares_products(field, rng):
    n = 4
    polys = [rand_poly(field, n, 3, rng) for _ in range(3)]
    maps = [rand_poly(field, n, 2, rng) for _ in range(n)]
    together = compose_many(polys, maps)
    for P, C in zip(polys, together):
        assert C == P.compose(maps)


def test_euler_integrate_example(field):
    g = [V(field, 2, 0).scale(2), V(field, 2, 1).scale(2)]
    F = euler_integrate(g, 2)
    assert F.terms == {(2, 0): 1, (0, 2): 1}


def test_euler_integrate_failure_index(field):
    g = [V(field, 2, 1), MultiPoly.zero(field, 2)]
    with pytest.raises(IntegrabilityError) as err:
        euler_integrate(g, 2)
    assert err.value.index == 0


def test_coefficient_vector_roundtrip(field, rng):
    P = rand_poly(field, 3, 4, rng, terms=7)
    vec = P.coefficient_vector(4)
    assert MultiPoly.from_coefficient_vector(field, 3, 4, vec) == P


def test_json_roundtrip_sorted(field, rng):
    P = rand_poly(field, 3, 3, rng, terms=6)
    blob = P.to_json_dict()
    exps = [tuple(t["exp"]) for t in blob["terms"]]
    assert exps == sorted(exps, key=lambda e: (sum(e), e), reverse=True)
    assert MultiPoly.from_json_dict(blob, field) == P
    assert all(isinstance(t["c"], str) for t in blob["terms"])


def test_polymap_validation(field):
    with pytest.raises(ValueError):
        PolyMap([])
    with pytest.raises(ValueError):
        PolyMap([MultiPoly.zero(field, 2), MultiPoly.zero(field, 2)])
    with pytest.raises(ValueError):
        PolyMap([V(field, 2, 0), V(field, 2, 0) * V(field, 2, 1)])
    inhom = V(field, 2, 0) + V(field, 2, 0) * V(field, 2, 1)
    with pytest.raises(ValueError):
        PolyMap([inhom])


def test_polymap_normalized(field):
    m = PolyMap([V(field, 2, 0).scale(7), V(field, 2, 1).scale(14)])
    norm = m.normalized()
    assert norm[0] == V(field, 2, 0)
    assert norm[1] == V(field, 2, 1).scale(2)


def test_no_common_factor_probe(field, rng):
    n = 4
    clean = PolyMap([V(field, n, i) for i in range(n)])
    assert clean.no_common_factor(rng)
    g = V(field, n, 0) + V(field, n, 1)
    dirty = PolyMap([V(field, n, i) * g for i in range(n)])
    assert not dirty.no_common_factor(rng)
