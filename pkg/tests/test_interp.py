import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import bernoulli_series, random_unimodular
from polyem.errors import GenericityError, InputError
from polyem.exactmath import QQ, RationalFunctions, det, transpose, inverse
from polyem.genfun import MeroFun, canonical_equal, i_of, pullback, s_interior, taylor_at_zero
from polyem.geometry import Cone, Polytope, dual_cone, supporting_cone
from polyem.interp import (
    ComplementMap,
    InterpolatorCache,
    audit_genericity,
    constant_term,
    lambda_,
    morelli_duality_check,
    mu,
    mu_closed_form_2d,
    mu_constant_2d_unimodular,
    nu,
    transport,
)

D = RationalFunctions(["d1", "d2"])
d1, d2 = D.gens
ABC = RationalFunctions(["a", "b", "c"])
a, b, c = ABC.gens

FLAG = ComplementMap.flag([(d1, d2), (D.one, D.zero)], D)
GRAM = ComplementMap.inner_product([[a, b], [b, c]], ABC)
STD = ComplementMap.standard(2)

UNIT = [Cone((0, 0), [(1, 0), (0, 1)]), Cone((1, 0), [(-1, 1), (-1, 0)]), Cone((0, 1), [(0, -1), (1, -1)])]
SECOND = [Cone((0, 0), [(1, 0), (0, 1)]), Cone((2, 0), [(-1, 0), (-2, 1)]), Cone((0, 1), [(0, -1), (2, -1)])]


def constants(cmap, cones):
    cache = InterpolatorCache()
    return [constant_term(cmap, K, "mu", cache) for K in cones]


# --------------------------------------------------------------------------
# complement maps


def test_complements():
    assert STD.complement([(1, 0)]) == [(0, 1)]
    assert FLAG.complement([(0, 1)]) == [(d1, d2)]
    numeric = ComplementMap.flag([(1, 1), (1, 0)])
    assert numeric.complement([(1, -1)]) == [(1, 1)]
    with pytest.raises(GenericityError):
        numeric.complement([(1, 1)])


def test_invalid_maps():
    with pytest.raises(InputError):
        ComplementMap.inner_product([[1, 2], [2, 1]])
    with pytest.raises(InputError):
        ComplementMap.inner_product([[1, 0], [1, 1]])
    with pytest.raises(InputError):
        ComplementMap.flag([(1, 1), (2, 2)])


def test_genericity_audit_names_the_face():
    bad = ComplementMap.flag([(1, 1), (1, 0)])
    with pytest.raises(GenericityError):
        audit_genericity(bad, Polytope([(0, 0), (1, 1), (2, 0)]))


def test_dual_of_inner_product_inverts_the_gram_matrix():
    Q = ComplementMap.inner_product([[2, 1], [1, 3]])
    assert Q.dual().data == tuple(tuple(r) for r in inverse([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]))


# --------------------------------------------------------------------------
# golden constants


def test_flag_constants_of_the_unit_triangle():
    k0, k1, k2 = constants(FLAG, UNIT)
    assert k0 == (d1**2 + d2**2 + 3 * d1 * d2) / (12 * d1 * d2)
    assert k1 == (5 * d1**2 - 5 * d1 * d2 + d2**2) / (12 * d1 * (d1 - d2))
    assert k2 == (5 * d2**2 - 5 * d1 * d2 + d1**2) / (12 * d2 * (d2 - d1))
    assert k0 + k1 + k2 == D.one


def test_inner_product_constants_of_the_unit_triangle():
    k0, k1, k2 = constants(GRAM, UNIT)
    assert k0 == (3 * a * c - a * b - b * c) / (12 * a * c)
    assert k1 == (a * b + 4 * a * c + 10 * b * c + 2 * b**2 + 5 * c**2) / (12 * (a * c + 2 * b * c + c**2))
    assert k2 == (5 * a**2 + 2 * b**2 + 10 * a * b + 4 * a * c + b * c) / (12 * (a**2 + 2 * a * b + a * c))
    assert k0 + k1 + k2 == ABC.one
    assert constants(STD, UNIT) == [Fraction(1, 4), Fraction(3, 8), Fraction(3, 8)]


def test_flag_constants_of_the_second_triangle():
    k0, k1, k2 = constants(FLAG, SECOND)
    assert k0 == (d1**2 + 3 * d1 * d2 + d2**2) / (12 * d1 * d2)
    assert k1 == (11 * d1**2 - 7 * d1 * d2 + d2**2) / (12 * d1 * (2 * d1 - d2))
    assert k2 == (d1**2 - 4 * d1 * d2 + 2 * d2**2) / (-6 * d2 * (2 * d1 - d2))


def test_inner_product_constants_of_the_second_triangle():
    _, k1, k2 = constants(GRAM, SECOND)
    assert k1 == (a * b + 5 * a * c + 4 * b**2 + 25 * b * c + 22 * c**2) / (12 * (a * c + 4 * b * c + 4 * c**2))
    assert k2 == (2 * a**2 + 8 * a * b + 7 * a * c + 2 * b**2 + 2 * b * c) / (6 * (a**2 + 4 * a * b + 4 * a * c))
    assert constants(STD, SECOND) == [Fraction(1, 4), Fraction(9, 20), Fraction(3, 10)]


def test_unimodular_constant_formula():
    rng = random.Random(5)
    for _ in range(10):
        G = random_unimodular(2, rng)
        K = Cone((0, 0), [tuple(row[j] for row in G) for j in range(2)])
        x, y, z = (Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(3))
        if x * z <= y * y:
            continue
        Q = ComplementMap.inner_product([[x, y], [y, z]])
        assert constant_term(Q, K) == mu_constant_2d_unimodular(Q, K)


# --------------------------------------------------------------------------
# low-dimensional cones


def test_point_and_ray():
    assert canonical_equal(mu(STD, Cone((0, 0), [])), MeroFun.constant(1, 2))
    assert canonical_equal(mu(STD, Cone((0, 0), [(1, 2)])), MeroFun.bernoulli((1, 2)))
    assert canonical_equal(lambda_(STD, Cone((0, 0), [])), MeroFun.constant(1, 2))
    assert canonical_equal(nu(STD, Cone((0, 0), [])), MeroFun.constant(1, 2))
    assert canonical_equal(nu(STD, Cone((0, 0), [(1, 2)])), MeroFun.bernoulli((-1, -2)))
    series = taylor_at_zero(nu(ComplementMap.standard(1), Cone((0,), [(1,)])), 4)
    assert [series.coefficient((k,)) for k in range(5)] == [(-1) ** k * x for k, x in enumerate(bernoulli_series(4))]


@pytest.mark.parametrize("cmap", [STD, FLAG, GRAM], ids=["standard", "flag", "gram"])
def test_closed_forms_agree_with_the_recursion(cmap):
    cones = UNIT + [Cone((0, 0), [(1, 0)], [(0, 1)]), Cone((0, 0), [(1, 1)])]
    for K in cones:
        assert canonical_equal(mu_closed_form_2d(cmap, K), mu(cmap, K))


def test_nu_of_a_unimodular_cone_reproduces_the_interior_sum():
    P = Polytope([(0, 0), (1, 0), (0, 1)])
    for cmap in (STD, FLAG):
        total = MeroFun.zero(2, cmap.field)
        for face in P.faces:
            total = total + nu(cmap, supporting_cone(P, face)) * s_interior(P.face_polytope(face), cmap.field)
        assert canonical_equal(total, i_of(P, cmap.field))


def test_subdivision_additivity():
    K2, C1, C2 = SECOND[2], Cone((0, 1), [(0, -1), (1, -1)]), Cone((0, 1), [(1, -1), (2, -1)])
    rho = Cone((0, 1), [(1, -1)])
    for cmap in (STD, FLAG):
        assert canonical_equal(mu(cmap, K2), mu(cmap, C1) + mu(cmap, C2) - mu(cmap, rho))
        # lambda only sees the full-dimensional pieces
        assert canonical_equal(lambda_(cmap, K2), lambda_(cmap, C1) + lambda_(cmap, C2))


def test_cache_reuses_results():
    cache = InterpolatorCache()
    first = mu(STD, SECOND[1], cache)
    size = len(cache)
    again = mu(STD, Cone((5, 5), [(-1, 0), (-2, 1)]), cache)
    assert len(cache) == size and canonical_equal(first, again)


def test_lambda_refuses_non_lattice_cones():
    with pytest.raises(InputError):
        lambda_(STD, Cone((Fraction(1, 2), 0), [(1, 0)], ()))


# --------------------------------------------------------------------------
# properties

vec = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
pd = st.tuples(st.integers(1, 6), st.integers(-3, 3), st.integers(1, 6)).filter(lambda t: t[0] * t[2] > t[1] ** 2)


@given(vec, vec, pd)
def test_morelli_duality(u, v, q):
    assume(det([list(u), list(v)]) != 0)
    x, y, z = q
    cmap = ComplementMap.inner_product([[x, y], [y, z]])
    lhs, rhs, ok = morelli_duality_check(cmap, Cone((0, 0), [u, v]))
    assert ok, (lhs, rhs)


@given(vec, vec)
def test_morelli_duality_symbolic_flag(u, v):
    assume(det([list(u), list(v)]) != 0)
    lhs, rhs, ok = morelli_duality_check(FLAG, Cone((0, 0), [u, v]))
    assert ok


@given(vec, vec, vec)
def test_lattice_invariance(u, v, shift):
    assume(det([list(u), list(v)]) != 0)
    K = Cone((0, 0), [u, v])
    moved = Cone(shift, [u, v])
    for cmap in (STD, FLAG):
        assert canonical_equal(mu(cmap, moved), mu(cmap, K))


@given(vec, vec, st.integers(0, 10**6))
def test_isometry_equivariance(u, v, seed):
    assume(det([list(u), list(v)]) != 0)
    G = random_unimodular(2, random.Random(seed))
    act = lambda w: tuple(sum(G[i][j] * w[j] for j in range(2)) for i in range(2))
    K, gK = Cone((0, 0), [u, v]), Cone((0, 0), [act(u), act(v)])
    back = transpose(inverse([[Fraction(x) for x in row] for row in G]))
    for cmap in (STD, FLAG):
        assert canonical_equal(pullback(mu(transport(cmap, G), gK), back), mu(cmap, K))


@settings(max_examples=15)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)), min_size=3, max_size=4))
def test_regularity_in_dimension_three(gens):
    K = Cone((0, 0, 0), gens)
    assume(K.dim == 3 and K.is_pointed)
    cmap = ComplementMap.inner_product([[2, 1, 0], [1, 2, 0], [0, 0, 3]])
    for f in (mu(cmap, K), lambda_(cmap, K), nu(cmap, K)):
        taylor_at_zero(f, 1)
