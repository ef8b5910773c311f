import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import assume, given, strategies as st

from oracles import box_points_bruteforce, in_hull, lattice_points as lattice_points_oracle, pick_count
from polyem.errors import InputError, SizeGuardError
from polyem.exactmath import det, rank
from polyem.geometry import (
    Cone,
    HalfOpenSimplicialCone,
    Polytope,
    box_points,
    dual_cone,
    halfopen_decompose,
    supporting_cone,
    transverse_cone,
)
from polyem.lattice import LatticeContext, relative_volume

Z2 = LatticeContext.standard(2)
small = st.integers(-4, 4)


def f_vector(P):
    counts = [0] * (P.dim + 1)
    for face in P.faces:
        counts[face.dim] += 1
    return counts


def probe_grid(n, radius=3, step=Fraction(1, 2)):
    ticks = [k * step for k in range(int(-radius / step), int(radius / step) + 1)]
    return product(ticks, repeat=n)


# --------------------------------------------------------------------------
# polytopes


def test_face_lattice_of_triangles():
    assert f_vector(Polytope([(0, 0), (1, 0), (0, 1)])) == [3, 3, 1]
    assert len(Polytope([(0, 0), (2, 0), (0, 1)]).faces) == 7


def test_redundant_points_are_dropped():
    P = Polytope([(0, 0), (2, 0), (1, 0), (0, 2), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert sorted(P.vertices) == [(0, 0), (0, 2), (2, 0)]
    with pytest.raises(InputError):
        Polytope([(0, 0), (0, 0), (1, 1)])


def test_cube_and_lower_dimensional_faces():
    cube = Polytope(list(product((0, 1), repeat=3)))
    assert f_vector(cube) == [8, 12, 6, 1]
    square_in_space = Polytope([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    assert square_in_space.dim == 2 and f_vector(square_in_space) == [4, 4, 1]
    point = Polytope([(3, 1)])
    assert point.dim == 0 and len(point.faces) == 1


@given(st.lists(st.tuples(small, small, small), min_size=4, max_size=4))
def test_random_simplex_combinatorics(points):
    assume(len(set(points)) == 4 and rank([tuple(a - b for a, b in zip(p, points[0])) for p in points[1:]]) == 3)
    P = Polytope(points)
    assert f_vector(P) == [4, 6, 4, 1]


@given(st.lists(st.tuples(small, small, small), min_size=4, max_size=7, unique=True))
def test_euler_relation(points):
    P = Polytope(points)
    assert sum((-1) ** f.dim for f in P.faces) == 1


@given(st.lists(st.tuples(small, small), min_size=3, max_size=6, unique=True))
def test_lattice_points_match_oracles(points):
    P = Polytope(points)
    found = sorted(tuple(int(a) for a in x) for x in P.lattice_points())
    assert found == sorted(lattice_points_oracle(points))
    if P.dim == 2:
        assert len(found) == pick_count(points)


def test_membership_and_relative_interior():
    P = Polytope([(0, 0), (2, 0), (0, 1)])
    assert P.contains((1, Fraction(1, 2))) and not P.contains((2, 1))
    edge = next(f for f in P.faces if f.dim == 1 and set(f.index) == {0, 1})
    assert P.in_relative_interior((1, 0), edge)
    assert not P.in_relative_interior((1, 0))
    assert P.volume() == 1 and P.volume(edge) == 2


def test_size_guard():
    P = Polytope([(0, 0), (100, 0), (0, 100)])
    with pytest.raises(SizeGuardError):
        P.lattice_points(limit=1000)


def test_size_guard_env(monkeypatch):
    monkeypatch.setenv("POLYEM_MAX_ENUM", "10")
    with pytest.raises(SizeGuardError):
        Polytope([(0, 0), (4, 0), (0, 4)]).lattice_points()


# --------------------------------------------------------------------------
# cones


def _vertex_face(P, v):
    i = P.vertices.index(tuple(Fraction(a) for a in v))
    return next(f for f in P.faces if f.dim == 0 and f.index == (i,))


def test_supporting_cones_of_the_triangles():
    P = Polytope([(0, 0), (1, 0), (0, 1)])
    K0 = supporting_cone(P, _vertex_face(P, (0, 0)))
    assert K0.apex == (0, 0) and sorted(K0.rays) == [(0, 1), (1, 0)]
    Q = Polytope([(0, 0), (2, 0), (0, 1)])
    K2 = supporting_cone(Q, _vertex_face(Q, (0, 1)))
    assert K2.apex == (0, 1) and sorted(K2.rays) == [(0, -1), (2, -1)]
    whole = supporting_cone(Q, Q.whole())
    assert not whole.generators and len(whole.lineality) == 2


def test_supporting_cone_of_an_edge_has_the_edge_as_lineality():
    P = Polytope([(0, 0), (2, 0), (0, 1)])
    edge = next(f for f in P.faces if f.dim == 1 and set(f.index) == {0, 1})
    K = supporting_cone(P, edge)
    assert rank(list(K.lineality)) == 1 and rank(list(K.lineality) + [(1, 0)]) == 1
    # the cone is the upper half-plane, whichever relative-interior point is used
    for x in probe_grid(2):
        assert K.contains(x) == (x[1] >= 0)


def test_transverse_cone():
    K = Cone((0, 0), [(1, 0), (0, 1)])
    ray = next(f for f in K.faces if f.dim == 1 and K.face_rays(f) == [(1, 0)])
    q, T = transverse_cone(K, ray)
    assert T.ambient_dim == 1 and T.is_pointed and T.dim == 1
    assert q.project((0, 1)) in ((1,), (-1,)) and list(T.rays) == [q.project((0, 1))]
    K2 = Cone((0, 1), [(0, -1), (2, -1)])
    for f in K2.faces:
        assert transverse_cone(K2, f)[1].is_pointed
    half = Cone((0, 0), [(0, 1)], [(1, 0)])
    q, T = transverse_cone(half, half.whole())
    assert T.dim == 0


def test_dual_cones():
    assert sorted(dual_cone(Cone((0, 0), [(1, 0), (0, 1)])).rays) == [(0, 1), (1, 0)]
    half = dual_cone(Cone((0, 0), [(0, 1)], [(1, 0)]))
    assert list(half.rays) == [(0, 1)] and half.dim == 1


@given(st.tuples(small, small), st.tuples(small, small))
def test_double_dual(u, v):
    assume(det([list(u), list(v)]) != 0)
    K = Cone((0, 0), [u, v])
    DD = dual_cone(dual_cone(K))
    for x in probe_grid(2):
        assert DD.contains(x) == K.contains(x)


def test_nonpointed_cone_detection():
    K = Cone((0, 0), [(1, 0), (-1, 0), (0, 1)])
    assert not K.is_pointed and len(K.lineality) == 1


# --------------------------------------------------------------------------
# half-open decompositions and boxes


def test_simplicial_cone_is_one_closed_piece():
    pieces = halfopen_decompose(Cone((0, 0), [(1, 0), (1, 3)]))
    assert len(pieces) == 1 and not any(pieces[0].open_facets)


def test_singular_cone_split_along_an_inner_ray():
    K2 = Cone((0, 1), [(0, -1), (1, -1), (2, -1)])
    pieces = halfopen_decompose(K2)
    assert len(pieces) == 2
    assert all((1, -1) in p.generators for p in pieces)
    assert sum(any(p.open_facets) for p in pieces) == 1


def _check_cover(K, pieces):
    n = K.ambient_dim
    for p in probe_grid(n, radius=3 if n == 2 else 2):
        x = tuple(a + b for a, b in zip(K.apex, p))
        assert sum(piece.contains(x) for piece in pieces) == int(K.contains(x))


def test_four_ray_cone_decomposition():
    K = Cone((0, 0), [(1, 0), (2, 1), (1, 1), (1, 3)])
    pieces = halfopen_decompose(K)
    assert len(pieces) == 3
    _check_cover(K, pieces)


@given(st.lists(st.tuples(small, small, small), min_size=3, max_size=5, unique=True))
def test_random_3d_decompositions_partition_the_cone(gens):
    assume(all(any(g) for g in gens) and rank(gens) == 3)
    K = Cone((Fraction(1, 3), 0, 0), gens)
    assume(K.is_pointed)
    _check_cover(K, halfopen_decompose(K))


def test_box_point_examples():
    closed = lambda gens: HalfOpenSimplicialCone((0, 0), tuple(gens), (False,) * len(gens), Z2)
    assert box_points(closed([(1, 0), (0, 1)])) == [(0, 0)]
    assert len(box_points(closed([(2, 0), (0, 1)]))) == 2
    assert len(box_points(closed([(0, -1), (1, -2)]))) == 1


@given(
    st.lists(st.tuples(small, small), min_size=2, max_size=2),
    st.tuples(st.fractions(-2, 2, max_denominator=3), st.fractions(-2, 2, max_denominator=3)),
    st.tuples(st.booleans(), st.booleans()),
)
def test_box_points_match_bounding_box_enumeration(gens, apex, opens):
    assume(det([list(g) for g in gens]) != 0)
    piece = HalfOpenSimplicialCone(tuple(apex), tuple(tuple(Fraction(a) for a in g) for g in gens), opens, Z2)
    found = {tuple(int(a) for a in x) for x in box_points(piece)}
    expected = box_points_bruteforce(apex, gens, {i for i, o in enumerate(opens) if o})
    assert found == expected


@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=3))
def test_box_size_is_the_relative_volume(gens):
    assume(rank(gens) == len(gens))
    L = LatticeContext.standard(3)
    piece = HalfOpenSimplicialCone((0, 0, 0), tuple(tuple(Fraction(a) for a in g) for g in gens), (False,) * len(gens), L)
    assert len(box_points(piece)) == relative_volume(gens, L)
