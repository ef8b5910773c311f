"""Rational polytopes and polyhedral cones: faces, supporting and transverse cones,
triangulations, half-open decompositions and lattice points of fundamental boxes.

Faces are found by brute force over candidate supporting hyperplanes, which is
plenty for the small objects this package is meant for.  A polytope is handled
through its homogenisation, the cone over {(p, 1)}.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .errors import InputError, SizeGuardError
from .exactmath import (
    dot,
    frac_vector,
    independent_subset,
    inverse,
    is_integral,
    matvec,
    nullspace,
    primitive_integer,
    rank,
    solve,
    span_basis,
    transpose,
    vadd,
    vscale,
    vsub,
)
from .lattice import LatticeContext, QuotientData, adapted_basis, column_hnf, hnf_basis, relative_volume

DEFAULT_MAX_ENUM = 10**6


def max_enum() -> int:
    """Limit on brute-force enumeration sizes (POLYEM_MAX_ENUM overrides the default)."""
    value = os.environ.get("POLYEM_MAX_ENUM")
    if value is None:
        return DEFAULT_MAX_ENUM
    try:
        return int(value)
    except ValueError as exc:
        raise InputError(f"POLYEM_MAX_ENUM must be an integer, got {value!r}") from exc


@dataclass(frozen=True, order=True)
class Face:
    """A face, named by the indices of the vertices (polytopes) or rays (cones) it contains."""

    dim: int
    index: tuple[int, ...]

    def __contains__(self, i) -> bool:
        return i in self.index

    def issubset(self, other: "Face") -> bool:
        return set(self.index) <= set(other.index)


# --------------------------------------------------------------------------
# face lattices of cones given by generators


def _facets(vectors: Sequence[tuple]) -> list[tuple[tuple, frozenset]]:
    """Facets of cone(vectors) as (inward normal, indices of vectors on the facet).

    Works for cones of any dimension, pointed or not.  Normals are taken in
    the span of the vectors (under the standard pairing), which fixes them
    up to scale.
    """
    if not vectors:
        return []
    basis = [vectors[i] for i in independent_subset(vectors)]
    d = len(basis)
    if d == 0:
        return []
    gram = [[dot(b, v) for b in basis] for v in vectors]
    found: dict[frozenset, tuple] = {}
    for combo in combinations(range(len(vectors)), d - 1):
        if any(set(combo) <= t for t in found):
            continue
        ns = nullspace([gram[i] for i in combo], d)
        if len(ns) != 1:
            continue
        c = ns[0]
        vals = [sum((a * b for a, b in zip(c, row)), Fraction(0)) for row in gram]
        if all(x >= 0 for x in vals):
            sign = 1
        elif all(x <= 0 for x in vals):
            sign = -1
        else:
            continue
        tight = frozenset(i for i, x in enumerate(vals) if x == 0)
        if len(tight) == len(vectors) or tight in found:
            continue
        normal = [sum((sign * ck * b[j] for ck, b in zip(c, basis)), Fraction(0)) for j in range(len(basis[0]))]
        found[tight] = frac_vector(primitive_integer(normal))
    return [(n, t) for t, n in found.items()]


def _face_closure(count: int, facet_sets: Iterable[frozenset]) -> set[frozenset]:
    facet_sets = set(facet_sets)
    faces = {frozenset(range(count))} | facet_sets
    new = set(facet_sets)
    while new:
        nxt = set()
        for f in new:
            for g in facet_sets:
                h = f & g
                if h not in faces:
                    nxt.add(h)
        faces |= nxt
        new = nxt
    return faces


class _FaceLattice:
    """Faces with dimensions, plus the cover relation used by triangulations."""

    def __init__(self, faces: Iterable[Face]):
        self.faces = tuple(sorted(faces))
        self.by_index = {f.index: f for f in self.faces}

    def subfacets(self, face: Face) -> list[Face]:
        return [g for g in self.faces if g.dim == face.dim - 1 and g.issubset(face)]

    def cofacets(self, face: Face) -> list[Face]:
        return [g for g in self.faces if g.dim == face.dim + 1 and face.issubset(g)]

    def pulling_triangulation(self, face: Face, base: int = 0) -> list[tuple[int, ...]]:
        """Simplices of a pulling triangulation of ``face``, as index tuples.

        ``base`` is the dimension of a face with a single element (0 for
        polytope vertices, 1 for cone rays).
        """
        if face.dim == base:
            return [face.index]
        if face.dim < base:
            return [()]
        first = face.index[0]
        out = []
        for g in self.subfacets(face):
            if first in g.index:
                continue
            for simplex in self.pulling_triangulation(g, base):
                out.append((first,) + simplex)
        return out


# --------------------------------------------------------------------------
# polytopes


class Polytope:
    """Convex hull of finitely many rational points.

    Redundant points are discarded; ``vertices`` keeps the extreme points in
    input order.  Repeated points are rejected.
    """

    def __init__(self, points: Sequence[Sequence], lattice: LatticeContext | None = None):
        pts = [frac_vector(p) for p in points]
        if not pts:
            raise InputError("a polytope needs at least one point")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise InputError("points have different dimensions")
        if len(set(pts)) != len(pts):
            raise InputError("repeated vertices")
        self.lattice = lattice or LatticeContext.standard(n)
        if self.lattice.dim != n:
            raise InputError("lattice dimension does not match the points")
        self.ambient_dim = n
        homog = [p + (Fraction(1),) for p in pts]
        facets = _facets(homog)
        sets = _face_closure(len(pts), (t for _, t in facets))
        extreme = [i for i in range(len(pts)) if frozenset([i]) in sets]
        if len(extreme) < len(pts):
            pts = [pts[i] for i in extreme]
            homog = [homog[i] for i in extreme]
            facets = _facets(homog)
            sets = _face_closure(len(pts), (t for _, t in facets))
        self.vertices: tuple[tuple[Fraction, ...], ...] = tuple(pts)
        self.dim = rank(homog) - 1
        faces = []
        for s in sets:
            if s:
                faces.append(Face(rank([homog[i] for i in s]) - 1, tuple(sorted(s))))
        self._lattice = _FaceLattice(faces)
        self.inequalities = tuple((normal[:n], normal[n]) for normal, _ in facets)
        self.facet_index = tuple(tuple(sorted(t)) for _, t in facets)
        self.equations = tuple((e[:n], e[n]) for e in nullspace(homog, n + 1))

    def __repr__(self):
        verts = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope([{verts}])"

    @property
    def faces(self) -> tuple[Face, ...]:
        return self._lattice.faces

    def whole(self) -> Face:
        return self._lattice.by_index[tuple(range(len(self.vertices)))]

    def vertex_faces(self) -> list[Face]:
        return [f for f in self.faces if f.dim == 0]

    def face_vertices(self, face: Face) -> list[tuple[Fraction, ...]]:
        return [self.vertices[i] for i in face.index]

    def face_polytope(self, face: Face) -> "Polytope":
        return Polytope(self.face_vertices(face), self.lattice)

    def cofacets(self, face: Face) -> list[Face]:
        return self._lattice.cofacets(face)

    def subfacets(self, face: Face) -> list[Face]:
        return self._lattice.subfacets(face)

    def triangulate(self, face: Face | None = None) -> list[tuple[int, ...]]:
        """Pulling triangulation of a face (default: the whole polytope) into vertex-index simplices."""
        return self._lattice.pulling_triangulation(face or self.whole(), base=0)

    def is_lattice_polytope(self) -> bool:
        return all(self.lattice.contains(v) for v in self.vertices)

    def linear_span(self, face: Face | None = None) -> list[tuple[Fraction, ...]]:
        """Basis of lin(F), the direction space of the affine hull of a face."""
        verts = self.face_vertices(face or self.whole())
        return span_basis([vsub(v, verts[0]) for v in verts[1:]])

    def contains(self, x) -> bool:
        x = frac_vector(x)
        return all(dot(a, x) + b == 0 for a, b in self.equations) and all(
            dot(a, x) + b >= 0 for a, b in self.inequalities
        )

    def in_relative_interior(self, x, face: Face | None = None) -> bool:
        """Whether x lies in the relative interior of a face (default: of the polytope)."""
        face = face or self.whole()
        x = frac_vector(x)
        if not self.contains(x):
            return False
        for (a, b), idx in zip(self.inequalities, self.facet_index):
            value = dot(a, x) + b
            on_facet = set(face.index) <= set(idx)
            if on_facet and value != 0:
                return False
            if not on_facet and value == 0:
                return False
        return True

    def volume(self, face: Face | None = None) -> Fraction:
        """Relative volume of a face, normalised by the lattice in its affine span."""
        face = face or self.whole()
        if face.dim == 0:
            return Fraction(1)
        total = Fraction(0)
        for simplex in self.triangulate(face):
            p0 = self.vertices[simplex[0]]
            edges = [vsub(self.vertices[i], p0) for i in simplex[1:]]
            total += relative_volume(edges, self.lattice) / math.factorial(face.dim)
        return total

    def lattice_points(self, face: Face | None = None, relint: bool = False, limit: int | None = None):
        """Lattice points of a face (or its relative interior), by bounding-box enumeration."""
        face = face or self.whole()
        verts = [self.lattice.to_coords(v) for v in self.face_vertices(face)]
        lo = [math.ceil(min(v[i] for v in verts)) for i in range(self.ambient_dim)]
        hi = [math.floor(max(v[i] for v in verts)) for i in range(self.ambient_dim)]
        size = 1
        for a, b in zip(lo, hi):
            size *= max(0, b - a + 1)
        limit = max_enum() if limit is None else limit
        if size > limit:
            raise SizeGuardError(f"bounding box has {size} points, above the limit {limit}")
        test = (lambda x: self.in_relative_interior(x, face)) if relint else (
            lambda x: self.contains(x) and self._on_face(x, face)
        )
        out = []
        for y in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            x = self.lattice.from_coords(y)
            if test(x):
                out.append(x)
        return out

    def _on_face(self, x, face: Face) -> bool:
        for (a, b), idx in zip(self.inequalities, self.facet_index):
            if set(face.index) <= set(idx) and dot(a, x) + b != 0:
                return False
        return True


# --------------------------------------------------------------------------
# cones


class Cone:
    """A polyhedral cone apex + cone(generators) + span(lineality).

    Generators are normalised to primitive lattice vectors.  ``rays`` are the
    extreme rays of the pointed part (for pointed cones, the extreme
    generators); faces are indexed by positions in ``rays``.  The lineality
    space is recomputed, so a cone whose generators contain a line is
    recognised as non-pointed.
    """

    def __init__(self, apex: Sequence, generators: Sequence[Sequence] = (), lineality: Sequence[Sequence] = (), lattice: LatticeContext | None = None):
        apex = frac_vector(apex)
        n = len(apex)
        self.lattice = lattice or LatticeContext.standard(n)
        if self.lattice.dim != n:
            raise InputError("lattice dimension does not match the apex")
        self.apex = apex
        self.ambient_dim = n
        gens = []
        for g in generators:
            g = frac_vector(g)
            if len(g) != n:
                raise InputError("generator has the wrong dimension")
            if all(a == 0 for a in g):
                continue
            g = self._primitive(g)
            if g not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        lin = [frac_vector(v) for v in lineality if any(a != 0 for a in frac_vector(v))]
        if any(len(v) != n for v in lin):
            raise InputError("lineality vector has the wrong dimension")
        allv = list(gens) + lin + [vscale(-1, v) for v in lin]
        facets = _facets(allv)
        common = frozenset(range(len(allv)))
        for _, t in facets:
            common &= t
        lin_basis = span_basis([allv[i] for i in sorted(common)])
        self.lineality = self._lattice_basis(lin_basis)
        k = len(self.lineality)
        self.dim = rank(allv) if allv else 0
        # one representative generator per extreme ray modulo the lineality space
        rays, seen = [], set()
        for i, g in enumerate(gens):
            if i in common:
                continue
            face = frozenset(range(len(allv)))
            for _, t in facets:
                if i in t:
                    face &= t
            if face in seen or rank([allv[j] for j in face]) != k + 1:
                continue
            seen.add(face)
            rays.append(g)
        self.rays = tuple(rays)
        base = list(self.lineality) + [vscale(-1, v) for v in self.lineality]
        rv = list(self.rays) + base
        facets = _facets(rv)
        m = len(self.rays)
        self.inequalities = tuple(normal for normal, _ in facets)
        self.facet_index = tuple(tuple(sorted(i for i in t if i < m)) for _, t in facets)
        sets = _face_closure(len(rv), (t for _, t in facets))
        faces = []
        for s in sets:
            idx = tuple(sorted(i for i in s if i < m))
            faces.append(Face(rank([rv[i] for i in s]) if s else 0, idx))
        self._lattice = _FaceLattice(set(faces))
        self.equations = tuple(nullspace(rv, n)) if rv else tuple(
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
        )

    def _primitive(self, v):
        return self.lattice.from_coords(primitive_integer(self.lattice.to_coords(v)))

    def _lattice_basis(self, vectors):
        if not vectors:
            return ()
        q = adapted_basis(self.lattice, vectors)
        canon = hnf_basis([tuple(int(c) for c in self.lattice.to_coords(b)) for b in q.sublattice_basis])
        return tuple(self.lattice.from_coords(row) for row in canon)

    def __repr__(self):
        fmt = lambda v: "(" + ", ".join(str(c) for c in v) + ")"
        text = f"Cone(apex={fmt(self.apex)}, rays=[{', '.join(fmt(r) for r in self.rays)}]"
        if self.lineality:
            text += f", lineality=[{', '.join(fmt(v) for v in self.lineality)}]"
        return text + ")"

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def faces(self) -> tuple[Face, ...]:
        return self._lattice.faces

    def whole(self) -> Face:
        return self._lattice.by_index[tuple(range(len(self.rays)))]

    def apex_face(self) -> Face:
        return self.faces[0]

    def key(self):
        """Hashable canonical form: apex, set of rays, lattice basis of the lineality space."""
        return (self.apex, tuple(sorted(self.rays)), self.lineality, self.lattice.basis)

    def lattice_reduced_key(self):
        """Canonical form up to translation by lattice vectors (for pointed cones)."""
        y = self.lattice.to_coords(self.apex)
        frac = tuple(c - math.floor(c) for c in y)
        return (frac, tuple(sorted(self.rays)), self.lineality, self.lattice.basis)

    def face_rays(self, face: Face) -> list[tuple[Fraction, ...]]:
        return [self.rays[i] for i in face.index]

    def face_cone(self, face: Face) -> "Cone":
        return Cone(self.apex, self.face_rays(face), self.lineality, self.lattice)

    def linear_span(self, face: Face | None = None) -> list[tuple[Fraction, ...]]:
        face = face or self.whole()
        return span_basis(self.face_rays(face) + list(self.lineality))

    def cofacets(self, face: Face) -> list[Face]:
        return self._lattice.cofacets(face)

    def subfacets(self, face: Face) -> list[Face]:
        return self._lattice.subfacets(face)

    def contains(self, x) -> bool:
        d = vsub(frac_vector(x), self.apex)
        return all(dot(e, d) == 0 for e in self.equations) and all(dot(a, d) >= 0 for a in self.inequalities)

    def in_relative_interior(self, x) -> bool:
        d = vsub(frac_vector(x), self.apex)
        return all(dot(e, d) == 0 for e in self.equations) and all(dot(a, d) > 0 for a in self.inequalities)

    def is_lattice_cone(self) -> bool:
        """Whether apex + span(lineality) contains a lattice point."""
        if not self.lineality:
            return self.lattice.contains(self.apex)
        q = adapted_basis(self.lattice, self.lineality)
        return is_integral(q.project(self.apex))

    def triangulate(self) -> list[tuple[tuple[Fraction, ...], ...]]:
        """Pulling triangulation of a pointed cone into simplicial cones (tuples of rays)."""
        if not self.is_pointed:
            raise InputError("only pointed cones can be triangulated")
        if self.dim == 0:
            return [()]
        return [tuple(self.rays[i] for i in s) for s in self._lattice.pulling_triangulation(self.whole(), base=1)]


def supporting_cone(polyhedron: "Polytope | Cone", face: Face) -> Cone:
    """Supp(X, F): the cone of feasible directions of X at F, apex at a vertex of F.

    Its lineality space is lin(F).
    """
    if isinstance(polyhedron, Polytope):
        verts = polyhedron.face_vertices(face)
        apex = verts[0]
        lin = [vsub(v, apex) for v in verts[1:]]
        gens = [vsub(v, apex) for i, v in enumerate(polyhedron.vertices) if i not in face.index]
        return Cone(apex, gens, lin, polyhedron.lattice)
    K = polyhedron
    gens = [r for i, r in enumerate(K.rays) if i not in face.index]
    lin = K.face_rays(face) + list(K.lineality)
    return Cone(K.apex, gens, lin, K.lattice)


def transverse_cone(K: Cone, face: Face) -> tuple[QuotientData, Cone]:
    """The image of K in V / lin(F), in the integer coordinates of the quotient lattice.

    Returns the quotient data and the (pointed) transverse cone.
    """
    span = K.linear_span(face)
    q = adapted_basis(K.lattice, span)
    gens = [q.project(r) for i, r in enumerate(K.rays) if i not in face.index]
    return q, Cone(q.project(K.apex), gens, (), q.quotient_lattice())


def dual_cone(K: Cone) -> Cone:
    """The dual cone {w : <w, x - apex> >= 0 on K} in the dual space, apex at the origin.

    It lives in V* with the dual lattice.
    """
    from .lattice import dual_lattice

    n = K.ambient_dim
    dual = dual_lattice(K.lattice)
    gens = list(K.inequalities)
    spans = span_basis(list(K.rays) + list(K.lineality))
    lin = nullspace(spans, n) if spans else [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return Cone((Fraction(0),) * n, gens, lin, dual)


# --------------------------------------------------------------------------
# half-open simplicial cones


@dataclass(frozen=True)
class HalfOpenSimplicialCone:
    """apex + {sum t_j g_j : t_j >= 0, and t_j > 0 when open_facets[j]}.

    ``open_facets[j]`` refers to the facet opposite generator j.
    """

    apex: tuple[Fraction, ...]
    generators: tuple[tuple[Fraction, ...], ...]
    open_facets: tuple[bool, ...]
    lattice: LatticeContext

    @property
    def dim(self) -> int:
        return len(self.generators)

    def coordinates(self, x):
        """Coefficients t with x = apex + sum t_j g_j, or None if x is off the affine span."""
        d = vsub(frac_vector(x), self.apex)
        if not self.generators:
            return () if all(a == 0 for a in d) else None
        return solve(transpose([list(g) for g in self.generators]), d)

    def contains(self, x) -> bool:
        t = self.coordinates(x)
        if t is None:
            return False
        return all((tj > 0) if op else (tj >= 0) for tj, op in zip(t, self.open_facets))

    def closed(self) -> "HalfOpenSimplicialCone":
        return HalfOpenSimplicialCone(self.apex, self.generators, (False,) * self.dim, self.lattice)


def _stellar_insert(simplices: list[tuple], g) -> list[tuple]:
    out = []
    for s in simplices:
        t = solve(transpose([list(v) for v in s]), g) if s else None
        if t is None or any(c < 0 for c in t):
            out.append(s)
            continue
        for i, c in enumerate(t):
            if c > 0:
                out.append(s[:i] + (g,) + s[i + 1 :])
    return out


def triangulate_with_generators(K: Cone) -> list[tuple]:
    """Triangulation of a pointed cone using every generator as a ray of some simplex."""
    simplices = K.triangulate()
    used = {r for s in simplices for r in s}
    for g in K.generators:
        if g not in used:
            simplices = _stellar_insert(simplices, g)
            used.add(g)
    return simplices


def _generic_interior_point(K: Cone, simplices) -> tuple[Fraction, ...]:
    rays = K.rays
    for attempt in range(200):
        weights = [Fraction(1) + Fraction(i + 1, (attempt + 2) * (i + 3) ** 2) + Fraction(attempt, 97 * (i + 1)) for i in range(len(rays))]
        q = tuple(sum((w * r[j] for w, r in zip(weights, rays)), Fraction(0)) for j in range(K.ambient_dim))
        ok = True
        for s in simplices:
            lam = solve(transpose([list(v) for v in s]), q)
            if lam is None or any(c == 0 for c in lam):
                ok = False
                break
        if ok:
            return q
    raise RuntimeError("could not find a generic interior point")


def halfopen_decompose(K: Cone) -> list[HalfOpenSimplicialCone]:
    """Exact disjoint decomposition of a pointed cone into half-open simplicial cones.

    Uses a triangulation and a generic interior reference point q: the facet
    of a simplex opposite g_j is open exactly when the coefficient of g_j in
    q is negative.
    """
    if not K.is_pointed:
        raise InputError("half-open decomposition needs a pointed cone")
    simplices = triangulate_with_generators(K)
    if simplices == [()]:
        return [HalfOpenSimplicialCone(K.apex, (), (), K.lattice)]
    q = _generic_interior_point(K, simplices)
    pieces = []
    for s in simplices:
        lam = solve(transpose([list(v) for v in s]), q)
        pieces.append(HalfOpenSimplicialCone(K.apex, tuple(s), tuple(c < 0 for c in lam), K.lattice))
    return pieces


def box_points(piece: HalfOpenSimplicialCone) -> list[tuple[Fraction, ...]]:
    """Lattice points of the fundamental parallelepiped of a half-open simplicial cone.

    Enumerates the cosets of the sublattice generated by the generators
    inside the lattice points of the affine span, using a Hermite basis of
    the generator matrix; there are exactly |det| of them.
    """
    L = piece.lattice
    n = L.dim
    k = piece.dim
    apex_y = L.to_coords(piece.apex)
    gens_y = [L.to_coords(g) for g in piece.generators]
    q = adapted_basis(LatticeContext.standard(n), gens_y) if gens_y else None
    if q is None:
        return [piece.apex] if all(c.denominator == 1 for c in apex_y) else []
    Uinv = inverse(transpose([list(c) for c in q.adapted]))
    coords = matvec(Uinv, apex_y)
    if any(c.denominator != 1 for c in coords[k:]):
        return []
    delta = coords[:k]
    G = [[int(c) for c in matvec(Uinv, g)[:k]] for g in gens_y]  # rows = generators
    Gcols = transpose(G)  # columns = generators, k x k
    H, _, r = column_hnf(Gcols, k)
    if r != k:
        raise InputError("generators are not linearly independent")
    diag = [H[i][i] for i in range(k)]
    Ginv = inverse([[Fraction(a) for a in row] for row in Gcols])
    out = []
    for y in product(*(range(d) for d in diag)):
        t = matvec(Ginv, tuple(Fraction(a) - b for a, b in zip(y, delta)))
        reduced = []
        for tj, op in zip(t, piece.open_facets):
            f = tj - math.floor(tj)
            if op and f == 0:
                f = Fraction(1)
            reduced.append(f)
        x = piece.apex
        for tj, g in zip(reduced, piece.generators):
            x = vadd(x, vscale(tj, g))
        out.append(x)
    return sorted(out)
