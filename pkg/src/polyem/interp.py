"""Complement maps and the interpolators mu, lambda and nu.

A complement map Psi assigns to each subspace U of V* a complementary
subspace.  Two kinds are supported: orthogonal complements for a positive
definite inner product on V* (``matrix`` is its Gram matrix), and complements
read off a complete flag L_1 < ... < L_n in V*, Psi(U) = L_{n - dim U}
(``vectors`` f_1..f_n with L_i = span(f_1..f_i)).  Entries may be rationals or
rational functions of named parameters.

mu is computed by the recursion

    mu(K) = exp(-<xi, v>) * ( S(K) - sum_{faces F, dim F > 0} pi_F^* mu(T(K, F)) * I(F) )

for a pointed cone K with apex v, where T(K, F) is the transverse cone in
V / lin(F) and pi_F is the projection V* -> ann(lin F) along Psi(ann(lin F)).
lambda and nu are then obtained by Mobius-type inversion over faces.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import GenericityError, InputError
from .exactmath import (
    QQ,
    Field,
    det,
    field_for,
    frac_vector,
    inverse,
    matmul,
    nullspace,
    rank,
    transpose,
)
from .genfun import MeroFun, i_of, pullback, pullback_constant, s_of, taylor_at_zero
from .geometry import Cone, Face, Polytope, dual_cone, supporting_cone, transverse_cone
from .lattice import LatticeContext, QuotientData, adapted_basis, primitive_normal

INNER_PRODUCT = "inner_product"
FLAG = "flag"


@dataclass(frozen=True)
class ComplementMap:
    """A complement map on V* (dimension ``dim``) of kind 'inner_product' or 'flag'."""

    kind: str
    dim: int
    data: tuple  # Gram matrix rows, or flag vectors
    field: Field = QQ

    def __post_init__(self):
        if self.kind not in (INNER_PRODUCT, FLAG):
            raise InputError(f"unknown complement map kind {self.kind!r}")
        F = self.field
        data = tuple(tuple(a if _in(a, F) else F(a) for a in row) for row in self.data)
        object.__setattr__(self, "data", data)
        if len(data) != self.dim or any(len(r) != self.dim for r in data):
            raise InputError(f"complement map data must be {self.dim} x {self.dim}")
        if self.kind == INNER_PRODUCT:
            if any(data[i][j] != data[j][i] for i in range(self.dim) for j in range(i)):
                raise InputError("inner product matrix is not symmetric")
            if not F.is_symbolic:
                for k in range(1, self.dim + 1):
                    if det([list(r[:k]) for r in data[:k]]) <= 0:
                        raise InputError("inner product matrix is not positive definite")
            elif self.dim and det([list(r) for r in data]) == 0:
                raise InputError("inner product matrix is singular")
        elif self.dim and det([list(r) for r in data]) == 0:
            raise InputError("flag vectors are linearly dependent")

    # constructors ---------------------------------------------------------
    @classmethod
    def inner_product(cls, matrix, field: Field | None = None) -> "ComplementMap":
        return cls(INNER_PRODUCT, len(matrix), tuple(tuple(r) for r in matrix), field or QQ)

    @classmethod
    def flag(cls, vectors, field: Field | None = None) -> "ComplementMap":
        return cls(FLAG, len(vectors), tuple(tuple(v) for v in vectors), field or QQ)

    @classmethod
    def standard(cls, dim: int) -> "ComplementMap":
        """The standard inner product on Q^dim."""
        return cls.inner_product([[int(i == j) for j in range(dim)] for i in range(dim)])

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.field.parameters

    @property
    def key(self):
        return (self.kind, self.dim, self.field.parameters, self.data)

    # complements ------------------------------------------------------------
    def complement(self, subspace: Sequence[Sequence]) -> list[tuple]:
        """Basis of Psi(U) for U spanned by the given vectors of V*."""
        F = self.field
        U = [tuple(a if _in(a, F) else F(a) for a in u) for u in subspace]
        U = [U[i] for i in _independent(U)]
        d = len(U)
        if self.kind == INNER_PRODUCT:
            Q = self.data
            rows = [[sum((u[i] * Q[i][j] for i in range(self.dim)), F.zero) for j in range(self.dim)] for u in U]
            comp = nullspace(rows, self.dim, F) if rows else [_unit(i, self.dim, F) for i in range(self.dim)]
        else:
            comp = list(self.data[: self.dim - d])
        if d and comp and det([list(v) for v in U + comp]) == 0:
            raise GenericityError(f"complement of span{[tuple(F.format(a) for a in u) for u in U]} is not complementary")
        return comp

    def quotient(self, q: QuotientData):
        """Projection pi: V* -> W* = ann(W0) and the complement map induced on W*.

        W* is given coordinates by the rows r_j of ``q.projection`` (a basis
        of its lattice points), matching the integer coordinates of V / W0.
        Returns (pi as an m' x m matrix, induced ComplementMap on W*).
        """
        return _quotient(self, q.projection, q.k)

    def apply_linear(self, A) -> "ComplementMap":
        """The complement map transported by xi -> A xi on V*."""
        F = self.field
        A = [[a if _in(a, F) else F(a) for a in row] for row in A]
        if self.kind == FLAG:
            return ComplementMap(FLAG, self.dim, tuple(tuple(_matvec(A, f, F)) for f in self.data), F)
        Ainv = inverse(A, F)
        Q = matmul(matmul(transpose(Ainv), [list(r) for r in self.data]), Ainv)
        return ComplementMap(INNER_PRODUCT, self.dim, tuple(tuple(r) for r in Q), F)

    def dual(self) -> "ComplementMap":
        """The dual complement map on V = (V*)*: inverse Gram matrix, or annihilator flag."""
        F = self.field
        n = self.dim
        if self.kind == INNER_PRODUCT:
            return ComplementMap(INNER_PRODUCT, n, tuple(tuple(r) for r in inverse([list(r) for r in self.data], F)), F)
        vectors: list = []
        for i in range(1, n + 1):
            # L*_i = ann(L_{n-i})
            ann = nullspace([list(f) for f in self.data[: n - i]], n, F) if n - i else [_unit(j, n, F) for j in range(n)]
            for v in ann:
                if len(_independent(vectors + [v])) > len(vectors):
                    vectors.append(v)
                    break
        return ComplementMap(FLAG, n, tuple(vectors), F)

    def to_lattice_coordinates(self, lattice: LatticeContext) -> "ComplementMap":
        """The same map in dual lattice coordinates eta = B^T xi."""
        if lattice.is_standard:
            return self
        return self.apply_linear(transpose(lattice.matrix))

    def is_generic_for(self, subspace: Sequence[Sequence], lattice: LatticeContext | None = None) -> bool:
        lattice = lattice or LatticeContext.standard(self.dim)
        try:
            self.quotient(adapted_basis(lattice, subspace))
        except GenericityError:
            return False
        return True


def _in(x, F: Field) -> bool:
    if F.is_symbolic:
        return getattr(x, "field", None) == F.K
    return isinstance(x, Fraction)


def _unit(i, n, F):
    return tuple(F.one if j == i else F.zero for j in range(n))


def _matvec(A, v, F):
    return tuple(sum((a * b for a, b in zip(row, v)), F.zero) for row in A)


def _independent(vectors) -> list[int]:
    chosen, basis = [], []
    for i, v in enumerate(vectors):
        if rank(basis + [list(v)]) > len(basis):
            basis.append(list(v))
            chosen.append(i)
    return chosen


@lru_cache(maxsize=4096)
def _quotient(cmap: ComplementMap, projection: tuple, k: int):
    F = cmap.field
    m = cmap.dim
    mq = m - k
    R = [[F(a) for a in row] for row in projection]
    if mq == 0:
        return [], ComplementMap(cmap.kind, 0, (), F)
    if k == 0:
        # W0 = 0: pi is the identity in the coordinates given by R
        Rinv = inverse(R, F)
        M = transpose(Rinv)
        return M, cmap.apply_linear(M)
    if cmap.kind == INNER_PRODUCT:
        Q = cmap.data
        RQ = [[sum((r[i] * Q[i][j] for i in range(m)), F.zero) for j in range(m)] for r in R]
        G = nullspace(RQ, m, F)
    else:
        G = [list(f) for f in cmap.data[:k]]
    C = transpose([list(r) for r in R] + [list(g) for g in G])
    if det(C) == 0:
        raise GenericityError(
            "complement map is not generic for the subspace annihilated by "
            + str([tuple(F.format(a) for a in r) for r in R])
        )
    M = inverse(C, F)[:mq]
    if cmap.kind == INNER_PRODUCT:
        Qbar = matmul(matmul(R, [list(r) for r in cmap.data]), transpose(R))
        return M, ComplementMap(INNER_PRODUCT, mq, tuple(tuple(r) for r in Qbar), F)
    flag = tuple(_matvec(M, f, F) for f in cmap.data[k:])
    return M, ComplementMap(FLAG, mq, flag, F)


# --------------------------------------------------------------------------
# cache


class InterpolatorCache:
    """Thread-safe memo table for interpolator values.

    Keys combine the complement map and the canonical form of the cone up to
    lattice translation, so distinct complement maps never share entries.
    """

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key, compute: Callable[[], MeroFun]) -> MeroFun:
        with self._lock:
            if key in self._data:
                self.hits += 1
                return self._data[key]
        value = compute()
        with self._lock:
            self.misses += 1
            return self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def __len__(self):
        return len(self._data)


DEFAULT_CACHE = InterpolatorCache()


# --------------------------------------------------------------------------
# genericity


def _subspaces(X: Cone | Polytope):
    for face in X.faces:
        yield face, X.linear_span(face)


def audit_genericity(cmap: ComplementMap, X: Cone | Polytope) -> None:
    """Raise GenericityError naming the first face whose linear span is not Psi-generic."""
    if cmap.dim != X.ambient_dim:
        raise InputError(f"complement map has dimension {cmap.dim}, the polyhedron lives in dimension {X.ambient_dim}")
    cmap_std = cmap.to_lattice_coordinates(X.lattice)
    for face, span in _subspaces(X):
        span_y = [X.lattice.to_coords(v) for v in span]
        try:
            cmap_std.quotient(adapted_basis(LatticeContext.standard(X.ambient_dim), span_y))
        except GenericityError as exc:
            raise GenericityError(f"face {_describe_face(X, face)}: {exc}") from None


def _describe_face(X, face: Face) -> str:
    if isinstance(X, Polytope):
        pts = X.face_vertices(face)
    else:
        pts = X.face_rays(face)
    return "[" + ", ".join("(" + ", ".join(str(c) for c in p) + ")" for p in pts) + f"] (dim {face.dim})"


# --------------------------------------------------------------------------
# mu


def _standardize(cmap: ComplementMap, K: Cone):
    """Move a cone with a non-standard lattice to lattice coordinates."""
    L = K.lattice
    if L.is_standard:
        return cmap, K, None
    std = LatticeContext.standard(L.dim)
    Kc = Cone(L.to_coords(K.apex), [L.to_coords(g) for g in K.generators], [L.to_coords(v) for v in K.lineality], std)
    # f(xi) = f_std(B^T xi)
    return cmap.to_lattice_coordinates(L), Kc, transpose(L.matrix)


def _unstandardize(f: MeroFun, proj) -> MeroFun:
    return f if proj is None else pullback(f, proj)


def _pull(f: MeroFun, M, target_dim: int) -> MeroFun:
    if f.dim == 0:
        return pullback_constant(f, target_dim)
    return pullback(f, M)


def _mu_pointed(cmap: ComplementMap, K: Cone, cache: InterpolatorCache) -> MeroFun:
    return cache.get_or_compute(("mu", cmap.key, K.lattice_reduced_key()), lambda: _mu_pointed_compute(cmap, K, cache))


def _mu_pointed_compute(cmap: ComplementMap, K: Cone, cache: InterpolatorCache) -> MeroFun:
    F, m = cmap.field, cmap.dim
    if K.dim == 0:
        return MeroFun.constant(1 if K.lattice.contains(K.apex) else 0, m, F)
    total = s_of(K, F)
    for face in K.faces:
        if face.dim == 0:
            continue
        total = total - _mu_supporting(cmap, K, face, cache) * i_of(K.face_cone(face), F)
    return total.shift(tuple(-a for a in K.apex))


def _mu_supporting(cmap: ComplementMap, K: Cone, face: Face, cache: InterpolatorCache) -> MeroFun:
    """mu(Supp(K, F)) for a face F of a pointed cone K."""
    if face.dim == 0:
        return _mu_pointed(cmap, K, cache)
    q, T = transverse_cone(K, face)
    M, cbar = cmap.quotient(q)
    return _pull(_mu_pointed(cbar, T, cache), M, cmap.dim)


def _quotient_by_lineality(cmap: ComplementMap, K: Cone):
    q = adapted_basis(K.lattice, K.lineality)
    M, cbar = cmap.quotient(q)
    Kbar = Cone(q.project(K.apex), [q.project(r) for r in K.rays], (), q.quotient_lattice())
    return M, cbar, Kbar


def mu(cmap: ComplementMap, K: Cone, cache: InterpolatorCache | None = None, audit: bool = True) -> MeroFun:
    """The interpolator mu^Psi(K), a meromorphic function regular at the origin."""
    cache = cache if cache is not None else DEFAULT_CACHE
    if audit:
        audit_genericity(cmap, K)
    cmap_s, Ks, back = _standardize(cmap, K)
    if Ks.is_pointed:
        f = _mu_pointed(cmap_s, Ks, cache)
    else:
        M, cbar, Kbar = _quotient_by_lineality(cmap_s, Ks)
        f = _pull(_mu_pointed(cbar, Kbar, cache), M, cmap.dim)
    return _unstandardize(f, back)


def mu_faces(cmap: ComplementMap, P: Polytope, cache: InterpolatorCache | None = None) -> dict[Face, MeroFun]:
    """mu(Supp(P, F)) for every face F of a polytope."""
    audit_genericity(cmap, P)
    return {face: mu(cmap, supporting_cone(P, face), cache, audit=False) for face in P.faces}


# --------------------------------------------------------------------------
# lambda and nu


def _require_lattice_cone(K: Cone):
    if not K.is_lattice_cone():
        raise InputError("lambda and nu are defined for lattice cones (apex affine span must meet the lattice)")


def _mobius(kind: str, cmap: ComplementMap, K: Cone, cache: InterpolatorCache) -> MeroFun:
    return cache.get_or_compute((kind, cmap.key, K.lattice_reduced_key()), lambda: _mobius_compute(kind, cmap, K, cache))


def _mobius_compute(kind: str, cmap: ComplementMap, K: Cone, cache: InterpolatorCache) -> MeroFun:
    F, m = cmap.field, cmap.dim
    one = MeroFun.constant(1, m, F)
    if K.dim == 0:
        return one
    whole = K.whole()
    total = MeroFun.zero(m, F)
    for face in K.faces:
        if face == whole:
            continue
        total = total + _mobius(kind, cmap, K.face_cone(face), cache) * _mu_supporting(cmap, K, face, cache)
    return -total if kind == "lambda" else one - total


def _interp_mobius(kind: str, cmap: ComplementMap, K: Cone, cache, audit: bool) -> MeroFun:
    cache = cache if cache is not None else DEFAULT_CACHE
    if audit:
        audit_genericity(cmap, K)
    _require_lattice_cone(K)
    cmap_s, Ks, back = _standardize(cmap, K)
    if Ks.is_pointed:
        f = _mobius(kind, cmap_s, Ks, cache)
    else:
        M, cbar, Kbar = _quotient_by_lineality(cmap_s, Ks)
        f = _pull(_mobius(kind, cbar, Kbar, cache), M, cmap.dim)
    return _unstandardize(f, back)


def lambda_(cmap: ComplementMap, K: Cone, cache: InterpolatorCache | None = None, audit: bool = True) -> MeroFun:
    """The interpolator lambda^Psi(K) with I(P) = sum_F lambda(Supp(P,F)) S(F)."""
    return _interp_mobius("lambda", cmap, K, cache, audit)


def nu(cmap: ComplementMap, K: Cone, cache: InterpolatorCache | None = None, audit: bool = True) -> MeroFun:
    """The interpolator nu^Psi(K) with I(P) = sum_F nu(Supp(P,F)) S(relint F)."""
    return _interp_mobius("nu", cmap, K, cache, audit)


INTERPOLATORS = {"mu": mu, "lambda": lambda_, "nu": nu}


def interpolator(kind: str, cmap: ComplementMap, K: Cone, cache: InterpolatorCache | None = None, audit: bool = True) -> MeroFun:
    try:
        fn = INTERPOLATORS[kind]
    except KeyError:
        raise InputError(f"unknown interpolator {kind!r}") from None
    return fn(cmap, K, cache, audit)


def constant_term(cmap: ComplementMap, K: Cone, kind: str = "mu", cache: InterpolatorCache | None = None):
    """The value at the origin of mu, lambda or nu of K."""
    return taylor_at_zero(interpolator(kind, cmap, K, cache), 0).constant_term()


# --------------------------------------------------------------------------
# closed forms in dimension at most two


def _bernoulli_direction(cmap: ComplementMap, rho) -> tuple:
    """Vector w with <xi, w> = omega, the coordinate of pi(xi) along rho.

    pi is the projection of V* onto span(rho) along Psi(span(rho)).
    """
    F = cmap.field
    rho = tuple(F(a) for a in rho)
    n = cmap.dim
    if cmap.kind == INNER_PRODUCT:
        Q = cmap.data
        Qrho = tuple(sum((Q[i][j] * rho[j] for j in range(n)), F.zero) for i in range(n))
        denom = sum((a * b for a, b in zip(rho, Qrho)), F.zero)
        return tuple(a / denom for a in Qrho)
    # omega = <xi, c> / <rho, c> with c spanning ann(L_{n-1})
    c = nullspace([list(f) for f in cmap.data[: n - 1]], n, F)[0] if n > 1 else (F.one,)
    denom = sum((a * b for a, b in zip(rho, c)), F.zero)
    if denom == 0:
        raise GenericityError("complement map is not generic for this half-plane")
    return tuple(a / denom for a in c)


def mu_closed_form_2d(cmap: ComplementMap, K: Cone) -> MeroFun:
    """Closed forms for mu in dimension at most two.

    Covered shapes: a point, a ray, a half-plane, and a unimodular two-dimensional
    cone, each with its apex (or boundary line) meeting the lattice.
    """
    F, n = cmap.field, cmap.dim
    if n > 2 or K.ambient_dim != n:
        raise InputError("closed forms are available only in dimension one and two")
    if not K.lattice.is_standard:
        raise InputError("closed forms assume the standard lattice")
    if K.dim == 0:
        return MeroFun.constant(1 if K.lattice.contains(K.apex) else 0, n, F)
    if not K.is_lattice_cone():
        raise InputError("closed forms need the apex affine span to meet the lattice")
    if K.is_pointed and K.dim == 1:
        return MeroFun.bernoulli(K.rays[0], F)
    if len(K.lineality) == 1 and len(K.rays) == 1 and n == 2:
        rho = primitive_normal(K.lineality, K.rays[0], K.lattice)
        return MeroFun.bernoulli(_bernoulli_direction(cmap, rho), F)
    if K.is_pointed and K.dim == 2 and n == 2:
        v1, v2 = K.rays
        if abs(det([list(v1), list(v2)])) != 1:
            raise InputError("closed form needs a unimodular cone")
        f = MeroFun.term(1, (0, 0), (), [v1, v2], F) - MeroFun.term(1, (0, 0), [v1, v2], (), F)
        for v, other in ((v1, v2), (v2, v1)):
            rho = primitive_normal([v], other, K.lattice)
            f = f + MeroFun.term(1, (0, 0), [v], (), F) * MeroFun.bernoulli(_bernoulli_direction(cmap, rho), F)
        return f
    raise InputError("no closed form for this cone")


def mu_constant_2d_unimodular(cmap: ComplementMap, K: Cone):
    """The value at the origin of mu for a unimodular 2-cone under an inner product.

    Equals 1/4 - Q(rho1, rho2)/12 * (1/Q(rho1, rho1) + 1/Q(rho2, rho2)) where
    rho1, rho2 are the primitive generators of the dual cone.
    """
    if cmap.kind != INNER_PRODUCT or cmap.dim != 2:
        raise InputError("this formula needs an inner product in dimension two")
    D = dual_cone(Cone((0, 0), K.rays))
    r1, r2 = (tuple(cmap.field(a) for a in r) for r in D.rays)
    Q = cmap.data
    q = lambda a, b: sum((a[i] * Q[i][j] * b[j] for i in range(2) for j in range(2)), cmap.field.zero)
    return cmap.field(Fraction(1, 4)) - q(r1, r2) / 12 * (1 / q(r1, r1) + 1 / q(r2, r2))


# --------------------------------------------------------------------------
# duality


def morelli_duality_check(cmap: ComplementMap, K: Cone, cache: InterpolatorCache | None = None):
    """Compare nu^Psi(K)(0) with mu^{Psi*}(K^dual)(0) for a cone with apex at the origin.

    Returns (nu value, mu value, equal?).  Equality is expected in dimension
    at most two.
    """
    if any(a != 0 for a in K.apex):
        raise InputError("the duality check needs a cone with apex at the origin")
    lhs = constant_term(cmap, K, "nu", cache)
    D = dual_cone(K)
    dual_map = cmap.dual()
    # V* with the dual lattice is treated as the primal space; its dual is V
    rhs = taylor_at_zero(mu(dual_map, D, cache), 0).constant_term()
    return lhs, rhs, lhs == rhs


def transport(cmap: ComplementMap, G) -> ComplementMap:
    """g Psi for a lattice automorphism g of V with matrix G: xi -> G^{-T} xi on V*."""
    Ginv = inverse([[Fraction(a) for a in row] for row in G])
    return cmap.apply_linear(transpose(Ginv))
