"""Integer lattices: Hermite normal form, adapted bases, quotients and volumes.

A lattice is given by a basis matrix whose columns generate it; the default is
the standard lattice Z^n.  Internally every computation happens in lattice
coordinates, where the lattice is Z^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .exactmath import (
    det,
    frac_vector,
    inverse,
    matvec,
    nullspace,
    primitive_integer,
    rank,
    solve,
    span_basis,
    transpose,
)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_hnf(A: Sequence[Sequence[int]], ncols: int | None = None):
    """Column-style Hermite normal form.

    Returns ``(H, U, r)`` with ``H = A U``, ``U`` unimodular and ``r`` the
    rank.  The first ``r`` columns of ``H`` are in lower echelon form with
    positive pivots and reduced entries left of each pivot; the remaining
    columns are zero, so the last ``n - r`` columns of ``U`` are a basis of
    the integer kernel of ``A``.
    """
    H = [list(map(int, row)) for row in A]
    n = ncols if ncols is not None else (len(H[0]) if H else 0)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def combine(p, q, a, b, c, d):
        # (col_p, col_q) <- (a col_p + c col_q, b col_p + d col_q)
        for M in (H, U):
            for row in M:
                x, y = row[p], row[q]
                row[p], row[q] = a * x + c * y, b * x + d * y

    pivot_rows = []
    col = 0
    for i in range(len(H)):
        if col >= n:
            break
        for j in range(col + 1, n):
            b = H[i][j]
            if b == 0:
                continue
            a = H[i][col]
            g, x, y = xgcd(a, b)
            combine(col, j, x, -b // g, y, a // g)
        if H[i][col] == 0:
            continue
        if H[i][col] < 0:
            for M in (H, U):
                for row in M:
                    row[col] = -row[col]
        piv = H[i][col]
        for k in range(col):
            f = H[i][k] // piv
            if f:
                for M in (H, U):
                    for row in M:
                        row[k] -= f * row[col]
        pivot_rows.append(i)
        col += 1
    return H, U, col


def hnf_basis(vectors: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical basis (row Hermite normal form) of the lattice generated by integer vectors."""
    if not vectors:
        return ()
    # row HNF of V is the transpose of the column HNF of V^T
    H, _, r = column_hnf(transpose([list(map(int, v)) for v in vectors]), len(vectors))
    return tuple(tuple(H[i][j] for i in range(len(H))) for j in range(r))


@dataclass(frozen=True)
class LatticeContext:
    """A full-rank lattice in Q^dim, given by basis vectors (columns of the basis matrix)."""

    dim: int
    basis: tuple[tuple[Fraction, ...], ...] = ()
    label: str = ""

    def __post_init__(self):
        if not self.basis:
            object.__setattr__(
                self, "basis", tuple(tuple(Fraction(int(i == j)) for i in range(self.dim)) for j in range(self.dim))
            )
        else:
            basis = tuple(frac_vector(b) for b in self.basis)
            if len(basis) != self.dim or any(len(b) != self.dim for b in basis):
                raise InputError("lattice basis must consist of dim vectors of length dim")
            if det([list(b) for b in basis]) == 0:
                raise InputError("lattice basis is not full rank")
            object.__setattr__(self, "basis", basis)

    @classmethod
    def standard(cls, dim: int) -> "LatticeContext":
        return cls(dim)

    @property
    def is_standard(self) -> bool:
        return all(self.basis[j][i] == (i == j) for i in range(self.dim) for j in range(self.dim))

    @property
    def matrix(self):
        """Basis matrix with the basis vectors as columns."""
        return transpose([list(b) for b in self.basis])

    def to_coords(self, x) -> tuple:
        if self.is_standard:
            return frac_vector(x)
        return matvec(inverse(self.matrix), frac_vector(x))

    def from_coords(self, y) -> tuple:
        if self.is_standard:
            return frac_vector(y)
        return matvec(self.matrix, frac_vector(y))

    def contains(self, x) -> bool:
        return all(c.denominator == 1 for c in self.to_coords(x))

    def dual_contains(self, w) -> bool:
        """Membership in the dual lattice {w : <w, x> in Z for x in the lattice}."""
        return all(sum(Fraction(a) * b for a, b in zip(w, v)).denominator == 1 for v in self.basis)


def _annihilator_integer(vectors: Sequence, n: int) -> list[list[int]]:
    """Integer rows spanning the annihilator of span(vectors) in Q^n."""
    rows = nullspace([frac_vector(v) for v in vectors], n) if vectors else [
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    ]
    return [list(primitive_integer(r)) for r in rows]


@dataclass(frozen=True)
class QuotientData:
    """A lattice basis adapted to a subspace W0, and the projection to V/W0.

    ``adapted`` has the basis vectors as columns; the first ``k`` span the
    lattice points of W0.  ``projection`` maps V to integer coordinates on
    the quotient lattice, and ``lifts`` are the remaining basis vectors, so
    ``projection(lift_j) = e_j``.  The rows of ``projection`` are also a
    basis of the lattice points of ann(W0) in the dual lattice.
    """

    parent: LatticeContext
    subspace_basis: tuple[tuple[Fraction, ...], ...]
    k: int
    adapted: tuple[tuple[Fraction, ...], ...]
    projection: tuple[tuple[Fraction, ...], ...]
    lifts: tuple[tuple[Fraction, ...], ...]

    @property
    def quotient_dim(self) -> int:
        return self.parent.dim - self.k

    @property
    def sublattice_basis(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.adapted[: self.k]

    def project(self, x) -> tuple[Fraction, ...]:
        return tuple(sum((a * b for a, b in zip(row, frac_vector(x))), Fraction(0)) for row in self.projection)

    def lift(self, y) -> tuple[Fraction, ...]:
        n = self.parent.dim
        return tuple(sum((c * l[i] for c, l in zip(y, self.lifts)), Fraction(0)) for i in range(n))

    def quotient_lattice(self) -> LatticeContext:
        return LatticeContext.standard(self.quotient_dim)


def adapted_basis(lattice: LatticeContext, subspace: Sequence) -> QuotientData:
    """Unimodular basis whose first vectors span the lattice points of ``subspace``."""
    n = lattice.dim
    sub = [frac_vector(v) for v in subspace if any(a != 0 for a in v)]
    for v in sub:
        if len(v) != n:
            raise InputError("subspace vector has the wrong dimension")
    sub_y = [lattice.to_coords(v) for v in sub]
    basis_y = span_basis(sub_y)
    k = len(basis_y)
    A = _annihilator_integer(basis_y, n)
    _, U, r = column_hnf(A, n) if A else (None, [[int(i == j) for j in range(n)] for i in range(n)], 0)
    cols = [[U[i][j] for i in range(n)] for j in range(n)]
    ordered = cols[r:] + cols[:r]  # kernel first
    assert len(cols[r:]) == k
    Uinv = inverse(transpose(ordered))
    proj_y = [tuple(Fraction(a) for a in row) for row in Uinv[k:]]
    adapted = tuple(lattice.from_coords(c) for c in ordered)
    if lattice.is_standard:
        projection = tuple(proj_y)
    else:
        Binv = inverse(lattice.matrix)
        projection = tuple(tuple(sum(row[m] * Binv[m][j] for m in range(n)) for j in range(n)) for row in proj_y)
    return QuotientData(
        parent=lattice,
        subspace_basis=tuple(frac_vector(b) for b in (lattice.from_coords(v) for v in basis_y)),
        k=k,
        adapted=adapted,
        projection=projection,
        lifts=adapted[k:],
    )


def relative_volume(vectors: Sequence, lattice: LatticeContext) -> Fraction:
    """Volume of the parallelepiped on independent vectors, normalised by the lattice in their span.

    A fundamental domain of the lattice points in span(vectors) has volume 1.
    """
    vectors = [frac_vector(v) for v in vectors]
    if not vectors:
        return Fraction(1)
    if rank(vectors) != len(vectors):
        raise InputError("vectors are not linearly independent")
    q = adapted_basis(lattice, vectors)
    A = transpose([list(b) for b in q.sublattice_basis])
    M = [solve(A, v) for v in vectors]
    return abs(det([list(row) for row in M]))


def primitive_normal(facet_span: Sequence, side, lattice: LatticeContext) -> tuple[Fraction, ...]:
    """Primitive dual-lattice vector vanishing on a hyperplane and positive on ``side``."""
    n = lattice.dim
    vectors = [frac_vector(v) for v in facet_span]
    normals = nullspace(vectors, n) if vectors else []
    if not vectors:
        if n != 1:
            raise InputError("facet span must have codimension one")
        normals = [(Fraction(1),)]
    if len(normals) != 1:
        raise InputError("facet span must have codimension one")
    # dual lattice coordinates: w -> B^T w
    B = lattice.matrix
    w = normals[0]
    coords = tuple(sum(B[i][j] * w[i] for i in range(n)) for j in range(n))
    prim = primitive_integer(coords)
    BinvT = transpose(inverse(B)) if not lattice.is_standard else None
    rho = frac_vector(prim) if BinvT is None else matvec(BinvT, frac_vector(prim))
    s = sum((a * b for a, b in zip(rho, frac_vector(side))), Fraction(0))
    if s == 0:
        raise InputError("side vector lies in the hyperplane")
    return rho if s > 0 else tuple(-a for a in rho)


def dual_lattice(lattice: LatticeContext) -> LatticeContext:
    """The dual lattice, as a lattice in the dual space with the standard pairing."""
    return LatticeContext(lattice.dim, tuple(tuple(r) for r in inverse(lattice.matrix)), lattice.label + "*")
