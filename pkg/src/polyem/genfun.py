"""Meromorphic functions with hyperplane singularities, and the exponential sums
and integrals S(X), I(X) of polyhedra.

A ``MeroFun`` is a finite sum of terms

    c * exp(<xi, a>) / ( prod_i <xi, v_i> * prod_j (1 - exp(<xi, w_j>)) )

with c a field element and a, v_i, w_j vectors over the same field.  Terms are
kept in a normal form (linear forms scaled to leading coordinate 1, exponential
factors in a fixed orientation, like terms merged) so that syntactic equality
is cheap.  Semantic equality is decided by ``canonical_equal``.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import GenuinePoleError, InputError
from .exactmath import (
    QQ,
    Field,
    TruncSeries,
    compose_linear,
    divide_by_linear_form,
    exp_linear,
    frac_vector,
    inverse,
    linear_poly,
    poly_add,
    poly_is_zero,
    poly_mul,
    poly_scale,
    todd_coefficients,
    transpose,
)
from .geometry import (
    Cone,
    HalfOpenSimplicialCone,
    Polytope,
    box_points,
    halfopen_decompose,
    supporting_cone,
)
from .lattice import LatticeContext, adapted_basis, relative_volume


@dataclass(frozen=True)
class Term:
    coeff: object
    point: tuple
    lin: tuple  # linear-form denominators <xi, v>
    exp: tuple  # exponential denominators (1 - exp(<xi, w>))


class MeroFun:
    """A sum of exponential-over-hyperplane terms in ``dim`` variables over ``field``."""

    __slots__ = ("field", "dim", "terms")

    def __init__(self, field: Field, dim: int, terms: Iterable = (), normalized: bool = False):
        self.field = field
        self.dim = dim
        if normalized:
            self.terms = tuple(terms)
        else:
            self.terms = _normal_form(field, dim, terms)

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, dim: int, field: Field = QQ) -> "MeroFun":
        return cls(field, dim, (), normalized=True)

    @classmethod
    def constant(cls, c, dim: int, field: Field = QQ) -> "MeroFun":
        return cls(field, dim, [(field(c) if not _in_field(c, field) else c, (field.zero,) * dim, (), ())])

    @classmethod
    def exponential(cls, point, coeff=1, field: Field = QQ) -> "MeroFun":
        point = tuple(field(a) if not _in_field(a, field) else a for a in point)
        return cls(field, len(point), [(field(coeff), point, (), ())])

    @classmethod
    def term(cls, coeff, point, lin=(), exp=(), field: Field = QQ) -> "MeroFun":
        conv = lambda v: tuple(a if _in_field(a, field) else field(a) for a in v)
        point = conv(point)
        return cls(field, len(point), [(conv([coeff])[0], point, [conv(v) for v in lin], [conv(w) for w in exp])])

    @classmethod
    def exp_poly(cls, points_and_coeffs, dim: int, field: Field = QQ) -> "MeroFun":
        """A finite exponential sum sum c_k exp(<xi, a_k>)."""
        return cls(field, dim, [(field(c), tuple(field(a) for a in p), (), ()) for p, c in points_and_coeffs])

    @classmethod
    def bernoulli(cls, w, field: Field = QQ) -> "MeroFun":
        """B(<xi, w>) = 1/(1 - exp(<xi, w>)) + 1/<xi, w>, regular at the origin."""
        w = tuple(a if _in_field(a, field) else field(a) for a in w)
        zero = (field.zero,) * len(w)
        return cls(field, len(w), [(field.one, zero, (), (w,)), (field.one, zero, (w,), ())])

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "MeroFun"):
        if self.dim != other.dim:
            raise ValueError(f"functions in {self.dim} and {other.dim} variables")
        if self.field != other.field:
            raise ValueError("functions over different fields")

    def __add__(self, other: "MeroFun") -> "MeroFun":
        if not isinstance(other, MeroFun):
            other = MeroFun.constant(other, self.dim, self.field)
        self._check(other)
        return MeroFun(self.field, self.dim, _merge(self.terms + other.terms, self.field), normalized=True)

    __radd__ = __add__

    def __neg__(self) -> "MeroFun":
        return MeroFun(self.field, self.dim, tuple(Term(-t.coeff, t.point, t.lin, t.exp) for t in self.terms), normalized=True)

    def __sub__(self, other) -> "MeroFun":
        if not isinstance(other, MeroFun):
            other = MeroFun.constant(other, self.dim, self.field)
        return self + (-other)

    def __rsub__(self, other) -> "MeroFun":
        return (-self) + other

    def __mul__(self, other) -> "MeroFun":
        if not isinstance(other, MeroFun):
            c = other if _in_field(other, self.field) else self.field(other)
            if c == 0:
                return MeroFun.zero(self.dim, self.field)
            return MeroFun(self.field, self.dim, tuple(Term(c * t.coeff, t.point, t.lin, t.exp) for t in self.terms), normalized=True)
        self._check(other)
        key = _vector_key(self.field)
        out = []
        for s in self.terms:
            for t in other.terms:
                out.append(
                    Term(
                        s.coeff * t.coeff,
                        tuple(a + b for a, b in zip(s.point, t.point)),
                        tuple(sorted(s.lin + t.lin, key=key)),
                        tuple(sorted(s.exp + t.exp, key=key)),
                    )
                )
        return MeroFun(self.field, self.dim, _merge(out, self.field), normalized=True)

    __rmul__ = __mul__

    def shift(self, s) -> "MeroFun":
        """Multiply by exp(<xi, s>)."""
        s = tuple(a if _in_field(a, self.field) else self.field(a) for a in s)
        return MeroFun(
            self.field,
            self.dim,
            _merge([Term(t.coeff, tuple(a + b for a, b in zip(t.point, s)), t.lin, t.exp) for t in self.terms], self.field),
            normalized=True,
        )

    def to_field(self, field: Field) -> "MeroFun":
        """The same function with scalars coerced into a larger field."""
        if field == self.field:
            return self
        conv = lambda v: tuple(field(a) for a in v)
        return MeroFun(field, self.dim, [(field(t.coeff), conv(t.point), [conv(v) for v in t.lin], [conv(w) for w in t.exp]) for t in self.terms])

    def __eq__(self, other):
        if not isinstance(other, MeroFun):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, self.terms))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"MeroFun({render(self)})"

    def vectors(self):
        for t in self.terms:
            yield t.point
            yield from t.lin
            yield from t.exp


def _in_field(x, field: Field) -> bool:
    if field.is_symbolic:
        return getattr(x, "field", None) == field.K
    return isinstance(x, Fraction)


def _vector_key(field: Field):
    sk = field.sort_key
    return lambda v: tuple(sk(a) for a in v)


def _term_key(field: Field):
    vk = _vector_key(field)
    return lambda t: (vk(t.point), tuple(vk(v) for v in t.lin), tuple(vk(w) for w in t.exp))


def _merge(terms, field: Field) -> tuple:
    acc: dict = {}
    for t in terms:
        k = (t.point, t.lin, t.exp)
        acc[k] = acc[k] + t.coeff if k in acc else t.coeff
    if not acc:
        return ()
    out = [Term(c, *k) for k, c in acc.items() if c != 0]
    return tuple(sorted(out, key=_term_key(field)))


def _normal_form(field: Field, dim: int, raw) -> tuple:
    key = _vector_key(field)
    out = []
    for item in raw:
        if isinstance(item, Term):
            coeff, point, lin, exp = item.coeff, item.point, item.lin, item.exp
        else:
            coeff, point, lin, exp = item
        if coeff == 0:
            continue
        point = tuple(point)
        if len(point) != dim:
            raise ValueError("term point has the wrong dimension")
        new_lin = []
        for v in lin:
            v = tuple(v)
            pivot = next((a for a in v if a != 0), None)
            if pivot is None:
                raise ZeroDivisionError("linear-form denominator is the zero vector")
            coeff = coeff / pivot
            new_lin.append(tuple(a / pivot for a in v))
        new_exp = []
        for w in exp:
            w = tuple(w)
            if all(a == 0 for a in w):
                raise ZeroDivisionError("exponential denominator is the zero vector")
            neg = tuple(-a for a in w)
            if key(w) < key(neg):
                # 1/(1 - e^{-z}) = -e^{z}/(1 - e^{z})
                coeff = -coeff
                point = tuple(a + b for a, b in zip(point, neg))
                w = neg
            new_exp.append(w)
        out.append(Term(coeff, point, tuple(sorted(new_lin, key=key)), tuple(sorted(new_exp, key=key))))
    return _merge(out, field)


# --------------------------------------------------------------------------
# rendering


def _signed(a, field: Field) -> tuple[str, str]:
    """(sign, magnitude text), pulling a leading minus out of symbolic coefficients too."""
    text = field.format(a)
    negative = lambda t: t.startswith("-") or t.startswith("(-")
    if negative(text):
        flipped = field.format(-a)
        if not negative(flipped):
            text = flipped
            return "-", text if " " not in text or text.startswith("(") else f"({text})"
    if " " in text and not text.startswith("("):
        text = f"({text})"
    return "+", text


def _join(parts: list[tuple[str, str]]) -> str:
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def _format_linear(v, field: Field, var: str = "xi") -> str:
    parts = []
    for i, a in enumerate(v):
        if a == 0:
            continue
        sign, text = _signed(a, field)
        name = f"{var}{i + 1}"
        parts.append((sign, name if text == "1" else f"{text}*{name}"))
    return _join(parts) if parts else "0"


def render(f: MeroFun, var: str = "xi") -> str:
    """Deterministic text form: a sum of c*exp(...)/((...)*(1 - exp(...))) terms."""
    if not f.terms:
        return "0"
    pieces = []
    for t in f.terms:
        sign, num = _signed(t.coeff, f.field)
        if any(a != 0 for a in t.point):
            e = f"exp({_format_linear(t.point, f.field, var)})"
            num = e if num == "1" else f"{num}*{e}"
        dens = [_format_linear(v, f.field, var) for v in t.lin]
        dens = [d if " " not in d and "*" not in d else f"({d})" for d in dens]
        dens += [f"(1 - exp({_format_linear(w, f.field, var)}))" for w in t.exp]
        if not dens:
            pieces.append((sign, num))
        else:
            den = dens[0] if len(dens) == 1 else f"({'*'.join(dens)})"
            pieces.append((sign, f"{num}/{den}"))
    return _join(pieces)


# --------------------------------------------------------------------------
# linear changes of variables


def pullback(f: MeroFun, projection: Sequence[Sequence]) -> MeroFun:
    """The function xi -> f(pi(xi)) for a linear map pi: V* -> W*.

    ``projection`` is the matrix of pi (rows indexed by W*-coordinates), so
    every vector w in f's data becomes pi^T w, because
    <pi(xi), w> = <xi, pi^T w>.
    """
    field = f.field
    P = [[a if _in_field(a, field) else field(a) for a in row] for row in projection]
    if len(P) != f.dim:
        raise ValueError("projection does not match the function's dimension")
    m = len(P[0]) if P else 0
    if not P:
        raise ValueError("cannot determine the target dimension of an empty projection")
    PT = transpose(P)

    def image(w):
        return tuple(sum((a * b for a, b in zip(row, w)), field.zero) for row in PT)

    return MeroFun(field, m, [(t.coeff, image(t.point), [image(v) for v in t.lin], [image(w) for w in t.exp]) for t in f.terms])


def pullback_constant(f: MeroFun, target_dim: int) -> MeroFun:
    """Pull back a function of zero variables (a constant) to ``target_dim`` variables."""
    if f.dim != 0:
        raise ValueError("not a function of zero variables")
    zero = (f.field.zero,) * target_dim
    return MeroFun(f.field, target_dim, [(t.coeff, zero, (), ()) for t in f.terms])


# --------------------------------------------------------------------------
# exponential sums and integrals of polyhedra


def s_simplicial(piece: HalfOpenSimplicialCone, field: Field = QQ) -> MeroFun:
    """Sum of exp(<xi, x>) over lattice points of a half-open simplicial cone."""
    n = piece.lattice.dim
    conv = lambda v: tuple(field(a) for a in v)
    gens = [conv(g) for g in piece.generators]
    return MeroFun(field, n, [(field.one, conv(x), (), gens) for x in box_points(piece)])


def i_simplicial(apex, generators: Sequence, lattice: LatticeContext, field: Field = QQ) -> MeroFun:
    """Integral of exp(<xi, x>) over a simplicial cone, with the relative lattice measure."""
    k = len(generators)
    vol = relative_volume(generators, lattice) if generators else Fraction(1)
    coeff = field((-1) ** k * vol)
    conv = lambda v: tuple(field(a) for a in v)
    return MeroFun(field, len(apex), [(coeff, conv(apex), [conv(g) for g in generators], ())])


def s_of(X: Cone | Polytope, field: Field = QQ) -> MeroFun:
    """S(X): the exponential sum over lattice points, as a meromorphic function."""
    if isinstance(X, Polytope):
        total = MeroFun.zero(X.ambient_dim, field)
        for v in X.vertex_faces():
            total = total + s_of(supporting_cone(X, v), field)
        return total
    if not X.is_pointed:
        return MeroFun.zero(X.ambient_dim, field)
    total = MeroFun.zero(X.ambient_dim, field)
    for piece in halfopen_decompose(X):
        total = total + s_simplicial(piece, field)
    return total


def i_of(X: Cone | Polytope, field: Field = QQ) -> MeroFun:
    """I(X): the exponential integral over X with the relative lattice measure."""
    if isinstance(X, Polytope):
        total = MeroFun.zero(X.ambient_dim, field)
        for v in X.vertex_faces():
            total = total + i_of(supporting_cone(X, v), field)
        return total
    if not X.is_pointed:
        return MeroFun.zero(X.ambient_dim, field)
    total = MeroFun.zero(X.ambient_dim, field)
    for simplex in X.triangulate():
        total = total + i_simplicial(X.apex, simplex, X.lattice, field)
    return total


def s_interior(X: Cone | Polytope, field: Field = QQ) -> MeroFun:
    """Exponential sum over lattice points of the relative interior."""
    total = MeroFun.zero(X.ambient_dim, field)
    for face in X.faces:
        sub = X.face_polytope(face) if isinstance(X, Polytope) else X.face_cone(face)
        term = s_of(sub, field)
        total = total + (term if (X.dim - face.dim) % 2 == 0 else -term)
    return total


def lattice_point_sum(points: Iterable, dim: int, field: Field = QQ) -> MeroFun:
    """The finite exponential sum over an explicit list of points."""
    return MeroFun.exp_poly([(p, 1) for p in points], dim, field)


# --------------------------------------------------------------------------
# exact equality


def _linear_product(forms: tuple, dim: int, one) -> dict:
    p = {(0,) * dim: one}
    for v in forms:
        p = poly_mul(p, linear_poly(v))
    return p


def _rational_sum_is_zero(items, dim: int, field: Field) -> bool:
    """Whether sum c / prod(linear forms) vanishes identically."""
    merged: dict = {}
    for c, lin in items:
        merged[lin] = merged.get(lin, 0) + c
    merged = {lin: c for lin, c in merged.items() if c != 0}
    if not merged:
        return True
    if len(merged) == 1:
        return False
    need: Counter = Counter()
    for lin in merged:
        for v, m in Counter(lin).items():
            need[v] = max(need[v], m)
    total: dict = {}
    for lin, c in merged.items():
        missing = tuple((need - Counter(lin)).elements())
        total = poly_add(total, poly_scale(_linear_product(missing, dim, field.one), c))
    return poly_is_zero(total)


def _clear_exponentials(f: MeroFun) -> dict:
    """Multiply f by prod (1 - e^w) over its exponential denominators.

    Returns {point: [(coeff, linear denominators), ...]}.
    """
    need: Counter = Counter()
    groups: dict = defaultdict(list)
    for t in f.terms:
        for w, m in Counter(t.exp).items():
            need[w] = max(need[w], m)
        groups[t.exp].append(t)
    field, dim = f.field, f.dim
    zero = (field.zero,) * dim
    buckets: dict = defaultdict(list)
    for exps, terms in groups.items():
        mult = {zero: field.one}
        for w in (need - Counter(exps)).elements():
            nxt = dict(mult)
            for p, c in mult.items():
                q = tuple(a + b for a, b in zip(p, w))
                v = nxt.get(q, 0) - c
                if v == 0:
                    nxt.pop(q, None)
                else:
                    nxt[q] = v
            mult = nxt
        for t in terms:
            for b, m in mult.items():
                buckets[tuple(a + c for a, c in zip(t.point, b))].append((t.coeff * m, t.lin))
    return buckets


def canonical_equal(f: MeroFun, g: MeroFun) -> bool:
    """Exact test of f == g as meromorphic functions.

    After clearing exponential denominators, f - g is a sum of distinct
    exponentials exp(<xi, a>) with coefficients that are rational functions
    of xi; such exponentials are linearly independent over the rational
    functions, so each coefficient must vanish separately.
    """
    if f.field != g.field:
        from .exactmath import common_field

        F = common_field(f.field, g.field)
        f, g = f.to_field(F), g.to_field(F)
    h = f - g
    if not h.terms:
        return True
    for items in _clear_exponentials(h).values():
        if not _rational_sum_is_zero(items, h.dim, h.field):
            return False
    return True


def is_exp_poly(f: MeroFun) -> bool:
    return all(not t.lin and not t.exp for t in f.terms)


# --------------------------------------------------------------------------
# Taylor expansion at the origin


def _scalar_to_fraction_or_field(x, field):
    return x if _in_field(x, field) else field(x)


def taylor_at_zero_lcd(f: MeroFun, order: int) -> TruncSeries:
    """Taylor coefficients of f at the origin through total degree ``order``.

    Each term is written as (regular series) / (product of linear forms),
    the terms are put over a common product of linear forms, and that
    product is divided out exactly.  Raises ``GenuinePoleError`` if f is not
    regular at the origin.  Slower than ``taylor_at_zero`` but independent
    of it.
    """
    field, dim = f.field, f.dim
    if dim == 0:
        c = sum((t.coeff for t in f.terms), field.zero)
        return TruncSeries.constant(c, 0, order, field) if order >= 0 else None
    key = _vector_key(field)
    # rewrite 1/(1 - e^{s<xi,u>}) = -(1/s) * todd(s<xi,u>) / <xi,u>, u with leading coordinate 1
    prepared = []
    need: Counter = Counter()
    for t in f.terms:
        coeff = t.coeff
        forms = list(t.lin)
        todds = []
        for w in t.exp:
            s = next(a for a in w if a != 0)
            u = tuple(a / s for a in w)
            coeff = -coeff / s
            forms.append(u)
            todds.append(w)
        forms = tuple(sorted(forms, key=key))
        for u, m in Counter(forms).items():
            need[u] = max(need[u], m)
        prepared.append((coeff, t.point, forms, tuple(sorted(todds, key=key))))
    depth = sum(need.values())
    W = order + depth
    todd = todd_coefficients(W)
    todd_cache: dict = {}
    lin_cache: dict = {}

    def todd_series(w):
        s = todd_cache.get(w)
        if s is None:
            s = compose_linear([field(c) for c in todd], w, W, field)
            todd_cache[w] = s
        return s

    groups: dict = defaultdict(list)
    for coeff, point, forms, todds in prepared:
        groups[(forms, todds)].append((coeff, point))
    total = TruncSeries.zero(dim, W, field)
    for (forms, todds), items in groups.items():
        series = TruncSeries.zero(dim, W, field)
        for coeff, point in items:
            series = series + exp_linear(point, W, field) * coeff
        for w in todds:
            series = series * todd_series(w)
        missing = tuple((need - Counter(forms)).elements())
        if missing:
            poly = lin_cache.get(missing)
            if poly is None:
                poly = TruncSeries.from_coefficients(_linear_product(missing, dim, field.one), dim, W, field)
                lin_cache[missing] = poly
            series = series * poly
        total = total + series
    for u in sorted(need.elements(), key=key):
        total = divide_by_linear_form(total, u)
    return total


def _principal_lattice(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Integer points a >= 0 in nvars dimensions with |a| <= degree."""
    if nvars == 0:
        return [()]
    out = []
    for first in range(degree + 1):
        for rest in _principal_lattice(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


def _line_directions(n: int, order: int, forms: list, field: Field):
    """Directions y for line restrictions, avoiding every hyperplane <y, v> = 0.

    y_a = A (1, a) for a in the principal lattice of degree ``order``; for an
    invertible A these points are unisolvent for homogeneous polynomials of
    each degree k <= order (using the points with |a| <= k).
    """
    import random

    from .exactmath import det

    lattice = _principal_lattice(n - 1, order)
    rng = random.Random(1729)
    for attempt in range(100):
        if attempt == 0:
            # a fixed shear: readable, and rarely on a coordinate hyperplane
            A = [[Fraction(int(i == j)) + (Fraction(j + 2, 3 + i) if j < i else 0) for j in range(n)] for i in range(n)]
            A[0] = [Fraction(1)] + [Fraction(1, k + 7) for k in range(n - 1)]
        else:
            A = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)] for _ in range(n)]
        if det(A) == 0:
            continue
        points = []
        ok = True
        for a in lattice:
            z = (Fraction(1),) + tuple(Fraction(c) for c in a)
            y = tuple(sum((A[i][j] * z[j] for j in range(n)), Fraction(0)) for i in range(n))
            fy = tuple(field(c) for c in y)
            for v in forms:
                if sum((c * b for c, b in zip(fy, v)), field.zero) == 0:
                    ok = False
                    break
            if not ok:
                break
            points.append((a, y, fy))
        if ok:
            return points
    raise RuntimeError("could not find line directions avoiding the singular hyperplanes")


@lru_cache(maxsize=256)
def _interpolation_inverse(ys: tuple, n: int, k: int):
    from .exactmath import monomials_of_degree

    monos = monomials_of_degree(n, k)
    V = []
    for y in ys:
        row = []
        for e in monos:
            val = Fraction(1)
            for yi, ei in zip(y, e):
                if ei:
                    val *= yi**ei
            row.append(val)
        V.append(row)
    return monos, inverse(V)


def taylor_at_zero(f: MeroFun, order: int) -> TruncSeries:
    """Taylor coefficients of f at the origin through total degree ``order``.

    Along a line xi = t*y every term is a Laurent series in t, computed from
    univariate expansions of exp and z/(e^z - 1).  Their sum is the series of
    f(t*y) = sum_k t^k P_k(y), where P_k is the homogeneous part of degree k
    of the Taylor expansion; each P_k is recovered exactly by interpolation
    on a unisolvent set of directions.  Raises ``GenuinePoleError`` when the
    negative powers of t do not cancel.
    """
    field, n = f.field, f.dim
    if order < 0:
        raise ValueError("order must be non-negative")
    if n == 0:
        c = sum((t.coeff for t in f.terms), field.zero)
        return TruncSeries.constant(c, 0, order, field)
    if not f.terms:
        return TruncSeries.zero(n, order, field)
    forms = list({v for t in f.terms for v in t.lin + t.exp})
    points = _line_directions(n, order, forms, field)
    depth = max(len(t.lin) + len(t.exp) for t in f.terms)
    L = order + depth + 1
    todd = [field(c) for c in todd_coefficients(L)]
    inv_fact = [field(Fraction(1, math.factorial(k))) for k in range(L + 1)]
    values = []  # values[j][k] = coefficient of t^k of f(t y_j)
    for _, _, y in points:
        pair = lambda v: sum((c * b for c, b in zip(y, v)), field.zero)
        lin_cache: dict = {}
        todd_cache: dict = {}
        total = [field.zero] * (order + depth + 1)  # index i <-> t^(i - depth)
        for t in f.terms:
            p = len(t.lin) + len(t.exp)
            m = order + p  # highest power needed in the regular part
            scale = t.coeff
            for v in t.lin:
                b = lin_cache.get(v)
                if b is None:
                    b = lin_cache[v] = pair(v)
                scale = scale / b
            alpha = pair(t.point)
            series = [inv_fact[0]]
            power = field.one
            for k in range(1, m + 1):
                power = power * alpha
                series.append(power * inv_fact[k])
            for w in t.exp:
                tw = todd_cache.get(w)
                if tw is None:
                    beta = pair(w)
                    coeffs = [todd[0]]
                    bp = field.one
                    for k in range(1, L + 1):
                        bp = bp * beta
                        coeffs.append(todd[k] * bp)
                    tw = todd_cache[w] = (beta, coeffs)
                beta, coeffs = tw
                scale = -scale / beta
                series = [
                    sum((series[i] * coeffs[k - i] for i in range(k + 1) if coeffs[k - i] != 0), field.zero)
                    for k in range(m + 1)
                ]
            for i in range(m + 1):
                if series[i] != 0:
                    total[i - p + depth] = total[i - p + depth] + scale * series[i]
        if any(c != 0 for c in total[:depth]):
            raise GenuinePoleError("function is not regular at the origin")
        values.append(total[depth:])
    comps = []
    for k in range(order + 1):
        chosen = [(j, y) for j, (a, y, _) in enumerate(points) if sum(a) <= k]
        monos, Vinv = _interpolation_inverse(tuple(y for _, y in chosen), n, k)
        rhs = [values[j][k] for j, _ in chosen]
        comp = {}
        for e, row in zip(monos, Vinv):
            c = sum((field(r) * b for r, b in zip(row, rhs) if r != 0), field.zero)
            if c != 0:
                comp[e] = c
        comps.append(comp)
    return TruncSeries(n, order, tuple(comps), order, field)


def is_regular_at_zero(f: MeroFun) -> bool:
    try:
        taylor_at_zero(f, 0)
    except GenuinePoleError:
        return False
    return True


# --------------------------------------------------------------------------
# residues


def residue_along(f: MeroFun, v1: Sequence[int]):
    """Residue of f along the hyperplane v1^perp, as a function on that hyperplane.

    Returns (quotient data, residue) where the residue is expressed in the
    coordinates of the dual of the quotient lattice Z^n / Z v1.  Each term
    may have at most one denominator factor parallel to v1; the residue with
    respect to the coordinate <xi, v1> of 1/<xi, c v1> is 1/c and that of
    1/(1 - exp(<xi, c v1>)) is -1/c.
    """
    field, n = f.field, f.dim
    v1 = frac_vector(v1)
    q = adapted_basis(LatticeContext.standard(n), [v1])
    R = [[field(a) for a in row] for row in q.projection]
    Uinv = inverse(transpose([list(c) for c in q.adapted]))
    first = [field(a) for a in Uinv[0]]
    v1_first = sum((a * field(b) for a, b in zip(first, v1)), field.zero)

    def image(w):
        return tuple(sum((a * b for a, b in zip(row, w)), field.zero) for row in R)

    def multiple(w):
        # c with w = c v1, or None when w is not parallel to v1
        if any(a != 0 for a in image(w)):
            return None
        return sum((a * b for a, b in zip(first, w)), field.zero) / v1_first

    out = []
    for t in f.terms:
        coeff = t.coeff
        lin, exp, hits = [], [], 0
        for v in t.lin:
            c = multiple(v)
            if c is None:
                lin.append(image(v))
            else:
                hits += 1
                coeff = coeff / c
        for w in t.exp:
            c = multiple(w)
            if c is None:
                exp.append(image(w))
            else:
                hits += 1
                coeff = -coeff / c
        if hits > 1:
            raise InputError("a term has a pole of order greater than one along the hyperplane")
        if hits == 1:
            out.append((coeff, image(t.point), lin, exp))
    return q, MeroFun(field, n - 1, out)
