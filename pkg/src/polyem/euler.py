"""Euler-Maclaurin formulas built from the interpolators.

For a polynomial h and a rational polytope P,

    sum_{x in P ∩ Λ} h(x) = sum_F  ∫_F  D(F) h,      D(F) = Todd operator of mu(Supp(P, F)),

and for lattice polytopes the reverse formulas express ∫_P h as sums of
(lambda-operator applied to h) over lattice points of faces, or of
(nu-operator applied to h) over lattice points in relative interiors.
The brute-force oracles at the end enumerate lattice points directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import InputError
from .exactmath import (
    QQ,
    Field,
    TruncSeries,
    poly_add,
    poly_degree,
    poly_derivative,
    poly_eval,
    poly_mul,
    poly_scale,
    vsub,
)
from .genfun import taylor_at_zero
from .geometry import Face, Polytope, supporting_cone
from .interp import ComplementMap, InterpolatorCache, audit_genericity, interpolator
from .lattice import relative_volume


# --------------------------------------------------------------------------
# polynomials in x1..xn


def parse_polynomial(text: str, dim: int, field: Field = QQ) -> dict:
    """Parse a polynomial in x1..x{dim} with rational coefficients into {exponents: coeff}."""
    names = [f"x{i + 1}" for i in range(dim)]
    symbols = sympy.symbols(names) if dim else ()
    symbols = symbols if isinstance(symbols, (list, tuple)) else (symbols,)
    local = dict(zip(names, symbols))
    try:
        expr = parse_expr(str(text), local_dict=local, transformations=standard_transformations + (convert_xor,))
    except Exception as exc:
        raise InputError(f"cannot parse polynomial {text!r}") from exc
    unknown = {str(s) for s in expr.free_symbols} - set(names)
    if unknown:
        raise InputError(f"unknown variables {sorted(unknown)} in {text!r} (use x1..x{dim})")
    try:
        poly = sympy.Poly(expr, *symbols, domain="QQ") if dim else None
    except sympy.PolynomialError as exc:
        raise InputError(f"{text!r} is not a polynomial") from exc
    if poly is None:
        value = sympy.Rational(expr)
        return {(): field(Fraction(int(value.p), int(value.q)))} if value != 0 else {}
    out = {}
    for monom, coeff in poly.terms():
        c = Fraction(int(coeff.p), int(coeff.q))
        if c != 0:
            out[tuple(monom)] = field(c)
    return out


def format_polynomial(p: dict, field: Field = QQ) -> str:
    if not p:
        return "0"
    parts = []
    for e in sorted(p, key=lambda e: (-sum(e), tuple(-a for a in e))):
        c = field.format(p[e])
        mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
        if " " in c:
            c = f"({c})"
        if mono:
            parts.append(mono if c == "1" else f"-{mono}" if c == "-1" else f"{c}*{mono}")
        else:
            parts.append(c)
    text = parts[0]
    for s in parts[1:]:
        text += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
    return text


def apply_operator(D: TruncSeries, h: dict) -> dict:
    """Apply the differential operator sum_alpha c_alpha d^alpha (D's coefficients) to h."""
    deg = poly_degree(h)
    if deg > D.valid_order:
        raise InputError(f"operator known through order {D.valid_order}, polynomial has degree {deg}")
    out: dict = {}
    for alpha, c in D.coefficients.items():
        if sum(alpha) > deg:
            continue
        out = poly_add(out, poly_scale(poly_derivative(h, alpha), c))
    return out


def _compose_affine(h: dict, p0, A) -> dict:
    """h(p0 + A y) as a polynomial in y (A has one column per y variable)."""
    n, d = len(p0), len(A[0]) if A else 0
    one = (0,) * d
    images = []
    for i in range(n):
        img = {one: p0[i]} if p0[i] != 0 else {}
        for j in range(d):
            if A[i][j] != 0:
                e = tuple(int(k == j) for k in range(d))
                img = poly_add(img, {e: A[i][j]})
        images.append(img)
    out: dict = {}
    for e, c in h.items():
        term = {one: c}
        for i, k in enumerate(e):
            for _ in range(k):
                term = poly_mul(term, images[i])
        out = poly_add(out, term)
    return out


def _simplex_monomial_integral(alpha) -> Fraction:
    # ∫ over the standard simplex of y^alpha = prod alpha_i! / (|alpha| + d)!
    num = 1
    for a in alpha:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(sum(alpha) + len(alpha)))


def integrate_poly_over_face(h: dict, P: Polytope, face: Face | None = None, field: Field = QQ):
    """Exact integral of h over a face with the relative lattice measure."""
    face = face or P.whole()
    if face.dim == 0:
        return poly_eval(h, tuple(field(a) for a in P.vertices[face.index[0]])) if h else field.zero
    total = field.zero
    for simplex in P.triangulate(face):
        p0 = P.vertices[simplex[0]]
        edges = [vsub(P.vertices[i], p0) for i in simplex[1:]]
        vol = relative_volume(edges, P.lattice)
        A = [[field(e[i]) for e in edges] for i in range(P.ambient_dim)]
        g = _compose_affine(h, tuple(field(a) for a in p0), A)
        acc = field.zero
        for alpha, c in g.items():
            acc = acc + c * field(_simplex_monomial_integral(alpha))
        total = total + acc * field(vol)
    return total


# --------------------------------------------------------------------------
# Euler-Maclaurin sums


@dataclass
class FaceContribution:
    face: Face
    vertices: list
    constant: object  # value at the origin of the interpolator
    volume: Fraction
    value: object  # the face's contribution to the total


def _operators(kind: str, cmap: ComplementMap, P: Polytope, order: int, cache):
    audit_genericity(cmap, P)
    out = {}
    for face in P.faces:
        f = interpolator(kind, cmap, supporting_cone(P, face), cache, audit=False)
        out[face] = taylor_at_zero(f, order)
    return out


def em_sum(cmap: ComplementMap, P: Polytope, h: dict, cache: InterpolatorCache | None = None, detail: bool = False):
    """sum over lattice points of P of h, computed as sum_F ∫_F D(F) h."""
    field = cmap.field
    h = {e: field(c) if not _in(c, field) else c for e, c in h.items()}
    ops = _operators("mu", cmap, P, max(poly_degree(h), 0), cache)
    total = field.zero
    rows = []
    for face, D in ops.items():
        value = integrate_poly_over_face(apply_operator(D, h), P, face, field) if h else field.zero
        total = total + value
        rows.append(FaceContribution(face, P.face_vertices(face), D.constant_term(), P.volume(face), value))
    return (total, rows) if detail else total


def count_lattice_points(cmap: ComplementMap, P: Polytope, cache: InterpolatorCache | None = None, detail: bool = False):
    """Number of lattice points as sum_F mu(Supp(P,F))(0) * vol(F)."""
    field = cmap.field
    ops = _operators("mu", cmap, P, 0, cache)
    total = field.zero
    rows = []
    for face, D in ops.items():
        c = D.constant_term()
        vol = P.volume(face)
        total = total + c * field(vol)
        rows.append(FaceContribution(face, P.face_vertices(face), c, vol, c * field(vol)))
    return (total, rows) if detail else total


def em_integral(cmap: ComplementMap, P: Polytope, h: dict, mode: str = "lambda", cache: InterpolatorCache | None = None, detail: bool = False):
    """∫_P h for a lattice polytope, as a sum over lattice points of faces.

    ``mode='lambda'`` sums (lambda-operator h)(x) over lattice points of each
    face; ``mode='nu'`` sums (nu-operator h)(x) over lattice points in the
    relative interior of each face.
    """
    if mode not in ("lambda", "nu"):
        raise InputError(f"unknown mode {mode!r}")
    if not P.is_lattice_polytope():
        raise InputError("the reverse formulas need a lattice polytope")
    field = cmap.field
    h = {e: field(c) if not _in(c, field) else c for e, c in h.items()}
    ops = _operators(mode, cmap, P, max(poly_degree(h), 0), cache)
    total = field.zero
    rows = []
    for face, D in ops.items():
        g = apply_operator(D, h) if h else {}
        value = field.zero
        for x in P.lattice_points(face, relint=(mode == "nu")):
            value = value + (poly_eval(g, tuple(field(a) for a in x)) if g else field.zero)
        total = total + value
        rows.append(FaceContribution(face, P.face_vertices(face), D.constant_term(), P.volume(face), value))
    return (total, rows) if detail else total


def volume_from_lattice_points(cmap: ComplementMap, P: Polytope, cache: InterpolatorCache | None = None, detail: bool = False):
    """vol(P) = sum_F lambda(Supp(P,F))(0) * #(F ∩ Λ)."""
    return em_integral(cmap, P, {(0,) * P.ambient_dim: cmap.field.one}, "lambda", cache, detail)


def _in(x, field: Field) -> bool:
    if field.is_symbolic:
        return getattr(x, "field", None) == field.K
    return isinstance(x, Fraction)


# --------------------------------------------------------------------------
# brute force


@dataclass
class BruteForce:
    count: int
    interior_count: int
    boundary_count: int
    volume: Fraction
    sum_h: Fraction | None
    integral: Fraction | None


def brute_force_oracles(P: Polytope, h: dict | None = None, limit: int | None = None) -> BruteForce:
    """Direct enumeration of lattice points (bounding box, guarded by POLYEM_MAX_ENUM)."""
    points = P.lattice_points(limit=limit)
    interior = [x for x in points if P.in_relative_interior(x)]
    sum_h = integral = None
    if h is not None:
        sum_h = sum((poly_eval(h, x) for x in points), Fraction(0))
        integral = integrate_poly_over_face(h, P)
    return BruteForce(len(points), len(interior), len(points) - len(interior), P.volume(), sum_h, integral)
