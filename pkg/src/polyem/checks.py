"""Identity checks run by ``polyem verify``.

Each check compares two independently assembled sides exactly and returns a
``Check`` with the discrepancy (rendered) when they differ.  Checks that do
not apply to the given object (say, duality for a three-dimensional cone)
are not run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import GenuinePoleError, InputError
from .euler import (
    count_lattice_points,
    em_integral,
    em_sum,
    format_polynomial,
    integrate_poly_over_face,
    volume_from_lattice_points,
)
from .exactmath import det, inverse, poly_eval, transpose
from .genfun import (
    MeroFun,
    canonical_equal,
    i_of,
    lattice_point_sum,
    pullback,
    render,
    residue_along,
    s_interior,
    s_of,
    taylor_at_zero,
)
from .geometry import Cone, Polytope, halfopen_decompose, supporting_cone
from .interp import (
    ComplementMap,
    InterpolatorCache,
    audit_genericity,
    interpolator,
    morelli_duality_check,
    mu,
    mu_closed_form_2d,
    transport,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    discrepancy: str | None = None
    extra: dict = field(default_factory=dict)


def _compare(name: str, lhs: MeroFun, rhs: MeroFun, detail: str = "") -> Check:
    if canonical_equal(lhs, rhs):
        return Check(name, True, detail)
    return Check(name, False, detail, render(lhs - rhs))


def _compare_scalars(name: str, lhs, rhs, fmt: Callable, detail: str = "") -> Check:
    if lhs == rhs:
        return Check(name, True, detail or f"{fmt(lhs)}")
    return Check(name, False, detail or f"{fmt(lhs)} vs {fmt(rhs)}", fmt(lhs - rhs))


def _pieces(X):
    """(face, sub-polyhedron, supporting cone) for every face."""
    for face in sorted(X.faces, key=lambda f: (f.dim, f.index)):
        sub = X.face_polytope(face) if isinstance(X, Polytope) else X.face_cone(face)
        yield face, sub, supporting_cone(X, face)


def _is_lattice(X) -> bool:
    return X.is_lattice_polytope() if isinstance(X, Polytope) else X.is_lattice_cone()


# --------------------------------------------------------------------------
# identities shared by polytopes and cones


def check_interpolator(cmap: ComplementMap, X, cache) -> Check:
    F = cmap.field
    rhs = MeroFun.zero(X.ambient_dim, F)
    for _, sub, K in _pieces(X):
        rhs = rhs + mu(cmap, K, cache, audit=False) * i_of(sub, F)
    lhs = s_of(X, F)
    shown = lhs
    if isinstance(X, Polytope):
        # echo S(P) as the finite sum it equals
        finite = lattice_point_sum(X.lattice_points(), X.ambient_dim, F)
        if canonical_equal(lhs, finite):
            shown = finite
    return _compare("interpolator", lhs, rhs, f"S = {render(shown)}")


def check_regularity(cmap: ComplementMap, X, cache) -> Check:
    kinds = ["mu", "lambda", "nu"] if _is_lattice(X) else ["mu"]
    for face, _, K in _pieces(X):
        for kind in kinds:
            try:
                taylor_at_zero(interpolator(kind, cmap, K, cache, audit=False), 1)
            except GenuinePoleError:
                return Check("regularity", False, f"{kind} of the supporting cone at face {face.index} has a pole", "pole")
    return Check("regularity", True, f"{'/'.join(kinds)} regular on {len(X.faces)} supporting cones")


def check_mobius(cmap: ComplementMap, X, cache) -> Check:
    """sum_F lambda(F) mu(Supp(K,F)) = 0 and sum_F nu(F) mu(Supp(K,F)) = 1 on supporting cones."""
    F, n = cmap.field, X.ambient_dim
    for face, _, K in _pieces(X):
        for kind, target in (("lambda", 0), ("nu", 1)):
            total = MeroFun.zero(n, F)
            for g in K.faces:
                total = total + interpolator(kind, cmap, K.face_cone(g), cache, audit=False) * mu(
                    cmap, supporting_cone(K, g), cache, audit=False
                )
            # cones with lineality are read through their pointed quotient
            pointed_dim = K.dim - len(K.lineality)
            expected = MeroFun.constant(1 if (target or pointed_dim == 0) else 0, n, F)
            if not canonical_equal(total, expected):
                return Check("mobius", False, f"{kind} at face {face.index}", render(total - expected))
    return Check("mobius", True, f"lambda and nu inversions hold on {len(X.faces)} supporting cones")


def check_reverse(cmap: ComplementMap, X, cache) -> Check:
    """I(X) = sum_F lambda(Supp(X,F)) S(F) = sum_F nu(Supp(X,F)) S(relint F)."""
    F, n = cmap.field, X.ambient_dim
    lam = MeroFun.zero(n, F)
    nuf = MeroFun.zero(n, F)
    for _, sub, K in _pieces(X):
        lam = lam + interpolator("lambda", cmap, K, cache, audit=False) * s_of(sub, F)
        nuf = nuf + interpolator("nu", cmap, K, cache, audit=False) * s_interior(sub, F)
    target = i_of(X, F)
    first = _compare("reverse", target, lam, "I = sum lambda * S")
    if not first.passed:
        return first
    return _compare("reverse", target, nuf, "I = sum lambda * S = sum nu * S(relint)")


# --------------------------------------------------------------------------
# polytope identities


def check_brion(cmap: ComplementMap, P: Polytope, cache) -> Check:
    F = cmap.field
    points = P.lattice_points()
    return _compare("brion", s_of(P, F), lattice_point_sum(points, P.ambient_dim, F), f"{len(points)} lattice points")


def check_count(cmap: ComplementMap, P: Polytope, cache) -> Check:
    F = cmap.field
    return _compare_scalars("count", count_lattice_points(cmap, P, cache), F(len(P.lattice_points())), F.format)


def check_em_sum(cmap: ComplementMap, P: Polytope, cache, h: dict) -> Check:
    F = cmap.field
    brute = sum((poly_eval(h, tuple(F(a) for a in x)) for x in P.lattice_points()), F.zero) if h else F.zero
    return _compare_scalars("em_sum", em_sum(cmap, P, h, cache), brute, F.format, f"h = {format_polynomial(h, F)}")


def check_em_integral(cmap: ComplementMap, P: Polytope, cache, h: dict) -> Check:
    F = cmap.field
    direct = integrate_poly_over_face(h, P, None, F) if h else F.zero
    for mode in ("lambda", "nu"):
        got = em_integral(cmap, P, h, mode, cache)
        if got != direct:
            return Check("em_integral", False, f"{mode}: {F.format(got)} vs {F.format(direct)}", F.format(got - direct))
    return Check("em_integral", True, f"h = {format_polynomial(h, F)}, integral {F.format(direct)}")


def check_volume(cmap: ComplementMap, P: Polytope, cache) -> Check:
    F = cmap.field
    return _compare_scalars("volume", volume_from_lattice_points(cmap, P, cache), F(P.volume()), F.format)


# --------------------------------------------------------------------------
# cone identities


def random_unimodular(n: int, rng: random.Random, steps: int = 6) -> list[list[int]]:
    """A product of elementary integer matrices and signed permutations."""
    G = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n == 1:
            G = [[-G[0][0]]]
            continue
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        for row in G:
            row[i] += c * row[j]
        if rng.random() < 0.3:
            for row in G:
                row[i], row[j] = row[j], -row[i]
    return G


def check_lattice_invariance(cmap: ComplementMap, K: Cone, cache, rng: random.Random) -> Check:
    v = tuple(rng.randint(-3, 3) for _ in range(K.ambient_dim))
    moved = Cone(tuple(a + b for a, b in zip(K.apex, v)), K.generators, K.lineality, K.lattice)
    return _compare("lattice_invariance", mu(cmap, moved, cache), mu(cmap, K, cache), f"shift by {v}")


def check_isometry(cmap: ComplementMap, K: Cone, cache, rng: random.Random) -> Check:
    if not K.lattice.is_standard:
        raise InputError("the isometry check assumes the standard lattice")
    n = K.ambient_dim
    G = random_unimodular(n, rng)
    act = lambda v: tuple(sum((Fraction(G[i][j]) * v[j] for j in range(n)), Fraction(0)) for i in range(n))
    gK = Cone(act(K.apex), [act(g) for g in K.generators], [act(v) for v in K.lineality])
    moved = mu(transport(cmap, G), gK, cache)
    # mu^{g Psi}(gK)(g* xi) with g* xi = G^{-T} xi
    back = pullback(moved, transpose(inverse([[Fraction(a) for a in row] for row in G])))
    return _compare("isometry", back, mu(cmap, K, cache), f"g = {G}")


def check_morelli(cmap: ComplementMap, K: Cone, cache) -> Check:
    lhs, rhs, ok = morelli_duality_check(cmap, K, cache)
    F = cmap.field
    return Check("morelli", ok, f"nu(K)(0) = {F.format(lhs)}, mu*(dual)(0) = {F.format(rhs)}", None if ok else F.format(lhs - rhs))


def check_closed_form(cmap: ComplementMap, K: Cone, cache) -> Check:
    return _compare("closed_form", mu_closed_form_2d(cmap, K), mu(cmap, K, cache))


def check_residue(cmap: ComplementMap, K: Cone, cache) -> Check:
    """Res along each ray of S(K) and I(K) equals minus S and I of the image cone."""
    F = cmap.field
    rays = K.rays
    for r in rays:
        others = [g for g in rays if g != r]
        for name, gen in (("S", s_of), ("I", i_of)):
            q, res = residue_along(gen(K, F), r)
            image = Cone(q.project(K.apex), [q.project(g) for g in others], (), q.quotient_lattice())
            expected = -gen(image, F)
            if not canonical_equal(res, expected):
                return Check("residue", False, f"Res of {name} along {r}", render(res - expected))
    return Check("residue", True, f"S and I along {len(rays)} rays")


def check_halfopen(cmap: ComplementMap, K: Cone, cache) -> Check:
    """Each probe point lies in exactly as many half-open pieces as the closed cone indicates."""
    pieces = halfopen_decompose(K)
    n = K.ambient_dim
    steps = [Fraction(k, 2) for k in range(-4, 5)]
    probes = [()]
    for _ in range(n):
        probes = [p + (s,) for p in probes for s in steps]
    for p in probes:
        x = tuple(a + b for a, b in zip(K.apex, p))
        hits = sum(1 for piece in pieces if piece.contains(x))
        if hits != int(K.contains(x)):
            return Check("halfopen", False, f"point {tuple(str(a) for a in x)} covered {hits} times", str(hits - int(K.contains(x))))
    return Check("halfopen", True, f"{len(pieces)} pieces, {len(probes)} probe points")


# --------------------------------------------------------------------------
# driver

POLYTOPE_CHECKS = ("interpolator", "brion", "regularity", "mobius", "reverse", "count", "volume", "em_sum", "em_integral")
CONE_CHECKS = (
    "interpolator",
    "regularity",
    "mobius",
    "reverse",
    "lattice_invariance",
    "isometry",
    "morelli",
    "closed_form",
    "residue",
    "halfopen",
)


def applicable(cmap: ComplementMap, X) -> list[str]:
    if isinstance(X, Polytope):
        names = list(POLYTOPE_CHECKS)
        if not X.is_lattice_polytope():
            names = [c for c in names if c not in ("mobius", "reverse", "volume", "em_integral")]
        return names
    names = list(CONE_CHECKS)
    if not X.is_lattice_cone():
        names = [c for c in names if c not in ("mobius", "reverse")]
    if not (X.ambient_dim <= 2 and all(a == 0 for a in X.apex) and X.is_pointed):
        names.remove("morelli")
    if X.ambient_dim > 2 or not X.lattice.is_standard or not _closed_form_shape(X):
        names.remove("closed_form")
    if not (X.is_pointed and len(X.rays) == X.dim == X.ambient_dim and X.dim > 0):
        names.remove("residue")
    if not X.is_pointed:
        names.remove("halfopen")
    if not X.lattice.is_standard:
        names.remove("isometry")
    return names


def _closed_form_shape(K: Cone) -> bool:
    if K.dim == 0:
        return True
    if not K.is_lattice_cone():
        return False
    if K.is_pointed and K.dim == 1:
        return True
    if len(K.lineality) == 1 and len(K.rays) == 1 and K.ambient_dim == 2:
        return True
    return K.is_pointed and K.dim == 2 and abs(det([list(v) for v in K.rays])) == 1


def run_checks(
    cmap: ComplementMap,
    X,
    names: list[str] | None = None,
    h: dict | None = None,
    seed: int = 0,
    cache: InterpolatorCache | None = None,
) -> list[Check]:
    """Run the named checks (default: all that apply) and return their results in order."""
    cache = cache if cache is not None else InterpolatorCache()
    audit_genericity(cmap, X)
    available = applicable(cmap, X)
    if names:
        known = POLYTOPE_CHECKS if isinstance(X, Polytope) else CONE_CHECKS
        for name in names:
            if name not in known:
                raise InputError(f"unknown identity {name!r} for a {type(X).__name__.lower()}; choose from {', '.join(known)}")
            if name not in available:
                raise InputError(f"identity {name!r} does not apply to this input")
    else:
        names = available
    rng = random.Random(seed)
    h = h if h is not None else {(0,) * X.ambient_dim: cmap.field.one}
    results = []
    for name in names:
        if name in ("interpolator", "regularity", "mobius", "reverse"):
            fn = globals()[f"check_{name}"]
            results.append(fn(cmap, X, cache))
        elif name in ("em_sum", "em_integral"):
            results.append(globals()[f"check_{name}"](cmap, X, cache, h))
        elif name in ("lattice_invariance", "isometry"):
            results.append(globals()[f"check_{name}"](cmap, X, cache, rng))
        else:
            results.append(globals()[f"check_{name}"](cmap, X, cache))
    return results

