"""Exact scalars, linear algebra over a field, polynomials and truncated power series.

Two scalar fields are supported: the rationals (``fractions.Fraction``) and
rational functions in named parameters with integer coefficients (sympy's
``FracField``, ordered graded-lexicographically).  Everything else in the
package is written against the small ``Field`` interface below, so the same
code runs on numeric and symbolic complement maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Any, Iterable, Mapping, Sequence

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import ZZ
from sympy.polys.fields import field as _frac_field
from sympy.polys.orderings import grlex

from .errors import GenuinePoleError, InputError

Scalar = Any
Vector = tuple


# --------------------------------------------------------------------------
# fields


class Rationals:
    """The field Q, realised by ``fractions.Fraction``."""

    parameters: tuple[str, ...] = ()
    is_symbolic = False

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return self.parse(x)
        raise InputError(f"cannot interpret {x!r} as a rational number")

    def parse(self, text: str) -> Fraction:
        try:
            return Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {text!r}") from exc

    def format(self, x) -> str:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def sort_key(self, x):
        return x

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = Rationals()


class RationalFunctions:
    """The field Q(p1, ..., pk) of rational functions in named parameters.

    Elements are kept in lowest terms with integer coefficients, and the
    denominator's leading coefficient (graded lex order) is positive, so
    equal functions have identical representations.
    """

    is_symbolic = True

    def __init__(self, parameters: Sequence[str]):
        parameters = tuple(parameters)
        if not parameters:
            raise InputError("a rational function field needs at least one parameter")
        if len(set(parameters)) != len(parameters):
            raise InputError(f"repeated parameter names in {parameters}")
        self.parameters = parameters
        self.K, *self.gens = _frac_field(",".join(parameters), ZZ, grlex)
        self.zero = self.K.zero
        self.one = self.K.one
        self._symbols = {name: sympy.Symbol(name) for name in parameters}

    def __call__(self, x):
        if isinstance(x, Fraction):
            return self.K(x.numerator) / x.denominator
        if isinstance(x, int):
            return self.K(x)
        if isinstance(x, str):
            return self.parse(x)
        if getattr(x, "field", None) == self.K:
            return x
        raise InputError(f"cannot interpret {x!r} in Q({', '.join(self.parameters)})")

    def parse(self, text: str):
        text = str(text).strip()
        try:
            expr = parse_expr(
                text,
                local_dict=dict(self._symbols),
                transformations=standard_transformations + (convert_xor,),
                evaluate=True,
            )
        except Exception as exc:  # sympy raises a zoo of exception types here
            raise InputError(f"cannot parse {text!r}") from exc
        unknown = {str(s) for s in expr.free_symbols} - set(self.parameters)
        if unknown:
            raise InputError(f"undeclared symbols {sorted(unknown)} in {text!r}")
        if not expr.is_rational_function():
            raise InputError(f"{text!r} is not a rational function")
        return self.K.from_expr(expr)

    def _format_poly(self, p) -> str:
        parts = []
        for monom, coeff in p.terms():
            factors = []
            for name, e in zip(self.parameters, monom):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(int(coeff))
            body = "*".join(([str(mag)] if mag != 1 or not factors else []) + factors)
            parts.append(("-" if coeff < 0 else "+", body))
        if not parts:
            return "0"
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def format(self, x) -> str:
        x = self(x)
        if x.numer.is_ground and x.denom.is_ground:
            return QQ.format(Fraction(int(x.numer.LC), int(x.denom.LC)))
        num = self._format_poly(x.numer)
        if x.denom == 1:
            return num
        return f"({num})/({self._format_poly(x.denom)})"

    def sort_key(self, x):
        return (tuple(sorted(x.numer.items())), tuple(sorted(x.denom.items())))

    def __eq__(self, other):
        return isinstance(other, RationalFunctions) and other.parameters == self.parameters

    def __hash__(self):
        return hash(("QQ(...)", self.parameters))

    def __repr__(self):
        return f"QQ({', '.join(self.parameters)})"


Field = Rationals | RationalFunctions


def field_for(parameters: Sequence[str] = ()) -> Field:
    """Q when there are no parameters, Q(parameters) otherwise."""
    return RationalFunctions(parameters) if parameters else QQ


def common_field(*fields: Field) -> Field:
    """The larger of the given fields; Q embeds in every parameter field."""
    symbolic = {f for f in fields if f.is_symbolic}
    if len(symbolic) > 1:
        raise InputError("cannot combine rational function fields with different parameters")
    return symbolic.pop() if symbolic else QQ


def scalar_to_fraction(x) -> Fraction:
    """Convert a constant field element to a Fraction, or raise if it is not constant."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if x.numer.is_ground and x.denom.is_ground:
        return Fraction(int(x.numer.LC), int(x.denom.LC))
    raise InputError(f"{x} is not a constant")


# --------------------------------------------------------------------------
# vectors and matrices (any field; rows are tuples)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0)


def vadd(u, v) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v) -> tuple:
    return tuple(c * a for a in v)


def vneg(v) -> tuple:
    return tuple(-a for a in v)


def is_zero_vector(v) -> bool:
    return all(a == 0 for a in v)


def frac_vector(v) -> tuple[Fraction, ...]:
    return tuple(QQ(a) for a in v)


def is_integral(v) -> bool:
    return all(Fraction(a).denominator == 1 for a in v)


def primitive_integer(v) -> tuple[int, ...]:
    """The primitive integer vector on the ray through a nonzero rational vector."""
    v = frac_vector(v)
    if is_zero_vector(v):
        raise InputError("the zero vector has no direction")
    lcm = 1
    for a in v:
        lcm = lcm * a.denominator // math.gcd(lcm, a.denominator)
    ints = [int(a * lcm) for a in v]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    return tuple(a // g for a in ints)


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), 0) for col in Bt] for row in A]


def matvec(A, v) -> tuple:
    return tuple(sum((a * b for a, b in zip(row, v)), 0) for row in A)


def identity(n, field: Field = QQ):
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form.  Returns (reduced rows, pivot columns)."""
    M = [list(r) for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [a * inv for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows, ncols: int | None = None) -> int:
    return len(rref([frac_or_keep(r) for r in rows], ncols)[1]) if rows else 0


def frac_or_keep(row):
    return [Fraction(a) if isinstance(a, int) else a for a in row]


def nullspace(rows, ncols: int, field: Field = QQ) -> list[tuple]:
    """Basis of {x : row . x = 0 for every row}."""
    R, pivots = rref([frac_or_keep(r) for r in rows], ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [field.zero] * ncols
        x[f] = field.one
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def independent_subset(vectors) -> list[int]:
    """Indices of a maximal linearly independent subset, greedily from the left."""
    chosen: list[int] = []
    basis: list = []
    for i, v in enumerate(vectors):
        if len(rref(basis + [list(v)])[1]) > len(basis):
            basis.append(list(v))
            chosen.append(i)
    return chosen


def span_basis(vectors) -> list[tuple]:
    vectors = [tuple(v) for v in vectors]
    return [vectors[i] for i in independent_subset(vectors)]


def det(M):
    """Determinant by fraction-free-ish Gaussian elimination over the field."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [frac_or_keep(r) for r in M]
    sign = 1
    acc = None
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return 0 * A[c][c]
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        piv = A[c][c]
        acc = piv if acc is None else acc * piv
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / piv
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return acc if sign == 1 else -acc


def inverse(M, field: Field = QQ):
    n = len(M)
    aug = [list(frac_or_keep(row)) + list(e) for row, e in zip(M, identity(n, field))]
    R, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(R) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def solve(A, b):
    """Solve A x = b for square or overdetermined consistent systems; None if inconsistent."""
    n = len(A[0])
    aug = [list(frac_or_keep(row)) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [0 * R[0][0] if R else Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    return tuple(x)


# --------------------------------------------------------------------------
# polynomials: dicts {exponent tuple: nonzero coefficient}


def monomial_degree(e) -> int:
    return sum(e)


def poly_add(p, q, sign=1):
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, 0) + (c if sign == 1 else -c)
        if v == 0:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def poly_scale(p, c):
    if c == 0:
        return {}
    return {e: c * a for e, a in p.items()}


def poly_mul(p, q):
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def linear_poly(v) -> dict:
    n = len(v)
    return {tuple(int(i == j) for j in range(n)): a for i, a in enumerate(v) if a != 0}


def poly_degree(p) -> int:
    return max((sum(e) for e in p), default=-1)


def poly_eval(p, x):
    total = 0
    for e, c in p.items():
        term = c
        for xi, k in zip(x, e):
            if k:
                term = term * xi**k
        total = total + term
    return total


def poly_derivative(p, alpha):
    """The partial derivative d^alpha p."""
    out = {}
    for e, c in p.items():
        if any(k < a for k, a in zip(e, alpha)):
            continue
        coeff = c
        for k, a in zip(e, alpha):
            coeff = coeff * math.perm(k, a)
        out[tuple(k - a for k, a in zip(e, alpha))] = coeff
    return {e: c for e, c in out.items() if c != 0}


def poly_is_zero(p) -> bool:
    return all(c == 0 for c in p.values())


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


# --------------------------------------------------------------------------
# truncated power series


@dataclass(frozen=True)
class TruncSeries:
    """A multivariate power series known through total degree ``order``.

    ``comps[k]`` is the homogeneous component of degree k as a sparse dict.
    Coefficients of degree at most ``valid_order`` are exact; above that
    they are placeholders that must not be trusted (``valid_order`` only
    drops below ``order`` after divisions by linear forms).
    """

    nvars: int
    order: int
    comps: tuple[Mapping, ...]
    valid_order: int
    field: Field = QQ
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.comps) != self.order + 1:
            raise ValueError("component list does not match the order")
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"xi{i + 1}" for i in range(self.nvars)))

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, nvars, order, field: Field = QQ):
        return cls(nvars, order, tuple({} for _ in range(order + 1)), order, field)

    @classmethod
    def constant(cls, c, nvars, order, field: Field = QQ):
        comps = [{} for _ in range(order + 1)]
        if c != 0:
            comps[0] = {(0,) * nvars: field(c) if not isinstance(c, type(field.one)) else c}
        return cls(nvars, order, tuple(comps), order, field)

    @classmethod
    def from_coefficients(cls, coeffs: Mapping, nvars, order, field: Field = QQ):
        comps = [dict() for _ in range(order + 1)]
        for e, c in coeffs.items():
            d = sum(e)
            if d <= order and c != 0:
                comps[d][tuple(e)] = c
        return cls(nvars, order, tuple(comps), order, field)

    @classmethod
    def linear_form(cls, v, order, field: Field = QQ):
        comps = [dict() for _ in range(order + 1)]
        if order >= 1:
            comps[1] = linear_poly(v)
        return cls(len(v), order, tuple(comps), order, field)

    # access ---------------------------------------------------------------
    @property
    def coefficients(self) -> dict:
        out = {}
        for comp in self.comps:
            out.update(comp)
        return out

    def coefficient(self, alpha) -> Scalar:
        alpha = tuple(alpha)
        d = sum(alpha)
        if d > self.valid_order:
            raise ValueError(f"coefficient of degree {d} is beyond the valid order {self.valid_order}")
        return self.comps[d].get(alpha, self.field.zero)

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def truncate(self, order: int) -> "TruncSeries":
        order = min(order, self.order)
        return TruncSeries(self.nvars, order, self.comps[: order + 1], min(self.valid_order, order), self.field)

    def is_zero(self) -> bool:
        return all(not comp for comp in self.comps[: self.valid_order + 1])

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.valid_order, other.valid_order)
        return self.nvars == other.nvars and all(
            self.comps[k] == other.comps[k] for k in range(n + 1)
        )

    def __hash__(self):
        return hash((self.nvars, self.valid_order))

    # arithmetic -----------------------------------------------------------
    def _same_shape(self, other):
        if self.nvars != other.nvars:
            raise ValueError("series in different numbers of variables")
        return min(self.order, other.order), min(self.valid_order, other.valid_order)

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self + TruncSeries.constant(other, self.nvars, self.order, self.field)
        order, valid = self._same_shape(other)
        comps = tuple(poly_add(self.comps[k], other.comps[k]) for k in range(order + 1))
        return TruncSeries(self.nvars, order, comps, valid, self.field)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.nvars, self.order, tuple({e: -c for e, c in comp.items()} for comp in self.comps), self.valid_order, self.field)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            if other == 0:
                return TruncSeries.zero(self.nvars, self.order, self.field)
            return TruncSeries(self.nvars, self.order, tuple(poly_scale(comp, other) for comp in self.comps), self.valid_order, self.field)
        order, valid = self._same_shape(other)
        # a coefficient of degree d is exact when both factors are exact through d
        comps = []
        for d in range(order + 1):
            acc: dict = {}
            for i in range(d + 1):
                a, b = self.comps[i], other.comps[d - i]
                if not a or not b:
                    continue
                for e1, c1 in a.items():
                    for e2, c2 in b.items():
                        e = tuple(x + y for x, y in zip(e1, e2))
                        acc[e] = acc.get(e, 0) + c1 * c2
            comps.append({e: c for e, c in acc.items() if c != 0})
        return TruncSeries(self.nvars, order, tuple(comps), valid, self.field)

    __rmul__ = __mul__

    def __repr__(self):
        return f"TruncSeries(order={self.order}, valid={self.valid_order}, {self.coefficients})"


def series_arith(lhs: TruncSeries, rhs, op: str) -> TruncSeries:
    """Apply ``op`` in {'+', '-', '*'} to two series (or a series and a scalar)."""
    if op == "+":
        return lhs + rhs
    if op == "-":
        return lhs - rhs
    if op == "*":
        return lhs * rhs
    raise ValueError(f"unknown operation {op!r}")


def series_invert(s: TruncSeries) -> TruncSeries:
    """The multiplicative inverse of a series with nonzero constant term."""
    c0 = s.comps[0].get((0,) * s.nvars, 0)
    if c0 == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv0 = s.field.one / c0
    out = [{(0,) * s.nvars: inv0}]
    for d in range(1, s.valid_order + 1):
        acc: dict = {}
        for j in range(1, d + 1):
            a, b = s.comps[j], out[d - j]
            for e1, c1 in a.items():
                for e2, c2 in b.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    acc[e] = acc.get(e, 0) + c1 * c2
        out.append({e: -inv0 * c for e, c in acc.items() if c != 0})
    out += [{} for _ in range(s.order - s.valid_order)]
    return TruncSeries(s.nvars, s.order, tuple(out), s.valid_order, s.field)


def _divide_homogeneous(p: Mapping, v, pivot: int):
    """Divide a homogeneous polynomial by the linear form v.  Returns (quotient, remainder)."""
    rem = dict(p)
    quot: dict = {}
    vp = v[pivot]
    others = [(i, a) for i, a in enumerate(v) if i != pivot and a != 0]
    top = max((e[pivot] for e in rem), default=0)
    for level in range(top, 0, -1):
        for e in [e for e in rem if e[pivot] == level]:
            c = rem.pop(e)
            if c == 0:
                continue
            qe = e[:pivot] + (level - 1,) + e[pivot + 1 :]
            q = c / vp
            quot[qe] = quot.get(qe, 0) + q
            for i, a in others:
                f = qe[:i] + (qe[i] + 1,) + qe[i + 1 :]
                rem[f] = rem.get(f, 0) - q * a
    quot = {e: c for e, c in quot.items() if c != 0}
    rem = {e: c for e, c in rem.items() if c != 0}
    return quot, rem


def divide_by_linear_form(s: TruncSeries, v) -> TruncSeries:
    """Exact division of a series by the linear form <xi, v>.

    Order and valid order both drop by one.  Raises ``GenuinePoleError`` if
    the series is not divisible through its valid order.
    """
    if len(v) != s.nvars:
        raise ValueError("linear form has the wrong number of variables")
    pivot = next((i for i, a in enumerate(v) if a != 0), None)
    if pivot is None:
        raise ZeroDivisionError("division by the zero linear form")
    if s.order == 0:
        raise ValueError("cannot divide a series of order 0")
    if s.valid_order >= 0 and s.comps[0]:
        raise GenuinePoleError("series has a nonzero constant term and is not divisible")
    comps = []
    for d in range(1, s.order + 1):
        q, r = _divide_homogeneous(s.comps[d], v, pivot)
        if r and d <= s.valid_order:
            raise GenuinePoleError(f"series is not divisible by the linear form {tuple(v)}")
        comps.append(q)
    return TruncSeries(s.nvars, s.order - 1, tuple(comps), s.valid_order - 1, s.field)


def compose_linear(coeffs: Sequence, v, order: int, field: Field = QQ) -> TruncSeries:
    """The series sum_k coeffs[k] * <xi, v>^k, truncated at ``order``."""
    n = len(v)
    ell = linear_poly(v)
    comps = [dict() for _ in range(order + 1)]
    power = {(0,) * n: field.one}
    for k in range(order + 1):
        if k < len(coeffs) and coeffs[k] != 0:
            comps[k] = poly_scale(power, coeffs[k])
        if k < order:
            power = poly_mul(power, ell)
    return TruncSeries(n, order, tuple(comps), order, field)


def exp_linear(a, order: int, field: Field = QQ) -> TruncSeries:
    """The series of exp(<xi, a>)."""
    return compose_linear([Fraction(1, math.factorial(k)) for k in range(order + 1)], a, order, field)


@lru_cache(maxsize=None)
def _bernoulli_fn_coeffs(order: int) -> tuple[Fraction, ...]:
    # E(z) = (e^z - 1)/z and B(z) = (1 - 1/E(z))/z
    E = TruncSeries.from_coefficients(
        {(k,): Fraction(1, math.factorial(k + 1)) for k in range(order + 2)}, 1, order + 1
    )
    num = TruncSeries.constant(1, 1, order + 1) - series_invert(E)
    B = divide_by_linear_form(num, (Fraction(1),))
    return tuple(B.coefficient((k,)) for k in range(order + 1))


def bernoulli_series(order: int, field: Field = QQ) -> TruncSeries:
    """Taylor series of B(z) = 1/(1 - e^z) + 1/z = 1/2 - z/12 + z^3/720 - ..."""
    return TruncSeries.from_coefficients(
        {(k,): field(c) for k, c in enumerate(_bernoulli_fn_coeffs(order)) if c != 0}, 1, order, field
    )


def bernoulli_coefficients(order: int) -> tuple[Fraction, ...]:
    """Coefficients b_0..b_order of B(z) as Fractions."""
    return _bernoulli_fn_coeffs(order)


@lru_cache(maxsize=None)
def _exp_unit_inverse_coeffs(order: int) -> tuple[Fraction, ...]:
    # z/(e^z - 1) = 1/E(z)
    E = TruncSeries.from_coefficients(
        {(k,): Fraction(1, math.factorial(k + 1)) for k in range(order + 1)}, 1, order
    )
    inv = series_invert(E)
    return tuple(inv.comps[k].get((k,), Fraction(0)) for k in range(order + 1))


def todd_coefficients(order: int) -> tuple[Fraction, ...]:
    """Coefficients of z/(e^z - 1), so that 1/(1 - e^z) = -(1/z) * z/(e^z - 1)."""
    return _exp_unit_inverse_coeffs(order)
