from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import bernoulli_series as bernoulli_oracle
from polyem.errors import GenuinePoleError, InputError
from polyem.exactmath import (
    QQ,
    RationalFunctions,
    TruncSeries,
    bernoulli_coefficients,
    bernoulli_series,
    common_field,
    det,
    divide_by_linear_form,
    exp_linear,
    field_for,
    identity,
    inverse,
    matmul,
    matvec,
    nullspace,
    poly_derivative,
    poly_eval,
    primitive_integer,
    rank,
    series_invert,
    solve,
    todd_coefficients,
)

small = st.integers(-6, 6)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


# --------------------------------------------------------------------------
# fields


def test_rationals_parse_and_format():
    assert QQ.parse("-3/6") == Fraction(-1, 2)
    assert QQ.format(Fraction(4, 2)) == "2"
    assert QQ.format(Fraction(-5, 12)) == "-5/12"
    with pytest.raises(InputError):
        QQ.parse("x")


def test_rational_functions_canonical_form():
    F = RationalFunctions(["d1", "d2"])
    x = F.parse("(d1^2 + 3*d1*d2 + d2^2)/(12*d1*d2)")
    assert F.format(x) == "(d1^2 + 3*d1*d2 + d2^2)/(12*d1*d2)"
    # the same function written differently has the same representation
    y = F.parse("d1/(12*d2) + 1/4 + d2/(12*d1)")
    assert x == y and F.format(y) == F.format(x)
    assert F.format(F.parse("2/4")) == "1/2"


def test_undeclared_symbols_are_rejected():
    F = RationalFunctions(["a"])
    with pytest.raises(InputError, match="undeclared"):
        F.parse("a + b")
    with pytest.raises(InputError):
        F.parse("exp(a)")


def test_field_selection():
    assert field_for(()) is QQ
    F = field_for(["a", "b"])
    assert F.is_symbolic and F.parameters == ("a", "b")
    assert common_field(QQ, F) == F
    with pytest.raises(InputError):
        common_field(F, RationalFunctions(["c"]))


@given(st.lists(st.tuples(rationals, rationals), min_size=1, max_size=4))
def test_symbolic_format_round_trips(pairs):
    F = RationalFunctions(["a", "b"])
    a, b = F.gens
    x = F.zero
    for p, q in pairs:
        x = x + F(p) * a + F(q) * b * b
    x = x / (a + F(3))
    assert F.parse(F.format(x)) == x


# --------------------------------------------------------------------------
# linear algebra


@given(square(3))
def test_inverse_and_det(M):
    if det(M) == 0:
        assert rank(M) < 3
        return
    Minv = inverse(M)
    assert matmul(M, Minv) == [list(r) for r in identity(3)]
    assert det(M) * det(Minv) == 1


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=3))
def test_nullspace_annihilates(rows):
    basis = nullspace(rows, 4)
    assert len(basis) == 4 - rank(rows)
    for v in basis:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


@given(square(3), st.lists(small, min_size=3, max_size=3))
def test_solve(M, b):
    x = solve(M, b)
    if det(M) != 0:
        assert matvec(M, x) == tuple(Fraction(c) for c in b)


def test_symbolic_linear_algebra():
    F = RationalFunctions(["d1", "d2"])
    d1, d2 = F.gens
    M = [[d1, d2], [F.zero, F.one]]
    assert det(M) == d1
    Minv = inverse(M, F)
    assert matmul(M, Minv) == [[F.one, F.zero], [F.zero, F.one]]


def test_primitive_integer():
    assert primitive_integer((Fraction(2, 3), Fraction(-4, 3))) == (1, -2)


# --------------------------------------------------------------------------
# series


def test_bernoulli_series_against_recurrence():
    assert list(bernoulli_coefficients(12)) == bernoulli_oracle(12)
    B = bernoulli_series(5)
    assert [B.coefficient((k,)) for k in range(6)] == [
        Fraction(1, 2),
        Fraction(-1, 12),
        0,
        Fraction(1, 720),
        0,
        Fraction(-1, 30240),
    ]


def test_todd_coefficients():
    # z/(e^z - 1) = 1 - z/2 + z^2/12 - z^4/720
    assert todd_coefficients(4) == (1, Fraction(-1, 2), Fraction(1, 12), 0, Fraction(-1, 720))


def _random_series(draw_coeffs, nvars, order):
    return TruncSeries.from_coefficients(draw_coeffs, nvars, order)


coeff_maps = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), rationals, max_size=8
)


@given(coeff_maps)
def test_invert_times_series_is_one(coeffs):
    coeffs = dict(coeffs)
    coeffs[(0, 0)] = coeffs.get((0, 0), 0) or Fraction(2)
    s = TruncSeries.from_coefficients(coeffs, 2, 4)
    assert s * series_invert(s) == TruncSeries.constant(1, 2, 4)


@given(coeff_maps, st.tuples(small, small).filter(lambda v: v != (0, 0)))
def test_divide_undoes_multiplication(coeffs, v):
    s = TruncSeries.from_coefficients({e: c for e, c in coeffs.items() if sum(e) <= 4}, 2, 5)
    back = divide_by_linear_form(s * TruncSeries.linear_form(v, 5), v)
    assert back == s.truncate(4)


def test_division_detects_genuine_poles():
    s = exp_linear((1, 0), 3)  # constant term 1: not divisible
    with pytest.raises(GenuinePoleError):
        divide_by_linear_form(s, (1, 0))
    s = exp_linear((1, 0), 3) - exp_linear((0, 1), 3)  # xi1 - xi2 divides, xi1 does not
    divide_by_linear_form(s, (1, -1))
    with pytest.raises(GenuinePoleError):
        divide_by_linear_form(s, (1, 0))


def test_exp_linear_is_a_homomorphism():
    a, b = (1, 2), (Fraction(1, 3), -1)
    assert exp_linear(a, 4) * exp_linear(b, 4) == exp_linear((a[0] + b[0], a[1] + b[1]), 4)


def test_polynomial_derivatives():
    h = {(2, 1): Fraction(3), (0, 1): Fraction(1)}
    assert poly_derivative(h, (1, 0)) == {(1, 1): 6}
    assert poly_derivative(h, (2, 1)) == {(0, 0): 6}
    assert poly_eval(h, (2, 5)) == 65
