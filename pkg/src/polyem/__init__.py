"""Exact exponential sums, interpolators and local Euler-Maclaurin formulas for rational polytopes."""

from .errors import GenericityError, GenuinePoleError, InputError, PolyemError, SizeGuardError
from .euler import (
    apply_operator,
    brute_force_oracles,
    count_lattice_points,
    em_integral,
    em_sum,
    integrate_poly_over_face,
    parse_polynomial,
    volume_from_lattice_points,
)
from .exactmath import QQ, RationalFunctions, TruncSeries, bernoulli_coefficients, field_for
from .genfun import MeroFun, canonical_equal, i_of, lattice_point_sum, render, residue_along, s_interior, s_of, taylor_at_zero
from .geometry import Cone, Face, Polytope, dual_cone, halfopen_decompose, supporting_cone, transverse_cone
from .interp import (
    ComplementMap,
    InterpolatorCache,
    constant_term,
    lambda_,
    morelli_duality_check,
    mu,
    mu_closed_form_2d,
    nu,
)
from .lattice import LatticeContext

__version__ = "0.1.0"

__all__ = [
    "Cone",
    "ComplementMap",
    "Face",
    "GenericityError",
    "GenuinePoleError",
    "InputError",
    "InterpolatorCache",
    "LatticeContext",
    "MeroFun",
    "Polytope",
    "PolyemError",
    "QQ",
    "RationalFunctions",
    "SizeGuardError",
    "TruncSeries",
    "apply_operator",
    "bernoulli_coefficients",
    "brute_force_oracles",
    "canonical_equal",
    "lattice_point_sum",
    "constant_term",
    "count_lattice_points",
    "dual_cone",
    "em_integral",
    "em_sum",
    "field_for",
    "halfopen_decompose",
    "i_of",
    "integrate_poly_over_face",
    "lambda_",
    "morelli_duality_check",
    "mu",
    "mu_closed_form_2d",
    "nu",
    "parse_polynomial",
    "render",
    "residue_along",
    "s_interior",
    "s_of",
    "supporting_cone",
    "taylor_at_zero",
    "transverse_cone",
    "volume_from_lattice_points",
]
