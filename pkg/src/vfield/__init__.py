"""Symbolic analysis of polynomial and rational vector fields on affine
space: exact parameter-field arithmetic, Lie derivatives, Darboux polynomial
search, exterior calculus, a Lotka-Volterra analysis suite, a fixed-step
integrator for conservation checks, and a text DSL with a CLI front end."""

from .algebra import (
    DiffParam,
    MultiPoly,
    ParamPoly,
    RatFunc,
    Scalar,
    exact_divides,
    multivariate_gcd,
    param_gcd,
    poly_divrem,
    scalar_arith,
)
from .darboux import (
    DarbouxReport,
    InvariantCurve,
    darboux_search,
    invariant_family_b_eq_d,
)
from .dsl import SystemSpec, parse_system
from .forms import (
    DForm,
    d_log,
    exterior_derivative,
    interior_product,
    lie_derivative_form,
    rosenlicht_normalize,
    wedge,
)
from .lv import (
    BrestovskiSystem,
    LVSystem,
    TransformSolution,
    brestovski_reduce,
    enumerate_transform_solutions,
    lv_scale_transform,
    lv_swap_transform,
    omega1_form,
    ortho_coefficient_system,
    varma_residuals,
    varma_solution,
)
from .minimality import MinimalityReport, check_strong_minimality
from .numeric import Trajectory, first_integral_drift, integrate_rk4
from .vectorfield import (
    SingularPoint,
    VectorField,
    is_invariant,
    lie_derivative,
    lotka_volterra,
    lotka_volterra_2d,
    singular_points,
)

__all__ = [
    "BrestovskiSystem",
    "DForm",
    "DarbouxReport",
    "DiffParam",
    "InvariantCurve",
    "LVSystem",
    "MinimalityReport",
    "MultiPoly",
    "ParamPoly",
    "RatFunc",
    "Scalar",
    "SingularPoint",
    "SystemSpec",
    "Trajectory",
    "TransformSolution",
    "VectorField",
    "brestovski_reduce",
    "check_strong_minimality",
    "d_log",
    "darboux_search",
    "enumerate_transform_solutions",
    "exact_divides",
    "exterior_derivative",
    "first_integral_drift",
    "integrate_rk4",
    "interior_product",
    "invariant_family_b_eq_d",
    "is_invariant",
    "lie_derivative",
    "lie_derivative_form",
    "lotka_volterra",
    "lotka_volterra_2d",
    "lv_scale_transform",
    "lv_swap_transform",
    "multivariate_gcd",
    "omega1_form",
    "ortho_coefficient_system",
    "param_gcd",
    "parse_system",
    "poly_divrem",
    "rosenlicht_normalize",
    "scalar_arith",
    "singular_points",
    "varma_residuals",
    "varma_solution",
    "wedge",
]

__version__ = "0.1.0"
