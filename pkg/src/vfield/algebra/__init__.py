"""Exact coefficient arithmetic: the parameter field Q(p1, ..., pk),
multivariate polynomials in geometric variables, reduced rational functions,
and differential parameters with prescribed derivatives."""

from .polys import (
    DiffParam,
    MultiPoly,
    RatFunc,
    exact_divides,
    multivariate_gcd,
    poly_divrem,
)
from .scalars import ParamPoly, Scalar, param_gcd, param_poly_sqrt, scalar_arith

__all__ = [
    "DiffParam",
    "MultiPoly",
    "ParamPoly",
    "RatFunc",
    "Scalar",
    "exact_divides",
    "multivariate_gcd",
    "param_gcd",
    "param_poly_sqrt",
    "poly_divrem",
    "scalar_arith",
]
