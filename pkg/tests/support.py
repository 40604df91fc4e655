"""Shared test helpers: hypothesis strategies for small exact values and a
bridge to sympy used by the independent oracle checks."""

from fractions import Fraction

import sympy
from hypothesis import strategies as st

from vfield import MultiPoly, RatFunc, Scalar

PARAM_NAMES = ("a", "b")
GEOM_VARS = ("x", "y")

small_fractions = st.fractions(
    min_value=-4, max_value=4, max_denominator=3
)

nonzero_fractions = small_fractions.filter(lambda q: q != 0)


@st.composite
def scalars(draw, allow_params=True):
    """Small exact parameter-field elements."""
    q = draw(small_fractions)
    value = Scalar.from_fraction(q)
    if allow_params:
        for name in draw(st.sets(st.sampled_from(PARAM_NAMES), max_size=2)):
            c = draw(small_fractions)
            value = value + Scalar.sym(name) * c
    return value


nonzero_scalars = scalars().filter(lambda s: not s.is_zero())


@st.composite
def multipolys(draw, variables=GEOM_VARS, max_degree=2, allow_params=False):
    """Small polynomials with few terms."""
    n = len(variables)
    expos = st.tuples(*([st.integers(0, max_degree)] * n)).filter(
        lambda e: sum(e) <= max_degree
    )
    terms = draw(
        st.dictionaries(expos, scalars(allow_params=allow_params), max_size=4)
    )
    return MultiPoly(variables, terms)


nonzero_multipolys = multipolys().filter(lambda p: not p.is_zero())


@st.composite
def ratfuncs(draw, variables=GEOM_VARS):
    num = draw(multipolys(variables=variables))
    den = draw(nonzero_multipolys)
    return RatFunc(num, den)


# -- sympy bridge (oracle side) ------------------------------------------------


def scalar_to_sympy(s: Scalar):
    def side(poly):
        total = sympy.Integer(0)
        for mono, coeff in poly.terms.items():
            term = sympy.Rational(coeff.numerator, coeff.denominator)
            for name, exp in mono:
                term *= sympy.Symbol(name) ** exp
            total += term
        return total

    return side(s.num) / side(s.den)


def poly_to_sympy(p: MultiPoly):
    total = sympy.Integer(0)
    for expo, coeff in p.terms.items():
        term = scalar_to_sympy(coeff)
        for name, e in zip(p.variables, expo):
            term *= sympy.Symbol(name) ** e
        total += term
    return sympy.expand(total)


def ratfunc_to_sympy(r: RatFunc):
    return sympy.cancel(poly_to_sympy(r.num) / poly_to_sympy(r.den))


def fraction_to_sympy(q: Fraction):
    return sympy.Rational(q.numerator, q.denominator)
