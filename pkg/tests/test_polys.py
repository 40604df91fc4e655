"""Multivariate polynomials, division, gcd, and rational functions."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

import support
from vfield import (
    DiffParam,
    MultiPoly,
    RatFunc,
    Scalar,
    exact_divides,
    multivariate_gcd,
    poly_divrem,
)
from vfield.errors import DivisionByZero, PoleEncountered, ZeroDivisor, ZeroPolynomial

X = MultiPoly.var(("x", "y"), "x")
Y = MultiPoly.var(("x", "y"), "y")
b = Scalar.sym("b")
d = Scalar.sym("d")


class TestDivRem:
    def test_difference_of_squares(self):
        q, r = poly_divrem(X * X - Y * Y, X - Y, "x")
        assert q == X + Y
        assert r.is_zero()

    def test_wrong_variable_gives_pure_remainder(self):
        q, r = poly_divrem(X, Y, "y")
        assert q.is_zero()
        assert r == X

    def test_scalar_multiple(self):
        q, r = poly_divrem((X - Y) * b, X - Y, "x")
        assert q == MultiPoly.const(("x", "y"), b)
        assert r.is_zero()

    def test_zero_divisor_rejected(self):
        with pytest.raises(ZeroDivisor):
            poly_divrem(X, MultiPoly.zero(("x", "y")), "x")

    def test_nonconstant_leading_coefficient_rejected(self):
        # dividing by x*y in x has leading coefficient y
        with pytest.raises(ZeroDivisor):
            poly_divrem(X * X, X * Y, "x")

    @given(
        support.multipolys(max_degree=2),
        support.multipolys(max_degree=2),
        support.small_fractions.filter(lambda v: v != 0),
        support.multipolys(variables=("y",), max_degree=2),
    )
    @settings(max_examples=60)
    def test_recovery(self, p, q_low, lead, r):
        # build divisor with invertible leading coefficient in x
        q = X * X * lead + q_low.with_variables(("x", "y"))
        if q.degree_in("x") != 2:
            return
        r2 = r.with_variables(("x", "y"))
        quo, rem = poly_divrem(p * q + r2, q, "x")
        assert quo == p
        assert rem == r2

    @given(support.multipolys(), support.nonzero_multipolys)
    @settings(max_examples=60)
    def test_identity_holds(self, p, q):
        if not q.leading_expo():
            return
        if q.to_univariate("x") and not list(q.to_univariate("x").values())[
            0
        ].is_constant():
            return
        try:
            quo, rem = poly_divrem(p, q, "x")
        except ZeroDivisor:
            return
        assert quo * q + rem == p
        assert rem.degree_in("x") < q.degree_in("x") or rem.is_zero()


class TestExactDivides:
    def test_scalar_cofactor(self):
        c = exact_divides(X - Y, (X - Y) * b)
        assert c == MultiPoly.const(("x", "y"), b)

    def test_polynomial_cofactor(self):
        c = exact_divides(X - Y, X * X - Y * Y)
        assert c == X + Y

    def test_non_divisor(self):
        assert exact_divides(X, Y) is None

    def test_shifted_line_does_not_divide(self):
        lam = Scalar.sym("lam")
        shifted = X - Y - MultiPoly.const(("x", "y"), lam)
        target = Y * d - X * b
        assert exact_divides(shifted, target) is None

    def test_zero_dividend_divides(self):
        assert exact_divides(X, MultiPoly.zero(("x", "y"))).is_zero()

    def test_zero_divisor_rejected(self):
        with pytest.raises(ZeroPolynomial):
            exact_divides(MultiPoly.zero(("x", "y")), X)

    @given(support.multipolys(), support.nonzero_multipolys)
    @settings(max_examples=60)
    def test_product_always_divides(self, p, q):
        c = exact_divides(q, p * q)
        assert c is not None
        assert c * q == p * q

    @given(support.multipolys(), support.nonzero_multipolys)
    @settings(max_examples=60)
    def test_result_certifies(self, p, q):
        c = exact_divides(q, p)
        if c is not None:
            assert c * q == p


class TestGcd:
    def test_difference_of_squares(self):
        g = multivariate_gcd(X * X - Y * Y, X - Y)
        assert g == X - Y

    def test_coprime_variables(self):
        assert multivariate_gcd(X, Y).is_constant()

    def test_translated_branches_coprime(self):
        # X(Y + b) and Y(X + b) share no curve: both resultants are nonzero
        p = X * Y + X * b
        q = X * Y + Y * b
        sx, sy, sb = sympy.symbols("x y b")
        sp = sx * sy + sx * sb
        sq = sx * sy + sy * sb
        assert sympy.resultant(sp, sq, sx) != 0
        assert sympy.resultant(sp, sq, sy) != 0
        assert multivariate_gcd(p, q).is_constant()

    def test_gcd_of_zero_pair_rejected(self):
        z = MultiPoly.zero(("x", "y"))
        with pytest.raises(ZeroPolynomial):
            multivariate_gcd(z, z)

    def test_gcd_with_zero_is_monic_other(self):
        g = multivariate_gcd(MultiPoly.zero(("x", "y")), (X - Y) * 3)
        assert g == X - Y

    @given(
        support.nonzero_multipolys,
        support.nonzero_multipolys,
        support.nonzero_multipolys,
    )
    @settings(max_examples=40, deadline=None)
    def test_common_factor_recovered(self, p, q, h):
        g = multivariate_gcd(p * h, q * h)
        assert exact_divides(h, g) is not None or g.exact_div(h.monic()) is not None
        assert (p * h).exact_div(g) is not None
        assert (q * h).exact_div(g) is not None

    @given(support.nonzero_multipolys, support.nonzero_multipolys)
    @settings(max_examples=40, deadline=None)
    def test_agrees_with_sympy(self, p, q):
        g = multivariate_gcd(p, q)
        sg = sympy.gcd(support.poly_to_sympy(p), support.poly_to_sympy(q))
        ours = support.poly_to_sympy(g)
        ratio = sympy.cancel(ours / sg)
        assert ratio.is_constant() and ratio != 0


class TestRatFunc:
    def test_reduction_on_construction(self):
        r = RatFunc(X * X - Y * Y, X - Y)
        assert r.is_polynomial()
        assert r.as_poly() == X + Y

    def test_cross_sum(self):
        r = RatFunc(X, Y) + RatFunc(Y, X)
        assert r == RatFunc(X * X + Y * Y, X * Y)

    def test_partial_derivative(self):
        r = RatFunc(X, Y)
        assert r.partial("y") == RatFunc(-X, Y * Y)

    def test_pole_on_evaluation(self):
        r = RatFunc(X, X - Y)
        one = Scalar.one()
        with pytest.raises(PoleEncountered):
            r.evaluate({"x": one, "y": one})
        assert r.evaluate({"x": one, "y": Scalar.zero()}) == 1

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisor):
            RatFunc(X, MultiPoly.zero(("x", "y")))

    def test_substitute_variable(self):
        r = RatFunc(X - Y, X + Y)
        s = r.subst_vars({"x": RatFunc(Y * Y, X)})
        assert s == RatFunc(Y * Y - X * Y, Y * Y + X * Y)

    @given(support.multipolys(), support.nonzero_multipolys,
           support.multipolys(), support.nonzero_multipolys)
    @settings(max_examples=60)
    def test_equality_is_cross_multiplication(self, a, bq, c, dq):
        assert (RatFunc(a, bq) == RatFunc(c, dq)) == (a * dq == c * bq)

    @given(support.ratfuncs(), support.ratfuncs(), support.ratfuncs())
    @settings(max_examples=40, deadline=None)
    def test_field_axioms(self, r, s, t):
        assert (r + s) + t == r + (s + t)
        assert r * (s + t) == r * s + r * t
        if not s.is_zero():
            assert (r / s) * s == r

    def test_string_quotient_unambiguous(self):
        r = RatFunc(X * X + Y * Y, X * Y)
        assert str(r) == "(x^2 + y^2)/(x*y)"


class TestDiffParam:
    def test_log_mode(self):
        p = DiffParam.log("u", Scalar.sym("b"))
        dv = p.derivative_poly(("x", "u"))
        assert dv == MultiPoly.var(("x", "u"), "u") * Scalar.sym("b")

    def test_const_mode(self):
        p = DiffParam.const("u", Scalar.from_fraction(Fraction(1)))
        dv = p.derivative_poly(("x", "u"))
        assert dv == MultiPoly.const(("x", "u"), Scalar.one())

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            DiffParam("u", "EXP", Scalar.one())


class TestVariableHandling:
    def test_unify_reorders(self):
        p = MultiPoly.var(("x",), "x")
        q = MultiPoly.var(("y",), "y")
        s = p + q
        assert set(s.variables) == {"x", "y"}
        assert s == X + Y

    def test_evaluate_full_point(self):
        p = X * Y + MultiPoly.const(("x", "y"), b)
        val = p.evaluate({"x": Scalar.from_fraction(Fraction(2)), "y": d})
        assert val == d * 2 + b

    def test_homogeneous_part(self):
        p = X * X + X * Y * 2 + X + MultiPoly.const(("x", "y"), Scalar.one())
        assert p.homogeneous_part(2) == X * X + X * Y * 2
        assert p.homogeneous_part(1) == X
        assert p.homogeneous_part(3).is_zero()
