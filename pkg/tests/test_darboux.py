"""Invariant-curve search tests.

Specialized expected sets were frozen from the brute-force bilinear
enumeration in oracles.py (sympy-based, independent of the package).
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from vfield.algebra import MultiPoly, RatFunc, Scalar
from vfield.darboux import (
    BranchRecord,
    COMPLETE_UP_TO_BOUND,
    DarbouxReport,
    InvariantCurve,
    PARTIAL,
    darboux_search,
    invariant_family_b_eq_d,
)
from vfield.errors import NotPolynomialField
from vfield.vectorfield import (
    VectorField,
    is_invariant,
    lie_derivative,
    lotka_volterra,
    lotka_volterra_2d,
)

VARS = ("X", "Y")
ONE = Scalar.one()


def mk(terms):
    return MultiPoly(VARS, {e: Scalar.coerce(c) for e, c in terms.items()})


def curve_strs(report):
    return [(str(c.poly), str(c.cofactor)) for c in report.curves]


X_POLY = mk({(1, 0): 1})
Y_POLY = mk({(0, 1): 1})


class TestSpecializedSearch:
    def test_lv_1_2_1_3_degree_3(self):
        # frozen from the bilinear enumeration oracle
        rep = darboux_search(lotka_volterra(1, 2, 1, 3), 3)
        assert curve_strs(rep) == [("X", "Y + 2"), ("Y", "X + 3")]
        assert rep.completeness == COMPLETE_UP_TO_BOUND
        assert rep.branches == ()
        assert rep.degree_bound == 3

    def test_lv_1_2_1_2_degree_3_has_equal_rates_line(self):
        # frozen from the bilinear enumeration oracle
        rep = darboux_search(lotka_volterra(1, 2, 1, 2), 3)
        assert curve_strs(rep) == [
            ("X", "Y + 2"),
            ("X - Y", "2"),
            ("Y", "X + 2"),
        ]

    def test_lv2d_all_ones_degree_3(self):
        # frozen from the bilinear enumeration oracle
        rep = darboux_search(lotka_volterra_2d(1, 1, 1, 1), 3)
        assert curve_strs(rep) == [("X", "Y + 1"), ("Y", "X + Y")]
        assert rep.completeness == COMPLETE_UP_TO_BOUND

    def test_no_rational_singular_points_uses_pencil(self):
        # F = X^2 + 1 never vanishes rationally; constants must come from
        # the matrix-pencil fallback. Frozen from the oracle.
        F = mk({(2, 0): 1, (0, 0): 1})
        G = mk({(1, 1): 1, (0, 1): 1})
        rep = darboux_search(VectorField(VARS, (F, G)), 2)
        assert curve_strs(rep) == [("Y", "X + 1"), ("X^2 + 1", "2*X")]
        assert rep.completeness == COMPLETE_UP_TO_BOUND

    def test_dicritical_top(self):
        # X' = X^2, Y' = XY: the top constraint vanishes identically and
        # every line through the origin is invariant; the canonical basis
        # reports the coordinate axes. Frozen from the oracle.
        F = mk({(2, 0): 1})
        G = mk({(1, 1): 1})
        rep = darboux_search(VectorField(VARS, (F, G)), 2)
        assert curve_strs(rep) == [("X", "X"), ("Y", "X")]
        assert rep.completeness == COMPLETE_UP_TO_BOUND

    def test_cubic_field_partial_but_sound(self):
        s = VectorField(VARS, (mk({(3, 0): 1}), mk({(0, 3): 1})))
        rep = darboux_search(s, 2)
        assert rep.completeness == PARTIAL
        names = [str(c.poly) for c in rep.curves]
        assert "X" in names and "Y" in names
        for c in rep.curves:
            assert is_invariant(s, c.poly) == c.cofactor


class TestSymbolicSearch:
    def test_generic_lv_exactly_axes(self):
        b, d = Scalar.sym("b"), Scalar.sym("d")
        rep = darboux_search(lotka_volterra(1, b, 1, d), 2, assume_nonzero=(b, d))
        assert curve_strs(rep) == [("X", "Y + b"), ("Y", "X + d")]
        assert rep.completeness == COMPLETE_UP_TO_BOUND

    def test_generic_lv_reports_discriminant_branch(self):
        b, d = Scalar.sym("b"), Scalar.sym("d")
        rep = darboux_search(lotka_volterra(1, b, 1, d), 2, assume_nonzero=(b, d))
        discs = [r for r in rep.branches if r.kind == "discriminant-nonsquare"]
        assert [r.expression for r in discs] == ["4*b*d"]

    def test_equal_rates_specialization_recovers_extra_curve(self):
        # the branch condition 4*b*d becomes the square (2b)^2 when d = b;
        # re-running on that stratum must surface the extra line
        b, d = Scalar.sym("b"), Scalar.sym("d")
        generic = darboux_search(
            lotka_volterra(1, b, 1, d), 2, assume_nonzero=(b, d)
        )
        special = darboux_search(
            lotka_volterra(1, b, 1, b), 2, assume_nonzero=(b,)
        )
        generic_polys = {str(c.poly) for c in generic.curves}
        special_polys = {str(c.poly) for c in special.curves}
        assert special_polys - generic_polys == {"X - Y"}
        extra = [c for c in special.curves if str(c.poly) == "X - Y"]
        assert str(extra[0].cofactor) == "b"

    def test_general_rates_equal_line(self):
        a, b, c = Scalar.sym("a"), Scalar.sym("b"), Scalar.sym("c")
        rep = darboux_search(
            lotka_volterra(a, b, c, b), 2, assume_nonzero=(a, b, c)
        )
        # cX - aY normalized monic is X - (a/c) Y
        line = [
            cur
            for cur in rep.curves
            if cur.poly == X_POLY - Y_POLY * (a / c)
        ]
        assert len(line) == 1
        assert line[0].cofactor == MultiPoly.const(VARS, b)

    def test_symbolic_without_rational_singular_points_is_partial(self):
        b = Scalar.sym("b")
        F = mk({(2, 0): 1, (0, 0): b})
        G = mk({(0, 2): 1})
        rep = darboux_search(VectorField(VARS, (F, G)), 2, assume_nonzero=(b,))
        assert rep.completeness == PARTIAL
        assert any("could not be pinned" in note for note in rep.notes)


class TestReportInvariants:
    def test_soundness_via_is_invariant(self):
        for s in (
            lotka_volterra(1, 2, 1, 3),
            lotka_volterra(1, 2, 1, 2),
            lotka_volterra_2d(1, 1, 1, 1),
        ):
            rep = darboux_search(s, 3)
            for cur in rep.curves:
                assert is_invariant(s, cur.poly) == cur.cofactor
                assert cur.definition_field == "CONSTANTS"

    def test_no_products_of_reported_curves(self):
        rep = darboux_search(lotka_volterra(1, 2, 1, 3), 4)
        polys = [c.poly for c in rep.curves]
        for p in polys:
            for q in polys:
                prod = p * q
                assert all(prod != r.poly for r in rep.curves)

    def test_curves_are_monic_and_sorted(self):
        rep = darboux_search(lotka_volterra(1, 2, 1, 2), 3)
        keys = [(c.poly.total_degree(), str(c.poly)) for c in rep.curves]
        assert keys == sorted(keys)
        for c in rep.curves:
            assert c.poly.leading_coeff().is_one()

    def test_deterministic(self):
        a = darboux_search(lotka_volterra(1, 2, 1, 2), 3)
        b = darboux_search(lotka_volterra(1, 2, 1, 2), 3)
        assert a == b

    def test_powers_of_axes_not_reported(self):
        rep = darboux_search(lotka_volterra(1, 2, 1, 3), 4)
        assert {str(c.poly) for c in rep.curves} == {"X", "Y"}


class TestSearchErrors:
    def test_rejects_diff_params(self):
        from vfield.algebra import DiffParam

        s = lotka_volterra(1, 2, 1, 2, diff_params=(DiffParam.log("z", 2),))
        with pytest.raises(ValueError):
            darboux_search(s, 2)

    def test_rejects_non_planar(self):
        t = ("X", "Y", "W")
        comps = tuple(MultiPoly.var(t, n) for n in t)
        with pytest.raises(ValueError):
            darboux_search(VectorField(t, comps), 2)

    def test_rejects_zero_degree_bound(self):
        with pytest.raises(ValueError):
            darboux_search(lotka_volterra(1, 2, 1, 3), 0)

    def test_rejects_rational_components(self):
        F = RatFunc(X_POLY, Y_POLY)
        G = RatFunc.from_poly(Y_POLY)
        with pytest.raises(NotPolynomialField):
            darboux_search(VectorField(VARS, (F, G)), 2)


class TestInvariantFamily:
    def test_unit_rates(self):
        b = Scalar.sym("b")
        fam = invariant_family_b_eq_d(1, b, 1)
        assert str(fam.poly) == "X - Y - z"
        assert fam.cofactor == MultiPoly.const(("X", "Y", "z"), b)
        assert fam.definition_field == "DIFF_PARAM(z)"

    def test_scaled_rates(self):
        fam = invariant_family_b_eq_d(2, 5, 3)
        assert str(fam.poly) == "3*X - 2*Y - z"
        assert str(fam.cofactor) == "5"

    def test_z_specialized_to_zero_degenerates(self):
        fam = invariant_family_b_eq_d(2, 5, 3)
        collapsed = fam.poly.subst_vars({"z": MultiPoly.zero(("X", "Y"))})
        assert collapsed == MultiPoly(
            ("X", "Y"), {(1, 0): Scalar.coerce(3), (0, 1): Scalar.coerce(-2)}
        )

    def test_identity_holds_symbolically(self):
        a, b, c = Scalar.sym("a"), Scalar.sym("b"), Scalar.sym("c")
        fam = invariant_family_b_eq_d(a, b, c)
        # construction re-checks L_s(P) = b P; just confirm the shape
        assert fam.poly.coefficient_of((1, 0, 0)) == c
        assert fam.poly.coefficient_of((0, 1, 0)) == -a
        assert fam.poly.coefficient_of((0, 0, 1)) == Scalar.coerce(-1)


small_rationals = st.fractions(
    min_value=Fraction(-3), max_value=Fraction(3), max_denominator=2
).filter(lambda q: q != 0)


class TestRandomizedLV:
    @settings(max_examples=20, deadline=None)
    @given(
        a=small_rationals, b=small_rationals, c=small_rationals, d=small_rationals
    )
    def test_axes_always_reported_and_sound(self, a, b, c, d):
        s = lotka_volterra(a, b, c, d)
        rep = darboux_search(s, 2)
        polys = {str(c1.poly) for c1 in rep.curves}
        assert {"X", "Y"} <= polys
        for cur in rep.curves:
            assert is_invariant(s, cur.poly) == cur.cofactor
        assert rep.completeness == COMPLETE_UP_TO_BOUND
