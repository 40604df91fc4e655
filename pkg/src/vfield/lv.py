"""Planar Lotka-Volterra analysis.

Covers the normalizing changes of variables (rescaling to unit
interaction rates, swapping the two species), the reduction of the
normalized system to a single second-order equation in z = x - y
together with the recovery of x and y, the invariant 2-form attached
to that reduction, the coefficient system governing affine matchings
z1 = e*z2 + f between two reductions with its exact case enumeration,
and the closed-form solutions available on the equal-rate stratum
b = d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .algebra import MultiPoly, RatFunc, Scalar
from .algebra.polys import ScalarLike
from .errors import (
    DegenerateParameters,
    NonFiniteState,
    NotNormalized,
    PoleEncountered,
)
from .forms import DForm, d_log, exterior_derivative, interior_product, wedge
from .vectorfield import VectorField, lotka_volterra, lotka_volterra_2d

CLASSICAL = "CLASSICAL"
TWO_D = "TWO_D"

DIRECT = "DIRECT"
SWAPPED = "SWAPPED"

#: Variables of the phase plane carrying a second-order scalar equation.
PHASE_VARS = ("Z", "Z'")


@dataclass(frozen=True)
class LVSystem:
    """X' = X(aY + b) with Y' = Y(cX + d) (classical) or Y' = Y(cX + dY)
    (the degree-two variant); all four coefficients nonzero."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar
    variant: str = CLASSICAL

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, Scalar.coerce(getattr(self, name)))
        if self.variant not in (CLASSICAL, TWO_D):
            raise ValueError(f"unknown variant {self.variant!r}")
        if any(v.is_zero() for v in (self.a, self.b, self.c, self.d)):
            raise DegenerateParameters("all of a, b, c, d must be nonzero")

    def vector_field(self) -> VectorField:
        ctor = lotka_volterra if self.variant == CLASSICAL else lotka_volterra_2d
        return ctor(self.a, self.b, self.c, self.d)

    def __str__(self) -> str:
        tag = "" if self.variant == CLASSICAL else "2d "
        return f"LV {tag}(a={self.a}, b={self.b}, c={self.c}, d={self.d})"


def lv_scale_transform(sys: LVSystem) -> Tuple[LVSystem, Dict[str, MultiPoly]]:
    """Rescale (x, y) to (c*x, a*y), carrying the system with rates
    (a, b, c, d) to the normalized one with rates (1, b, 1, d).

    Returns the normalized system and the substitution map, written as
    the new coordinates in terms of the old.  The pushforward identity
    (each target component, composed with the map, equals the matching
    scale times the source component) is checked exactly before
    returning.
    """
    if sys.variant != CLASSICAL:
        raise NotNormalized("the scale transform applies to the classical variant")
    target = LVSystem(Scalar.one(), sys.b, Scalar.one(), sys.d)
    space = ("X", "Y")
    mapping = {
        "X": MultiPoly.var(space, "X") * sys.c,
        "Y": MultiPoly.var(space, "Y") * sys.a,
    }
    src = sys.vector_field().polynomial_components()
    tgt = target.vector_field().polynomial_components()
    for i, scale in enumerate((sys.c, sys.a)):
        if tgt[i].subst_vars(mapping) != src[i] * scale:
            raise RuntimeError("scale transform failed its pushforward check")
    return target, mapping


def lv_swap_transform(sys: LVSystem) -> LVSystem:
    """Exchange the two species of a normalized classical system,
    swapping the linear rates b and d.  An involution."""
    if sys.variant != CLASSICAL or not (sys.a.is_one() and sys.c.is_one()):
        raise NotNormalized("the swap transform requires a normalized system (a = c = 1)")
    return LVSystem(sys.a, sys.d, sys.c, sys.b)


@dataclass(frozen=True)
class BrestovskiSystem:
    """A second-order scalar equation F(Z)' = sum of c_i * G_i(Z)'/G_i(Z)
    on the (Z, Z') phase plane.

    F and the G_i are polynomials in Z and Z'.  When the system arises
    from reducing a normalized planar system, the recovery maps express
    the original coordinates as rational functions of (Z, Z').
    """

    F: MultiPoly
    terms: Tuple[Tuple[Scalar, MultiPoly], ...]
    recovery_x: Optional[RatFunc] = None
    recovery_y: Optional[RatFunc] = None

    def second_derivative(self) -> RatFunc:
        """Solve the defining equation for Z'' as a rational function.

        The total derivative of a polynomial P(Z, Z') along the phase
        flow is P_Z * Z' + P_{Z'} * Z''; substituting into the defining
        equation leaves a relation linear in Z''.
        """
        zp = RatFunc.var(PHASE_VARS, PHASE_VARS[1])
        f = self.F.with_variables(PHASE_VARS)
        coef = RatFunc.from_poly(f.partial(PHASE_VARS[1]))
        rhs = -(RatFunc.from_poly(f.partial(PHASE_VARS[0])) * zp)
        for c, g in self.terms:
            g = g.with_variables(PHASE_VARS)
            gr = RatFunc.from_poly(g)
            coef = coef - RatFunc.from_poly(g.partial(PHASE_VARS[1])) * c / gr
            rhs = rhs + RatFunc.from_poly(g.partial(PHASE_VARS[0])) * c * zp / gr
        if coef.is_zero():
            raise DegenerateParameters("the equation does not determine Z''")
        return rhs / coef

    def phase_field(self) -> VectorField:
        """The vector field Z' = Z', Z'' = (solved right-hand side)."""
        return VectorField(
            PHASE_VARS,
            (RatFunc.var(PHASE_VARS, PHASE_VARS[1]), self.second_derivative()),
        )


def brestovski_reduce(b: ScalarLike, d: ScalarLike) -> BrestovskiSystem:
    """Reduce the normalized system x' = x(y + b), y' = y(x + d) to one
    equation in z = x - y.

    With z' = b*x - d*y the variables are recovered by inverting the
    linear change: x = (z' - d*z)/(b - d) and y = (z' - b*z)/(b - d),
    and the system collapses to Z' = b*G1'/G1 - d*G2'/G2 for
    G1 = Z' - b*Z and G2 = Z' - d*Z.
    """
    b = Scalar.coerce(b)
    d = Scalar.coerce(d)
    delta = b - d
    if delta.is_zero():
        raise DegenerateParameters("the reduction requires b != d")
    z = MultiPoly.var(PHASE_VARS, "Z")
    zp = MultiPoly.var(PHASE_VARS, "Z'")
    g1 = zp - z * b
    g2 = zp - z * d
    return BrestovskiSystem(
        F=z,
        terms=((b, g1), (-d, g2)),
        recovery_x=RatFunc.from_poly(g2) / delta,
        recovery_y=RatFunc.from_poly(g1) / delta,
    )


def omega1_form(sys_reduced: BrestovskiSystem) -> DForm:
    """The 2-form (dF / F') wedge (sum of c_i dG_i/G_i) on the phase
    plane, where F' is the derivative of F along the phase field.

    Its Lie derivative along the phase field vanishes identically.
    """
    if not sys_reduced.terms:
        return DForm.zero(PHASE_VARS, 2)
    s = sys_reduced.phase_field()
    f = sys_reduced.F.with_variables(PHASE_VARS)
    df = exterior_derivative(DForm.function(PHASE_VARS, RatFunc.from_poly(f)))
    f_prime = interior_product(s, df).as_function()
    left = df / f_prime
    right = DForm.zero(PHASE_VARS, 1)
    for c, g in sys_reduced.terms:
        right = right + d_log(RatFunc.from_poly(g.with_variables(PHASE_VARS))) * c
    return wedge(left, right)


#: Variables of the coefficient polynomial for affine matchings.
ORTHO_VARS = ("u", "v")


def ortho_coefficient_system(
    b1: ScalarLike,
    d1: ScalarLike,
    b2: ScalarLike,
    d2: ScalarLike,
    e: ScalarLike,
    f: ScalarLike,
) -> Tuple[Dict[str, Scalar], MultiPoly]:
    """The coefficient system of an affine matching z1 = e*z2 + f
    between the reductions of two normalized systems.

    Writing the first system's solutions (x, y) through the second's
    (u, v) gives x = A*u + B*v + d1*G and y = C*u + D*v + b1*G with

        A = (b2 - d1) e / (b1 - d1),   B = (d1 - d2) e / (b1 - d1),
        C = (b2 - b1) e / (b1 - d1),   D = (b1 - d2) e / (b1 - d1),
        G = -f / (b1 - d1).

    Computing x' two ways (from the first system's equation, and by
    pushing u' and v' through the substitution) and subtracting yields
    one polynomial in (u, v) that must vanish identically for the
    matching to exist.  The polynomial is built from that derivation
    and cross-checked against its expanded closed form

        A*C u^2 + B*D v^2 + (AD + CB - A - B) uv
        + (b1*A*G + d1*C*G + b1*A - b2*A) u
        + (d1*G*D + b1*G*B + b1*B - d2*B) v
        + b1*d1*G^2 + b1*d1*G.

    Returns the definitions {A, B, C, D, G} and the polynomial.
    """
    b1, d1, b2, d2, e, f = (Scalar.coerce(v) for v in (b1, d1, b2, d2, e, f))
    delta = b1 - d1
    if delta.is_zero() or (b2 - d2).is_zero():
        raise DegenerateParameters("the coefficient system requires b1 != d1 and b2 != d2")
    A = (b2 - d1) * e / delta
    B = (d1 - d2) * e / delta
    C = (b2 - b1) * e / delta
    D = (b1 - d2) * e / delta
    G = -f / delta
    defs = {"A": A, "B": B, "C": C, "D": D, "G": G}

    u = MultiPoly.var(ORTHO_VARS, "u")
    v = MultiPoly.var(ORTHO_VARS, "v")
    one = MultiPoly.const(ORTHO_VARS, 1)
    x = u * A + v * B + one * (d1 * G)
    y = u * C + v * D + one * (b1 * G)
    u_dot = u * (v + one * b2)
    v_dot = v * (u + one * d2)
    derived = x * (y + one * b1) - (u_dot * A + v_dot * B)

    closed = (
        u * u * (A * C)
        + v * v * (B * D)
        + u * v * (A * D + C * B - A - B)
        + u * (b1 * A * G + d1 * C * G + b1 * A - b2 * A)
        + v * (d1 * G * D + b1 * G * B + b1 * B - d2 * B)
        + one * (b1 * d1 * G * G + b1 * d1 * G)
    )
    if derived != closed:
        raise RuntimeError(
            "coefficient polynomial derivation disagrees with its closed form"
        )
    return defs, derived


@dataclass(frozen=True)
class TransformSolution:
    """One solution (e, f) of the affine-matching coefficient system,
    tagged by which identification of the parameters makes it work.
    Substituting the solution back makes the whole coefficient
    polynomial vanish identically."""

    case_tag: str
    e: Scalar
    f: Scalar
    constraints: Tuple[str, ...]

    def __str__(self) -> str:
        eqs = ", ".join(self.constraints)
        return f"{self.case_tag}: e = {self.e}, f = {self.f} ({eqs})"


def enumerate_transform_solutions(
    b1: ScalarLike, d1: ScalarLike, b2: ScalarLike, d2: ScalarLike
) -> List[TransformSolution]:
    """Exhaust the finite case tree for affine matchings z1 = e*z2 + f
    with e != 0.

    The u^2 and v^2 coefficients force A = 0 or C = 0, and B = 0 or
    D = 0.  With e != 0 each vanishing is a parameter equality: A = 0
    iff b2 = d1, C = 0 iff b2 = b1, B = 0 iff d2 = d1, D = 0 iff
    d2 = b1.  Two of the four sign patterns contradict b2 != d2; the
    remaining two are checked against the given parameters, and for
    each match the uv coefficient pins e, the u coefficient pins f,
    and the full polynomial is verified to vanish.
    """
    b1, d1, b2, d2 = (Scalar.coerce(v) for v in (b1, d1, b2, d2))
    if any(v.is_zero() for v in (b1, d1, b2, d2)):
        raise DegenerateParameters("all four rates must be nonzero")
    if (b1 - d1).is_zero() or (b2 - d2).is_zero():
        raise DegenerateParameters("enumeration requires b1 != d1 and b2 != d2")

    delta = b1 - d1
    # Values of A, B, C, D at e = 1; each is linear in e.
    unit = {
        "A": (b2 - d1) / delta,
        "B": (d1 - d2) / delta,
        "C": (b2 - b1) / delta,
        "D": (b1 - d2) / delta,
    }
    cases = (
        # (tag, coefficients that must vanish, parameter equalities)
        (DIRECT, ("C", "B"), ((b2, b1, "b2 = b1"), (d2, d1, "d2 = d1"))),
        (SWAPPED, ("A", "D"), ((b2, d1, "b2 = d1"), (d2, b1, "d2 = b1"))),
    )
    out: List[TransformSolution] = []
    for tag, zeroed, equalities in cases:
        if not all((lhs - rhs).is_zero() for lhs, rhs, _ in equalities):
            continue
        assert all(unit[name].is_zero() for name in zeroed)
        # uv coefficient: (A1*D1 + C1*B1) e^2 - (A1 + B1) e = 0.
        lead = unit["A"] * unit["D"] + unit["C"] * unit["B"]
        if lead.is_zero():
            continue
        e_val = (unit["A"] + unit["B"]) / lead
        if e_val.is_zero():
            continue
        A = unit["A"] * e_val
        C = unit["C"] * e_val
        # u coefficient: (b1*A + d1*C) G + (b1 - b2) A = 0, linear in G.
        g_coef = b1 * A + d1 * C
        g_rhs = -((b1 - b2) * A)
        if g_coef.is_zero():
            if not g_rhs.is_zero():
                continue
            g_val = Scalar.zero()
        else:
            g_val = g_rhs / g_coef
        f_val = -(g_val * delta)
        _, poly = ortho_coefficient_system(b1, d1, b2, d2, e_val, f_val)
        if not poly.is_zero():
            continue
        out.append(
            TransformSolution(tag, e_val, f_val, tuple(eq for _, _, eq in equalities))
        )
    return out


def _float_rate(value: Scalar, name: str) -> float:
    if not value.is_rational():
        raise ValueError(f"numeric evaluation needs a rational {name}, got {value}")
    return float(value.as_fraction())


def varma_solution(
    sys: LVSystem, alpha: float, beta: float, t: float
) -> Tuple[float, float]:
    """Closed-form solution of the classical system on the stratum
    b = d, evaluated in floating point.

    With u = alpha * e^(b t) and w = e^((u - beta)/b) the pair
    x = u / (c (1 - w)), y = u w / (a (1 - w)) solves the system for
    every choice of the constants alpha, beta; poles occur where
    w = 1.
    """
    if sys.variant != CLASSICAL:
        raise NotNormalized("the closed form applies to the classical variant")
    if not (sys.b - sys.d).is_zero():
        raise DegenerateParameters("the closed form requires b = d")
    a = _float_rate(sys.a, "a")
    b = _float_rate(sys.b, "b")
    c = _float_rate(sys.c, "c")
    if alpha == 0.0:
        return (0.0, 0.0)
    try:
        u = alpha * math.exp(b * t)
        w = math.exp((u - beta) / b)
    except OverflowError:
        raise NonFiniteState(f"closed form overflows at t = {t}")
    denom = 1.0 - w
    if abs(denom) < 1e-12:
        raise PoleEncountered(f"denominator 1 - e^((u - beta)/b) vanishes at t = {t}")
    x = u / (c * denom)
    y = u * w / (a * denom)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFiniteState(f"closed form is not finite at t = {t}")
    return (x, y)


def varma_residuals(
    sys: LVSystem, alpha: float, beta: float, t: float, h: float = 1e-5
) -> Tuple[float, float, float]:
    """Centered finite-difference residuals of the closed form at t.

    Returns |x' - x(ay + b)|, |y' - y(cx + b)|, and the residual of the
    derived linear relation |(cx - ay)' - b (cx - ay)|, with all
    derivatives approximated by centered differences of width h.
    """
    a = _float_rate(sys.a, "a")
    b = _float_rate(sys.b, "b")
    c = _float_rate(sys.c, "c")
    xm, ym = varma_solution(sys, alpha, beta, t - h)
    x0, y0 = varma_solution(sys, alpha, beta, t)
    xp, yp = varma_solution(sys, alpha, beta, t + h)
    dx = (xp - xm) / (2 * h)
    dy = (yp - ym) / (2 * h)
    rx = abs(dx - x0 * (a * y0 + b))
    ry = abs(dy - y0 * (c * x0 + b))
    dz = (c * xp - a * yp - (c * xm - a * ym)) / (2 * h)
    rz = abs(dz - b * (c * x0 - a * y0))
    return (rx, ry, rz)
