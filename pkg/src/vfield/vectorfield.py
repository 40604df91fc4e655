"""Rational vector fields on affine n-space.

A field assigns one rational function to each geometric variable. It may
also carry differential parameters: extra symbols z whose derivative is
prescribed as z' = c*z or z' = c. They enter polynomials as ordinary
variables and the Lie derivative applies their prescribed rule, so an
expression like X - Y - z differentiates termwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import DiffParam, MultiPoly, RatFunc, Scalar, multivariate_gcd
from .algebra.polys import ScalarLike
from .errors import (
    DegenerateParameters,
    NotPolynomialField,
    PositiveDimensionalSingularLocus,
    UnknownVariable,
    UnsupportedDegree,
    ZeroPolynomial,
)

ComponentLike = Union[RatFunc, MultiPoly, ScalarLike]


class VectorField:
    """X_i' = components[i], plus prescribed derivatives for diff params."""

    __slots__ = ("variables", "components", "diff_params", "space")

    def __init__(
        self,
        variables: Sequence[str],
        components: Sequence[ComponentLike],
        diff_params: Sequence[DiffParam] = (),
    ):
        self.variables = tuple(variables)
        self.diff_params = tuple(diff_params)
        self.space = self.variables + tuple(p.name for p in self.diff_params)
        if len(set(self.space)) != len(self.space):
            raise ValueError(f"repeated variable names in {self.space}")
        if len(components) != len(self.variables):
            raise ValueError(
                f"{len(self.variables)} variables but {len(components)} components"
            )
        fixed = []
        for comp in components:
            r = RatFunc.coerce(comp, self.space)
            unknown = set(r.variables) - set(self.space)
            if unknown:
                raise UnknownVariable(
                    f"component {r} uses undeclared {sorted(unknown)}"
                )
            fixed.append(RatFunc(r.num.with_variables(self.space),
                                 r.den.with_variables(self.space)))
        self.components = tuple(fixed)

    def __repr__(self) -> str:
        eqs = [f"{v}' = {c}" for v, c in zip(self.variables, self.components)]
        eqs += [str(p) for p in self.diff_params]
        return "VectorField(" + "; ".join(eqs) + ")"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.components == other.components
            and self.diff_params == other.diff_params
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.components, self.diff_params))

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.components)

    def polynomial_components(self) -> Tuple[MultiPoly, ...]:
        if not self.is_polynomial():
            raise NotPolynomialField(f"{self} has a non-polynomial component")
        return tuple(c.as_poly() for c in self.components)

    @property
    def degree_bounds(self) -> Tuple[int, ...]:
        return tuple(p.total_degree() for p in self.polynomial_components())

    def max_degree(self) -> int:
        return max(self.degree_bounds)

    def derivative_of(self, name: str) -> RatFunc:
        """The prescribed derivative of any space variable."""
        if name in self.variables:
            return self.components[self.variables.index(name)]
        for p in self.diff_params:
            if p.name == name:
                return RatFunc.from_poly(p.derivative_poly(self.space))
        raise UnknownVariable(f"{name} is not a variable of {self}")

    def jacobian(self) -> List[List[RatFunc]]:
        return [
            [c.partial(v) for v in self.variables] for c in self.components
        ]

    def jacobian_at(self, point: Sequence[Scalar]) -> List[List[Scalar]]:
        values = dict(zip(self.variables, point))
        return [
            [entry.evaluate(values) for entry in row] for row in self.jacobian()
        ]


def lotka_volterra(a, b, c, d, diff_params: Sequence[DiffParam] = ()) -> VectorField:
    """X' = X(aY+b), Y' = Y(cX+d), all four constants nonzero."""
    a, b, c, d = (Scalar.coerce(v) for v in (a, b, c, d))
    if any(v.is_zero() for v in (a, b, c, d)):
        raise DegenerateParameters("all of a, b, c, d must be nonzero")
    space = ("X", "Y") + tuple(p.name for p in diff_params)
    X = MultiPoly.var(space, "X")
    Y = MultiPoly.var(space, "Y")
    return VectorField(
        ("X", "Y"), [X * (Y * a + b), Y * (X * c + d)], diff_params
    )


def lotka_volterra_2d(a, b, c, d, diff_params: Sequence[DiffParam] = ()) -> VectorField:
    """The degree-two variant X' = X(aY+b), Y' = Y(cX+dY)."""
    a, b, c, d = (Scalar.coerce(v) for v in (a, b, c, d))
    if any(v.is_zero() for v in (a, b, c, d)):
        raise DegenerateParameters("all of a, b, c, d must be nonzero")
    space = ("X", "Y") + tuple(p.name for p in diff_params)
    X = MultiPoly.var(space, "X")
    Y = MultiPoly.var(space, "Y")
    return VectorField(
        ("X", "Y"), [X * (Y * a + b), Y * (X * c + Y * d)], diff_params
    )


def _check_space(p: MultiPoly, space: Tuple[str, ...]) -> MultiPoly:
    used = {v for v in p.variables if p.degree_in(v) > 0}
    unknown = used - set(space)
    if unknown:
        raise UnknownVariable(f"{sorted(unknown)} not among {space}")
    return p.with_variables(space)


def lie_derivative(
    s: VectorField, p: Union[MultiPoly, RatFunc]
) -> Union[MultiPoly, RatFunc]:
    """Derivative of p along s. Polynomial in, polynomial out when the field
    itself is polynomial; rational otherwise or for rational p."""
    if isinstance(p, RatFunc):
        num = _check_space(p.num, s.space)
        den = _check_space(p.den, s.space)
        ln = lie_derivative(s, num)
        ld = lie_derivative(s, den)
        den_r = RatFunc.from_poly(den)
        return (RatFunc.coerce(ln, s.space) * den_r
                - RatFunc.from_poly(num) * RatFunc.coerce(ld, s.space)) / (den_r * den_r)
    p = _check_space(p, s.space)
    if s.is_polynomial():
        total = MultiPoly.zero(s.space)
        for name, comp in zip(s.variables, s.polynomial_components()):
            total = total + comp * p.partial(name)
        for dp in s.diff_params:
            total = total + dp.derivative_poly(s.space) * p.partial(dp.name)
        return total
    total_r = RatFunc.zero(s.space)
    for name in s.space:
        total_r = total_r + s.derivative_of(name) * p.partial(name)
    return total_r


def is_invariant(s: VectorField, p: MultiPoly) -> Optional[MultiPoly]:
    """The cofactor L_s(p)/p when p divides its own Lie derivative."""
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial is not an invariant curve")
    if not s.is_polynomial():
        raise NotPolynomialField(
            "clear denominators before testing invariance"
        )
    image = lie_derivative(s, p)
    return image.exact_div(p.with_variables(s.space))


@dataclass(frozen=True)
class SingularPoint:
    """A common zero of all components, coordinates in the parameter field."""

    coordinates: Tuple[Scalar, ...]

    def as_dict(self, variables: Sequence[str]) -> Dict[str, Scalar]:
        return dict(zip(variables, self.coordinates))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coordinates) + ")"


class SingularLocus(List[SingularPoint]):
    """The rational singular points; `discarded_nonrational` is set when
    solutions outside the parameter field were dropped (or when root
    extraction could not certify there are none)."""

    def __init__(self, points: Sequence[SingularPoint], discarded_nonrational: bool):
        super().__init__(points)
        self.discarded_nonrational = discarded_nonrational


def _rational_roots_of_integer_poly(coeffs: Dict[int, Scalar]) -> List[Scalar]:
    """All rational roots of a univariate polynomial with rational
    coefficients, by the rational root bound on an integer clearing."""
    from fractions import Fraction
    from math import gcd

    lcm = 1
    vals = {e: c.as_fraction() for e, c in coeffs.items()}
    for q in vals.values():
        lcm = lcm * q.denominator // gcd(lcm, q.denominator)
    ints = {e: int(q * lcm) for e, q in vals.items()}
    lead = ints[max(ints)]
    trail = ints[min(ints)]

    def divisors(n: int) -> List[int]:
        n = abs(n)
        out = []
        i = 1
        while i * i <= n:
            if n % i == 0:
                out.append(i)
                out.append(n // i)
            i += 1
        return out

    roots = []
    seen = set()
    for p in divisors(trail):
        for q in divisors(lead):
            for sign in (1, -1):
                cand = Fraction(sign * p, q)
                if cand in seen:
                    continue
                seen.add(cand)
                total = Fraction(0)
                for e, c in ints.items():
                    total += c * cand ** e
                if total == 0:
                    roots.append(Scalar.from_fraction(cand))
    return roots


def _deflate(coeffs: Dict[int, Scalar], root: Scalar) -> Optional[Dict[int, Scalar]]:
    """Synthetic division by (var - root); None when root is not a root."""
    deg = max(coeffs)
    if deg == 0:
        return None
    out: Dict[int, Scalar] = {}
    carry = Scalar.zero()
    for e in range(deg, 0, -1):
        carry = coeffs.get(e, Scalar.zero()) + carry * root
        out[e - 1] = carry
    if coeffs.get(0, Scalar.zero()) + carry * root != Scalar.zero():
        return None
    return {e: c for e, c in out.items() if not c.is_zero()} or {0: Scalar.zero()}


def _univariate_rational_roots(poly: MultiPoly, var: str) -> Tuple[List[Scalar], bool]:
    """Roots of poly in the parameter field, with a flag for roots that were
    possibly missed (symbolic coefficients beyond the quadratic formula)."""
    coeffs = poly.to_univariate(var)
    coeffs = {e: c.constant_value() for e, c in coeffs.items()}
    roots: List[Scalar] = []
    missed = False
    low = min(coeffs)
    if low > 0:
        roots.append(Scalar.zero())
        coeffs = {e - low: c for e, c in coeffs.items()}
    while True:
        deg = max(coeffs)
        if deg == 0:
            break
        if deg == 1:
            roots.append(-coeffs.get(0, Scalar.zero()) / coeffs[1])
            break
        if deg == 2:
            c0 = coeffs.get(0, Scalar.zero())
            c1 = coeffs.get(1, Scalar.zero())
            c2 = coeffs[2]
            disc = c1 * c1 - c0 * c2 * 4
            root = disc.sqrt()
            if root is None:
                missed = True
            else:
                roots.append((-c1 + root) / (c2 * 2))
                second = (-c1 - root) / (c2 * 2)
                if second != roots[-1]:
                    roots.append(second)
            break
        if all(c.is_rational() for c in coeffs.values()):
            found = _rational_roots_of_integer_poly(coeffs)
            roots.extend(found)
            # deflate by each root with multiplicity; whatever is left has
            # no rational roots at all, so a nonconstant residue means
            # solutions outside the field
            residue = deg
            for r in found:
                while True:
                    quo = _deflate(coeffs, r)
                    if quo is None:
                        break
                    coeffs = quo
                    residue -= 1
            if residue > 0:
                missed = True
            break
        missed = True
        break
    unique: List[Scalar] = []
    for r in roots:
        if r not in unique:
            unique.append(r)
    return unique, missed


def _sylvester_resultant(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    fc = f.to_univariate(var)
    gc = g.to_univariate(var)
    m, n = max(fc), max(gc)
    size = m + n
    space = f.variables
    zero = MultiPoly.zero(space)
    rows: List[List[MultiPoly]] = []
    for shift in range(n):
        row = [zero] * size
        for e, c in fc.items():
            row[shift + (m - e)] = c
        rows.append(row)
    for shift in range(m):
        row = [zero] * size
        for e, c in gc.items():
            row[shift + (n - e)] = c
        rows.append(row)
    return _det(rows)


def _det(rows: List[List[MultiPoly]]) -> MultiPoly:
    size = len(rows)
    if size == 1:
        return rows[0][0]
    space = rows[0][0].variables
    total = MultiPoly.zero(space)
    for j, top in enumerate(rows[0]):
        if top.is_zero():
            continue
        minor = [[row[k] for k in range(size) if k != j] for row in rows[1:]]
        term = top * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def singular_points(s: VectorField) -> SingularLocus:
    """Common zeros of a planar quadratic field, by eliminating the second
    variable with a resultant and extracting rational roots."""
    if s.diff_params:
        raise UnsupportedDegree(
            "singular points are only computed for fields without diff params"
        )
    if len(s.variables) != 2:
        raise UnsupportedDegree("singular points need a planar field")
    f, g = s.polynomial_components()
    if max(p.total_degree() for p in (f, g)) > 2:
        raise UnsupportedDegree("components must have total degree at most 2")
    xv, yv = s.variables
    if f.is_zero() or g.is_zero():
        raise PositiveDimensionalSingularLocus(
            "a component vanishes identically"
        )
    if not multivariate_gcd(f, g).is_constant():
        raise PositiveDimensionalSingularLocus(
            f"components share the factor {multivariate_gcd(f, g)}"
        )
    discarded = False
    points: List[SingularPoint] = []

    def fiber_roots(x0: Scalar) -> Tuple[List[Scalar], bool]:
        fx = f.subst_vars({xv: x0})
        gx = g.subst_vars({xv: x0})
        if fx.is_zero() and gx.is_zero():
            raise PositiveDimensionalSingularLocus(
                f"the whole line {xv} = {x0} is singular"
            )
        if fx.is_zero():
            h = gx
        elif gx.is_zero():
            h = fx
        else:
            h = multivariate_gcd(fx, gx)
        if h.is_constant():
            return [], False
        return _univariate_rational_roots(h, yv)

    if f.degree_in(yv) == 0 or g.degree_in(yv) == 0:
        base = f if f.degree_in(yv) == 0 else g
        rx, miss = _univariate_rational_roots(base, xv)
        discarded |= miss
    else:
        res = _sylvester_resultant(f, g, yv)
        if res.is_zero():
            raise PositiveDimensionalSingularLocus(
                "the elimination resultant vanishes identically"
            )
        rx, miss = _univariate_rational_roots(res, xv)
        discarded |= miss
    for x0 in rx:
        ys, miss = fiber_roots(x0)
        discarded |= miss
        for y0 in ys:
            points.append(SingularPoint((x0, y0)))
    values = {}
    for pt in points:
        values = pt.as_dict(s.variables)
        assert all(c.as_poly().evaluate(values).is_zero() for c in s.components)
    return SingularLocus(points, discarded)
