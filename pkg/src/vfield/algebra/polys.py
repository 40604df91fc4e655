"""Multivariate polynomials and reduced rational functions in geometric
variables, with Scalar (parameter-field) coefficients.

A MultiPoly carries an ordered tuple of variable names and a sparse term map
from exponent vectors to nonzero Scalars. The monomial order is graded lex
with earlier declared variables more significant. A RatFunc is a reduced
quotient with monic denominator, so equality is plain structural equality.

Differential parameters (symbols z with a prescribed derivative z' = c*z or
z' = c) are ordinary variables at this level; the vector-field layer appends
their prescribed derivatives as extra components.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from ..errors import DivisionByZero, PoleEncountered, ZeroDivisor, ZeroPolynomial
from .scalars import Scalar

Expo = Tuple[int, ...]

ScalarLike = Union[Scalar, int, Fraction]


def _merge_variables(v1: Sequence[str], v2: Sequence[str]) -> Tuple[str, ...]:
    out = list(v1)
    for name in v2:
        if name not in out:
            out.append(name)
    return tuple(out)


class MultiPoly:
    """Polynomial in geometric variables over the parameter field."""

    __slots__ = ("variables", "terms", "_hash")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Mapping[Expo, ScalarLike],
    ):
        self.variables: Tuple[str, ...] = tuple(variables)
        clean: Dict[Expo, Scalar] = {}
        for expo, coeff in terms.items():
            coeff = Scalar.coerce(coeff)
            if coeff.is_zero():
                continue
            if len(expo) != len(self.variables):
                raise ValueError(
                    f"exponent vector {expo} does not match variables {self.variables}"
                )
            clean[tuple(expo)] = coeff
        self.terms = clean
        self._hash: Optional[int] = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables, {})

    @classmethod
    def const(cls, variables: Sequence[str], value: ScalarLike) -> "MultiPoly":
        zero_expo = (0,) * len(tuple(variables))
        return cls(variables, {zero_expo: Scalar.coerce(value)})

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"{name!r} is not among variables {variables}")
        expo = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {expo: Scalar.one()})

    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Reindex onto a superset/reordering of the current variables."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        positions = []
        for v in self.variables:
            if v not in variables:
                raise ValueError(f"target variables {variables} drop {v!r}")
            positions.append(variables.index(v))
        out: Dict[Expo, Scalar] = {}
        for expo, coeff in self.terms.items():
            new = [0] * len(variables)
            for pos, e in zip(positions, expo):
                new[pos] = e
            out[tuple(new)] = coeff
        return MultiPoly(variables, out)

    @staticmethod
    def unify(p: "MultiPoly", q: "MultiPoly") -> Tuple["MultiPoly", "MultiPoly"]:
        if p.variables == q.variables:
            return p, q
        merged = _merge_variables(p.variables, q.variables)
        return p.with_variables(merged), q.with_variables(merged)

    # -- predicates and views -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in expo) for expo in self.terms)

    def constant_value(self) -> Scalar:
        if self.is_zero():
            return Scalar.zero()
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(expo) for expo in self.terms)

    def degree_in(self, name: str) -> int:
        if name not in self.variables:
            return 0
        idx = self.variables.index(name)
        if not self.terms:
            return -1
        return max(expo[idx] for expo in self.terms)

    def leading_expo(self) -> Expo:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=lambda e: (sum(e), e))

    def leading_coeff(self) -> Scalar:
        return self.terms[self.leading_expo()]

    def homogeneous_part(self, degree: int) -> "MultiPoly":
        return MultiPoly(
            self.variables,
            {e: c for e, c in self.terms.items() if sum(e) == degree},
        )

    def coefficient_of(self, expo: Expo) -> Scalar:
        return self.terms.get(tuple(expo), Scalar.zero())

    def monomials(self):
        return sorted(self.terms, key=lambda e: (sum(e), e), reverse=True)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: Union["MultiPoly", ScalarLike]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if not isinstance(other, (Scalar, int, Fraction)):
                return NotImplemented
            other = MultiPoly.const(self.variables, other)
        a, b = MultiPoly.unify(self, other)
        out = dict(a.terms)
        for expo, coeff in b.terms.items():
            s = out.get(expo, Scalar.zero()) + coeff
            if s.is_zero():
                out.pop(expo, None)
            else:
                out[expo] = s
        return MultiPoly(a.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Union["MultiPoly", ScalarLike]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if not isinstance(other, (Scalar, int, Fraction)):
                return NotImplemented
            other = MultiPoly.const(self.variables, other)
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> "MultiPoly":
        return MultiPoly.const(self.variables, other) - self

    def __mul__(self, other: Union["MultiPoly", ScalarLike]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if not isinstance(other, (Scalar, int, Fraction)):
                return NotImplemented
            coeff = Scalar.coerce(other)
            if coeff.is_zero():
                return MultiPoly.zero(self.variables)
            return MultiPoly(
                self.variables, {e: c * coeff for e, c in self.terms.items()}
            )
        a, b = MultiPoly.unify(self, other)
        out: Dict[Expo, Scalar] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                expo = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(expo, Scalar.zero()) + c1 * c2
                if s.is_zero():
                    out.pop(expo, None)
                else:
                    out[expo] = s
        return MultiPoly(a.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Scalar)):
            other = MultiPoly.const(self.variables, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = MultiPoly.unify(self, other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        if self._hash is None:
            # hash ignores unused variables so unify-equal polys hash alike
            used = [
                i for i in range(len(self.variables))
                if any(e[i] for e in self.terms)
            ]
            names = tuple(self.variables[i] for i in used)
            items = tuple(
                sorted(
                    (tuple(e[i] for i in used), c) for e, c in self.terms.items()
                )
            )
            self._hash = hash((names, items))
        return self._hash

    # -- calculus and substitution ----------------------------------------------

    def partial(self, name: str) -> "MultiPoly":
        if name not in self.variables:
            return MultiPoly.zero(self.variables)
        idx = self.variables.index(name)
        out: Dict[Expo, Scalar] = {}
        for expo, coeff in self.terms.items():
            e = expo[idx]
            if e == 0:
                continue
            new = list(expo)
            new[idx] = e - 1
            key = tuple(new)
            s = out.get(key, Scalar.zero()) + coeff * e
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return MultiPoly(self.variables, out)

    def subst_params(self, mapping: Mapping[str, ScalarLike]) -> "MultiPoly":
        return MultiPoly(
            self.variables,
            {e: c.subst(mapping) for e, c in self.terms.items()},
        )

    def subst_vars(
        self, mapping: Mapping[str, Union["MultiPoly", ScalarLike]]
    ) -> "MultiPoly":
        """Substitute polynomial or scalar values for variables."""
        values: Dict[str, MultiPoly] = {}
        space = self.variables
        for name, value in mapping.items():
            if isinstance(value, MultiPoly):
                space = _merge_variables(space, value.variables)
        for name, value in mapping.items():
            if not isinstance(value, MultiPoly):
                value = MultiPoly.const(space, value)
            values[name] = value.with_variables(space) if value.variables != space else value
        total = MultiPoly.zero(space)
        for expo, coeff in self.terms.items():
            term = MultiPoly.const(space, coeff)
            for name, e in zip(self.variables, expo):
                if e == 0:
                    continue
                base = values.get(name)
                if base is None:
                    base = MultiPoly.var(space, name)
                term = term * base**e
            total = total + term
        return total

    def evaluate(self, point: Mapping[str, ScalarLike]) -> Scalar:
        """Full evaluation at scalar coordinates."""
        total = Scalar.zero()
        for expo, coeff in self.terms.items():
            value = coeff
            for name, e in zip(self.variables, expo):
                if e == 0:
                    continue
                if name not in point:
                    raise ValueError(f"no value provided for variable {name!r}")
                value = value * Scalar.coerce(point[name]) ** e
            total = total + value
        return total

    def monic(self) -> "MultiPoly":
        if self.is_zero():
            return self
        lead = self.leading_coeff()
        if lead.is_one():
            return self
        return self * (Scalar.one() / lead)

    # -- division -----------------------------------------------------------------

    def exact_div(self, divisor: "MultiPoly") -> Optional["MultiPoly"]:
        """Exact quotient self/divisor over the coefficient field, or None."""
        if divisor.is_zero():
            raise ZeroDivisor("exact division by the zero polynomial")
        if self.is_zero():
            return MultiPoly.zero(self.variables)
        a, b = MultiPoly.unify(self, divisor)
        if b.is_constant():
            return a * (Scalar.one() / b.constant_value())
        lead_e = b.leading_expo()
        lead_c = b.terms[lead_e]
        rem = a
        quot: Dict[Expo, Scalar] = {}
        while not rem.is_zero():
            re = rem.leading_expo()
            qe = tuple(x - y for x, y in zip(re, lead_e))
            if any(e < 0 for e in qe):
                return None
            qc = rem.terms[re] / lead_c
            quot[qe] = qc
            rem = rem - MultiPoly(a.variables, {qe: qc}) * b
        return MultiPoly(a.variables, quot)

    def to_univariate(self, name: str) -> Dict[int, "MultiPoly"]:
        """View as a univariate polynomial in `name` with MultiPoly coefficients
        (coefficients keep the full variable tuple, degree 0 in `name`)."""
        idx = self.variables.index(name)
        out: Dict[int, Dict[Expo, Scalar]] = {}
        for expo, coeff in self.terms.items():
            e = expo[idx]
            rest = list(expo)
            rest[idx] = 0
            out.setdefault(e, {})[tuple(rest)] = coeff
        return {e: MultiPoly(self.variables, t) for e, t in out.items()}

    @staticmethod
    def from_univariate(
        variables: Sequence[str], name: str, coeffs: Mapping[int, "MultiPoly"]
    ) -> "MultiPoly":
        variables = tuple(variables)
        idx = variables.index(name)
        out: Dict[Expo, Scalar] = {}
        for e, poly in coeffs.items():
            poly = poly.with_variables(variables)
            for expo, coeff in poly.terms.items():
                new = list(expo)
                new[idx] += e
                key = tuple(new)
                s = out.get(key, Scalar.zero()) + coeff
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return MultiPoly(variables, out)

    # -- printing --------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for expo in self.monomials():
            coeff = self.terms[expo]
            factors = []
            for name, e in zip(self.variables, expo):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if coeff.is_rational():
                q = coeff.as_fraction()
                sign = "-" if q < 0 else "+"
                mag = abs(q)
                if not factors:
                    body = str(mag)
                elif mag == 1:
                    body = "*".join(factors)
                else:
                    body = "*".join([str(mag)] + factors)
            else:
                sign = "+"
                text = str(coeff)
                needs_parens = ("+" in text or "-" in text[1:] or "/" in text)
                if needs_parens:
                    text = f"({text})"
                body = "*".join([text] + factors) if factors else text
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


def poly_divrem(
    num: MultiPoly, den: MultiPoly, by_variable: str
) -> Tuple[MultiPoly, MultiPoly]:
    """Univariate-style division in one variable.

    Requires den != 0 with an invertible (scalar) leading coefficient in
    by_variable; returns (quotient, remainder) with
    num = quotient*den + remainder and deg_rem < deg_den in that variable.
    """
    if den.is_zero():
        raise ZeroDivisor("division by the zero polynomial")
    num, den = MultiPoly.unify(num, den)
    if by_variable not in num.variables:
        num = num.with_variables(_merge_variables(num.variables, (by_variable,)))
        den = den.with_variables(num.variables)
    den_uni = den.to_univariate(by_variable)
    deg_den = max(den_uni)
    lead = den_uni[deg_den]
    if not lead.is_constant():
        raise ZeroDivisor(
            f"leading coefficient of divisor in {by_variable!r} is not invertible: {lead}"
        )
    lead_scalar = lead.constant_value()
    rem_uni = num.to_univariate(by_variable)
    quot_uni: Dict[int, MultiPoly] = {}
    while rem_uni:
        deg_rem = max(rem_uni)
        if deg_rem < deg_den:
            break
        factor = rem_uni[deg_rem] * (Scalar.one() / lead_scalar)
        shift = deg_rem - deg_den
        prev = quot_uni.get(shift)
        quot_uni[shift] = factor if prev is None else prev + factor
        for e, c in den_uni.items():
            tgt = e + shift
            have = rem_uni.get(tgt, MultiPoly.zero(num.variables)) - factor * c
            if have.is_zero():
                rem_uni.pop(tgt, None)
            else:
                rem_uni[tgt] = have
    quotient = MultiPoly.from_univariate(num.variables, by_variable, quot_uni)
    remainder = MultiPoly.from_univariate(num.variables, by_variable, rem_uni)
    return quotient, remainder


def exact_divides(p: MultiPoly, q: MultiPoly) -> Optional[MultiPoly]:
    """q/p when p divides q exactly, else None. Requires p != 0."""
    if p.is_zero():
        raise ZeroPolynomial("divisibility by the zero polynomial is undefined")
    return q.exact_div(p)


def _mono_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """gcd when p is a single term: the common monomial part, monic."""
    (pe,) = p.terms
    common = list(pe)
    for expo in q.terms:
        common = [min(a, b) for a, b in zip(common, expo)]
        if not any(common):
            break
    return MultiPoly(p.variables, {tuple(common): Scalar.one()})


def _uni_content(coeffs: Dict[int, MultiPoly], variables: Sequence[str]) -> MultiPoly:
    g = MultiPoly.zero(tuple(variables))
    for c in coeffs.values():
        g = multivariate_gcd(g, c)
        if g.is_constant() and not g.is_zero():
            break
    return g


def _poly_prem(
    a: Dict[int, MultiPoly], b: Dict[int, MultiPoly], variables: Sequence[str]
) -> Dict[int, MultiPoly]:
    deg_a = max(a) if a else -1
    deg_b = max(b)
    lc_b = b[deg_b]
    rem = dict(a)
    steps = deg_a - deg_b + 1
    for _ in range(max(steps, 0)):
        deg_r = max(rem) if rem else -1
        if deg_r < deg_b:
            rem = {e: c * lc_b for e, c in rem.items()}
            continue
        lead = rem.pop(deg_r)
        scaled = {e: c * lc_b for e, c in rem.items()}
        shift = deg_r - deg_b
        for e, c in b.items():
            if e == deg_b:
                continue
            tgt = e + shift
            have = scaled.get(tgt, MultiPoly.zero(tuple(variables))) - lead * c
            if have.is_zero():
                scaled.pop(tgt, None)
            else:
                scaled[tgt] = have
        rem = scaled
    return {e: c for e, c in rem.items() if not c.is_zero()}


def _to_int_terms(p: MultiPoly) -> Optional[Dict[Expo, int]]:
    """p cleared to integer coefficients, or None if any coefficient is
    symbolic. The result is p times a positive rational."""
    vals = {}
    for e, c in p.terms.items():
        if not c.is_rational():
            return None
        vals[e] = c.as_fraction()
    denom_lcm = 1
    for q in vals.values():
        denom_lcm = denom_lcm * q.denominator // math.gcd(denom_lcm, q.denominator)
    return {e: int(q * denom_lcm) for e, q in vals.items()}


def _int_eval_last(p: Dict[Expo, int], xi: int) -> Dict[Expo, int]:
    """Substitute xi for the last variable."""
    out: Dict[Expo, int] = {}
    for e, c in p.items():
        key = e[:-1]
        out[key] = out.get(key, 0) + c * xi ** e[-1]
    return {e: c for e, c in out.items() if c}


def _int_exact_div(p: Dict[Expo, int], d: Dict[Expo, int]) -> Optional[Dict[Expo, int]]:
    """Greedy graded-lex division over Z; None when not an exact multiple."""
    def lead(t: Dict[Expo, int]) -> Expo:
        return max(t, key=lambda e: (sum(e), e))

    dl = lead(d)
    dc = d[dl]
    rem = dict(p)
    quo: Dict[Expo, int] = {}
    while rem:
        rl = lead(rem)
        me = tuple(a - b for a, b in zip(rl, dl))
        if any(x < 0 for x in me) or rem[rl] % dc:
            return None
        qc = rem[rl] // dc
        quo[me] = qc
        for e, c in d.items():
            tgt = tuple(a + b for a, b in zip(me, e))
            nc = rem.get(tgt, 0) - qc * c
            if nc:
                rem[tgt] = nc
            else:
                rem.pop(tgt, None)
    return quo


def _int_content(p: Dict[Expo, int]) -> int:
    g = 0
    for c in p.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _heu_gcd(p: Dict[Expo, int], q: Dict[Expo, int], nvars: int) -> Optional[Dict[Expo, int]]:
    """Heuristic gcd over Z: evaluate the last variable at a large integer,
    recurse, and lift the image back through balanced base-xi digits. Inputs
    are made primitive and the integer content gcd multiplied back at the
    end, so the lifted candidate is compared primitive-to-primitive. Every
    candidate is verified by exact division; six misses report failure and
    the caller falls back to the remainder sequence."""
    if nvars == 0:
        return {(): math.gcd(p[()], q[()])}
    cp, cq = _int_content(p), _int_content(q)
    cont = math.gcd(cp, cq)
    p = {e: c // cp for e, c in p.items()}
    q = {e: c // cq for e, c in q.items()}
    deg_cap = min(max(e[-1] for e in p), max(e[-1] for e in q)) + 1
    norm = min(max(abs(c) for c in p.values()), max(abs(c) for c in q.values()))
    xi = max(2 * norm + 2, 29)
    for _ in range(6):
        gp = _int_eval_last(p, xi)
        gq = _int_eval_last(q, xi)
        if gp and gq:
            gamma = _heu_gcd(gp, gq, nvars - 1)
            if gamma is not None:
                g: Dict[Expo, int] = {}
                cur = gamma
                power = 0
                half = xi // 2
                while cur and power < deg_cap:
                    nxt: Dict[Expo, int] = {}
                    for e, c in cur.items():
                        digit = c % xi
                        if digit > half:
                            digit -= xi
                        if digit:
                            g[e + (power,)] = digit
                        rest = (c - digit) // xi
                        if rest:
                            nxt[e] = rest
                    cur = nxt
                    power += 1
                if not cur and g:
                    gc = _int_content(g)
                    g = {e: c // gc for e, c in g.items()}
                    if (
                        _int_exact_div(p, g) is not None
                        and _int_exact_div(q, g) is not None
                    ):
                        return {e: c * cont for e, c in g.items()}
        xi = xi * 73794 // 27011
    return None


def _coeff_div(c: MultiPoly, divisor: MultiPoly) -> MultiPoly:
    out = c.exact_div(divisor)
    if out is None:
        # not reachable for a true subresultant sequence; keep a safe,
        # slower reduction by content in case of an upstream bug
        out = c.exact_div(multivariate_gcd(c, divisor))
    return out


def multivariate_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """A monic gcd over the coefficient field; gcd(p, 0) = monic p."""
    if p.is_zero() and q.is_zero():
        raise ZeroPolynomial("gcd(0, 0) is undefined")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    p, q = MultiPoly.unify(p, q)
    if p.is_constant() or q.is_constant():
        return MultiPoly.const(p.variables, 1)
    if p.terms.keys() == q.terms.keys() and p.monic() == q.monic():
        return p.monic()
    if len(p.terms) == 1:
        return _mono_gcd(p, q)
    if len(q.terms) == 1:
        return _mono_gcd(q, p)
    zp = _to_int_terms(p)
    if zp is not None:
        zq = _to_int_terms(q)
        if zq is not None:
            zg = _heu_gcd(zp, zq, len(p.variables))
            if zg is not None:
                return MultiPoly(p.variables, dict(zg)).monic()
    active = [
        v
        for v in p.variables
        if p.degree_in(v) > 0 or q.degree_in(v) > 0
    ]
    var = active[-1]
    dp, dq = p.degree_in(var), q.degree_in(var)
    if dp == 0:
        return multivariate_gcd(p, _uni_content(q.to_univariate(var), q.variables))
    if dq == 0:
        return multivariate_gcd(_uni_content(p.to_univariate(var), p.variables), q)
    a = p.to_univariate(var)
    b = q.to_univariate(var)
    cont_a = _uni_content(a, p.variables)
    cont_b = _uni_content(b, p.variables)
    cont = multivariate_gcd(cont_a, cont_b)
    pa = {e: c.exact_div(cont_a) for e, c in a.items()}
    pb = {e: c.exact_div(cont_b) for e, c in b.items()}
    if max(pa) < max(pb):
        pa, pb = pb, pa
    # subresultant remainder sequence: each pseudo-remainder has the known
    # exact divisor g*h^d, so contents are only computed once at the end
    one = MultiPoly.const(p.variables, 1)
    g_co = one
    h_co = one
    while True:
        delta = max(pa) - max(pb)
        r = _poly_prem(pa, pb, p.variables)
        if not r:
            g = pb
            break
        if max(r) == 0:
            g = {0: one}
            break
        divisor = g_co * h_co ** delta
        pa, pb = pb, {e: _coeff_div(c, divisor) for e, c in r.items()}
        g_co = pa[max(pa)]
        if delta == 1:
            h_co = g_co
        elif delta > 1:
            h_co = _coeff_div(g_co ** delta, h_co ** (delta - 1))
    gc = _uni_content(g, p.variables)
    g = {e: c.exact_div(gc) for e, c in g.items()}
    g_poly = MultiPoly.from_univariate(p.variables, var, g)
    return (cont * g_poly).monic()


class RatFunc:
    """Reduced rational function: gcd(num, den) a unit, den monic."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: Optional[MultiPoly] = None):
        if den is None:
            den = MultiPoly.const(num.variables, 1)
        if den.is_zero():
            raise ZeroDivisor("rational function with zero denominator")
        num, den = MultiPoly.unify(num, den)
        if num.is_zero():
            self.num = num
            self.den = MultiPoly.const(num.variables, 1)
            self._hash: Optional[int] = None
            return
        if not den.is_constant():
            g = multivariate_gcd(num, den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
        lead = den.leading_coeff()
        if not lead.is_one():
            inv = Scalar.one() / lead
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "RatFunc":
        return cls(MultiPoly.zero(variables))

    @classmethod
    def const(cls, variables: Sequence[str], value: ScalarLike) -> "RatFunc":
        return cls(MultiPoly.const(variables, value))

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "RatFunc":
        return cls(MultiPoly.var(variables, name))

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "RatFunc":
        return cls(poly)

    @classmethod
    def coerce(
        cls, value: Union["RatFunc", MultiPoly, ScalarLike], variables: Sequence[str]
    ) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, MultiPoly):
            return cls(value)
        return cls.const(variables, value)

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.num.variables

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MultiPoly:
        if not self.is_polynomial():
            raise ValueError(f"not a polynomial: {self}")
        return self.num * (Scalar.one() / self.den.constant_value())

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Scalar:
        return self.num.constant_value() / self.den.constant_value()

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: Union["RatFunc", MultiPoly, ScalarLike]) -> "RatFunc":
        if not isinstance(other, (RatFunc, MultiPoly, Scalar, int, Fraction)):
            return NotImplemented
        other = RatFunc.coerce(other, self.variables)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        out = RatFunc.__new__(RatFunc)
        out.num = -self.num
        out.den = self.den
        out._hash = None
        return out

    def __sub__(self, other: Union["RatFunc", MultiPoly, ScalarLike]) -> "RatFunc":
        if not isinstance(other, (RatFunc, MultiPoly, Scalar, int, Fraction)):
            return NotImplemented
        return self + (-RatFunc.coerce(other, self.variables))

    def __rsub__(self, other: Union[MultiPoly, ScalarLike]) -> "RatFunc":
        return RatFunc.coerce(other, self.variables) - self

    def __mul__(self, other: Union["RatFunc", MultiPoly, ScalarLike]) -> "RatFunc":
        if not isinstance(other, (RatFunc, MultiPoly, Scalar, int, Fraction)):
            return NotImplemented
        other = RatFunc.coerce(other, self.variables)
        if self.is_zero() or other.is_zero():
            return RatFunc.zero(self.variables)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["RatFunc", MultiPoly, ScalarLike]) -> "RatFunc":
        if not isinstance(other, (RatFunc, MultiPoly, Scalar, int, Fraction)):
            return NotImplemented
        other = RatFunc.coerce(other, self.variables)
        if other.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Union[MultiPoly, ScalarLike]) -> "RatFunc":
        return RatFunc.coerce(other, self.variables) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n == 0:
            return RatFunc.const(self.variables, 1)
        if n < 0:
            if self.is_zero():
                raise DivisionByZero("zero rational function to a negative power")
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num**n, self.den**n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Scalar, MultiPoly)):
            other = RatFunc.coerce(other, self.variables)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- calculus and substitution ------------------------------------------------

    def partial(self, name: str) -> "RatFunc":
        if self.is_polynomial():
            return RatFunc(self.num.partial(name), self.den)
        return RatFunc(
            self.num.partial(name) * self.den - self.num * self.den.partial(name),
            self.den * self.den,
        )

    def subst_params(self, mapping: Mapping[str, ScalarLike]) -> "RatFunc":
        den = self.den.subst_params(mapping)
        if den.is_zero():
            raise DivisionByZero(
                f"substitution sends denominator of {self} to zero"
            )
        return RatFunc(self.num.subst_params(mapping), den)

    def subst_vars(
        self, mapping: Mapping[str, Union["RatFunc", MultiPoly, ScalarLike]]
    ) -> "RatFunc":
        """Substitute rational, polynomial, or scalar values for variables."""
        space = self.variables
        for value in mapping.values():
            if isinstance(value, (RatFunc, MultiPoly)):
                space = _merge_variables(space, value.variables)

        def eval_poly(p: MultiPoly) -> RatFunc:
            total = RatFunc.zero(space)
            for expo, coeff in p.terms.items():
                term = RatFunc.const(space, coeff)
                for name, e in zip(p.variables, expo):
                    if e == 0:
                        continue
                    value = mapping.get(name)
                    if value is None:
                        base = RatFunc.var(space, name)
                    else:
                        base = RatFunc.coerce(value, space)
                    term = term * base**e
                total = total + term
            return total

        den = eval_poly(self.den)
        if den.is_zero():
            raise DivisionByZero(f"substitution sends denominator of {self} to zero")
        return eval_poly(self.num) / den

    def evaluate(self, point: Mapping[str, ScalarLike]) -> Scalar:
        den = self.den.evaluate(point)
        if den.is_zero():
            raise PoleEncountered(f"denominator of {self} vanishes at {dict(point)}")
        return self.num.evaluate(point) / den

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.as_poly())
        num_s = str(self.num)
        den_s = str(self.den)
        if len(self.num.terms) > 1 or num_s.startswith("-"):
            num_s = f"({num_s})"
        if len(self.den.terms) > 1 or any(ch in den_s for ch in "*^/"):
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    __repr__ = __str__


@dataclass(frozen=True)
class DiffParam:
    """Differential parameter: a symbol with a prescribed derivative.

    mode LOG means name' = coeff * name; mode CONST means name' = coeff.
    """

    name: str
    mode: str
    coeff: Scalar

    MODES = ("LOG", "CONST")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise ValueError(f"mode must be one of {self.MODES}, got {self.mode!r}")
        if not self.name or not self.name.isidentifier():
            raise ValueError(f"bad differential parameter name {self.name!r}")

    @classmethod
    def log(cls, name: str, coeff: ScalarLike) -> "DiffParam":
        return cls(name, "LOG", Scalar.coerce(coeff))

    @classmethod
    def const(cls, name: str, coeff: ScalarLike) -> "DiffParam":
        return cls(name, "CONST", Scalar.coerce(coeff))

    def derivative_poly(self, variables: Sequence[str]) -> MultiPoly:
        """The prescribed derivative as a polynomial on the given space."""
        variables = tuple(variables)
        if self.mode == "LOG":
            return MultiPoly.var(variables, self.name) * self.coeff
        return MultiPoly.const(variables, self.coeff)

    def __str__(self) -> str:
        if self.mode == "LOG":
            return f"{self.name}' = {self.coeff}*{self.name}"
        return f"{self.name}' = {self.coeff}"
