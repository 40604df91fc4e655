"""Exact arithmetic in the parameter field Q(p1, ..., pk).

A ParamPoly is a sparse multivariate polynomial in named parameter symbols
with Fraction coefficients. A Scalar is a reduced quotient of two ParamPolys:
numerator and denominator have integer coefficients, their joint integer
content is 1, their polynomial gcd is a unit, and the denominator's leading
coefficient under graded lex is positive. All arithmetic is exact; there is
no floating point anywhere in this module.

Monomials are tuples of (name, exponent) pairs sorted by name, exponents
positive; the empty tuple is the constant monomial. The fixed monomial order
is graded lexicographic with alphabetically earlier names more significant.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from ..errors import DivisionByZero

Monomial = Tuple[Tuple[str, int], ...]

_ONE_MONO: Monomial = ()


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    merged: Dict[str, int] = dict(m1)
    for name, exp in m2:
        merged[name] = merged.get(name, 0) + exp
    return tuple(sorted(merged.items()))


def mono_div(m1: Monomial, m2: Monomial) -> Optional[Monomial]:
    """m1 / m2, or None when an exponent would go negative."""
    if not m2:
        return m1
    rest: Dict[str, int] = dict(m1)
    for name, exp in m2:
        have = rest.get(name, 0) - exp
        if have < 0:
            return None
        if have == 0:
            rest.pop(name, None)
        else:
            rest[name] = have
    return tuple(sorted(rest.items()))


def mono_degree(m: Monomial) -> int:
    return sum(exp for _, exp in m)


def _mono_cmp(m1: Monomial, m2: Monomial) -> int:
    """Graded lex: total degree first, then earlier names more significant."""
    d1, d2 = mono_degree(m1), mono_degree(m2)
    if d1 != d2:
        return -1 if d1 < d2 else 1
    e1, e2 = dict(m1), dict(m2)
    for name in sorted(set(e1) | set(e2)):
        a, b = e1.get(name, 0), e2.get(name, 0)
        if a != b:
            return 1 if a > b else -1
    return 0


MONO_KEY = cmp_to_key(_mono_cmp)


def _fraction_gcd(values: Iterable[Fraction]) -> Fraction:
    """Positive rational g with every value an integer multiple of g."""
    num_gcd = 0
    den_lcm = 1
    for v in values:
        num_gcd = math.gcd(num_gcd, abs(v.numerator))
        den_lcm = den_lcm * v.denominator // math.gcd(den_lcm, v.denominator)
    if num_gcd == 0:
        return Fraction(0)
    return Fraction(num_gcd, den_lcm)


def _fraction_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    n, d = value.numerator, value.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


class ParamPoly:
    """Sparse polynomial in parameter symbols over Q."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction]):
        self.terms: Dict[Monomial, Fraction] = {
            m: c for m, c in terms.items() if c != 0
        }
        self._hash: Optional[int] = None

    @classmethod
    def zero(cls) -> "ParamPoly":
        return cls({})

    @classmethod
    def const(cls, value: Union[int, Fraction]) -> "ParamPoly":
        return cls({_ONE_MONO: Fraction(value)})

    @classmethod
    def sym(cls, name: str) -> "ParamPoly":
        return cls({((name, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_const():
            raise ValueError(f"not a constant polynomial: {self}")
        return self.terms[_ONE_MONO]

    def variables(self) -> set:
        names = set()
        for m in self.terms:
            for name, _ in m:
                names.add(name)
        return names

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def degree_in(self, var: str) -> int:
        if not self.terms:
            return -1
        best = 0
        for m in self.terms:
            for name, exp in m:
                if name == var and exp > best:
                    best = exp
        return best

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=MONO_KEY)

    def leading_coeff(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def __add__(self, other: "ParamPoly") -> "ParamPoly":
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return ParamPoly(out)

    def __neg__(self) -> "ParamPoly":
        return ParamPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "ParamPoly") -> "ParamPoly":
        return self + (-other)

    def __mul__(self, other: Union["ParamPoly", int, Fraction]) -> "ParamPoly":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                return ParamPoly.zero()
            return ParamPoly({m: c * q for m, c in self.terms.items()})
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if not self.terms or not other.terms:
            return ParamPoly.zero()
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return ParamPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ParamPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = ParamPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ParamPoly.const(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    def eval_scalar(self, mapping: Mapping[str, "Scalar"]) -> "Scalar":
        """Evaluate with Scalar values; unmapped names stay symbolic."""
        total = Scalar.zero()
        for m, c in self.terms.items():
            term = Scalar.from_fraction(c)
            for name, exp in m:
                value = mapping.get(name)
                if value is None:
                    value = Scalar.sym(name)
                term = term * value**exp
            total = total + term
        return total

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-coefficient, content 1."""
        return _fraction_gcd(self.terms.values())

    # -- division machinery -------------------------------------------------

    def exact_div(self, divisor: "ParamPoly") -> Optional["ParamPoly"]:
        """Exact quotient self/divisor, or None when division is not exact.

        Greedy leading-term division; valid over the field Q because in a
        domain lt(divisor) divides lt(multiple) for any true multiple.
        """
        if divisor.is_zero():
            raise DivisionByZero("polynomial division by zero")
        if self.is_zero():
            return ParamPoly.zero()
        if divisor.is_const():
            inv = 1 / divisor.const_value()
            return self * inv
        lead_m = divisor.leading_monomial()
        lead_c = divisor.terms[lead_m]
        rem = self
        quot: Dict[Monomial, Fraction] = {}
        while not rem.is_zero():
            rm = rem.leading_monomial()
            qm = mono_div(rm, lead_m)
            if qm is None:
                return None
            qc = rem.terms[rm] / lead_c
            quot[qm] = qc
            rem = rem - ParamPoly({qm: qc}) * divisor
        return ParamPoly(quot)

    def to_univariate(self, var: str) -> Dict[int, "ParamPoly"]:
        out: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            exp = 0
            rest = []
            for name, e in m:
                if name == var:
                    exp = e
                else:
                    rest.append((name, e))
            out.setdefault(exp, {})[tuple(rest)] = c
        return {e: ParamPoly(t) for e, t in out.items()}

    @staticmethod
    def from_univariate(var: str, coeffs: Mapping[int, "ParamPoly"]) -> "ParamPoly":
        total = ParamPoly.zero()
        for exp, poly in coeffs.items():
            if exp == 0:
                total = total + poly
            else:
                total = total + poly * ParamPoly({((var, exp),): Fraction(1)})
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=MONO_KEY, reverse=True):
            c = self.terms[m]
            factors = [
                name if exp == 1 else f"{name}^{exp}" for name, exp in m
            ]
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


def _prem(a: Dict[int, ParamPoly], b: Dict[int, ParamPoly]) -> Dict[int, ParamPoly]:
    """Pseudo-remainder of univariate polynomials with ParamPoly coefficients.

    Computes lc(b)^(deg a - deg b + 1) * a mod b without fractions.
    """
    deg_a = max(a) if a else -1
    deg_b = max(b)
    lc_b = b[deg_b]
    rem = dict(a)
    steps = deg_a - deg_b + 1
    for _ in range(max(steps, 0)):
        deg_r = max(rem) if rem else -1
        if deg_r < deg_b:
            # multiply by lc_b for the remaining steps to keep the exponent
            # bookkeeping consistent
            rem = {e: c * lc_b for e, c in rem.items()}
            continue
        lead = rem.pop(deg_r)
        scaled: Dict[int, ParamPoly] = {e: c * lc_b for e, c in rem.items()}
        shift = deg_r - deg_b
        for e, c in b.items():
            if e == deg_b:
                continue
            tgt = e + shift
            have = scaled.get(tgt, ParamPoly.zero()) - lead * c
            if have.is_zero():
                scaled.pop(tgt, None)
            else:
                scaled[tgt] = have
        rem = scaled
    return {e: c for e, c in rem.items() if not c.is_zero()}


def _uni_content(coeffs: Dict[int, ParamPoly]) -> ParamPoly:
    polys = list(coeffs.values())
    g = ParamPoly.zero()
    for p in polys:
        g = param_gcd(g, p)
        if g.is_const() and not g.is_zero():
            break
    return g


def param_gcd(p: ParamPoly, q: ParamPoly) -> ParamPoly:
    """A gcd in Q[params], normalized: integer coefficients, content 1,
    positive leading coefficient. gcd(p, 0) is normalized p; gcd(0, 0) = 0."""
    if p.is_zero() and q.is_zero():
        return ParamPoly.zero()
    if p.is_zero():
        return _normalize_primitive(q)
    if q.is_zero():
        return _normalize_primitive(p)
    if p.is_const() or q.is_const():
        return ParamPoly.const(1)
    if p.terms == q.terms:
        return _normalize_primitive(p)
    common = p.variables() & q.variables()
    if not common:
        # may still share a monomial structure only through constants
        return ParamPoly.const(1)
    var = sorted(common | p.variables() | q.variables())[-1]
    if p.degree_in(var) == 0 or q.degree_in(var) == 0:
        # chosen variable missing from one side: gcd divides its content
        if p.degree_in(var) == 0:
            return param_gcd(p, _uni_content(q.to_univariate(var)))
        return param_gcd(_uni_content(p.to_univariate(var)), q)
    a = p.to_univariate(var)
    b = q.to_univariate(var)
    cont_a = _uni_content(a)
    cont_b = _uni_content(b)
    cont = param_gcd(cont_a, cont_b)
    pa = {e: c.exact_div(cont_a) for e, c in a.items()}
    pb = {e: c.exact_div(cont_b) for e, c in b.items()}
    if max(pa) < max(pb):
        pa, pb = pb, pa
    # subresultant remainder sequence: pseudo-remainders carry the known
    # exact divisor g*h^d, avoiding a content gcd at every step
    g_co = ParamPoly.const(1)
    h_co = ParamPoly.const(1)
    while True:
        delta = max(pa) - max(pb)
        r = _prem(pa, pb)
        if not r:
            g = pb
            break
        if max(r) == 0:
            g = {0: ParamPoly.const(1)}
            break
        divisor = g_co * h_co ** delta
        pa, pb = pb, {e: _subres_div(c, divisor) for e, c in r.items()}
        g_co = pa[max(pa)]
        if delta == 1:
            h_co = g_co
        elif delta > 1:
            h_co = _subres_div(g_co ** delta, h_co ** (delta - 1))
    gc = _uni_content(g)
    g = {e: c.exact_div(gc) for e, c in g.items()}
    g_poly = ParamPoly.from_univariate(var, g)
    return _normalize_primitive(cont * g_poly)


def _subres_div(c: ParamPoly, divisor: ParamPoly) -> ParamPoly:
    out = c.exact_div(divisor)
    if out is None:
        # not reachable for a true subresultant sequence; kept as a safe
        # fallback so a wrong divisor degrades to slower, still-exact math
        out = c.exact_div(param_gcd(c, divisor))
    return out


def _normalize_primitive(p: ParamPoly) -> ParamPoly:
    if p.is_zero():
        return p
    c = p.content()
    out = p * (1 / c)
    if out.leading_coeff() < 0:
        out = -out
    return out


def param_poly_sqrt(p: ParamPoly) -> Optional[ParamPoly]:
    """Exact square root in Q[params], or None when p is not a square."""
    if p.is_zero():
        return ParamPoly.zero()
    lead = p.leading_monomial()
    if any(exp % 2 for _, exp in lead):
        return None
    root_c = _fraction_sqrt(p.terms[lead])
    if root_c is None:
        return None
    root = ParamPoly({tuple((n, e // 2) for n, e in lead): root_c})
    prev_key = None
    for _ in range(10000):
        rem = p - root * root
        if rem.is_zero():
            return root
        rm = rem.leading_monomial()
        key = MONO_KEY(rm)
        if prev_key is not None and not key < prev_key:
            return None
        prev_key = key
        tm = mono_div(rm, tuple((n, e // 2) for n, e in lead))
        if tm is None:
            return None
        tc = rem.terms[rm] / (2 * root_c)
        root = root + ParamPoly({tm: tc})
    return None


class Scalar:
    """Element of the fraction field Q(p1, ..., pk), in canonical form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: ParamPoly, den: ParamPoly):
        if den.is_zero():
            raise DivisionByZero("scalar with zero denominator")
        if num.is_zero():
            self.num = ParamPoly.zero()
            self.den = ParamPoly.const(1)
            self._hash: Optional[int] = None
            return
        if num.is_const() and den.is_const():
            q = num.const_value() / den.const_value()
            self.num = ParamPoly.const(Fraction(q.numerator))
            self.den = ParamPoly.const(Fraction(q.denominator))
            self._hash = None
            return
        g = param_gcd(num, den)
        if not (g.is_const() and g.const_value() == 1):
            num = num.exact_div(g)
            den = den.exact_div(g)
        cn, cd = num.content(), den.content()
        scale = cn / cd
        num = num * (scale.numerator / cn)
        den = den * (scale.denominator / cd)
        if den.leading_coeff() < 0:
            num, den = -num, -den
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def zero(cls) -> "Scalar":
        return cls(ParamPoly.zero(), ParamPoly.const(1))

    @classmethod
    def one(cls) -> "Scalar":
        return cls(ParamPoly.const(1), ParamPoly.const(1))

    @classmethod
    def from_fraction(cls, value: Union[int, Fraction]) -> "Scalar":
        return cls(ParamPoly.const(Fraction(value)), ParamPoly.const(1))

    @classmethod
    def sym(cls, name: str) -> "Scalar":
        return cls(ParamPoly.sym(name), ParamPoly.const(1))

    @classmethod
    def coerce(cls, value: Union["Scalar", int, Fraction]) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if not isinstance(value, (int, Fraction)):
            raise TypeError(f"cannot coerce {type(value).__name__} to Scalar")
        return cls.from_fraction(value)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_const() and self.den.is_const() and \
            self.num.const_value() == self.den.const_value()

    def is_rational(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"scalar is not rational: {self}")
        return self.num.const_value() / self.den.const_value()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def __add__(self, other: Union["Scalar", int, Fraction]) -> "Scalar":
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        other = Scalar.coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        out = Scalar.__new__(Scalar)
        out.num = -self.num
        out.den = self.den
        out._hash = None
        return out

    def __sub__(self, other: Union["Scalar", int, Fraction]) -> "Scalar":
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: Union[int, Fraction]) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: Union["Scalar", int, Fraction]) -> "Scalar":
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        other = Scalar.coerce(other)
        if self.is_zero() or other.is_zero():
            return Scalar.zero()
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["Scalar", int, Fraction]) -> "Scalar":
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        other = Scalar.coerce(other)
        if other.is_zero():
            raise DivisionByZero("scalar division by zero")
        return Scalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Union[int, Fraction]) -> "Scalar":
        return Scalar.coerce(other) / self

    def __pow__(self, n: int) -> "Scalar":
        if n == 0:
            return Scalar.one()
        if n < 0:
            if self.is_zero():
                raise DivisionByZero("zero scalar to a negative power")
            return Scalar(self.den, self.num) ** (-n)
        return Scalar(self.num**n, self.den**n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.from_fraction(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(
                (
                    tuple(sorted(self.num.terms.items())),
                    tuple(sorted(self.den.terms.items())),
                )
            )
        return self._hash

    def subst(self, mapping: Mapping[str, Union["Scalar", int, Fraction]]) -> "Scalar":
        """Substitute parameter symbols; unmapped symbols stay symbolic."""
        coerced = {k: Scalar.coerce(v) for k, v in mapping.items()}
        num = self.num.eval_scalar(coerced)
        den = self.den.eval_scalar(coerced)
        if den.is_zero():
            raise DivisionByZero(f"substitution sends denominator of {self} to zero")
        return num / den

    def sqrt(self) -> Optional["Scalar"]:
        """Exact square root in Q(params), or None when not a square."""
        rn = param_poly_sqrt(self.num)
        if rn is None:
            return None
        rd = param_poly_sqrt(self.den)
        if rd is None:
            return None
        return Scalar(rn, rd)

    def __str__(self) -> str:
        if self.den.is_const() and self.den.const_value() == 1:
            return str(self.num)
        num_s = str(self.num)
        den_s = str(self.den)
        if len(self.num.terms) > 1 or num_s.startswith("-"):
            num_s = f"({num_s})"
        if len(self.den.terms) > 1 or any(ch in den_s for ch in "*^/"):
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    __repr__ = __str__


def scalar_arith(lhs: Scalar, rhs: Scalar, op: str) -> Scalar:
    """Exact field arithmetic dispatch; op is one of '+', '-', '*', '/'."""
    if op == "+":
        return lhs + rhs
    if op == "-":
        return lhs - rhs
    if op == "*":
        return lhs * rhs
    if op == "/":
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")
