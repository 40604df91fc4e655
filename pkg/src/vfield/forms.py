"""Exterior algebra of rational differential forms on affine space.

An m-form stores coefficients against the basis dx_{i1} ^ ... ^ dx_{im}
with strictly increasing indices into the space tuple. Differentials of
differential parameters are ordinary cotangent directions; the interior
product consumes the prescribed derivative of each space variable.

Logarithms never appear as functions. A LogCombination represents
du + sum c_i dv_i/v_i through the rational 1-forms dv/v, and the
normalization step rewrites it over Q-linearly independent coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import MultiPoly, RatFunc, Scalar
from .algebra.polys import ScalarLike
from .errors import ArityZero, NonRepresentableCoefficient
from .vectorfield import VectorField

Index = Tuple[int, ...]
CoeffLike = Union[RatFunc, MultiPoly, ScalarLike]


class DForm:
    """A rational differential form of fixed arity."""

    __slots__ = ("space", "arity", "coeffs", "_hash")

    def __init__(
        self,
        space: Sequence[str],
        arity: int,
        coeffs: Mapping[Index, CoeffLike],
    ):
        self.space = tuple(space)
        n = len(self.space)
        if arity < 0:
            raise ValueError("negative arity")
        self.arity = arity
        fixed: Dict[Index, RatFunc] = {}
        if arity <= n:
            for idx, value in coeffs.items():
                idx = tuple(idx)
                if len(idx) != arity:
                    raise ValueError(f"index {idx} does not have arity {arity}")
                if any(i < 0 or i >= n for i in idx):
                    raise ValueError(f"index {idx} outside the space")
                if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                    raise ValueError(f"index {idx} is not strictly increasing")
                c = RatFunc.coerce(value, self.space)
                c = RatFunc(c.num.with_variables(self.space),
                            c.den.with_variables(self.space))
                if not c.is_zero():
                    fixed[idx] = c
        self.coeffs = fixed
        self._hash: Optional[int] = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, space: Sequence[str], arity: int = 0) -> "DForm":
        return cls(space, arity, {})

    @classmethod
    def function(cls, space: Sequence[str], value: CoeffLike) -> "DForm":
        return cls(space, 0, {(): value})

    @classmethod
    def differential(cls, space: Sequence[str], name: str) -> "DForm":
        space = tuple(space)
        return cls(space, 1, {(space.index(name),): 1})

    @classmethod
    def one_form(cls, space: Sequence[str], parts: Mapping[str, CoeffLike]) -> "DForm":
        space = tuple(space)
        return cls(space, 1, {(space.index(k),): v for k, v in parts.items()})

    # -- structure ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, idx: Sequence[int]) -> RatFunc:
        return self.coeffs.get(tuple(idx), RatFunc.zero(self.space))

    def as_function(self) -> RatFunc:
        if self.arity != 0:
            raise ValueError(f"arity {self.arity} form is not a function")
        return self.coefficient(())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DForm):
            return NotImplemented
        return (
            self.space == other.space
            and self.arity == other.arity
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(
                (self.space, self.arity, frozenset(self.coeffs.items()))
            )
        return self._hash

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            basis = "^".join("d" + self.space[i] for i in idx)
            text = str(c)
            if basis:
                if "+" in text or (text.count("-") - text.startswith("-")) > 0:
                    text = f"({text})"
                parts.append(f"{text} {basis}" if text != "1" else basis)
            else:
                parts.append(text)
        return " + ".join(parts)

    __repr__ = __str__

    # -- arithmetic -----------------------------------------------------------

    def _like(self, other: "DForm") -> None:
        if self.space != other.space:
            raise ValueError(f"space mismatch: {self.space} vs {other.space}")
        if self.arity != other.arity and self.coeffs and other.coeffs:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other: "DForm") -> "DForm":
        if not isinstance(other, DForm):
            return NotImplemented
        self._like(other)
        arity = self.arity if self.coeffs or not other.coeffs else other.arity
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = out.get(idx, RatFunc.zero(self.space)) + c
        return DForm(self.space, arity, out)

    def __neg__(self) -> "DForm":
        return DForm(self.space, self.arity, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "DForm") -> "DForm":
        if not isinstance(other, DForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: CoeffLike) -> "DForm":
        if isinstance(other, DForm):
            return NotImplemented
        c = RatFunc.coerce(other, self.space)
        return DForm(
            self.space, self.arity, {k: v * c for k, v in self.coeffs.items()}
        )

    __rmul__ = __mul__

    def __truediv__(self, other: CoeffLike) -> "DForm":
        c = RatFunc.coerce(other, self.space)
        return DForm(
            self.space, self.arity, {k: v / c for k, v in self.coeffs.items()}
        )


def _insert_index(idx: Index, i: int) -> Optional[Tuple[Index, int]]:
    """Sorted insertion with alternating sign; None when i already appears."""
    if i in idx:
        return None
    pos = 0
    while pos < len(idx) and idx[pos] < i:
        pos += 1
    sign = -1 if pos % 2 else 1
    return idx[:pos] + (i,) + idx[pos:], sign


def exterior_derivative(form: DForm) -> DForm:
    out: Dict[Index, RatFunc] = {}
    space = form.space
    for idx, c in form.coeffs.items():
        for i, name in enumerate(space):
            dc = c.partial(name)
            if dc.is_zero():
                continue
            placed = _insert_index(idx, i)
            if placed is None:
                continue
            new_idx, sign = placed
            term = dc if sign > 0 else -dc
            prev = out.get(new_idx)
            out[new_idx] = term if prev is None else prev + term
    return DForm(space, form.arity + 1, out)


def _merge_sign(left: Index, right: Index) -> Optional[Tuple[Index, int]]:
    """Concatenate and sort two strictly increasing tuples, tracking the
    permutation sign; None when they overlap. Each right index moves left
    past the larger entries, one transposition per hop."""
    merged = left
    sign = 1
    for i in right:
        if i in merged:
            return None
        pos = 0
        while pos < len(merged) and merged[pos] < i:
            pos += 1
        if (len(merged) - pos) % 2:
            sign = -sign
        merged = merged[:pos] + (i,) + merged[pos:]
    return merged, sign


def wedge(left: DForm, right: DForm) -> DForm:
    if left.space != right.space:
        raise ValueError(f"space mismatch: {left.space} vs {right.space}")
    space = left.space
    arity = left.arity + right.arity
    out: Dict[Index, RatFunc] = {}
    if arity > len(space):
        return DForm.zero(space, arity)
    for ia, ca in left.coeffs.items():
        for ib, cb in right.coeffs.items():
            placed = _merge_sign(ia, ib)
            if placed is None:
                continue
            idx, sign = placed
            term = ca * cb
            if sign < 0:
                term = -term
            prev = out.get(idx)
            out[idx] = term if prev is None else prev + term
    return DForm(space, arity, out)


def interior_product(s: VectorField, form: DForm) -> DForm:
    if form.arity == 0:
        raise ArityZero("interior product of a 0-form")
    if tuple(form.space) != s.space:
        raise ValueError(f"form space {form.space} does not match field {s.space}")
    rates = [s.derivative_of(name) for name in s.space]
    out: Dict[Index, RatFunc] = {}
    for idx, c in form.coeffs.items():
        for r, i in enumerate(idx):
            rate = rates[i]
            if rate.is_zero():
                continue
            term = c * rate
            if r % 2:
                term = -term
            rest = idx[:r] + idx[r + 1:]
            prev = out.get(rest)
            out[rest] = term if prev is None else prev + term
    return DForm(form.space, form.arity - 1, out)


def lie_derivative_form(s: VectorField, form: DForm) -> DForm:
    """Cartan's formula i_s(dw) + d(i_s w); plain differentiation on 0-forms."""
    first = interior_product(s, exterior_derivative(form))
    if form.arity == 0:
        return first
    return first + exterior_derivative(interior_product(s, form))


def d_log(form_or_arg: Union[DForm, RatFunc]) -> DForm:
    """The 1-form d(arg)/arg."""
    if isinstance(form_or_arg, DForm):
        arg = form_or_arg.as_function()
        space = form_or_arg.space
    else:
        arg = form_or_arg
        space = form_or_arg.variables
    return exterior_derivative(DForm.function(space, arg)) / arg


class BasisCoeff:
    """A Q-linear combination of declared basis symbols; the symbol "1"
    is the rational unit."""

    __slots__ = ("parts",)

    RATIONAL_UNIT = "1"

    def __init__(self, parts: Mapping[str, Union[int, Fraction]]):
        self.parts: Dict[str, Fraction] = {}
        for name, q in parts.items():
            q = Fraction(q)
            if q != 0:
                self.parts[name] = q

    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> "BasisCoeff":
        return cls({cls.RATIONAL_UNIT: Fraction(value)})

    @classmethod
    def symbol(cls, name: str, multiple: Union[int, Fraction] = 1) -> "BasisCoeff":
        return cls({name: Fraction(multiple)})

    @classmethod
    def coerce(cls, value: Union["BasisCoeff", int, Fraction, Scalar]) -> "BasisCoeff":
        if isinstance(value, BasisCoeff):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        if isinstance(value, Scalar):
            if value.is_rational():
                return cls.rational(value.as_fraction())
            if value.den.is_const() and value.num.total_degree() <= 1:
                parts: Dict[str, Union[int, Fraction]] = {}
                den = value.den.const_value()
                for mono, coeff in value.num.terms.items():
                    if not mono:
                        parts[cls.RATIONAL_UNIT] = coeff / den
                    else:
                        ((name, _),) = mono
                        parts[name] = coeff / den
                return cls(parts)
            raise NonRepresentableCoefficient(
                f"{value} is not a Q-combination of basis symbols"
            )
        raise NonRepresentableCoefficient(f"cannot read {value!r} as a coefficient")

    def is_zero(self) -> bool:
        return not self.parts

    def to_scalar(self) -> Scalar:
        total = Scalar.zero()
        for name, q in self.parts.items():
            unit = Scalar.one() if name == self.RATIONAL_UNIT else Scalar.sym(name)
            total = total + unit * q
        return total

    def scaled(self, q: Union[int, Fraction]) -> "BasisCoeff":
        return BasisCoeff({k: v * q for k, v in self.parts.items()})

    def minus(self, other: "BasisCoeff", q: Fraction) -> "BasisCoeff":
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = out.get(k, Fraction(0)) - v * q
        return BasisCoeff(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BasisCoeff):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(frozenset(self.parts.items()))

    def __str__(self) -> str:
        if not self.parts:
            return "0"
        bits = []
        for name in sorted(self.parts):
            q = self.parts[name]
            if name == self.RATIONAL_UNIT:
                bits.append(str(q))
            elif q == 1:
                bits.append(name)
            else:
                bits.append(f"{q}*{name}")
        return " + ".join(bits)

    __repr__ = __str__


CoeffInput = Union[BasisCoeff, int, Fraction, Scalar]


class LogCombination:
    """du + sum c_i dv_i/v_i, kept as data for normalization."""

    __slots__ = ("space", "exact_part", "log_terms")

    def __init__(
        self,
        exact_part: Union[RatFunc, MultiPoly, ScalarLike],
        log_terms: Sequence[Tuple[CoeffInput, Union[RatFunc, MultiPoly]]],
        space: Optional[Sequence[str]] = None,
    ):
        if space is None:
            if isinstance(exact_part, (RatFunc, MultiPoly)):
                space = exact_part.variables
            else:
                for _, arg in log_terms:
                    space = arg.variables
                    break
                else:
                    raise ValueError("cannot infer the space of an empty combination")
        self.space = tuple(space)
        self.exact_part = RatFunc.coerce(exact_part, self.space)
        terms = []
        for coeff, arg in log_terms:
            arg_r = RatFunc.coerce(arg, self.space)
            if arg_r.is_zero():
                raise ValueError("log argument must be nonzero")
            terms.append((BasisCoeff.coerce(coeff), arg_r))
        self.log_terms: Tuple[Tuple[BasisCoeff, RatFunc], ...] = tuple(terms)

    def as_form(self) -> DForm:
        total = exterior_derivative(DForm.function(self.space, self.exact_part))
        for coeff, arg in self.log_terms:
            total = total + d_log(
                DForm.function(self.space, arg)
            ) * coeff.to_scalar()
        return total

    def __str__(self) -> str:
        bits = [f"d({self.exact_part})"]
        for coeff, arg in self.log_terms:
            bits.append(f"({coeff}) d({arg})/({arg})")
        return " + ".join(bits)

    __repr__ = __str__


def _independent_subset(
    vectors: List[BasisCoeff],
) -> Tuple[List[int], List[List[Fraction]]]:
    """Greedy maximal Q-independent subset (indices, in input order) and the
    coordinates of every vector on that subset."""
    names: List[str] = []
    for v in vectors:
        for k in v.parts:
            if k not in names:
                names.append(k)
    basis_rows: List[List[Fraction]] = []
    chosen: List[int] = []
    coords: List[List[Fraction]] = []

    def as_row(v: BasisCoeff) -> List[Fraction]:
        return [v.parts.get(k, Fraction(0)) for k in names]

    for i, v in enumerate(vectors):
        row = as_row(v)
        lam = [Fraction(0)] * len(chosen)
        # eliminate against the chosen rows (kept in echelon form)
        work = list(row)
        for j, base in enumerate(basis_rows):
            pivot = next(k for k, x in enumerate(base) if x != 0)
            if work[pivot] != 0:
                factor = work[pivot] / base[pivot]
                lam[j] += factor
                work = [w - factor * x for w, x in zip(work, base)]
        if any(x != 0 for x in work):
            # independent: adopt the reduced vector as a new echelon row,
            # remembering it equals v minus the lam-combination so far
            chosen.append(i)
            basis_rows.append(work)
            lam.append(Fraction(1))
        coords.append(lam)
    # coords are against the echelon rows; convert to coordinates against
    # the original chosen vectors by back-substitution
    m = len(chosen)
    # echelon row j = vectors[chosen[j]] - sum_{k<j} mix[j][k] * echelon row k
    mix: List[List[Fraction]] = []
    for j, idx in enumerate(chosen):
        mix.append(coords[idx][:j])
    # express echelon rows over original chosen vectors
    echelon_over_chosen: List[List[Fraction]] = []
    for j in range(m):
        vec = [Fraction(0)] * m
        vec[j] = Fraction(1)
        for k in range(j):
            for t in range(m):
                vec[t] -= mix[j][k] * echelon_over_chosen[k][t]
        echelon_over_chosen.append(vec)
    final: List[List[Fraction]] = []
    for lam in coords:
        out = [Fraction(0)] * m
        for j, f in enumerate(lam):
            if f:
                for t in range(m):
                    out[t] += f * echelon_over_chosen[j][t]
        final.append(out)
    return chosen, final


def rosenlicht_normalize(lc: LogCombination) -> LogCombination:
    """Rewrite sum c_i dv_i/v_i over Q-linearly independent coefficients
    e_j/N with arguments w_j that are integer power products of the v_i."""
    if not lc.log_terms:
        return lc
    coeffs = [c for c, _ in lc.log_terms]
    args = [a for _, a in lc.log_terms]
    chosen, coords = _independent_subset(coeffs)
    if not chosen:
        return LogCombination(lc.exact_part, [], lc.space)
    m = len(chosen)
    n_lcm = 1
    for lam in coords:
        for q in lam:
            n_lcm = n_lcm * q.denominator // gcd(n_lcm, q.denominator)
    new_terms = []
    for j in range(m):
        w = RatFunc.const(lc.space, 1)
        for i, lam in enumerate(coords):
            gamma = int(lam[j] * n_lcm)
            if gamma:
                w = w * args[i] ** gamma
        coeff = coeffs[chosen[j]].scaled(Fraction(1, n_lcm))
        new_terms.append((coeff, w))
    return LogCombination(lc.exact_part, new_terms, lc.space)
