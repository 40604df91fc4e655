"""Search for invariant algebraic curves of planar polynomial vector fields.

An invariant polynomial P satisfies L_s(P) = K * P for a polynomial
cofactor K of degree < deg(s). The search is the classical one:

  * the top homogeneous part of P must divide a power of
    H = X*G_m - Y*F_m (or anything, when H vanishes identically), which
    pins the top part of K by exact division;
  * evaluating the identity at a singular point q forces K(q) to be a
    sum of at most deg(P) eigenvalues of the linearization at q (or zero,
    when P does not pass through q), which pins the constant term;
  * each finitely-many candidate K leaves a plain linear system for the
    coefficients of P, solved exactly over the parameter field.

Symbolic parameters are handled on the generic stratum: any pivot or
eigenvalue discriminant whose vanishing would change the answer is
reported as a branch record instead of being enumerated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from ._linalg import determinant, nullspace
from .algebra import DiffParam, MultiPoly, Scalar, exact_divides
from .errors import (
    PositiveDimensionalSingularLocus,
    UnsupportedDegree,
)
from .vectorfield import (
    SingularPoint,
    VectorField,
    _rational_roots_of_integer_poly,
    lie_derivative,
    lotka_volterra,
    singular_points,
)

COMPLETE_UP_TO_BOUND = "COMPLETE_UP_TO_BOUND"
PARTIAL = "PARTIAL"

CONSTANTS = "CONSTANTS"


def diff_param_field(name: str) -> str:
    return f"DIFF_PARAM({name})"


@dataclass(frozen=True)
class InvariantCurve:
    """A polynomial P with L_s(P) = cofactor * P, normalized monic."""

    poly: MultiPoly
    cofactor: MultiPoly
    definition_field: str = CONSTANTS

    @property
    def degree(self) -> int:
        return self.poly.total_degree()

    def __str__(self) -> str:
        return f"{self.poly} (cofactor {self.cofactor})"


@dataclass(frozen=True)
class BranchRecord:
    """A genericity assumption the symbolic search committed to.

    kind 'pivot-nonzero': the expression was divided by during elimination.
    kind 'discriminant-nonsquare': the expression is an eigenvalue
    discriminant that was not a perfect square in the parameter field;
    strata where it becomes a square may admit further curves.
    """

    kind: str
    expression: str
    detail: str


@dataclass(frozen=True)
class DarbouxReport:
    degree_bound: int
    curves: Tuple[InvariantCurve, ...]
    completeness: str
    branches: Tuple[BranchRecord, ...] = ()
    notes: Tuple[str, ...] = ()

    def polynomials(self) -> Tuple[MultiPoly, ...]:
        return tuple(c.poly for c in self.curves)


def _monomials_upto(n: int) -> List[Tuple[int, int]]:
    """Exponent pairs of total degree <= n, descending graded-lex."""
    out = [
        (i, t - i)
        for t in range(n + 1)
        for i in range(t + 1)
    ]
    out.sort(key=lambda e: (sum(e), e), reverse=True)
    return out


def _mono_poly(variables: Sequence[str], e: Tuple[int, int]) -> MultiPoly:
    return MultiPoly(tuple(variables), {tuple(e): Scalar.one()})


def _scalar_key(s: Scalar) -> str:
    return str(s)


def _poly_key(p: MultiPoly) -> str:
    return str(p)


def _is_rational_poly(p: MultiPoly) -> bool:
    return all(c.is_rational() for c in p.terms.values())


def _make_classifier(assume_nonzero: Sequence[Scalar]):
    """Rank pivots: 0 rational, 1 nonzero by assumption, 2 genuine branch."""
    assumed_names: Set[str] = set()
    assumed_polys: Set[str] = set()
    for raw in assume_nonzero:
        sc = Scalar.coerce(raw)
        if sc.is_zero():
            raise ValueError("assumption list contains zero")
        num = sc.num
        if len(num.terms) == 1:
            mono = next(iter(num.terms))
            assumed_names.update(name for name, _ in mono)
        else:
            assumed_polys.add(str(num))
            assumed_polys.add(str(-num))

    def classify(pivot: Scalar) -> int:
        if pivot.is_rational():
            return 0
        num = pivot.num
        if len(num.terms) == 1:
            mono = next(iter(num.terms))
            if all(name in assumed_names for name, _ in mono):
                return 1
        if str(num) in assumed_polys:
            return 1
        return 2

    return classify


# -- factoring the top-degree constraint polynomial ---------------------------


def _factor_homogeneous(
    h: MultiPoly, xvar: str, yvar: str
) -> Tuple[List[MultiPoly], bool, List[BranchRecord]]:
    """Monic irreducible factors of a homogeneous bivariate polynomial.

    Returns (factors, complete, branch records). `complete` is False when a
    residual of degree >= 3 could not be split over the parameter field.
    """
    variables = h.variables
    records: List[BranchRecord] = []
    factors: List[MultiPoly] = []
    x_mult = min(e[0] for e in h.terms)
    y_mult = min(e[1] for e in h.terms)
    if x_mult:
        factors.append(MultiPoly.var(variables, xvar))
    if y_mult:
        factors.append(MultiPoly.var(variables, yvar))
    rest = MultiPoly(
        variables,
        {(e[0] - x_mult, e[1] - y_mult): c for e, c in h.terms.items()},
    )
    r = rest.total_degree()
    if r == 0:
        return factors, True, records
    # dehomogenize: coefficient of u^k is the coefficient of X^k Y^(r-k)
    coeffs: Dict[int, Scalar] = {}
    for e, c in rest.terms.items():
        coeffs[e[0]] = c

    def linear_factor(root: Scalar) -> MultiPoly:
        return MultiPoly.var(variables, xvar) - MultiPoly.var(variables, yvar) * root

    def homogenized(cs: Dict[int, Scalar], deg: int) -> MultiPoly:
        terms = {
            (k, deg - k): c for k, c in cs.items() if not c.is_zero()
        }
        return MultiPoly(variables, terms).monic()

    work = dict(coeffs)
    complete = True
    while True:
        deg = max(k for k, c in work.items() if not c.is_zero())
        if deg == 0:
            break
        if deg == 1:
            factors.append(linear_factor(-work.get(0, Scalar.zero()) / work[1]))
            break
        if deg == 2:
            c2 = work[2]
            c1 = work.get(1, Scalar.zero())
            c0 = work.get(0, Scalar.zero())
            disc = c1 * c1 - Scalar.from_fraction(4) * c2 * c0
            root = disc.sqrt()
            if root is not None:
                half = Scalar.from_fraction(Fraction(1, 2))
                factors.append(linear_factor((-c1 + root) * half / c2))
                factors.append(linear_factor((-c1 - root) * half / c2))
            else:
                if not disc.is_rational():
                    records.append(
                        BranchRecord(
                            "discriminant-nonsquare",
                            str(disc),
                            "top-part factor discriminant; strata where it "
                            "is a perfect square admit further top parts",
                        )
                    )
                factors.append(homogenized(work, 2))
            break
        # degree >= 3: peel rational roots when the coefficients are rational
        if all(c.is_rational() for c in work.values()):
            roots = _rational_roots_of_integer_poly(
                {k: c for k, c in work.items() if not c.is_zero()}
            )
            if not roots:
                if deg == 3:
                    factors.append(homogenized(work, 3))
                else:
                    factors.append(homogenized(work, deg))
                    complete = False
                break
            root = roots[0]
            factors.append(linear_factor(root))
            # synthetic division by (u - root)
            quo: Dict[int, Scalar] = {}
            carry = Scalar.zero()
            for k in range(deg, 0, -1):
                carry = work.get(k, Scalar.zero()) + carry * root
                quo[k - 1] = carry
            work = quo
            continue
        factors.append(homogenized(work, deg))
        complete = False
        break
    # de-duplicate
    unique: List[MultiPoly] = []
    seen: Set[str] = set()
    for f in factors:
        key = _poly_key(f)
        if key not in seen:
            seen.add(key)
            unique.append(f)
    return unique, complete, records


def _top_candidates(
    n: int,
    factors: Sequence[MultiPoly],
    f_top: MultiPoly,
    g_top: MultiPoly,
    xvar: str,
    yvar: str,
) -> List[MultiPoly]:
    """Candidate top parts of K for degree-n curves, by exact division."""
    out: List[MultiPoly] = []
    seen: Set[str] = set()
    degs = [f.total_degree() for f in factors]

    def expo_vectors(remaining: int, idx: int, acc: List[int]):
        if idx == len(factors):
            if remaining == 0:
                yield tuple(acc)
            return
        step = degs[idx]
        limit = remaining // step
        for e in range(limit + 1):
            acc.append(e)
            yield from expo_vectors(remaining - e * step, idx + 1, acc)
            acc.pop()

    for evec in expo_vectors(n, 0, []):
        p_top = MultiPoly.const(f_top.variables, 1)
        for f, e in zip(factors, evec):
            if e:
                p_top = p_top * f ** e
        if p_top.is_constant():
            continue
        numerator = f_top * p_top.partial(xvar) + g_top * p_top.partial(yvar)
        k_top = exact_divides(p_top, numerator)
        if k_top is None:
            continue
        key = _poly_key(k_top)
        if key not in seen:
            seen.add(key)
            out.append(k_top)
    return out


# -- pinning the constant term at singular points ------------------------------


class _PinData:
    """Eigenvalue data of the linearization at one rational singular point."""

    def __init__(self, s: VectorField, point: SingularPoint):
        self.point = point
        self.mapping = point.as_dict(s.variables)
        jac = s.jacobian_at(point.coordinates)
        self.trace = jac[0][0] + jac[1][1]
        det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]
        self.disc = self.trace * self.trace - Scalar.from_fraction(4) * det
        self.sqrt_disc = self.disc.sqrt()

    def eigen_sums(self, n: int) -> List[Scalar]:
        """Possible values of K at the point for curves of degree <= n."""
        out: Dict[str, Scalar] = {"0": Scalar.zero()}
        half = Scalar.from_fraction(Fraction(1, 2))
        if self.sqrt_disc is not None:
            lam1 = (self.trace + self.sqrt_disc) * half
            lam2 = (self.trace - self.sqrt_disc) * half
            for m1 in range(n + 1):
                for m2 in range(n + 1 - m1):
                    if m1 + m2 == 0:
                        continue
                    val = lam1 * m1 + lam2 * m2
                    out.setdefault(_scalar_key(val), val)
        else:
            # conjugate pair: only Galois-stable sums m*(lam1+lam2) are
            # rational over the parameter field
            for m in range(1, n // 2 + 1):
                val = self.trace * m
                out.setdefault(_scalar_key(val), val)
        return list(out.values())


def _pencil_constant_candidates(
    lie_cols: Dict[Tuple[int, int], MultiPoly],
    k_top: MultiPoly,
    cols: Sequence[Tuple[int, int]],
    rows: Sequence[Tuple[int, int]],
    variables: Sequence[str],
) -> Optional[List[Scalar]]:
    """Rational constants k0 for which L - (k_top + k0) drops rank.

    Builds the matrix pencil A - k0*B over Q(k0), compresses it to a square
    matrix with a deterministic random projection, and takes rational roots
    of the determinant. Superset of the true candidate set; every candidate
    is verified downstream. Returns None when the compression degenerates.
    """
    knames = {"_k0"}
    k0 = Scalar.sym("_k0")
    row_index = {e: i for i, e in enumerate(rows)}
    entries: List[List[Scalar]] = [
        [Scalar.zero()] * len(cols) for _ in rows
    ]
    for j, e in enumerate(cols):
        image = lie_cols[e] - (k_top + k0) * _mono_poly(variables, e)
        for expo, coeff in image.terms.items():
            entries[row_index[expo]][j] = coeff
    for attempt in range(3):
        rng = random.Random(0x5EED + attempt)
        proj = [
            [Scalar.from_fraction(rng.randint(-3, 3)) for _ in rows]
            for _ in cols
        ]
        square = [
            [
                sum(
                    (proj[i][r] * entries[r][j] for r in range(len(rows))),
                    Scalar.zero(),
                )
                for j in range(len(cols))
            ]
            for i in range(len(cols))
        ]
        det = determinant(square)
        if det.is_zero():
            continue
        num = det.num
        uni = num.to_univariate("_k0")
        coeffs = {
            deg: Scalar.from_fraction(c.const_value())
            for deg, c in uni.items()
            if not c.is_zero()
        }
        roots: List[Scalar] = []
        low = min(coeffs)
        if low > 0:
            roots.append(Scalar.zero())
            coeffs = {deg - low: c for deg, c in coeffs.items()}
        if max(coeffs) > 0:
            roots.extend(_rational_roots_of_integer_poly(coeffs))
        return roots
    return None


# -- the search ----------------------------------------------------------------


def darboux_search(
    s: VectorField,
    max_degree: int,
    assume_nonzero: Sequence[Scalar] = (),
) -> DarbouxReport:
    """All invariant polynomials of degree <= max_degree over the parameter
    field, with cofactors, up to the stated completeness."""
    if s.diff_params:
        raise ValueError(
            "darboux_search expects a plain polynomial field; "
            "differential parameters are handled by invariant_family_b_eq_d"
        )
    if len(s.variables) != 2:
        raise ValueError("darboux_search requires a planar vector field")
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    comps = s.polynomial_components()
    f_comp, g_comp = comps
    xvar, yvar = s.variables
    variables = s.variables
    m = max(1, s.max_degree())
    rational_field = _is_rational_poly(f_comp) and _is_rational_poly(g_comp)

    notes: List[str] = []
    records: List[BranchRecord] = []
    record_keys: Set[str] = set()
    complete = True

    def add_record(rec: BranchRecord):
        key = f"{rec.kind}:{rec.expression}"
        if key not in record_keys:
            record_keys.add(key)
            records.append(rec)

    if m > 2:
        complete = False
        notes.append(
            "cofactor coefficients between the top and constant terms are "
            "not enumerated for fields of degree > 2; search is a subfamily"
        )

    # top-part constraint
    f_top = f_comp.homogeneous_part(m)
    g_top = g_comp.homogeneous_part(m)
    h = MultiPoly.var(variables, xvar) * g_top - MultiPoly.var(variables, yvar) * f_top
    dicritical = h.is_zero()
    factors: List[MultiPoly] = []
    w_dicritical: Optional[MultiPoly] = None
    if dicritical:
        if f_top.is_zero():
            w_dicritical = MultiPoly.zero(variables)
        else:
            w_dicritical = exact_divides(MultiPoly.var(variables, xvar), f_top)
        notes.append(
            "dicritical top degree: every top part is admissible and the "
            "cofactor top is degree times the common radial factor"
        )
    else:
        factors, fact_complete, fact_records = _factor_homogeneous(h, xvar, yvar)
        for rec in fact_records:
            add_record(rec)
        if not fact_complete:
            complete = False
            notes.append(
                "top-part constraint polynomial has an unfactored residual; "
                "candidate top parts may be missing"
            )

    # singular point pinning data
    pins: Optional[List[_PinData]] = None
    try:
        locus = singular_points(s)
        pins = [_PinData(s, pt) for pt in locus]
        if locus.discarded_nonrational:
            notes.append(
                "singular points outside the parameter field were not used "
                "for pinning (harmless: fewer necessary conditions)"
            )
    except (PositiveDimensionalSingularLocus, UnsupportedDegree):
        pins = None

    if pins is not None and pins:
        for pin in pins:
            if pin.sqrt_disc is None and not pin.disc.is_rational():
                add_record(
                    BranchRecord(
                        "discriminant-nonsquare",
                        str(pin.disc),
                        f"eigenvalue discriminant at singular point "
                        f"{pin.point}; strata where it is a perfect square "
                        "admit further cofactor constants",
                    )
                )
        notes.append(
            f"cofactor constant terms pinned at {len(pins)} rational "
            "singular point(s)"
        )

    # Lie images of the coefficient-space monomials
    cols = _monomials_upto(max_degree)
    rows = _monomials_upto(max_degree + max(m - 1, 0))
    row_index = {e: i for i, e in enumerate(rows)}
    lie_cols: Dict[Tuple[int, int], MultiPoly] = {}
    for e in cols:
        image = lie_derivative(s, _mono_poly(variables, e))
        lie_cols[e] = image

    # assemble candidate cofactors
    candidates: Dict[str, MultiPoly] = {}
    pencil_failed = False
    no_pin_noted = False
    for n in range(1, max_degree + 1):
        if dicritical:
            k_tops = [w_dicritical * n]
        else:
            k_tops = _top_candidates(n, factors, f_top, g_top, xvar, yvar)
        for k_top in k_tops:
            if pins is not None and pins:
                k0_sets: List[Dict[str, Scalar]] = []
                for pin in pins:
                    k_top_at = k_top.evaluate(pin.mapping)
                    vals = {
                        _scalar_key(v - k_top_at): v - k_top_at
                        for v in pin.eigen_sums(n)
                    }
                    k0_sets.append(vals)
                common = set(k0_sets[0])
                for vals in k0_sets[1:]:
                    common &= set(vals)
                k0s = [k0_sets[0][key] for key in sorted(common)]
            elif rational_field:
                roots = _pencil_constant_candidates(
                    lie_cols, k_top, cols, rows, variables
                )
                if roots is None:
                    pencil_failed = True
                    continue
                k0s = roots
            else:
                if not no_pin_noted:
                    no_pin_noted = True
                    complete = False
                    notes.append(
                        "no rational singular points in the parameter field; "
                        "cofactor constant terms could not be pinned"
                    )
                continue
            for k0 in k0s:
                K = k_top + k0
                candidates.setdefault(_poly_key(K), K)
    if pencil_failed:
        complete = False
        notes.append(
            "matrix-pencil compression degenerated for some cofactor top; "
            "the affected candidates were skipped"
        )

    # solve the linear system for each candidate cofactor
    classify = _make_classifier(assume_nonzero)
    raw_found: List[Tuple[MultiPoly, MultiPoly]] = []
    seen_polys: Set[str] = set()
    for key in sorted(candidates):
        K = candidates[key]
        mat: List[List[Scalar]] = [
            [Scalar.zero()] * len(cols) for _ in rows
        ]
        for j, e in enumerate(cols):
            image = lie_cols[e] - K * _mono_poly(variables, e)
            for expo, coeff in image.terms.items():
                mat[row_index[expo]][j] = coeff
        basis, assumed = nullspace(mat, len(cols), classify)
        for pivot in assumed:
            add_record(
                BranchRecord(
                    "pivot-nonzero",
                    str(pivot.num),
                    "divided by during elimination; strata where it "
                    "vanishes may change the solution set",
                )
            )
        for vec in basis:
            poly = MultiPoly(
                variables,
                {
                    tuple(e): coeff
                    for e, coeff in zip(cols, vec)
                    if not coeff.is_zero()
                },
            )
            if poly.is_zero() or poly.is_constant():
                continue
            poly = poly.monic()
            pkey = _poly_key(poly)
            if pkey in seen_polys:
                continue
            seen_polys.add(pkey)
            check = lie_derivative(s, poly)
            if check != K * poly:
                raise RuntimeError(
                    "internal error: candidate solution fails the cofactor "
                    f"identity for {poly}"
                )
            raw_found.append((poly, K))

    kept = _closure_filter(raw_found)
    curves = tuple(
        InvariantCurve(p, k)
        for p, k in sorted(
            kept, key=lambda pk: (pk[0].total_degree(), _poly_key(pk[0]))
        )
    )
    completeness = COMPLETE_UP_TO_BOUND if complete else PARTIAL
    return DarbouxReport(
        degree_bound=max_degree,
        curves=curves,
        completeness=completeness,
        branches=tuple(records),
        notes=tuple(notes),
    )


def _decomposes(p: MultiPoly, kept: Sequence[MultiPoly]) -> bool:
    """True when monic p is a finite product of members of kept."""
    if p.is_constant():
        return p.constant_value().is_one()
    deg = p.total_degree()
    for q in kept:
        if q.total_degree() > deg:
            continue
        quo = exact_divides(q, p)
        if quo is not None and _decomposes(quo, kept):
            return True
    return False


def _closure_filter(
    pairs: Iterable[Tuple[MultiPoly, MultiPoly]]
) -> List[Tuple[MultiPoly, MultiPoly]]:
    """Drop curves that are products of lower-degree reported curves."""
    ordered = sorted(
        pairs, key=lambda pk: (pk[0].total_degree(), _poly_key(pk[0]))
    )
    kept: List[Tuple[MultiPoly, MultiPoly]] = []
    for p, k in ordered:
        if not _decomposes(p, [q for q, _ in kept]):
            kept.append((p, k))
    return kept


def invariant_family_b_eq_d(a, b, c) -> InvariantCurve:
    """The extra invariant curve of the equal-rates system, over the
    extension by one differential parameter z with z' = b*z.

    For X' = X(aY + b), Y' = Y(cX + b) the polynomial cX - aY - z has
    cofactor b; the identity is verified on construction.
    """
    a = Scalar.coerce(a)
    b = Scalar.coerce(b)
    c = Scalar.coerce(c)
    z = DiffParam.log("z", b)
    s = lotka_volterra(a, b, c, b, diff_params=(z,))
    space = s.space
    poly = (
        MultiPoly.var(space, s.variables[0]) * c
        - MultiPoly.var(space, s.variables[1]) * a
        - MultiPoly.var(space, "z")
    )
    cofactor = MultiPoly.const(space, b)
    image = lie_derivative(s, poly)
    if image != cofactor * poly:
        raise RuntimeError("internal error: b=d family identity failed")
    return InvariantCurve(poly, cofactor, diff_param_field("z"))
