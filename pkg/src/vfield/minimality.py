"""Strong-minimality criterion for planar polynomial vector fields.

The criterion: a singular point lying on no invariant algebraic curve
certifies strong minimality. It is one-directional, and our curve list
is only complete up to the search degree bound, so the verdict carries
caveat codes instead of overclaiming.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .algebra import Scalar
from .darboux import COMPLETE_UP_TO_BOUND, DarbouxReport, darboux_search
from .vectorfield import SingularPoint, VectorField, singular_points

STRONGLY_MINIMAL_CERTIFIED = "STRONGLY_MINIMAL_CERTIFIED"
CRITERION_FAILS = "CRITERION_FAILS"
INCONCLUSIVE = "INCONCLUSIVE"

# caveat codes
ONE_DIRECTIONAL = "one-directional"
DEGREE_BOUNDED = "degree-bounded"
GENERIC_STRATUM = "generic-stratum"
PARTIAL_SEARCH = "partial-search"
DISCARDED_SINGULAR = "nonrational-singular-points-discarded"
NO_SINGULAR_POINTS = "no-singular-points"


@dataclass(frozen=True)
class MinimalityReport:
    verdict: str
    witness: Optional[SingularPoint]
    curves_checked: DarbouxReport
    caveats: Tuple[str, ...]


def check_strong_minimality(
    s: VectorField,
    max_degree: int,
    assume_nonzero: Sequence[Scalar] = (),
) -> MinimalityReport:
    """Search invariant curves up to max_degree, then look for a singular
    point on none of them (exact substitution).

    STRONGLY_MINIMAL_CERTIFIED needs such a witness, a search that was
    complete up to the bound, and no non-rational singular points left
    unexamined. CRITERION_FAILS means every singular point lies on some
    reported curve. Anything weaker is INCONCLUSIVE.
    """
    report = darboux_search(s, max_degree, assume_nonzero=assume_nonzero)
    locus = singular_points(s)

    caveats = [ONE_DIRECTIONAL, DEGREE_BOUNDED]
    if report.branches:
        caveats.append(GENERIC_STRATUM)
    if report.completeness != COMPLETE_UP_TO_BOUND:
        caveats.append(PARTIAL_SEARCH)
    if locus.discarded_nonrational:
        caveats.append(DISCARDED_SINGULAR)
    if not locus:
        caveats.append(NO_SINGULAR_POINTS)

    witness: Optional[SingularPoint] = None
    for point in locus:
        mapping = point.as_dict(s.variables)
        if all(
            not curve.poly.evaluate(mapping).is_zero()
            for curve in report.curves
        ):
            witness = point
            break

    if witness is not None:
        certifiable = (
            report.completeness == COMPLETE_UP_TO_BOUND
            and not locus.discarded_nonrational
        )
        verdict = STRONGLY_MINIMAL_CERTIFIED if certifiable else INCONCLUSIVE
        return MinimalityReport(verdict, witness, report, tuple(caveats))

    # no witness: every rational singular point lies on a reported curve
    if locus.discarded_nonrational:
        # unexamined singular points could still be off every curve
        return MinimalityReport(INCONCLUSIVE, None, report, tuple(caveats))
    return MinimalityReport(CRITERION_FAILS, None, report, tuple(caveats))
