"""Gaussian elimination over the parameter field.

Pivot choice matters when entries contain parameters: dividing by b - d
silently assumes b != d. Callers pass a classifier that ranks candidate
pivots (rational constants first, then quantities already assumed nonzero)
and receive every pivot that required a genericity assumption.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Sequence, Tuple

from .algebra import Scalar

Matrix = List[List[Scalar]]


def _default_classify(pivot: Scalar) -> int:
    return 0 if pivot.is_rational() else 2


def nullspace(
    rows: Sequence[Sequence[Scalar]],
    ncols: int,
    classify: Optional[Callable[[Scalar], int]] = None,
) -> Tuple[List[List[Scalar]], List[Scalar]]:
    """Basis of the right nullspace, plus the pivots whose nonvanishing was
    assumed (classifier rank 2). Echelon order follows column order, so the
    basis is canonical for a fixed row/column layout."""
    classify = classify or _default_classify
    work = [list(row) for row in rows]
    assumed: List[Scalar] = []
    pivot_of_col: List[Optional[int]] = [None] * ncols
    row_at = 0
    for col in range(ncols):
        best = None
        best_rank = None
        for r in range(row_at, len(work)):
            entry = work[r][col]
            if entry.is_zero():
                continue
            rank = classify(entry)
            if best_rank is None or rank < best_rank:
                best, best_rank = r, rank
                if rank == 0:
                    break
        if best is None:
            continue
        work[row_at], work[best] = work[best], work[row_at]
        pivot = work[row_at][col]
        if best_rank == 2:
            assumed.append(pivot)
        inv = Scalar.one() / pivot
        work[row_at] = [e * inv for e in work[row_at]]
        for r in range(len(work)):
            if r == row_at:
                continue
            factor = work[r][col]
            if factor.is_zero():
                continue
            work[r] = [
                e - factor * p for e, p in zip(work[r], work[row_at])
            ]
        pivot_of_col[col] = row_at
        row_at += 1
        if row_at == len(work):
            break
    basis: List[List[Scalar]] = []
    free_cols = [c for c in range(ncols) if pivot_of_col[c] is None]
    for free in free_cols:
        vec = [Scalar.zero()] * ncols
        vec[free] = Scalar.one()
        for col in range(ncols):
            r = pivot_of_col[col]
            if r is not None:
                vec[col] = -work[r][free]
        basis.append(vec)
    return basis, assumed


def determinant(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant by fraction-free-ish elimination over the field."""
    n = len(rows)
    work = [list(row) for row in rows]
    det = Scalar.one()
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if not work[r][col].is_zero():
                pivot_row = r
                break
        if pivot_row is None:
            return Scalar.zero()
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            det = -det
        pivot = work[col][col]
        det = det * pivot
        inv = Scalar.one() / pivot
        for r in range(col + 1, n):
            factor = work[r][col] * inv
            if factor.is_zero():
                continue
            work[r] = [
                e - factor * p for e, p in zip(work[r], work[col])
            ]
    return det
