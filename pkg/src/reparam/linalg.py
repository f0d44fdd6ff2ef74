"""Exact linear algebra on matrices of rational functions.

Plain Gaussian elimination with exact zero tests; pivot choice prefers the
structurally simplest nonzero entry to keep intermediate fractions small.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .errors import SingularSubstitution
from .domains import RatFunc

__all__ = ["mat_rank", "mat_det", "mat_inverse", "mat_solve", "rref_last_pivot"]


def _complexity(v: RatFunc):
    return (len(v.num.terms) + len(v.den.terms),
            v.num.total_degree() + v.den.total_degree())


def _clone(M):
    return [list(row) for row in M]


def mat_rank(M: Sequence[Sequence[RatFunc]]) -> int:
    if not M:
        return 0
    A = _clone(M)
    rows, cols = len(A), len(A[0])
    rank = 0
    used = [False] * rows
    for c in range(cols):
        pick = None
        for r in range(rows):
            if not used[r] and A[r][c]:
                if pick is None or _complexity(A[r][c]) < _complexity(A[pick][c]):
                    pick = r
        if pick is None:
            continue
        used[pick] = True
        rank += 1
        pr = A[pick]
        for r in range(rows):
            if r != pick and not used[r] and A[r][c]:
                factor = A[r][c] / pr[c]
                for j in range(cols):
                    if pr[j]:
                        A[r][j] = A[r][j] - factor * pr[j]
    return rank


def mat_det(M: Sequence[Sequence[RatFunc]]) -> RatFunc:
    A = _clone(M)
    n = len(A)
    if n == 0:
        raise ValueError("empty matrix")
    if any(len(row) != n for row in A):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    det = None
    for c in range(n):
        pick = None
        for r in range(c, n):
            if A[r][c]:
                if pick is None or _complexity(A[r][c]) < _complexity(A[pick][c]):
                    pick = r
        if pick is None:
            return A[0][0] * 0
        if pick != c:
            A[c], A[pick] = A[pick], A[c]
            sign = -sign
        piv = A[c][c]
        det = piv if det is None else det * piv
        for r in range(c + 1, n):
            if A[r][c]:
                factor = A[r][c] / piv
                for j in range(c, n):
                    if A[c][j]:
                        A[r][j] = A[r][j] - factor * A[c][j]
    return det * sign if sign < 0 else det


def mat_solve(M, b):
    """Solve M x = b for square exact M; raises SingularSubstitution."""
    n = len(M)
    A = [list(M[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        pick = None
        for r in range(c, n):
            if A[r][c]:
                if pick is None or _complexity(A[r][c]) < _complexity(A[pick][c]):
                    pick = r
        if pick is None:
            raise SingularSubstitution("singular matrix in solve")
        if pick != c:
            A[c], A[pick] = A[pick], A[c]
        piv = A[c][c]
        for r in range(n):
            if r != c and A[r][c]:
                factor = A[r][c] / piv
                for j in range(c, n + 1):
                    if A[c][j]:
                        A[r][j] = A[r][j] - factor * A[c][j]
    return [A[i][n] / A[i][i] for i in range(n)]


def mat_inverse(M):
    n = len(M)
    cols = []
    for k in range(n):
        e = [M[0][0] * 0 for _ in range(n)]
        one = None
        # build a one in the field of the entries
        for row in M:
            for v in row:
                if v:
                    one = v / v
                    break
            if one is not None:
                break
        if one is None:
            raise SingularSubstitution("zero matrix")
        e[k] = one
        cols.append(mat_solve(M, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def rref_last_pivot(rows, prefer: Optional[Callable] = None):
    """Reduced row echelon form with explicit pivot preference.

    `rows` are coefficient lists over a field (length n+1 with the constant
    in the last slot, or plain length-n homogeneous rows).  `prefer(col,
    coeff)` returns a sort key; the lowest key among nonzero entries of a row
    picks that row's pivot column.  Returns (pivots, rref_rows).
    """
    A = _clone(rows)
    pivots = []
    for i, row in enumerate(A):
        # reduce by earlier pivot rows
        for (pc, pr) in pivots:
            if A[i][pc]:
                factor = A[i][pc] / A[pr][pc]
                A[i] = [a - factor * b for a, b in zip(A[i], A[pr])]
        cand = [c for c, v in enumerate(A[i]) if v]
        if not cand:
            continue
        if prefer is not None:
            cand.sort(key=lambda c: prefer(c, A[i][c]))
        pc = cand[0]
        pivots.append((pc, i))
    # back-substitute
    for (pc, pr) in pivots:
        piv = A[pr][pc]
        A[pr] = [v / piv for v in A[pr]]
        for i in range(len(A)):
            if i != pr and A[i][pc]:
                factor = A[i][pc]
                A[i] = [a - factor * b for a, b in zip(A[i], A[pr])]
    return pivots, A
