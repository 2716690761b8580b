"""Dense Gaussian elimination over a small finite field.

Matrices are lists of rows, entries are field elements in the integer
encoding used by :class:`primavoid.ff_core.BaseField`.  Every function takes
the field as its first argument and never mutates its inputs.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

Matrix = List[List[int]]


def _copy(M: Sequence[Sequence[int]]) -> Matrix:
    return [list(row) for row in M]


def rref(F, M: Sequence[Sequence[int]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    A = _copy(M)
    if not A:
        return A, []
    n_rows, n_cols = len(A), len(A[0])
    pivots: List[int] = []
    row = 0
    for col in range(n_cols):
        pivot = next((i for i in range(row, n_rows) if A[i][col]), None)
        if pivot is None:
            continue
        A[row], A[pivot] = A[pivot], A[row]
        inv = F.inv(A[row][col])
        A[row] = [F.mul(inv, x) for x in A[row]]
        for i in range(n_rows):
            if i != row and A[i][col]:
                f = A[i][col]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
        if row == n_rows:
            break
    return A, pivots


def rank(F, M: Sequence[Sequence[int]]) -> int:
    return len(rref(F, M)[1])


def kernel(F, M: Sequence[Sequence[int]], n_cols: Optional[int] = None) -> Matrix:
    """Basis of the right null space {x : M x = 0}, one vector per free column."""
    if not M:
        if n_cols is None:
            raise ValueError("n_cols required for an empty matrix")
        return [[1 if i == j else 0 for i in range(n_cols)] for j in range(n_cols)]
    n_cols = len(M[0])
    R, pivots = rref(F, M)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n_cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(R[i][fc])
        basis.append(v)
    return basis


def solve(F, M: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[List[int]]:
    """One solution of M x = b, or None when the system is inconsistent."""
    n_cols = len(M[0])
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, pivots = rref(F, aug)
    if n_cols in pivots:
        return None
    x = [0] * n_cols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][n_cols]
    return x


def inverse(F, M: Sequence[Sequence[int]]) -> Optional[Matrix]:
    """Inverse of a square matrix, or None when it is singular."""
    n = len(M)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in R]


def mat_vec(F, M: Sequence[Sequence[int]], v: Sequence[int]) -> List[int]:
    out = []
    for row in M:
        acc = 0
        for x, y in zip(row, v):
            if x and y:
                acc = F.add(acc, F.mul(x, y))
        out.append(acc)
    return out


def transpose(M: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*M)]
