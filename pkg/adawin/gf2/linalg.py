"""
Gaussian elimination over GF(2).

The shared kernel behind rank computation, linear solving, kernel bases and
the per-cluster inversion of the LSD post-processor. Elimination works on a
dense uint8 copy of the (sub)matrix; callers only hand it code check matrices
or cluster-sized submatrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from adawin.errors import DimensionError
from adawin.gf2.matrix import BitVector, SparseBitMatrix

MatrixLike = Union[SparseBitMatrix, npt.NDArray[np.uint8]]


@dataclass(frozen=True)
class EliminationResult:
    """
    Outcome of Gaussian elimination with a column priority.

    Attributes:
        pivot_columns: Pivot columns in elimination order (original indices).
        transform: Row transform T (m x m) with T·M in reduced echelon form;
            row i of T·M has its leading 1 in ``pivot_columns[i]``.
        reduced: T·M restricted to the eliminated columns, in the order given
            by ``columns``.
        columns: The column order that was eliminated.
    """

    pivot_columns: Tuple[int, ...]
    transform: npt.NDArray[np.uint8]
    reduced: npt.NDArray[np.uint8]
    columns: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivot_columns)

    def back_substitute(self, syndrome: npt.ArrayLike, n_cols: int) -> Optional[BitVector]:
        """
        Solve M·e = s using the stored transform.

        Non-pivot columns are set to 0, so the solution lives on the pivot
        columns chosen by the column priority.

        Returns:
            The solution, or None when s is outside the column space.
        """
        s = np.asarray(syndrome, dtype=np.uint8)
        t = (self.transform.astype(np.int64) @ s.astype(np.int64)) & 1
        if np.any(t[self.rank:]):
            return None
        e = np.zeros(n_cols, dtype=np.uint8)
        if self.rank:
            e[list(self.pivot_columns)] = t[: self.rank].astype(np.uint8)
        return e


def _as_dense(m: MatrixLike) -> npt.NDArray[np.uint8]:
    if isinstance(m, SparseBitMatrix):
        return m.to_dense()
    arr = np.asarray(m, dtype=np.uint8) & 1
    if arr.ndim != 2:
        raise DimensionError(f"Expected a 2-D matrix, got {arr.ndim}-D")
    return arr.astype(np.uint8)


def elimination(
    m: MatrixLike,
    column_order: Optional[Sequence[int]] = None,
) -> EliminationResult:
    """
    Gaussian elimination honouring a column priority.

    Pivots are chosen greedily: each column in ``column_order`` becomes a
    pivot iff it is independent of the columns pivoted before it.

    Args:
        m: Matrix to eliminate (sparse or dense 0/1).
        column_order: Columns to eliminate, highest priority first. Defaults
            to the natural order of all columns.

    Returns:
        EliminationResult with pivots, row transform and reduced matrix.

    Raises:
        ValueError: If ``column_order`` repeats a column or is out of range.

    Examples:
        >>> elimination(SparseBitMatrix.identity(3)).pivot_columns
        (0, 1, 2)
    """
    a = _as_dense(m)
    n_rows, n_cols = a.shape
    order = tuple(range(n_cols)) if column_order is None else tuple(int(c) for c in column_order)
    if len(set(order)) != len(order):
        raise ValueError("column_order must not repeat columns")
    if order and (min(order) < 0 or max(order) >= n_cols):
        raise ValueError(f"column_order entries must lie in [0, {n_cols})")

    # [A[:, order] | I] so row operations are recorded in the right block.
    work = np.concatenate(
        [a[:, list(order)] if order else np.zeros((n_rows, 0), dtype=np.uint8),
         np.eye(n_rows, dtype=np.uint8)],
        axis=1,
    ).astype(bool)

    pivots: List[int] = []
    r = 0
    for j, col in enumerate(order):
        if r >= n_rows:
            break
        candidates = np.flatnonzero(work[r:, j])
        if candidates.size == 0:
            continue
        p = r + int(candidates[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        hits = np.flatnonzero(work[:, j])
        hits = hits[hits != r]
        if hits.size:
            work[hits] ^= work[r]
        pivots.append(col)
        r += 1

    k = len(order)
    return EliminationResult(
        pivot_columns=tuple(pivots),
        transform=work[:, k:].astype(np.uint8),
        reduced=work[:, :k].astype(np.uint8),
        columns=order,
    )


def rank(m: MatrixLike) -> int:
    """
    GF(2) rank of a matrix.

    Examples:
        >>> rank(SparseBitMatrix.identity(3))
        3
    """
    return elimination(m).rank


def solve(m: MatrixLike, s: npt.ArrayLike) -> Optional[BitVector]:
    """
    Find some e with M·e = s over GF(2).

    Any valid solution may be returned; callers that care about weight
    impose it through ``elimination``'s column order.

    Args:
        m: Matrix M (n_rows x n_cols).
        s: Right-hand side of length n_rows.

    Returns:
        A solution vector, or None when s is not in the column space of M.

    Raises:
        DimensionError: If ``len(s) != n_rows``.

    Examples:
        >>> solve(SparseBitMatrix.from_dense([[1, 1], [0, 1]]), [1, 1])
        array([0, 1], dtype=uint8)
    """
    a = _as_dense(m)
    vec = np.asarray(s, dtype=np.uint8)
    if vec.shape != (a.shape[0],):
        raise DimensionError(
            f"Syndrome length {vec.size} does not match {a.shape[0]} rows"
        )
    return elimination(a).back_substitute(vec, a.shape[1])


def nullspace(m: MatrixLike) -> List[BitVector]:
    """
    Basis of the GF(2) kernel {e : M·e = 0}.

    Returns:
        ``n_cols - rank`` independent vectors, one per free column.
    """
    a = _as_dense(m)
    n_cols = a.shape[1]
    result = elimination(a)
    pivot_set = set(result.pivot_columns)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vec = np.zeros(n_cols, dtype=np.uint8)
        vec[free] = 1
        # Natural order, so reduced[:, free] is column ``free`` of T·M.
        for i, piv in enumerate(result.pivot_columns):
            if result.reduced[i, free]:
                vec[piv] = 1
        basis.append(vec)
    return basis


def row_basis_extension(
    base: Sequence[npt.ArrayLike], candidates: Sequence[npt.ArrayLike]
) -> List[BitVector]:
    """
    Candidates that are independent of ``base`` and of each other.

    Walks the candidates in order and keeps each one that raises the rank of
    the accumulated row set.
    """
    kept: List[BitVector] = []
    rows = [np.asarray(b, dtype=np.uint8) for b in base]
    current = rank(np.array(rows)) if rows else 0
    for cand in candidates:
        vec = np.asarray(cand, dtype=np.uint8)
        trial = rank(np.array(rows + [vec]))
        if trial > current:
            rows.append(vec)
            kept.append(vec)
            current = trial
    return kept
