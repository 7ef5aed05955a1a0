"""
SparseBitMatrix - sparse binary matrix over GF(2).

Entries are kept as row and column adjacency lists so both row iteration and
column iteration cost O(nnz) of that line. Arithmetic is delegated to a lazily
built ``scipy.sparse`` CSR copy and reduced mod 2.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from adawin.errors import DimensionError

# Bit vectors are plain uint8 numpy arrays holding 0/1.
BitVector = npt.NDArray[np.uint8]


def bitvector(length: int, indices: Iterable[int] = ()) -> BitVector:
    """
    Build a bit vector with the given bits set.

    Args:
        length: Vector length.
        indices: Positions of the 1 bits.

    Returns:
        uint8 numpy array of 0/1 values.

    Raises:
        IndexError: If an index is outside ``[0, length)``.

    Examples:
        >>> bitvector(4, [0, 2])
        array([1, 0, 1, 0], dtype=uint8)
    """
    vec = np.zeros(length, dtype=np.uint8)
    idx = np.fromiter(indices, dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= length:
            raise IndexError(f"Bit index out of range for length {length}")
        vec[idx] = 1
    return vec


def support(vec: BitVector) -> Tuple[int, ...]:
    """Indices of the set bits of ``vec``."""
    return tuple(int(i) for i in np.flatnonzero(vec))


class SparseBitMatrix:
    """
    Immutable sparse matrix over GF(2).

    Attributes:
        n_rows: Number of rows.
        n_cols: Number of columns.
        rows: Sorted column indices of the 1 entries, per row.
        cols: Sorted row indices of the 1 entries, per column.

    Examples:
        >>> m = SparseBitMatrix(2, 3, [(0, 0), (1, 2)])
        >>> m.rows
        ((0,), (2,))
        >>> m.transpose().shape
        (3, 2)
    """

    __slots__ = ('_n_rows', '_n_cols', '_rows', '_cols', '_csr')

    def __init__(
        self,
        n_rows: int,
        n_cols: int,
        entries: Iterable[Tuple[int, int]] = (),
    ):
        """
        Create a matrix from its 1-coordinates.

        Args:
            n_rows: Number of rows (>= 0).
            n_cols: Number of columns (>= 0).
            entries: (row, col) coordinates holding a 1.

        Raises:
            ValueError: If a coordinate is out of range or repeated.
        """
        if n_rows < 0 or n_cols < 0:
            raise ValueError(f"Matrix shape must be non-negative, got {n_rows}x{n_cols}")

        row_lists: List[List[int]] = [[] for _ in range(n_rows)]
        col_lists: List[List[int]] = [[] for _ in range(n_cols)]
        seen = set()
        for r, c in entries:
            r, c = int(r), int(c)
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise ValueError(f"Entry ({r}, {c}) outside {n_rows}x{n_cols} matrix")
            if (r, c) in seen:
                raise ValueError(f"Duplicate entry ({r}, {c})")
            seen.add((r, c))
            row_lists[r].append(c)
            col_lists[c].append(r)

        self._n_rows = n_rows
        self._n_cols = n_cols
        self._rows = tuple(tuple(sorted(r)) for r in row_lists)
        self._cols = tuple(tuple(sorted(c)) for c in col_lists)
        self._csr: Optional[sp.csr_matrix] = None

    # ------------------------------------------------------------------
    # Alternate constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_dense(cls, array: npt.ArrayLike) -> SparseBitMatrix:
        """Build from a dense 0/1 array (entries are reduced mod 2)."""
        arr = np.asarray(array, dtype=np.int64) & 1
        if arr.ndim != 2:
            raise DimensionError(f"Expected a 2-D array, got {arr.ndim}-D")
        r, c = np.nonzero(arr)
        return cls(arr.shape[0], arr.shape[1], zip(r.tolist(), c.tolist()))

    @classmethod
    def from_columns(
        cls, n_rows: int, columns: Sequence[Iterable[int]]
    ) -> SparseBitMatrix:
        """Build from per-column row-index lists."""
        return cls(
            n_rows,
            len(columns),
            ((r, c) for c, col in enumerate(columns) for r in col),
        )

    @classmethod
    def from_rows(cls, n_cols: int, rows: Sequence[Iterable[int]]) -> SparseBitMatrix:
        """Build from per-row column-index lists."""
        return cls(
            len(rows),
            n_cols,
            ((r, c) for r, row in enumerate(rows) for c in row),
        )

    @classmethod
    def identity(cls, n: int) -> SparseBitMatrix:
        """The n x n identity matrix."""
        return cls(n, n, ((i, i) for i in range(n)))

    @classmethod
    def hstack(cls, blocks: Sequence[SparseBitMatrix]) -> SparseBitMatrix:
        """Concatenate matrices with equal row counts side by side."""
        if not blocks:
            raise ValueError("hstack needs at least one block")
        n_rows = blocks[0].n_rows
        entries = []
        offset = 0
        for block in blocks:
            if block.n_rows != n_rows:
                raise DimensionError("hstack blocks must have equal row counts")
            entries.extend((r, c + offset) for r, c in block.entries())
            offset += block.n_cols
        return cls(n_rows, offset, entries)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        """Number of rows."""
        return self._n_rows

    @property
    def n_cols(self) -> int:
        """Number of columns."""
        return self._n_cols

    @property
    def shape(self) -> Tuple[int, int]:
        return (self._n_rows, self._n_cols)

    @property
    def rows(self) -> Tuple[Tuple[int, ...], ...]:
        return self._rows

    @property
    def cols(self) -> Tuple[Tuple[int, ...], ...]:
        return self._cols

    @property
    def nnz(self) -> int:
        """Number of 1 entries."""
        return sum(len(r) for r in self._rows)

    def entries(self) -> List[Tuple[int, int]]:
        """All (row, col) coordinates in row-major order."""
        return [(r, c) for r, row in enumerate(self._rows) for c in row]

    def column_masks(self) -> List[int]:
        """Each column as an integer bitmask over rows (bit r set iff M[r, c] = 1)."""
        return [sum(1 << r for r in col) for col in self._cols]

    # ------------------------------------------------------------------
    # Conversions and arithmetic
    # ------------------------------------------------------------------

    def transpose(self) -> SparseBitMatrix:
        return SparseBitMatrix(
            self._n_cols, self._n_rows, ((c, r) for r, c in self.entries())
        )

    @property
    def T(self) -> SparseBitMatrix:
        return self.transpose()

    def to_csr(self) -> sp.csr_matrix:
        """Integer CSR copy, built once and cached."""
        if self._csr is None:
            coords = self.entries()
            r = np.fromiter((rc[0] for rc in coords), dtype=np.int64, count=len(coords))
            c = np.fromiter((rc[1] for rc in coords), dtype=np.int64, count=len(coords))
            self._csr = sp.csr_matrix(
                (np.ones(len(coords), dtype=np.int32), (r, c)),
                shape=self.shape,
            )
        return self._csr

    def to_dense(self) -> npt.NDArray[np.uint8]:
        out = np.zeros(self.shape, dtype=np.uint8)
        for r, row in enumerate(self._rows):
            if row:
                out[r, list(row)] = 1
        return out

    def matvec(self, vec: npt.ArrayLike) -> BitVector:
        """
        Product M·v over GF(2).

        Raises:
            DimensionError: If ``len(vec) != n_cols``.
        """
        v = np.asarray(vec)
        if v.shape != (self._n_cols,):
            raise DimensionError(
                f"Vector of length {v.shape[0] if v.ndim else 0} does not match "
                f"{self._n_cols} columns"
            )
        prod = self.to_csr() @ v.astype(np.int32)
        return (np.asarray(prod) & 1).astype(np.uint8)

    def matmul(self, other: SparseBitMatrix) -> SparseBitMatrix:
        """Product M·N over GF(2)."""
        if self._n_cols != other.n_rows:
            raise DimensionError(f"Cannot multiply {self.shape} by {other.shape}")
        prod = (self.to_csr() @ other.to_csr()).tocoo()
        odd = (prod.data & 1).astype(bool)
        return SparseBitMatrix(
            self._n_rows,
            other.n_cols,
            zip(prod.row[odd].tolist(), prod.col[odd].tolist()),
        )

    def __matmul__(self, other: SparseBitMatrix) -> SparseBitMatrix:
        return self.matmul(other)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> SparseBitMatrix:
        """
        Restriction to the given rows and columns, re-indexed in the given order.

        Args:
            rows: Row indices to keep.
            cols: Column indices to keep.

        Returns:
            A ``len(rows) x len(cols)`` matrix.
        """
        row_pos = {r: i for i, r in enumerate(rows)}
        entries = []
        for j, c in enumerate(cols):
            for r in self._cols[c]:
                i = row_pos.get(r)
                if i is not None:
                    entries.append((i, j))
        return SparseBitMatrix(len(rows), len(cols), entries)

    def dense_submatrix(
        self, rows: Sequence[int], cols: Sequence[int]
    ) -> npt.NDArray[np.uint8]:
        """Dense uint8 copy of ``submatrix(rows, cols)``."""
        row_pos = {r: i for i, r in enumerate(rows)}
        out = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for j, c in enumerate(cols):
            for r in self._cols[c]:
                i = row_pos.get(r)
                if i is not None:
                    out[i, j] = 1
        return out

    def is_zero(self) -> bool:
        return self.nnz == 0

    # ------------------------------------------------------------------
    # Dunder methods
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SparseBitMatrix):
            return self.shape == other.shape and self._rows == other._rows
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        return f"SparseBitMatrix({self._n_rows}, {self._n_cols}, nnz={self.nnz})"
