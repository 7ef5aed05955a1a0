"""
adawin GF(2) Module

Sparse binary linear algebra:
- SparseBitMatrix with row/column adjacency storage
- Bit vectors as uint8 numpy arrays
- Gaussian elimination with column priority, rank, solve, kernel bases
"""

from adawin.gf2.matrix import BitVector, SparseBitMatrix, bitvector, support
from adawin.gf2.linalg import (
    EliminationResult,
    elimination,
    nullspace,
    rank,
    row_basis_extension,
    solve,
)

__all__ = [
    # Types
    "BitVector",
    "SparseBitMatrix",
    "EliminationResult",
    # Constructors
    "bitvector",
    "support",
    # Linear algebra
    "elimination",
    "rank",
    "solve",
    "nullspace",
    "row_basis_extension",
]
