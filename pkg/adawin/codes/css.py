"""
CSS code constructions: toric, bivariate bicycle, repetition.

All constructions return an immutable ``CssCode`` whose commutation
(Hx·Hzᵀ = 0) is checked on creation and whose k is computed from ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from adawin.codes.polynomials import Term, as_terms, format_polynomial
from adawin.gf2 import (
    BitVector,
    SparseBitMatrix,
    bitvector,
    nullspace,
    rank,
    row_basis_extension,
)


@dataclass(frozen=True, eq=False)
class CssCode:
    """
    A CSS stabilizer code.

    Attributes:
        name: Human-readable label, e.g. ``toric-d7``.
        hx: X-type check matrix.
        hz: Z-type check matrix.
        logical_x: Supports of the logical X operators.
        logical_z: Supports of the logical Z operators.
        d: Declared code distance (not verified).
        x_check_coords: Lattice coordinates of the X checks, shape (mx, 2).
        z_check_coords: Lattice coordinates of the Z checks, shape (mz, 2).
        periods: Lattice periods for wraparound distances, or None.
    """

    name: str
    hx: SparseBitMatrix
    hz: SparseBitMatrix
    logical_x: Tuple[BitVector, ...]
    logical_z: Tuple[BitVector, ...]
    d: int
    x_check_coords: Optional[npt.NDArray[np.int64]] = None
    z_check_coords: Optional[npt.NDArray[np.int64]] = None
    periods: Optional[Tuple[int, int]] = None
    k: int = field(init=False)

    def __post_init__(self) -> None:
        if self.hx.n_cols != self.hz.n_cols:
            raise ValueError(
                f"Hx and Hz must act on the same qubits ({self.hx.n_cols} vs {self.hz.n_cols})"
            )
        if not self.hx.matmul(self.hz.transpose()).is_zero():
            raise ValueError(f"{self.name}: X and Z checks do not commute")
        object.__setattr__(self, 'k', self.n - rank(self.hx) - rank(self.hz))

    @property
    def n(self) -> int:
        """Number of data qubits."""
        return self.hx.n_cols

    def checks(self, basis: str) -> SparseBitMatrix:
        """Checks that detect errors in a ``basis`` memory experiment."""
        return self.hx if _basis(basis) == 'X' else self.hz

    def logicals(self, basis: str) -> Tuple[BitVector, ...]:
        """Logical operators measured at the end of a ``basis`` memory experiment."""
        return self.logical_x if _basis(basis) == 'X' else self.logical_z

    def check_coords(self, basis: str) -> Optional[npt.NDArray[np.int64]]:
        return self.x_check_coords if _basis(basis) == 'X' else self.z_check_coords

    def __repr__(self) -> str:
        return f"CssCode({self.name!r}, n={self.n}, k={self.k}, d={self.d})"


def _basis(basis: str) -> str:
    b = basis.upper()
    if b not in ('X', 'Z'):
        raise ValueError(f"Basis must be 'X' or 'Z', got {basis!r}")
    return b


def _logical_basis(
    commute_with: SparseBitMatrix, stabilizers: SparseBitMatrix
) -> Tuple[BitVector, ...]:
    """Kernel of ``commute_with`` modulo the row space of ``stabilizers``."""
    base = [bitvector(stabilizers.n_cols, row) for row in stabilizers.rows]
    return tuple(row_basis_extension(base, nullspace(commute_with)))


def build_toric(d: int) -> CssCode:
    """
    Build the distance-d toric code on a d x d torus.

    Qubits sit on edges: horizontal edge (i, j) has index ``i*d + j`` and
    vertical edge (i, j) has index ``d*d + i*d + j``. Vertex checks form
    Hx and plaquette checks form Hz.

    Args:
        d: Lattice size and distance, d >= 3.

    Returns:
        CssCode with n = 2d² and k = 2.

    Raises:
        ValueError: If d < 3.

    Examples:
        >>> build_toric(3).n
        18
    """
    if d < 3:
        raise ValueError(f"Toric code distance must be >= 3, got {d}")

    def h(i: int, j: int) -> int:
        return (i % d) * d + (j % d)

    def v(i: int, j: int) -> int:
        return d * d + (i % d) * d + (j % d)

    vertices = []
    plaquettes = []
    coords = []
    for i in range(d):
        for j in range(d):
            vertices.append((h(i, j), h(i, j - 1), v(i, j), v(i - 1, j)))
            plaquettes.append((h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)))
            coords.append((i, j))

    n = 2 * d * d
    hx = SparseBitMatrix.from_rows(n, vertices)
    hz = SparseBitMatrix.from_rows(n, plaquettes)

    # Non-contractible cycles: Z on a row of horizontal edges / a column of
    # vertical edges; X on the dual cycles. logical_x[i] pairs with logical_z[i].
    logical_z = (
        bitvector(n, (h(0, j) for j in range(d))),
        bitvector(n, (v(i, 0) for i in range(d))),
    )
    logical_x = (
        bitvector(n, (h(i, 0) for i in range(d))),
        bitvector(n, (v(0, j) for j in range(d))),
    )
    grid = np.array(coords, dtype=np.int64)
    return CssCode(
        name=f"toric-d{d}",
        hx=hx,
        hz=hz,
        logical_x=logical_x,
        logical_z=logical_z,
        d=d,
        x_check_coords=grid,
        z_check_coords=grid.copy(),
        periods=(d, d),
    )


def _group_algebra_matrix(l: int, m: int, terms: Sequence[Term]) -> SparseBitMatrix:
    """Matrix of a polynomial in Z_l x Z_m acting by translation; duplicates cancel."""
    parity: Dict[Tuple[int, int], int] = {}
    for a in range(l):
        for b in range(m):
            row = a * m + b
            for xe, ye in terms:
                col = ((a + xe) % l) * m + (b + ye) % m
                parity[(row, col)] = parity.get((row, col), 0) ^ 1
    return SparseBitMatrix(l * m, l * m, (rc for rc, bit in parity.items() if bit))


def build_bb(
    l: int,
    m: int,
    a_terms: Union[str, Sequence[Sequence[int]]],
    b_terms: Union[str, Sequence[Sequence[int]]],
    d: int = 0,
) -> CssCode:
    """
    Build a bivariate bicycle code Hx = [A|B], Hz = [Bᵀ|Aᵀ].

    Args:
        l: Order of the x generator (l >= 2).
        m: Order of the y generator (m >= 2).
        a_terms: Polynomial A as (x_exp, y_exp) pairs or a string.
        b_terms: Polynomial B as (x_exp, y_exp) pairs or a string.
        d: Declared distance (recorded, not verified).

    Returns:
        CssCode with n = 2lm and k computed from ranks.

    Raises:
        ValueError: If l or m < 2 or a polynomial is empty.

    Examples:
        >>> code = build_bb(6, 6, "x^3 + y + y^2", "y^3 + x + x^2", d=6)
        >>> (code.n, code.k)
        (72, 12)
    """
    if l < 2 or m < 2:
        raise ValueError(f"BB code needs l, m >= 2, got l={l}, m={m}")
    a = [(xe % l, ye % m) for xe, ye in as_terms(a_terms)]
    b = [(xe % l, ye % m) for xe, ye in as_terms(b_terms)]
    if not a or not b:
        raise ValueError("BB polynomials A and B must each have at least one term")

    mat_a = _group_algebra_matrix(l, m, a)
    mat_b = _group_algebra_matrix(l, m, b)
    hx = SparseBitMatrix.hstack([mat_a, mat_b])
    hz = SparseBitMatrix.hstack([mat_b.transpose(), mat_a.transpose()])

    coords = np.array([(i, j) for i in range(l) for j in range(m)], dtype=np.int64)
    return CssCode(
        name=f"bb-{l}x{m}[{format_polynomial(a)} | {format_polynomial(b)}]",
        hx=hx,
        hz=hz,
        logical_x=_logical_basis(hz, hx),
        logical_z=_logical_basis(hx, hz),
        d=d,
        x_check_coords=coords,
        z_check_coords=coords.copy(),
        periods=(l, m),
    )


def build_bb_from_strings(l: int, m: int, a: str, b: str, d: int = 0) -> CssCode:
    """
    Build a BB code from polynomial strings as written in configs.

    Examples:
        >>> build_bb_from_strings(2, 2, "1 + x", "1 + y").n
        8
    """
    return build_bb(l, m, a, b, d=d)


def build_repetition(d: int) -> CssCode:
    """
    Build the d-bit bit-flip repetition code (Z-chain checks, no X checks).

    Only Z-basis memory experiments are meaningful for this code.

    Raises:
        ValueError: If d < 2.
    """
    if d < 2:
        raise ValueError(f"Repetition code needs d >= 2, got {d}")
    hz = SparseBitMatrix.from_rows(d, [(i, i + 1) for i in range(d - 1)])
    hx = SparseBitMatrix(0, d)
    return CssCode(
        name=f"repetition-d{d}",
        hx=hx,
        hz=hz,
        logical_x=(bitvector(d, range(d)),),
        logical_z=(bitvector(d, [0]),),
        d=d,
        x_check_coords=np.zeros((0, 2), dtype=np.int64),
        z_check_coords=np.array([(0, i) for i in range(d - 1)], dtype=np.int64),
        periods=None,
    )


# Named BB instances: (l, m, A, B, d).
BB_CATALOG: Dict[str, Tuple[int, int, str, str, int]] = {
    '72_12_6': (6, 6, 'x^3 + y + y^2', 'y^3 + x + x^2', 6),
    '90_8_10': (15, 3, 'x^9 + y + y^2', '1 + x^2 + x^7', 10),
    '144_12_12': (12, 6, 'x^3 + y + y^2', 'y^3 + x + x^2', 12),
}


def build_bb_named(name: str) -> CssCode:
    """Build a catalogued BB code such as ``72_12_6``."""
    try:
        l, m, a, b, d = BB_CATALOG[name]
    except KeyError:
        raise ValueError(
            f"Unknown BB code {name!r}; known: {', '.join(sorted(BB_CATALOG))}"
        ) from None
    return build_bb(l, m, a, b, d=d)


def logical_supports(code: CssCode, basis: str) -> List[Tuple[int, ...]]:
    """Qubit supports of the logicals tracked in a ``basis`` memory experiment."""
    return [tuple(int(q) for q in np.flatnonzero(op)) for op in code.logicals(basis)]
