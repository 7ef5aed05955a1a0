"""
Exhaustive minimum-weight decoding for tiny DEMs.

Meet-in-the-middle over integer bitmask syndromes: the faults are split in
two halves, every subset of each half is enumerated once, and the halves are
joined on the syndrome they must complete. Used only to validate BP+LSD and
the window engine on fragments with at most ``MAX_ORACLE_FAULTS`` faults.
"""

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from adawin.codes.dem import DetectorModel
from adawin.errors import DecodingError, DimensionError
from adawin.gf2 import BitVector

MAX_ORACLE_FAULTS = 24

# Relative tolerance when comparing LLR weights for ties.
_REL_TOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    """
    Minimum-weight solution of H·e = s.

    Attributes:
        correction: One minimum-weight solution (lowest bitmask among ties).
        weight: Its LLR weight.
        ties: Number of distinct minimum-weight solutions.
        observable_actions: Observable bitmasks reached by the tied solutions.
    """

    correction: BitVector
    weight: float
    ties: int
    observable_actions: FrozenSet[int]

    @property
    def ambiguous(self) -> bool:
        """True when tied minimum-weight solutions act differently on observables."""
        return len(self.observable_actions) > 1


def _subset_tables(
    det_masks: List[int], obs_masks: List[int], weights: List[float]
) -> Tuple[List[int], List[int], List[float]]:
    """Syndrome, observable mask and weight of every subset of the given faults."""
    size = 1 << len(det_masks)
    syn = [0] * size
    obs = [0] * size
    wt = [0.0] * size
    for subset in range(1, size):
        low = subset & -subset
        i = low.bit_length() - 1
        rest = subset ^ low
        syn[subset] = syn[rest] ^ det_masks[i]
        obs[subset] = obs[rest] ^ obs_masks[i]
        wt[subset] = wt[rest] + weights[i]
    return syn, obs, wt


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=_REL_TOL, abs_tol=1e-12)


def oracle_decode(dem: DetectorModel, syndrome: npt.ArrayLike) -> OracleResult:
    """
    Minimum-LLR-weight correction by exhaustive enumeration.

    Args:
        dem: Decoding problem with at most 24 faults.
        syndrome: Detector outcomes, length |D|.

    Returns:
        OracleResult with one minimum-weight correction and tie bookkeeping.

    Raises:
        ValueError: If the DEM has more than 24 faults.
        DimensionError: If the syndrome length does not match the DEM.
        DecodingError: If no fault pattern produces the syndrome.

    Examples:
        >>> from adawin.codes import build_repetition, build_code_capacity_dem
        >>> dem = build_code_capacity_dem(build_repetition(3), 'Z', 0.1)
        >>> oracle_decode(dem, [1, 0]).correction
        array([1, 0, 0], dtype=uint8)
    """
    n = dem.n_faults
    if n > MAX_ORACLE_FAULTS:
        raise ValueError(
            f"Exhaustive oracle supports |F| <= {MAX_ORACLE_FAULTS}, DEM has |F| = {n}"
        )
    s = np.asarray(syndrome, dtype=np.uint8)
    if s.shape != (dem.n_detectors,):
        raise DimensionError(
            f"Syndrome of length {s.size} for a DEM with {dem.n_detectors} detectors"
        )
    target = sum(1 << int(d) for d in np.flatnonzero(s))
    det_masks = dem.h.column_masks()
    obs_masks = dem.observables.column_masks()
    weights = [float(w) for w in dem.weights]

    half = n // 2
    syn_a, obs_a, wt_a = _subset_tables(det_masks[:half], obs_masks[:half], weights[:half])
    syn_b, obs_b, wt_b = _subset_tables(det_masks[half:], obs_masks[half:], weights[half:])

    # syndrome -> (best weight, tie count, first best subset, observable masks at best)
    best_b: Dict[int, Tuple[float, int, int, set]] = {}
    for subset, (sy, w) in enumerate(zip(syn_b, wt_b)):
        entry = best_b.get(sy)
        if entry is None or (w < entry[0] and not _close(w, entry[0])):
            best_b[sy] = (w, 1, subset, {obs_b[subset]})
        elif _close(w, entry[0]):
            entry[3].add(obs_b[subset])
            best_b[sy] = (entry[0], entry[1] + 1, entry[2], entry[3])

    best_weight: Optional[float] = None
    best_pair = (0, 0)
    ties = 0
    actions: set = set()
    for subset_a, (sy, w) in enumerate(zip(syn_a, wt_a)):
        entry = best_b.get(sy ^ target)
        if entry is None:
            continue
        total = w + entry[0]
        if best_weight is None or (total < best_weight and not _close(total, best_weight)):
            best_weight = total
            best_pair = (subset_a, entry[2])
            ties = entry[1]
            actions = {obs_a[subset_a] ^ o for o in entry[3]}
        elif _close(total, best_weight):
            ties += entry[1]
            actions |= {obs_a[subset_a] ^ o for o in entry[3]}

    if best_weight is None:
        raise DecodingError("Syndrome is not produced by any fault pattern of this DEM")

    correction = np.zeros(n, dtype=np.uint8)
    subset_a, subset_b = best_pair
    for i in range(half):
        if subset_a >> i & 1:
            correction[i] = 1
    for i in range(n - half):
        if subset_b >> i & 1:
            correction[half + i] = 1
    return OracleResult(
        correction=correction,
        weight=best_weight,
        ties=ties,
        observable_actions=frozenset(actions),
    )
