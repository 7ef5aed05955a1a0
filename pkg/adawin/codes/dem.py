"""
Detector error models (DEMs) for memory experiments.

A DEM is the decoding problem: check matrix H (detectors x faults), fault
priors with their LLR weights, the observable matrix, and the round of each
detector. Models are built in the phenomenological setting: data flips
between rounds and measurement flips on the syndrome readout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from adawin.codes.css import CssCode
from adawin.codes.noise import NoiseModelSpec, effective_rates
from adawin.errors import DimensionError
from adawin.gf2 import BitVector, SparseBitMatrix

# Priors of exactly 0 get this floor when turned into weights.
_MIN_PRIOR = 1e-15


def llr_weights(priors: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    Fault weights w = log((1 - p) / p).

    Priors of 0 are floored so the weight stays finite.

    Examples:
        >>> round(float(llr_weights([0.01])[0]), 3)
        4.595
    """
    p = np.clip(np.asarray(priors, dtype=np.float64), _MIN_PRIOR, 1.0 - _MIN_PRIOR)
    return np.log((1.0 - p) / p)


@dataclass(frozen=True, eq=False)
class DetectorModel:
    """
    Detector error model of one decoding problem.

    Attributes:
        h: Check matrix, |D| detectors x |F| faults.
        priors: Per-fault probabilities in [0, 0.5].
        observables: Observable matrix, |L| x |F|.
        round_of_detector: Round index of every detector.
        rounds: Number of rounds; detector rounds lie in [0, rounds).
        coords: Optional lattice coordinates per detector, shape (|D|, 2).
        periods: Lattice periods for wraparound distances, or None.
        weights: LLR weight per fault (derived from priors).
    """

    h: SparseBitMatrix
    priors: npt.NDArray[np.float64]
    observables: SparseBitMatrix
    round_of_detector: npt.NDArray[np.int64]
    rounds: int
    coords: Optional[npt.NDArray[np.int64]] = None
    periods: Optional[Tuple[int, int]] = None
    weights: npt.NDArray[np.float64] = field(init=False)

    def __post_init__(self) -> None:
        priors = np.asarray(self.priors, dtype=np.float64)
        rounds_of = np.asarray(self.round_of_detector, dtype=np.int64)
        object.__setattr__(self, 'priors', priors)
        object.__setattr__(self, 'round_of_detector', rounds_of)

        if priors.shape != (self.h.n_cols,):
            raise DimensionError(
                f"{priors.size} priors for {self.h.n_cols} fault columns"
            )
        if self.observables.n_cols != self.h.n_cols:
            raise DimensionError(
                f"Observable matrix has {self.observables.n_cols} columns, "
                f"expected {self.h.n_cols}"
            )
        if rounds_of.shape != (self.h.n_rows,):
            raise DimensionError(
                f"round_of_detector has {rounds_of.size} entries for {self.h.n_rows} detectors"
            )
        if np.any((priors < 0) | (priors > 0.5)):
            raise ValueError("Fault priors must lie in [0, 0.5]")
        if rounds_of.size and (rounds_of.min() < 0 or rounds_of.max() >= self.rounds):
            raise ValueError(f"Detector rounds must lie in [0, {self.rounds})")
        empty = [f for f, col in enumerate(self.h.cols) if not col]
        if empty:
            raise ValueError(f"Fault columns {empty[:5]} flip no detector")
        if self.coords is not None and len(self.coords) != self.h.n_rows:
            raise DimensionError("coords must have one row per detector")
        object.__setattr__(self, 'weights', llr_weights(priors))

    @property
    def n_detectors(self) -> int:
        return self.h.n_rows

    @property
    def n_faults(self) -> int:
        return self.h.n_cols

    @property
    def n_observables(self) -> int:
        return self.observables.n_rows

    @property
    def total_weight(self) -> float:
        """Sum of all fault weights, the Q normaliser."""
        return float(self.weights.sum())

    @cached_property
    def fault_rounds(self) -> npt.NDArray[np.int64]:
        """Earliest detector round touched by each fault."""
        return np.array(
            [int(self.round_of_detector[list(col)].min()) for col in self.h.cols],
            dtype=np.int64,
        )

    def syndrome_of(self, faults: npt.ArrayLike) -> BitVector:
        """H·e for a fault vector e."""
        return self.h.matvec(faults)

    def observable_flips(self, faults: npt.ArrayLike) -> BitVector:
        """Observable matrix times a fault vector."""
        return self.observables.matvec(faults)

    def restrict_faults(self, indices: Sequence[int]) -> DetectorModel:
        """
        Keep only the given fault columns (detectors unchanged).

        Useful for carving small fragments for exhaustive checks.
        """
        idx = list(indices)
        all_rows = range(self.n_detectors)
        return DetectorModel(
            h=self.h.submatrix(all_rows, idx),
            priors=self.priors[idx],
            observables=self.observables.submatrix(range(self.n_observables), idx),
            round_of_detector=self.round_of_detector,
            rounds=self.rounds,
            coords=self.coords,
            periods=self.periods,
        )

    def with_priors(self, priors: npt.ArrayLike) -> DetectorModel:
        """Same structure, different fault priors."""
        return DetectorModel(
            h=self.h,
            priors=np.asarray(priors, dtype=np.float64),
            observables=self.observables,
            round_of_detector=self.round_of_detector,
            rounds=self.rounds,
            coords=self.coords,
            periods=self.periods,
        )

    def __repr__(self) -> str:
        return (
            f"DetectorModel(detectors={self.n_detectors}, faults={self.n_faults}, "
            f"observables={self.n_observables}, rounds={self.rounds})"
        )


def build_memory_dem(
    code: CssCode,
    basis: str,
    rounds: int,
    spec: NoiseModelSpec,
) -> DetectorModel:
    """
    Phenomenological DEM of a ``rounds``-round memory experiment.

    Detector (r, c) compares check c in round r with round r-1 (round 0
    compares with the known initial state); the last round is a noiseless
    readout. Faults, grouped by round:

    - space fault (r, q): data qubit q flips before round r, prior p_data;
      flips detectors (r, c) for the checks c containing q and the logicals
      whose support contains q.
    - time fault (r, c) for r < rounds-1: measurement of check c in round r
      is wrong, prior p_meas; flips detectors (r, c) and (r+1, c).

    Args:
        code: CSS code.
        basis: Memory basis, ``X`` (Hx checks, logical X) or ``Z``.
        rounds: Number of syndrome rounds, >= 2.
        spec: Noise model.

    Returns:
        DetectorModel with |D| = m·rounds detectors.

    Raises:
        ValueError: If rounds < 2, the basis has no checks, or a rate >= 0.5.
    """
    if rounds < 2:
        raise ValueError(f"Memory experiment needs rounds >= 2, got {rounds}")
    checks = code.checks(basis)
    m, n = checks.n_rows, checks.n_cols
    if m == 0:
        raise ValueError(f"{code.name} has no {basis.upper()}-basis checks")
    p_data, p_meas = effective_rates(spec)
    if p_data >= 0.5 or p_meas >= 0.5:
        raise ValueError(
            f"{spec.kind} at p={spec.p} gives rates ({p_data}, {p_meas}); both must be < 0.5"
        )

    logicals = code.logicals(basis)
    qubit_obs: List[List[int]] = [[] for _ in range(n)]
    for l, op in enumerate(logicals):
        for q in np.flatnonzero(op):
            qubit_obs[int(q)].append(l)

    det_cols: List[List[int]] = []
    obs_cols: List[List[int]] = []
    priors: List[float] = []
    for r in range(rounds):
        base = r * m
        for q in range(n):
            det_cols.append([base + c for c in checks.cols[q]])
            obs_cols.append(qubit_obs[q])
            priors.append(p_data)
        if r < rounds - 1:
            for c in range(m):
                det_cols.append([base + c, base + m + c])
                obs_cols.append([])
                priors.append(p_meas)

    coords = code.check_coords(basis)
    return DetectorModel(
        h=SparseBitMatrix.from_columns(m * rounds, det_cols),
        priors=np.array(priors),
        observables=SparseBitMatrix.from_columns(len(logicals), obs_cols),
        round_of_detector=np.repeat(np.arange(rounds), m),
        rounds=rounds,
        coords=None if coords is None else np.tile(coords, (rounds, 1)),
        periods=code.periods,
    )


def build_code_capacity_dem(code: CssCode, basis: str, p: float) -> DetectorModel:
    """
    Single-round DEM with perfect measurements: one fault per data qubit.

    Raises:
        ValueError: If the basis has no checks or a qubit is in no check.
    """
    checks = code.checks(basis)
    if checks.n_rows == 0:
        raise ValueError(f"{code.name} has no {basis.upper()}-basis checks")
    logicals = code.logicals(basis)
    obs_cols = [
        [l for l, op in enumerate(logicals) if op[q]] for q in range(code.n)
    ]
    coords = code.check_coords(basis)
    return DetectorModel(
        h=checks,
        priors=np.full(code.n, p),
        observables=SparseBitMatrix.from_columns(len(logicals), obs_cols),
        round_of_detector=np.zeros(checks.n_rows, dtype=np.int64),
        rounds=1,
        coords=coords,
        periods=code.periods,
    )


def sample_faults(dem: DetectorModel, rng: np.random.Generator) -> BitVector:
    """Draw a fault vector, each fault firing independently with its prior."""
    return (rng.random(dem.n_faults) < dem.priors).astype(np.uint8)


def sample_shot(dem: DetectorModel, seed: int) -> Tuple[BitVector, BitVector]:
    """
    Sample one shot: syndrome and true observable flips.

    Deterministic for a fixed seed.

    Args:
        dem: Detector error model.
        seed: Seed for ``numpy.random.default_rng``.

    Returns:
        Tuple of (syndrome, observable_flips).
    """
    faults = sample_faults(dem, np.random.default_rng(seed))
    return dem.syndrome_of(faults), dem.observable_flips(faults)
