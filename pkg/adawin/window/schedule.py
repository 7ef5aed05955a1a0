"""
Window schedule and per-window sub-DEM extraction.

A window covers rounds [start, start+W) and commits [start, start+C); the
next window starts C rounds later. The final window is the first one that
reaches the last round and commits everything it covers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np
import numpy.typing as npt

from adawin.codes.dem import DetectorModel
from adawin.errors import DimensionError
from adawin.gf2 import BitVector

RoundRange = Tuple[int, int]


@dataclass(frozen=True)
class WindowConfig:
    """
    Sliding-window geometry.

    Attributes:
        window_rounds: Rounds per window, W.
        commit_rounds: Rounds committed per window, C (W > C >= 1).
        total_rounds: Rounds in the experiment (>= W).

    Examples:
        >>> WindowConfig(7, 1, 35).buffer_rounds
        6
    """

    window_rounds: int
    commit_rounds: int
    total_rounds: int

    def __post_init__(self) -> None:
        if self.commit_rounds < 1:
            raise ValueError(f"Commit size must be >= 1, got C={self.commit_rounds}")
        if self.window_rounds <= self.commit_rounds:
            raise ValueError(
                f"Window size must exceed commit size, got W={self.window_rounds}, "
                f"C={self.commit_rounds}"
            )
        if self.window_rounds > self.total_rounds:
            raise ValueError(
                f"Window size W={self.window_rounds} exceeds total rounds {self.total_rounds}"
            )

    @property
    def buffer_rounds(self) -> int:
        return self.window_rounds - self.commit_rounds


@dataclass(frozen=True)
class WindowSpan:
    """
    Position of one window in the schedule.

    Attributes:
        index: Window number.
        start: First round.
        stop: One past the last round.
        commit_stop: One past the last committed round.
    """

    index: int
    start: int
    stop: int
    commit_stop: int

    @property
    def round_range(self) -> RoundRange:
        return (self.start, self.stop)

    @property
    def commit_range(self) -> RoundRange:
        return (self.start, self.commit_stop)

    @property
    def size(self) -> int:
        return self.stop - self.start

    @property
    def is_final(self) -> bool:
        return self.commit_stop == self.stop

    def resized(self, size: int, total_rounds: int) -> WindowSpan:
        """Same start and commit range, ``size`` rounds clamped to the experiment."""
        return WindowSpan(
            self.index, self.start, min(self.start + size, total_rounds), self.commit_stop
        )


def schedule(cfg: WindowConfig) -> List[WindowSpan]:
    """
    Enumerate the windows of a sliding-window decode.

    Examples:
        >>> [w.start for w in schedule(WindowConfig(4, 2, 10))]
        [0, 2, 4, 6]
        >>> schedule(WindowConfig(4, 2, 10))[-1].commit_range
        (6, 10)
    """
    w, c, total = cfg.window_rounds, cfg.commit_rounds, cfg.total_rounds
    spans = []
    start = 0
    while True:
        if start + w >= total:
            spans.append(WindowSpan(len(spans), start, total, total))
            return spans
        spans.append(WindowSpan(len(spans), start, start + w, start + c))
        start += c


@dataclass(frozen=True, eq=False)
class SubDem:
    """
    A window's DEM plus its mapping back to global indices.

    Attributes:
        dem: The restricted model; its rounds are relative to ``start``.
        detectors: Global detector index of each local detector.
        faults: Global fault index of each local fault.
        start: First global round of the window.
    """

    dem: DetectorModel
    detectors: npt.NDArray[np.int64]
    faults: npt.NDArray[np.int64]
    start: int

    def commit_mask(self, commit_stop: int) -> BitVector:
        """Local faults whose earliest round falls before ``commit_stop``."""
        return (self.dem.fault_rounds + self.start < commit_stop).astype(np.uint8)


def _check_range(dem: DetectorModel, round_range: RoundRange) -> Tuple[int, int]:
    start, stop = (int(r) for r in round_range)
    if not 0 <= start < stop <= dem.rounds:
        raise ValueError(f"Round range [{start}, {stop}) outside [0, {dem.rounds})")
    return start, stop


def extract_window(dem: DetectorModel, round_range: RoundRange) -> SubDem:
    """
    Restrict ``dem`` to a round range, keeping the index maps.

    Detectors whose round lies in the range are kept. Faults are kept when
    their earliest detector lies in the range; faults that also reach past
    the upper boundary are truncated to their in-range detectors with the
    prior unchanged. Faults starting before the range belong to earlier
    commits and reach this window only as artificial defects.
    """
    start, stop = _check_range(dem, round_range)
    rod = dem.round_of_detector
    det_idx = np.flatnonzero((rod >= start) & (rod < stop))
    fault_rounds = dem.fault_rounds
    fault_idx = np.flatnonzero((fault_rounds >= start) & (fault_rounds < stop))
    sub = DetectorModel(
        h=dem.h.submatrix(det_idx.tolist(), fault_idx.tolist()),
        priors=dem.priors[fault_idx],
        observables=dem.observables.submatrix(range(dem.n_observables), fault_idx.tolist()),
        round_of_detector=rod[det_idx] - start,
        rounds=stop - start,
        coords=None if dem.coords is None else dem.coords[det_idx],
        periods=dem.periods,
    )
    return SubDem(dem=sub, detectors=det_idx, faults=fault_idx, start=start)


def extract_sub_dem(dem: DetectorModel, round_range: RoundRange) -> DetectorModel:
    """
    The DetectorModel of one window (see ``extract_window``).

    Examples:
        >>> from adawin.codes import build_toric, build_memory_dem, NoiseModelSpec
        >>> dem = build_memory_dem(build_toric(3), 'Z', 4, NoiseModelSpec('depolarizing', 0.01))
        >>> extract_sub_dem(dem, (0, 4)).n_faults == dem.n_faults
        True
    """
    return extract_window(dem, round_range).dem


def apply_artificial_defects(
    next_syndrome_slice: npt.ArrayLike,
    committed: Iterable[int],
    dem: DetectorModel,
    boundary: int,
) -> BitVector:
    """
    Forward committed corrections across the commit boundary.

    Args:
        next_syndrome_slice: Syndrome of the detectors with round >= boundary,
            in detector index order.
        committed: Global indices of committed faults.
        dem: Global DEM.
        boundary: First round not yet committed.

    Returns:
        The slice with every detector flipped by the committed faults toggled.

    Raises:
        DimensionError: If the slice does not match the detectors past the boundary.
    """
    tail = dem.round_of_detector >= boundary
    s = np.asarray(next_syndrome_slice, dtype=np.uint8)
    if s.shape != (int(tail.sum()),):
        raise DimensionError(
            f"Slice of length {s.size} for {int(tail.sum())} detectors past round {boundary}"
        )
    mask = np.zeros(dem.n_faults, dtype=np.uint8)
    idx = list(committed)
    if not idx:
        return s.copy()
    mask[idx] = 1
    return s ^ dem.h.matvec(mask)[tail]
