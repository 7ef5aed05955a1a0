"""
Sliding-window decoding of a full memory experiment.

The engine keeps a residual syndrome: the shot's syndrome with the effect of
every committed fault removed. Each window decodes its slice of the
residual, commits the faults of its commit region, and forwards their effect
on later rounds as artificial defects. Only inner-decoder calls are timed.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from adawin.codes.dem import DetectorModel
from adawin.decoders.bp import tanner_graph
from adawin.decoders.confidence import QConfig, q_metric
from adawin.decoders.lsd import ClusterStats, DecodeResult
from adawin.errors import DecodingError, DimensionError
from adawin.gf2 import BitVector
from adawin.window.schedule import (
    RoundRange,
    SubDem,
    WindowConfig,
    WindowSpan,
    apply_artificial_defects,
    extract_window,
    schedule,
)

if TYPE_CHECKING:
    from adawin.adaptive.controller import AdaptiveController

logger = logging.getLogger(__name__)

InnerDecoder = Callable[[DetectorModel, BitVector], DecodeResult]

# Stable CSV column order of window records.
RECORD_COLUMNS = (
    'shot',
    'window',
    'rounds_used',
    'retried',
    'q',
    'cluster_count',
    'wall_time_ns',
)


@dataclass(frozen=True, eq=False)
class WindowInstance:
    """
    One window ready to decode.

    Attributes:
        span: Position in the schedule (possibly escalated).
        sub: Restricted DEM and index maps.
        syndrome: Effective syndrome over the sub-DEM's detectors
            (shot syndrome plus artificial defects).
    """

    span: WindowSpan
    sub: SubDem
    syndrome: BitVector

    @property
    def index(self) -> int:
        return self.span.index

    @property
    def round_range(self) -> RoundRange:
        return self.span.round_range

    @property
    def commit_range(self) -> RoundRange:
        return self.span.commit_range

    @property
    def sub_dem(self) -> DetectorModel:
        return self.sub.dem

    @property
    def carried_defects(self) -> BitVector:
        return self.syndrome

    def commit_mask(self) -> BitVector:
        return self.sub.commit_mask(self.span.commit_stop)

    def committed_faults(self, correction: BitVector) -> Tuple[int, ...]:
        """Global indices of the corrected faults inside the commit region."""
        local = np.flatnonzero(correction.astype(bool) & self.commit_mask().astype(bool))
        return tuple(int(f) for f in self.sub.faults[local])


@dataclass
class WindowRecord:
    """
    Outcome of one window.

    Attributes:
        index: Window number.
        committed_correction: Global fault indices committed by this window.
        q_value: Confidence metric of the committed decode.
        retried: True if the window was escalated.
        window_rounds_used: Rounds of the decode that was committed.
        wall_time_ns: Inner-decoder time, both attempts when retried.
        cluster_count: Clusters in the committed decode.
        shot: Shot index.
        stats: Cluster statistics of the committed decode (not serialised).
        commit_mask: Commit-region mask over the committed sub-DEM's faults.
    """

    index: int
    committed_correction: Tuple[int, ...]
    q_value: float
    retried: bool
    window_rounds_used: int
    wall_time_ns: int
    cluster_count: int
    shot: int = 0
    stats: Optional[ClusterStats] = field(default=None, repr=False, compare=False)
    commit_mask: Optional[BitVector] = field(default=None, repr=False, compare=False)

    def to_row(self) -> Dict[str, object]:
        """CSV row in ``RECORD_COLUMNS`` order."""
        return {
            'shot': self.shot,
            'window': self.index,
            'rounds_used': self.window_rounds_used,
            'retried': int(self.retried),
            'q': repr(float(self.q_value)),
            'cluster_count': self.cluster_count,
            'wall_time_ns': self.wall_time_ns,
        }


def timed_decode(
    inner: InnerDecoder, dem: DetectorModel, syndrome: BitVector
) -> Tuple[DecodeResult, int]:
    """Run the inner decoder and measure it with ``perf_counter_ns``."""
    t0 = time.perf_counter_ns()
    result = inner(dem, syndrome)
    return result, max(1, time.perf_counter_ns() - t0)


def decode_global(
    dem: DetectorModel, syndrome: npt.ArrayLike, inner: InnerDecoder
) -> Tuple[BitVector, DecodeResult, int]:
    """
    Decode the whole experiment as one problem.

    Returns:
        Tuple of (predicted observable flips, decode result, wall time in ns).
    """
    s = np.asarray(syndrome, dtype=np.uint8)
    result, elapsed = timed_decode(inner, dem, s)
    return dem.observable_flips(result.correction), result, elapsed


class WindowEngine:
    """
    Sliding-window decoder over one global DEM.

    Sub-DEMs are cached per (start, size), so repeated shots and escalated
    retries reuse them and their construction never enters the timings.
    The cache is lock-guarded; call ``warm`` before fanning shots out to
    threads so workers only read it.

    Args:
        dem: Global detector error model.
        cfg: Window geometry; ``total_rounds`` must equal ``dem.rounds``.
        inner: Inner decoder ``(dem, syndrome) -> DecodeResult``.
        check_residual: Verify residual consistency on every window.
        q_config: Q settings used to score fixed-size windows.
    """

    def __init__(
        self,
        dem: DetectorModel,
        cfg: WindowConfig,
        inner: InnerDecoder,
        check_residual: bool = False,
        q_config: Optional[QConfig] = None,
    ):
        if cfg.total_rounds != dem.rounds:
            raise ValueError(
                f"Window config covers {cfg.total_rounds} rounds, DEM has {dem.rounds}"
            )
        self.dem = dem
        self.cfg = cfg
        self.inner = inner
        self.check_residual = check_residual
        self.q_config = q_config or QConfig()
        self.spans = schedule(cfg)
        self._subs: Dict[Tuple[int, int], SubDem] = {}
        self._lock = threading.Lock()

    def sub_dem(self, start: int, size: int) -> SubDem:
        stop = min(start + size, self.cfg.total_rounds)
        key = (start, stop - start)
        with self._lock:
            sub = self._subs.get(key)
            if sub is None:
                sub = extract_window(self.dem, (start, stop))
                self._subs[key] = sub
            return sub

    def warm(self, sizes: Sequence[int] = ()) -> int:
        """
        Build every scheduled sub-DEM and its Tanner graph ahead of decoding.

        Args:
            sizes: Extra window sizes per start, e.g. the escalation sizes.

        Returns:
            Number of cached sub-DEMs.
        """
        for span in self.spans:
            for size in (span.size, *sizes):
                tanner_graph(self.sub_dem(span.start, size).dem)
        return len(self._subs)

    def instance(self, span: WindowSpan, residual: BitVector) -> WindowInstance:
        """Window over ``span`` with its slice of the residual syndrome."""
        sub = self.sub_dem(span.start, span.size)
        return WindowInstance(span=span, sub=sub, syndrome=residual[sub.detectors])

    def escalation(
        self, span: WindowSpan, residual: BitVector
    ) -> Callable[[int], Optional[WindowInstance]]:
        """
        Factory for a larger window at the same start.

        The returned callable gives None when the window cannot grow past
        ``span`` because the experiment ends there.
        """

        def escalate(size: int) -> Optional[WindowInstance]:
            bigger = span.resized(size, self.cfg.total_rounds)
            if bigger.stop <= span.stop:
                return None
            return self.instance(bigger, residual)

        return escalate

    def decode_fixed(self, window: WindowInstance) -> WindowRecord:
        """Decode a window at its own size and build its record."""
        result, elapsed = timed_decode(self.inner, window.sub_dem, window.syndrome)
        self._check_window(window, result)
        return WindowRecord(
            index=window.index,
            committed_correction=window.committed_faults(result.correction),
            q_value=q_metric(result.stats, self.q_config.alpha),
            retried=False,
            window_rounds_used=window.span.size,
            wall_time_ns=elapsed,
            cluster_count=result.stats.cluster_count,
            stats=result.stats,
            commit_mask=window.commit_mask(),
        )

    def _check_window(self, window: WindowInstance, result: DecodeResult) -> None:
        if self.check_residual and not np.array_equal(
            window.sub_dem.syndrome_of(result.correction), window.syndrome
        ):
            raise DecodingError(f"Window {window.index}: correction does not match its syndrome")

    def _commit(
        self, residual: BitVector, span: WindowSpan, committed: Tuple[int, ...]
    ) -> None:
        head = self.dem.round_of_detector < span.commit_stop
        if self.check_residual:
            mask = np.zeros(self.dem.n_faults, dtype=np.uint8)
            mask[list(committed)] = 1
            left = residual[head] ^ self.dem.syndrome_of(mask)[head]
            if left.any():
                raise DecodingError(
                    f"Window {span.index}: {int(left.sum())} committed detectors left unexplained"
                )
        residual[head] = 0
        tail = ~head
        if tail.any():
            residual[tail] = apply_artificial_defects(
                residual[tail], committed, self.dem, span.commit_stop
            )

    def decode_stream(
        self,
        syndrome: npt.ArrayLike,
        adaptive: Optional[AdaptiveController] = None,
        shot: int = 0,
    ) -> Tuple[BitVector, List[WindowRecord]]:
        """
        Decode one shot window by window.

        Args:
            syndrome: Full syndrome of the shot.
            adaptive: Optional controller that may escalate windows.
            shot: Shot index stamped on the records.

        Returns:
            Tuple of (predicted observable flips, one record per window).

        Raises:
            DimensionError: If the syndrome length does not match the DEM.
        """
        residual = np.array(syndrome, dtype=np.uint8)
        if residual.shape != (self.dem.n_detectors,):
            raise DimensionError(
                f"Syndrome of length {residual.size} for a DEM with "
                f"{self.dem.n_detectors} detectors"
            )
        predicted = np.zeros(self.dem.n_observables, dtype=np.uint8)
        records: List[WindowRecord] = []
        if adaptive is not None:
            adaptive.start_shot()

        for span in self.spans:
            window = self.instance(span, residual)
            if adaptive is None:
                record = self.decode_fixed(window)
            else:
                record = adaptive.decode_window(
                    window,
                    self.inner,
                    escalate=self.escalation(span, residual),
                    check=self._check_window,
                )
            record.shot = shot
            if record.committed_correction:
                mask = np.zeros(self.dem.n_faults, dtype=np.uint8)
                mask[list(record.committed_correction)] = 1
                predicted ^= self.dem.observable_flips(mask)
            self._commit(residual, span, record.committed_correction)
            records.append(record)
        return predicted, records


def decode_stream(
    dem: DetectorModel,
    syndrome: npt.ArrayLike,
    cfg: WindowConfig,
    inner: InnerDecoder,
    adaptive: Optional[AdaptiveController] = None,
) -> Tuple[BitVector, List[WindowRecord]]:
    """
    Sliding-window decode of one shot (builds a throwaway ``WindowEngine``).

    Returns:
        Tuple of (predicted observable flips, window records).
    """
    return WindowEngine(dem, cfg, inner).decode_stream(syndrome, adaptive)
