"""
Adaptive window decoding.

Each window is first decoded at the baseline size. If its confidence metric
exceeds the current threshold the window is re-decoded at a larger size from
the same start round, and the larger decode is committed. The threshold
controller sees every window exactly once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from adawin.decoders.confidence import QConfig, q_metric
from adawin.adaptive.hypertuner import HypertunerState, hypertuner_update, should_retry
from adawin.decoders.lsd import ClusterStats, DecodeResult, committed_cluster_carryover
from adawin.window.engine import (
    InnerDecoder,
    WindowInstance,
    WindowRecord,
    timed_decode,
)

logger = logging.getLogger(__name__)

TUNER_MODES = ('per_shot', 'shared')

TRACE_COLUMNS = ('window', 'q', 'c_before', 'c_after', 'r_obs', 'retried')

Escalate = Callable[[int], Optional[WindowInstance]]
WindowCheck = Callable[[WindowInstance, DecodeResult], None]


@dataclass(frozen=True)
class AdaptiveConfig:
    """
    Adaptive decoding settings.

    Attributes:
        baseline_window: Rounds of the first attempt.
        target_window: Rounds of the escalated attempt (> baseline).
        q_config: Confidence metric settings.
        tuner: Initial threshold controller state.
        max_retries_per_window: Retry budget per window, >= 1. Retries
            step evenly from baseline to target; the last one is committed
            without a further gate.
        tuner_mode: ``per_shot`` (fresh controller per shot) or ``shared``.
    """

    baseline_window: int
    target_window: int
    q_config: QConfig = field(default_factory=QConfig)
    tuner: HypertunerState = field(default_factory=HypertunerState.initial)
    max_retries_per_window: int = 1
    tuner_mode: str = 'per_shot'

    def __post_init__(self) -> None:
        if self.baseline_window < 2:
            raise ValueError(f"baseline_window must be >= 2, got {self.baseline_window}")
        if self.target_window <= self.baseline_window:
            raise ValueError(
                f"target_window must exceed baseline_window, got "
                f"{self.target_window} <= {self.baseline_window}"
            )
        if self.max_retries_per_window < 1:
            raise ValueError(
                f"max_retries_per_window must be >= 1, got {self.max_retries_per_window}"
            )
        if self.tuner_mode not in TUNER_MODES:
            raise ValueError(f"tuner_mode must be one of {TUNER_MODES}, got {self.tuner_mode!r}")

    def escalation_sizes(self) -> List[int]:
        """
        Window sizes of the successive retries, ending at the target.

        Examples:
            >>> AdaptiveConfig(3, 7, max_retries_per_window=2).escalation_sizes()
            [5, 7]
        """
        steps = np.linspace(
            self.baseline_window, self.target_window, self.max_retries_per_window + 1
        )
        sizes = sorted({int(round(s)) for s in steps[1:]})
        return [s for s in sizes if s > self.baseline_window]


@dataclass(frozen=True)
class TraceRow:
    """One controller step: the decision Q and the threshold around it."""

    window: int
    q: float
    c_before: float
    c_after: float
    r_obs: float
    retried: bool

    def to_row(self) -> dict:
        return {
            'window': self.window,
            'q': repr(self.q),
            'c_before': repr(self.c_before),
            'c_after': repr(self.c_after),
            'r_obs': repr(self.r_obs),
            'retried': int(self.retried),
        }


def _q_of(result: DecodeResult, cfg: AdaptiveConfig, carryover: Optional[ClusterStats]) -> float:
    stats = result.stats
    if cfg.q_config.include_committed_carryover and carryover is not None:
        stats = stats.with_carryover(carryover)
    return q_metric(stats, cfg.q_config.alpha)


def adaptive_decode_window(
    window: WindowInstance,
    inner: InnerDecoder,
    state: HypertunerState,
    cfg: AdaptiveConfig,
    escalate: Optional[Escalate] = None,
    carryover: Optional[ClusterStats] = None,
    check: Optional[WindowCheck] = None,
) -> Tuple[WindowRecord, HypertunerState]:
    """
    Decode one window, retrying at a larger size when confidence is low.

    Args:
        window: Window built at the baseline size.
        inner: Inner decoder.
        state: Threshold controller state before this window.
        cfg: Adaptive settings.
        escalate: Builds the same window at a larger size; returns None when
            it cannot grow. Without it no retry happens.
        carryover: Committed clusters of the previous window.
        check: Optional per-decode consistency check.

    Returns:
        Tuple of (record of the committed decode, updated controller state).
    """
    result, wall = timed_decode(inner, window.sub_dem, window.syndrome)
    if check is not None:
        check(window, result)
    q = _q_of(result, cfg, carryover)
    decision_q = q
    used = window
    retried = False

    for size in cfg.escalation_sizes():
        if not should_retry(q, state):
            break
        bigger = escalate(size) if escalate is not None else None
        if bigger is None:
            break
        logger.debug(
            "Window %d: Q=%.5g > c=%.5g, retrying with %d rounds",
            window.index, q, state.c, bigger.span.size,
        )
        result, elapsed = timed_decode(inner, bigger.sub_dem, bigger.syndrome)
        wall += elapsed
        if check is not None:
            check(bigger, result)
        used = bigger
        retried = True
        q = _q_of(result, cfg, carryover)

    new_state = hypertuner_update(state, retried)
    if new_state.c != state.c:
        logger.debug(
            "Threshold %.5g -> %.5g (r_obs=%.3f)", state.c, new_state.c, new_state.r_obs
        )
    record = WindowRecord(
        index=window.index,
        committed_correction=used.committed_faults(result.correction),
        q_value=decision_q,
        retried=retried,
        window_rounds_used=used.span.size,
        wall_time_ns=wall,
        cluster_count=result.stats.cluster_count,
        stats=result.stats,
        commit_mask=used.commit_mask(),
    )
    return record, new_state


class AdaptiveController:
    """
    Stateful wrapper used by ``WindowEngine.decode_stream``.

    Holds the threshold controller, the committed clusters of the previous
    window and an optional trace. In ``per_shot`` mode the controller is reset
    at the start of every shot; in ``shared`` mode one state runs across all
    shots, which requires the shots to be decoded in order.

    Examples:
        >>> ctl = AdaptiveController(AdaptiveConfig(3, 7))
        >>> ctl.state.c
        0.003
    """

    def __init__(self, cfg: AdaptiveConfig, record_trace: bool = False):
        self.cfg = cfg
        self.record_trace = record_trace
        self.state = cfg.tuner
        self.trace: List[TraceRow] = []
        self.shot_thresholds: List[float] = []
        self._carry: Optional[ClusterStats] = None
        self._shots = 0

    @property
    def mode(self) -> str:
        return self.cfg.tuner_mode

    def start_shot(self) -> None:
        """Mark a shot boundary; resets the controller in per-shot mode."""
        if self._shots:
            self.shot_thresholds.append(self.state.c)
        self._shots += 1
        self._carry = None
        if self.mode == 'per_shot':
            self.state = self.cfg.tuner.reset()

    def final_thresholds(self) -> List[float]:
        """Threshold at the end of every shot seen so far."""
        return self.shot_thresholds + ([self.state.c] if self._shots else [])

    def decode_window(
        self,
        window: WindowInstance,
        inner: InnerDecoder,
        escalate: Optional[Escalate] = None,
        check: Optional[WindowCheck] = None,
    ) -> WindowRecord:
        before = self.state
        record, self.state = adaptive_decode_window(
            window, inner, before, self.cfg, escalate=escalate, carryover=self._carry, check=check
        )
        if self.record_trace:
            self.trace.append(
                TraceRow(
                    window=record.index,
                    q=float(record.q_value),
                    c_before=before.c,
                    c_after=self.state.c,
                    r_obs=self.state.r_obs,
                    retried=record.retried,
                )
            )
        if self.cfg.q_config.include_committed_carryover and record.stats is not None:
            self._carry = committed_cluster_carryover(record.stats, record.commit_mask)
        return record

    def __repr__(self) -> str:
        return (
            f"AdaptiveController({self.cfg.baseline_window}->{self.cfg.target_window}, "
            f"mode={self.mode!r}, c={self.state.c:.4g})"
        )
