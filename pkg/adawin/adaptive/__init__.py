"""
Adawin Adaptive Module

Confidence-driven window escalation:
- Q metric, the normalised α-norm of cluster weights
- On-off threshold controller with a dead band
- Per-window retry logic and the stateful controller used by the engine
"""

from adawin.decoders.confidence import QConfig, q_metric
from adawin.adaptive.controller import (
    TRACE_COLUMNS,
    TUNER_MODES,
    AdaptiveConfig,
    AdaptiveController,
    TraceRow,
    adaptive_decode_window,
)
from adawin.adaptive.hypertuner import (
    C_FLOOR,
    HypertunerState,
    hypertuner_update,
    should_retry,
)

__all__ = [
    # Confidence metric
    "QConfig",
    "q_metric",
    # Threshold controller
    "HypertunerState",
    "hypertuner_update",
    "should_retry",
    "C_FLOOR",
    # Adaptive decoding
    "AdaptiveConfig",
    "AdaptiveController",
    "adaptive_decode_window",
    "TraceRow",
    "TRACE_COLUMNS",
    "TUNER_MODES",
]
