"""
Adawin - Adaptive Sliding-Window Decoding for Quantum Error Correction

A library and benchmark harness for:
- GF(2) sparse linear algebra
- Toric, bivariate bicycle and repetition CSS codes
- Phenomenological detector error models under hardware-inspired noise
- Min-sum belief propagation with localized-statistics post-processing
- Sliding-window decoding with confidence-driven window escalation
- Deterministic Monte-Carlo studies with Wilson intervals
"""

from .version import __version__

# Errors
from adawin.errors import AdawinError, ConfigError, DecodingError, DimensionError

# Linear algebra
from adawin.gf2 import SparseBitMatrix, elimination, rank, solve

# Codes and decoding problems
from adawin.codes import (
    CssCode,
    DetectorModel,
    NoiseModelSpec,
    build_bb,
    build_memory_dem,
    build_repetition,
    build_toric,
    sample_shot,
)

# Decoders
from adawin.decoders import (
    BpConfig,
    BpLsdDecoder,
    ClusterStats,
    bp_decode,
    lsd_decode,
    oracle_decode,
)

# Windows and adaptivity
from adawin.window import WindowConfig, WindowEngine, decode_stream, schedule
from adawin.adaptive import (
    AdaptiveConfig,
    AdaptiveController,
    HypertunerState,
    QConfig,
    adaptive_decode_window,
    hypertuner_update,
    q_metric,
)

# Harness and configuration
from adawin.harness import (
    CodeSpec,
    ExperimentReport,
    ExperimentSpec,
    run_experiment,
    wilson_interval,
)
from adawin.config import RunConfig, load_config

__all__ = [
    # Version
    "__version__",
    # Errors
    "AdawinError",
    "DimensionError",
    "ConfigError",
    "DecodingError",
    # GF(2)
    "SparseBitMatrix",
    "elimination",
    "rank",
    "solve",
    # Codes
    "CssCode",
    "build_toric",
    "build_bb",
    "build_repetition",
    "NoiseModelSpec",
    "DetectorModel",
    "build_memory_dem",
    "sample_shot",
    # Decoders
    "BpConfig",
    "bp_decode",
    "lsd_decode",
    "BpLsdDecoder",
    "ClusterStats",
    "oracle_decode",
    # Windows
    "WindowConfig",
    "WindowEngine",
    "schedule",
    "decode_stream",
    # Adaptive
    "QConfig",
    "q_metric",
    "HypertunerState",
    "hypertuner_update",
    "AdaptiveConfig",
    "AdaptiveController",
    "adaptive_decode_window",
    # Harness
    "CodeSpec",
    "ExperimentSpec",
    "ExperimentReport",
    "run_experiment",
    "wilson_interval",
    "RunConfig",
    "load_config",
]
