"""
Adawin Decoders Module

Inner decoders for one decoding problem:
- Normalized min-sum BP (flooding and serial schedules)
- LSD_0 cluster post-processing with cluster statistics
- Cluster-based confidence metric Q of a decode
- BP+LSD bundled as a ``(dem, syndrome) -> DecodeResult`` callable
- Exhaustive minimum-weight oracle for tiny DEMs
"""

from adawin.decoders.bp import BpConfig, BpResult, bp_decode
from adawin.decoders.confidence import QConfig, q_metric
from adawin.decoders.lsd import (
    WEIGHT_MODES,
    BpLsdDecoder,
    Cluster,
    ClusterStats,
    DecodeResult,
    cluster_weight,
    committed_cluster_carryover,
    lsd_decode,
)
from adawin.decoders.oracle import MAX_ORACLE_FAULTS, OracleResult, oracle_decode

__all__ = [
    # Belief propagation
    "BpConfig",
    "BpResult",
    "bp_decode",
    # Confidence metric
    "QConfig",
    "q_metric",
    # LSD
    "Cluster",
    "ClusterStats",
    "DecodeResult",
    "BpLsdDecoder",
    "lsd_decode",
    "committed_cluster_carryover",
    "cluster_weight",
    "WEIGHT_MODES",
    # Oracle
    "OracleResult",
    "oracle_decode",
    "MAX_ORACLE_FAULTS",
]
