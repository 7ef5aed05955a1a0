"""
Cluster-based confidence metric.

Q is the α-norm of the cluster LLR weights, normalised by the total weight
of every fault mechanism in the decoded DEM:

    Q = (Σ_i (Σ_{e∈C_i} w_e)^α)^(1/α) / Σ_{e∈E} w_e

Larger Q means lower confidence. Q is 0 with no clusters and 1 for a
single cluster containing every mechanism.
"""

from dataclasses import dataclass

import numpy as np

from adawin.decoders.lsd import ClusterStats
from adawin.errors import DecodingError


@dataclass(frozen=True)
class QConfig:
    """
    Q metric settings.

    Attributes:
        alpha: Norm order, >= 1.
        include_committed_carryover: Add the previous window's committed
            clusters before evaluating Q.
    """

    alpha: float = 2.0
    include_committed_carryover: bool = False

    def __post_init__(self) -> None:
        if self.alpha < 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")


def q_metric(stats: ClusterStats, alpha: float = 2.0) -> float:
    """
    Confidence metric of one decode.

    Args:
        stats: Cluster statistics (weights and normaliser).
        alpha: Norm order.

    Returns:
        Q >= 0; 0 when there are no clusters.

    Raises:
        DecodingError: If the normaliser is not positive.
        ValueError: If alpha < 1 or a cluster weight is negative.

    Examples:
        >>> from adawin.decoders import ClusterStats
        >>> q_metric(ClusterStats(clusters=(), total_weight=10.0))
        0.0
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if not stats.total_weight > 0:
        raise DecodingError(
            f"Q normaliser must be positive, got total_weight={stats.total_weight}"
        )
    weights = stats.cluster_weights()
    if weights.size == 0:
        return 0.0
    if np.any(weights < 0):
        raise ValueError("Cluster weights must be non-negative")
    # Scale by the largest weight before powering so large α does not overflow.
    top = float(weights.max())
    if top == 0.0:
        return 0.0
    norm = top * float(np.sum((weights / top) ** alpha)) ** (1.0 / alpha)
    return norm / stats.total_weight

