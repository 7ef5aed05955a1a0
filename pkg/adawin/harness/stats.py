"""
Statistics helpers for Monte-Carlo runs.

- Per-shot seed derivation (BLAKE2b of base seed and shot index)
- Wilson confidence intervals and CI overlap
- LER per round
- Timing summaries and Spearman rank correlation
"""

import hashlib
import math
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import stats as sps

Interval = Tuple[float, float]


def shot_seed(base_seed: int, shot: int) -> int:
    """
    Seed of one shot, stable across versions and platforms.

    The first 8 bytes of BLAKE2b over ``"<base_seed>:<shot>"``, as an
    unsigned integer.

    Examples:
        >>> shot_seed(1, 0) == shot_seed(1, 0)
        True
        >>> shot_seed(1, 0) == shot_seed(1, 1)
        False
    """
    digest = hashlib.blake2b(f"{int(base_seed)}:{int(shot)}".encode('ascii'), digest_size=8)
    return int.from_bytes(digest.digest(), 'little')


def wilson_interval(errors: int, shots: int, confidence: float = 0.95) -> Interval:
    """
    Wilson score interval of a binomial proportion.

    Raises:
        ValueError: If shots < 1 or errors is outside [0, shots].

    Examples:
        >>> lo, hi = wilson_interval(5, 100)
        >>> lo < 0.05 < hi
        True
    """
    if shots < 1:
        raise ValueError(f"Need at least one shot, got {shots}")
    if not 0 <= errors <= shots:
        raise ValueError(f"Error count {errors} outside [0, {shots}]")
    ci = sps.binomtest(int(errors), int(shots)).proportion_ci(
        confidence_level=confidence, method='wilson'
    )
    return (max(0.0, float(ci.low)), min(1.0, float(ci.high)))


def ci_overlap(a: Interval, b: Interval) -> bool:
    """True when two closed intervals intersect."""
    return a[0] <= b[1] and b[0] <= a[1]


def ler_per_round(ler: float, rounds: int) -> float:
    """
    Per-round logical error rate 1 - (1 - LER)^(1/rounds).

    Examples:
        >>> ler_per_round(0.0, 35)
        0.0
    """
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    if ler >= 1.0:
        return 1.0
    return 1.0 - (1.0 - ler) ** (1.0 / rounds)


def timing_summary(times_ns: Sequence[int]) -> Dict[str, float]:
    """Mean, median and 95th percentile of wall times, in nanoseconds."""
    if len(times_ns) == 0:
        return {'mean_ns': 0.0, 'median_ns': 0.0, 'p95_ns': 0.0}
    arr = np.asarray(times_ns, dtype=np.float64)
    return {
        'mean_ns': float(arr.mean()),
        'median_ns': float(np.median(arr)),
        'p95_ns': float(np.percentile(arr, 95)),
    }


def spearman(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """
    Spearman rank correlation and its p-value.

    Returns (nan, nan) with fewer than three points or a constant input.
    """
    if len(x) < 3 or len(set(x)) < 2 or len(set(y)) < 2:
        return (math.nan, math.nan)
    result = sps.spearmanr(x, y)
    return (float(result[0]), float(result[1]))
