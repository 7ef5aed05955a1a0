"""
Localized statistics decoding, order 0 (LSD_0).

When BP does not converge, clusters are grown around the unsatisfied
detectors. Each growth step adds the most reliable adjacent fault (lowest
posterior LLR, then lowest index) to every cluster whose local system is not
yet solvable; clusters that meet are merged with union-find. A solvable
cluster is inverted locally with columns ordered by BP reliability, and the
union of the cluster solutions is the correction.

When BP converges its hard decision is kept and the connected components of
its support are reported as the clusters.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import numpy.typing as npt
from scipy.sparse.csgraph import connected_components

from adawin.codes.dem import DetectorModel
from adawin.decoders.bp import BpConfig, BpResult, bp_decode
from adawin.errors import DecodingError, DimensionError
from adawin.gf2 import BitVector, elimination

logger = logging.getLogger(__name__)

WEIGHT_MODES = ('solution', 'membership')


@dataclass(frozen=True, eq=False)
class Cluster:
    """
    One error cluster.

    Attributes:
        detector_set: Detector indices, sorted.
        fault_set: Fault indices, sorted.
        solution: Local correction aligned with ``fault_set``.
        weights: Prior LLR weight of each fault in ``fault_set``.
        llr_weight: Cluster weight (solution support or full membership).
        carried: True for pseudo-clusters carried over from a committed region.
    """

    detector_set: Tuple[int, ...]
    fault_set: Tuple[int, ...]
    solution: BitVector
    weights: npt.NDArray[np.float64]
    llr_weight: float
    carried: bool = False

    @property
    def size(self) -> int:
        return len(self.fault_set)


@dataclass(frozen=True)
class ClusterStats:
    """
    Clusters of one decode plus the normaliser of the confidence metric.

    Attributes:
        clusters: Clusters with pairwise disjoint fault sets.
        total_weight: Sum of the weights of every fault in the decoded DEM.
        weight_mode: ``solution`` or ``membership``.
        from_growth: True when clusters come from LSD growth, False when they
            are components of a converged BP solution.
    """

    clusters: Tuple[Cluster, ...]
    total_weight: float
    weight_mode: str = 'solution'
    from_growth: bool = False

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    def cluster_weights(self) -> npt.NDArray[np.float64]:
        return np.array([c.llr_weight for c in self.clusters], dtype=np.float64)

    def with_carryover(self, carried: ClusterStats) -> ClusterStats:
        """Append carried pseudo-clusters; the normaliser stays this window's."""
        return replace(self, clusters=self.clusters + carried.clusters)


@dataclass(frozen=True)
class DecodeResult:
    """Output of an inner decoder call."""

    correction: BitVector
    stats: ClusterStats
    bp: Optional[BpResult] = None


def cluster_weight(
    weights: npt.NDArray[np.float64], solution: BitVector, mode: str
) -> float:
    """Cluster weight: solution support (default) or every member fault."""
    if mode == 'solution':
        return float(weights[solution.astype(bool)].sum())
    if mode == 'membership':
        return float(weights.sum())
    raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}, got {mode!r}")


def _make_cluster(
    dem: DetectorModel,
    detectors: Sequence[int],
    faults: Sequence[int],
    solution: BitVector,
    mode: str,
) -> Cluster:
    weights = dem.weights[list(faults)] if faults else np.zeros(0)
    return Cluster(
        detector_set=tuple(detectors),
        fault_set=tuple(faults),
        solution=solution,
        weights=weights,
        llr_weight=cluster_weight(weights, solution, mode),
    )


class _UnionFind:
    """Disjoint sets over cluster ids, union by size with path compression."""

    def __init__(self) -> None:
        self.parent: List[int] = []
        self.size: List[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        self.size.append(1)
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> Tuple[int, int]:
        """Merge the sets of i and j; returns (survivor, absorbed) roots."""
        i, j = self.find(i), self.find(j)
        if i == j:
            return i, j
        if self.size[i] < self.size[j] or (self.size[i] == self.size[j] and j < i):
            i, j = j, i
        self.parent[j] = i
        self.size[i] += self.size[j]
        return i, j


@dataclass
class _Growth:
    detectors: Set[int] = field(default_factory=set)
    faults: Set[int] = field(default_factory=set)
    frontier: List[Tuple[int, int]] = field(default_factory=list)


def _components(
    dem: DetectorModel, correction: BitVector, mode: str
) -> List[Cluster]:
    """Connected components of the correction's support on the Tanner graph."""
    faults = np.flatnonzero(correction)
    if faults.size == 0:
        return []
    sub = dem.h.to_csr()[:, faults]
    n_comp, labels = connected_components(sub.T @ sub, directed=False)
    clusters = []
    for comp in range(n_comp):
        members = [int(f) for f in faults[labels == comp]]
        detectors = sorted({d for f in members for d in dem.h.cols[f]})
        clusters.append(
            _make_cluster(dem, detectors, members, np.ones(len(members), dtype=np.uint8), mode)
        )
    return clusters


def _reliability_rank(posterior: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    """Position of each fault when sorted by (posterior LLR, index)."""
    order = np.lexsort((np.arange(posterior.size), posterior))
    rank = np.empty(posterior.size, dtype=np.int64)
    rank[order] = np.arange(posterior.size)
    return rank


def _local_solution(
    dem: DetectorModel,
    syndrome: BitVector,
    growth: _Growth,
    rank: npt.NDArray[np.int64],
) -> Tuple[List[int], List[int], Optional[BitVector]]:
    detectors = sorted(growth.detectors)
    faults = sorted(growth.faults)
    if not faults:
        return detectors, faults, None if syndrome[detectors].any() else np.zeros(0, np.uint8)
    local = dem.h.dense_submatrix(detectors, faults)
    order = sorted(range(len(faults)), key=lambda j: rank[faults[j]])
    result = elimination(local, order)
    return detectors, faults, result.back_substitute(syndrome[detectors], len(faults))


def _grow_clusters(
    dem: DetectorModel,
    syndrome: BitVector,
    posterior: npt.NDArray[np.float64],
    mode: str,
) -> List[Cluster]:
    rank = _reliability_rank(posterior)
    uf = _UnionFind()
    growth: Dict[int, _Growth] = {}
    det_owner: Dict[int, int] = {}
    fault_owner: Dict[int, int] = {}
    solutions: Dict[int, Tuple[List[int], List[int], BitVector]] = {}

    def claim_detector(cid: int, det: int) -> int:
        owner = det_owner.get(det)
        if owner is not None:
            owner = uf.find(owner)
            if owner != cid:
                cid = merge(cid, owner)
            return cid
        det_owner[det] = cid
        g = growth[cid]
        g.detectors.add(det)
        for f in dem.h.rows[det]:
            if f not in g.faults:
                heapq.heappush(g.frontier, (int(rank[f]), f))
        return cid

    def merge(a: int, b: int) -> int:
        keep, gone = uf.union(a, b)
        if keep == gone:
            return keep
        g_keep, g_gone = growth[keep], growth.pop(gone)
        g_keep.detectors |= g_gone.detectors
        g_keep.faults |= g_gone.faults
        g_keep.frontier.extend(g_gone.frontier)
        heapq.heapify(g_keep.frontier)
        solutions.pop(gone, None)
        solutions.pop(keep, None)
        return keep

    for det in np.flatnonzero(syndrome):
        cid = uf.add()
        growth[cid] = _Growth()
        claim_detector(cid, int(det))

    active = sorted(growth)
    while active:
        for cid in active:
            cid = uf.find(cid)
            if cid in solutions or cid not in growth:
                continue
            g = growth[cid]
            while g.frontier and g.frontier[0][1] in g.faults:
                heapq.heappop(g.frontier)
            if not g.frontier:
                raise DecodingError(
                    f"Cluster around detectors {sorted(g.detectors)[:5]} cannot grow "
                    "and its local system is unsolvable"
                )
            _, f = heapq.heappop(g.frontier)
            owner = fault_owner.get(f)
            if owner is not None:
                cid = merge(cid, uf.find(owner))
            else:
                fault_owner[f] = cid
                g.faults.add(f)
                for det in dem.h.cols[f]:
                    cid = claim_detector(uf.find(cid), det)
            cid = uf.find(cid)
            detectors, faults, sol = _local_solution(dem, syndrome, growth[cid], rank)
            if sol is not None:
                solutions[cid] = (detectors, faults, sol)
        active = sorted({uf.find(c) for c in growth if uf.find(c) not in solutions})

    clusters = [
        _make_cluster(dem, detectors, faults, sol, mode)
        for detectors, faults, sol in (solutions[c] for c in sorted(solutions))
    ]
    logger.debug("LSD grew %d clusters", len(clusters))
    return clusters


def lsd_decode(
    dem: DetectorModel,
    syndrome: npt.ArrayLike,
    bp: BpResult,
    weight_mode: str = 'solution',
) -> Tuple[BitVector, ClusterStats]:
    """
    LSD_0 post-processing of a BP result.

    Args:
        dem: Decoding problem.
        syndrome: Detector outcomes, length |D|.
        bp: BP output for the same syndrome, converged or not.
        weight_mode: How cluster weights are counted, ``solution`` or
            ``membership``.

    Returns:
        Tuple of (correction, cluster statistics).

    Raises:
        DimensionError: If the syndrome length does not match the DEM.
        DecodingError: If a cluster can no longer grow, or the combined
            correction does not reproduce the syndrome.

    Examples:
        >>> from adawin.codes import build_repetition, build_code_capacity_dem
        >>> dem = build_code_capacity_dem(build_repetition(3), 'Z', 0.1)
        >>> correction, stats = lsd_decode(dem, [0, 0], bp_decode(dem, [0, 0]))
        >>> (int(correction.sum()), stats.cluster_count)
        (0, 0)
    """
    if weight_mode not in WEIGHT_MODES:
        raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}, got {weight_mode!r}")
    s = np.asarray(syndrome, dtype=np.uint8)
    if s.shape != (dem.n_detectors,):
        raise DimensionError(
            f"Syndrome of length {s.size} for a DEM with {dem.n_detectors} detectors"
        )

    if bp.converged:
        correction = bp.hard_decision.astype(np.uint8)
        clusters = _components(dem, correction, weight_mode)
        from_growth = False
    else:
        clusters = _grow_clusters(dem, s, bp.posterior_llrs, weight_mode)
        correction = np.zeros(dem.n_faults, dtype=np.uint8)
        for cluster in clusters:
            if cluster.fault_set:
                correction[list(cluster.fault_set)] = cluster.solution
        from_growth = True

    if not np.array_equal(dem.h.matvec(correction), s):
        raise DecodingError("LSD correction does not reproduce the syndrome")
    stats = ClusterStats(
        clusters=tuple(clusters),
        total_weight=dem.total_weight,
        weight_mode=weight_mode,
        from_growth=from_growth,
    )
    return correction, stats


def committed_cluster_carryover(
    prev: ClusterStats, committed_faults: npt.ArrayLike
) -> ClusterStats:
    """
    Restrict the previous window's clusters to its commit region.

    Each cluster keeps only the faults flagged in ``committed_faults`` (a mask
    over the previous window's fault indices) and its weight is recomputed
    over what remains. Clusters with nothing left are dropped.

    Args:
        prev: Cluster statistics of the previous window.
        committed_faults: 0/1 mask of faults in the previous commit region.

    Returns:
        ClusterStats of carried pseudo-clusters.
    """
    mask = np.asarray(committed_faults, dtype=bool)
    carried = []
    for cluster in prev.clusters:
        if not cluster.fault_set:
            continue
        keep = mask[list(cluster.fault_set)]
        if not keep.any():
            continue
        solution = cluster.solution[keep]
        weights = cluster.weights[keep]
        carried.append(
            Cluster(
                detector_set=cluster.detector_set,
                fault_set=tuple(f for f, k in zip(cluster.fault_set, keep) if k),
                solution=solution,
                weights=weights,
                llr_weight=cluster_weight(weights, solution, prev.weight_mode),
                carried=True,
            )
        )
    return replace(prev, clusters=tuple(carried))


class BpLsdDecoder:
    """
    BP followed by LSD_0, as a ``(dem, syndrome) -> DecodeResult`` callable.

    Examples:
        >>> decoder = BpLsdDecoder(BpConfig(max_iterations=10))
        >>> decoder.bp_config.max_iterations
        10
    """

    def __init__(self, bp_config: Optional[BpConfig] = None, weight_mode: str = 'solution'):
        if weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}, got {weight_mode!r}")
        self.bp_config = bp_config or BpConfig()
        self.weight_mode = weight_mode

    def __call__(self, dem: DetectorModel, syndrome: npt.ArrayLike) -> DecodeResult:
        bp = bp_decode(dem, syndrome, self.bp_config)
        correction, stats = lsd_decode(dem, syndrome, bp, self.weight_mode)
        return DecodeResult(correction=correction, stats=stats, bp=bp)

    def __repr__(self) -> str:
        return f"BpLsdDecoder({self.bp_config!r}, weight_mode={self.weight_mode!r})"
