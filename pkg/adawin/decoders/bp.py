"""
Normalized min-sum belief propagation over a DEM's Tanner graph.

Messages live on the edges of H. The flooding schedule is fully vectorised:
edges are stored sorted by detector so per-detector minima and sign parities
come from ``numpy.ufunc.reduceat``. The serial schedule walks the faults in
index order and is kept for experiments on small models.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from adawin.codes.dem import DetectorModel
from adawin.errors import DimensionError
from adawin.gf2 import BitVector

# Check-to-fault magnitudes are capped so degree-1 detectors stay finite.
MAX_MESSAGE = 1.0e3


@dataclass(frozen=True)
class BpConfig:
    """
    Min-sum settings.

    Attributes:
        max_iterations: Iteration budget, >= 1.
        scaling_factor: Normalisation of check messages, in (0, 1].
        parallel_schedule: Flooding (True) or serial fault-by-fault (False).
    """

    max_iterations: int = 30
    scaling_factor: float = 0.625
    parallel_schedule: bool = True

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.scaling_factor <= 1.0:
            raise ValueError(f"scaling_factor must lie in (0, 1], got {self.scaling_factor}")


@dataclass(frozen=True)
class BpResult:
    """
    Soft and hard output of one BP run.

    Attributes:
        posterior_llrs: Per-fault posterior LLR; negative means "fault likely".
        hard_decision: 1 where the posterior is negative.
        converged: True iff H·hard_decision equals the syndrome.
        iterations_used: Iterations actually run.
    """

    posterior_llrs: npt.NDArray[np.float64]
    hard_decision: BitVector
    converged: bool
    iterations_used: int


class TannerGraph:
    """Edge arrays of H, sorted by detector, shared by every BP run on a DEM."""

    __slots__ = ('edge_det', 'edge_fault', 'starts', 'seg_of_edge', 'det_edges', 'fault_edges')

    def __init__(self, dem: DetectorModel):
        rows = dem.h.rows
        self.edge_det = np.fromiter(
            (d for d, row in enumerate(rows) for _ in row), dtype=np.int64, count=dem.h.nnz
        )
        self.edge_fault = np.fromiter(
            (f for row in rows for f in row), dtype=np.int64, count=dem.h.nnz
        )
        degrees = np.array([len(row) for row in rows], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(degrees)[:-1]]).astype(np.int64)[: len(rows)]
        nonempty = degrees > 0
        # reduceat segments exist only for detectors with at least one fault.
        self.starts = offsets[nonempty]
        self.seg_of_edge = np.repeat(np.arange(int(nonempty.sum())), degrees[nonempty])
        self.det_edges = [np.arange(o, o + k) for o, k in zip(offsets.tolist(), degrees.tolist())]
        by_fault = np.argsort(self.edge_fault, kind='stable')
        bounds = np.searchsorted(self.edge_fault[by_fault], np.arange(dem.n_faults + 1))
        self.fault_edges = [by_fault[bounds[f]:bounds[f + 1]] for f in range(dem.n_faults)]

    @property
    def n_edges(self) -> int:
        return int(self.edge_fault.size)


_GRAPHS: "weakref.WeakKeyDictionary[DetectorModel, TannerGraph]" = weakref.WeakKeyDictionary()
_GRAPHS_LOCK = threading.Lock()


def tanner_graph(dem: DetectorModel) -> TannerGraph:
    """Cached Tanner graph of ``dem``; safe to call from worker threads."""
    with _GRAPHS_LOCK:
        graph = _GRAPHS.get(dem)
        if graph is None:
            graph = TannerGraph(dem)
            _GRAPHS[dem] = graph
        return graph


def _check_messages(
    graph: TannerGraph,
    q: npt.NDArray[np.float64],
    syndrome_edge: npt.NDArray[np.int64],
    scaling: float,
) -> npt.NDArray[np.float64]:
    """Min-sum detector-to-fault messages for every edge at once."""
    n_edges = q.size
    seg = graph.seg_of_edge
    mag = np.abs(q)
    neg = (q < 0).astype(np.int64)

    min1 = np.minimum.reduceat(mag, graph.starts)
    # First edge attaining the minimum owns it; every other edge sees min1.
    candidate = np.where(mag == min1[seg], np.arange(n_edges), n_edges)
    argmin = np.minimum.reduceat(candidate, graph.starts)
    is_argmin = np.arange(n_edges) == argmin[seg]
    min2 = np.minimum.reduceat(np.where(is_argmin, np.inf, mag), graph.starts)

    out_mag = np.where(is_argmin, min2[seg], min1[seg])
    out_mag = np.minimum(out_mag, MAX_MESSAGE)
    parity = (np.add.reduceat(neg, graph.starts) % 2)[seg]
    sign_bit = parity ^ neg ^ syndrome_edge
    return scaling * out_mag * (1 - 2 * sign_bit)


def _flooding(
    dem: DetectorModel,
    s: BitVector,
    cfg: BpConfig,
) -> BpResult:
    graph = tanner_graph(dem)
    weights = dem.weights
    posterior = weights.copy()
    hard = np.zeros(dem.n_faults, dtype=np.uint8)
    if graph.n_edges == 0:
        return BpResult(posterior, hard, not s.any(), 0)

    syndrome_edge = s[graph.edge_det].astype(np.int64)
    q = weights[graph.edge_fault].copy()
    for it in range(1, cfg.max_iterations + 1):
        r = _check_messages(graph, q, syndrome_edge, cfg.scaling_factor)
        posterior = weights + np.bincount(graph.edge_fault, weights=r, minlength=dem.n_faults)
        hard = (posterior < 0).astype(np.uint8)
        if np.array_equal(dem.h.matvec(hard), s):
            return BpResult(posterior, hard, True, it)
        q = posterior[graph.edge_fault] - r
    return BpResult(posterior, hard, False, cfg.max_iterations)


def _serial(
    dem: DetectorModel,
    s: BitVector,
    cfg: BpConfig,
) -> BpResult:
    graph = tanner_graph(dem)
    weights = dem.weights
    posterior = weights.copy()
    hard = np.zeros(dem.n_faults, dtype=np.uint8)
    q = weights[graph.edge_fault].copy()
    r = np.zeros_like(q)

    for it in range(1, cfg.max_iterations + 1):
        for f in range(dem.n_faults):
            edges = graph.fault_edges[f]
            for e in edges:
                det = int(graph.edge_det[e])
                others = graph.det_edges[det]
                others = others[others != e]
                if others.size == 0:
                    mag = MAX_MESSAGE
                    sign_bit = int(s[det])
                else:
                    mag = min(float(np.abs(q[others]).min()), MAX_MESSAGE)
                    sign_bit = (int(np.count_nonzero(q[others] < 0)) + int(s[det])) % 2
                r[e] = cfg.scaling_factor * mag * (1 - 2 * sign_bit)
            posterior[f] = weights[f] + r[edges].sum()
            q[edges] = posterior[f] - r[edges]
        hard = (posterior < 0).astype(np.uint8)
        if np.array_equal(dem.h.matvec(hard), s):
            return BpResult(posterior, hard, True, it)
    return BpResult(posterior, hard, False, cfg.max_iterations)


def bp_decode(
    dem: DetectorModel,
    syndrome: npt.ArrayLike,
    cfg: Optional[BpConfig] = None,
) -> BpResult:
    """
    Run normalized min-sum BP on ``dem`` for one syndrome.

    Messages start from the prior LLR weights. After every iteration the hard
    decision is checked against the full syndrome and BP stops as soon as it
    is satisfied.

    Args:
        dem: Decoding problem.
        syndrome: Detector outcomes, length |D|.
        cfg: BP settings; defaults to ``BpConfig()``.

    Returns:
        BpResult with posteriors, hard decision and convergence flag.

    Raises:
        DimensionError: If the syndrome length does not match the DEM.
    """
    cfg = cfg or BpConfig()
    s = np.asarray(syndrome, dtype=np.uint8)
    if s.shape != (dem.n_detectors,):
        raise DimensionError(
            f"Syndrome of length {s.size} for a DEM with {dem.n_detectors} detectors"
        )
    if cfg.parallel_schedule:
        return _flooding(dem, s, cfg)
    return _serial(dem, s, cfg)
