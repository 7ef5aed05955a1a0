"""
Monte-Carlo memory experiments.

``run_experiment`` samples shots deterministically from a base seed, decodes
them globally, with fixed windows or adaptively, and aggregates an
``ExperimentReport``. Shots are independent; with ``threads > 1`` they are
fanned out over a thread pool and the results are re-ordered by shot index,
so the report does not depend on the worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from adawin.adaptive import AdaptiveConfig, AdaptiveController, QConfig, TraceRow, q_metric
from adawin.codes import (
    BB_CATALOG,
    CssCode,
    DetectorModel,
    NoiseModelSpec,
    build_bb_from_strings,
    build_bb_named,
    build_memory_dem,
    build_repetition,
    build_toric,
    effective_rates,
    sample_shot,
)
from adawin.decoders import WEIGHT_MODES, BpConfig, BpLsdDecoder
from adawin.decoders.bp import tanner_graph
from adawin.harness.stats import (
    ler_per_round,
    shot_seed,
    timing_summary,
    wilson_interval,
)
from adawin.version import __version__
from adawin.window import (
    WindowConfig,
    WindowEngine,
    WindowRecord,
    decode_global,
)

logger = logging.getLogger(__name__)

CODE_FAMILIES = ('toric', 'bb', 'repetition')
WINDOW_MODES = ('global', 'fixed', 'adaptive')

# Q histogram bin count in reports.
Q_HISTOGRAM_BINS = 20


@dataclass(frozen=True)
class CodeSpec:
    """
    Which code to build.

    Attributes:
        family: ``toric``, ``bb`` or ``repetition``.
        d: Distance (toric, repetition) or declared distance (bb).
        name: Catalogued BB code such as ``72_12_6`` (overrides l/m/a/b).
        l: BB x order.
        m: BB y order.
        a: BB polynomial A.
        b: BB polynomial B.
    """

    family: str = 'toric'
    d: int = 3
    name: Optional[str] = None
    l: int = 0
    m: int = 0
    a: str = ''
    b: str = ''

    def __post_init__(self) -> None:
        if self.family not in CODE_FAMILIES:
            raise ValueError(f"Code family must be one of {CODE_FAMILIES}, got {self.family!r}")
        complete = bool(self.l and self.m and self.a and self.b)
        if self.family == 'bb' and self.name is None and not complete:
            raise ValueError("BB code needs either a catalogue name or l, m, a and b")
        if self.family == 'bb' and self.name is not None and self.name not in BB_CATALOG:
            raise ValueError(
                f"Unknown BB code {self.name!r}; known: {', '.join(sorted(BB_CATALOG))}"
            )

    @property
    def distance(self) -> int:
        if self.family == 'bb' and self.name is not None:
            return BB_CATALOG[self.name][4]
        return self.d

    def build(self) -> CssCode:
        return _build_code(self)


@lru_cache(maxsize=16)
def _build_code(spec: CodeSpec) -> CssCode:
    if spec.family == 'toric':
        return build_toric(spec.d)
    if spec.family == 'repetition':
        return build_repetition(spec.d)
    if spec.name is not None:
        return build_bb_named(spec.name)
    return build_bb_from_strings(spec.l, spec.m, spec.a, spec.b, d=spec.d)


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One Monte-Carlo experiment.

    Attributes:
        code: Code to build.
        noise: Noise model and base rate.
        rounds: Syndrome rounds.
        basis: Memory basis, ``X`` or ``Z``.
        window_mode: ``global``, ``fixed`` or ``adaptive``.
        window: W for fixed mode.
        commit: C for fixed and adaptive modes.
        adaptive: Adaptive settings (required in adaptive mode).
        bp: BP settings.
        weight_mode: Cluster weight mode.
        shots: Number of shots, >= 1.
        seed: Base seed of the per-shot seed derivation.
        threads: Worker threads for shot fan-out.
        check_residual: Verify window consistency on every window.
        record_trace: Keep the adaptive controller trace.
    """

    code: CodeSpec = field(default_factory=CodeSpec)
    noise: NoiseModelSpec = field(default_factory=lambda: NoiseModelSpec('depolarizing', 0.01))
    rounds: int = 6
    basis: str = 'Z'
    window_mode: str = 'fixed'
    window: int = 3
    commit: int = 1
    adaptive: Optional[AdaptiveConfig] = None
    bp: BpConfig = field(default_factory=BpConfig)
    weight_mode: str = 'solution'
    shots: int = 100
    seed: int = 0
    threads: int = 1
    check_residual: bool = False
    record_trace: bool = False

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.basis.upper() not in ('X', 'Z'):
            raise ValueError(f"Basis must be 'X' or 'Z', got {self.basis!r}")
        if self.window_mode not in WINDOW_MODES:
            raise ValueError(f"window_mode must be one of {WINDOW_MODES}, got {self.window_mode!r}")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}, got {self.weight_mode!r}")
        if self.window_mode == 'fixed':
            self.window_config()
        if self.window_mode == 'adaptive':
            if self.adaptive is None:
                raise ValueError("Adaptive mode needs an adaptive configuration")
            self.window_config()
            if self.adaptive.target_window > self.rounds:
                raise ValueError(
                    f"target_window {self.adaptive.target_window} exceeds {self.rounds} rounds"
                )

    def window_config(self) -> WindowConfig:
        """Geometry of the (baseline) windows."""
        size = self.adaptive.baseline_window if self.window_mode == 'adaptive' else self.window
        return WindowConfig(size, self.commit, self.rounds)

    def as_fixed(self, window: int) -> ExperimentSpec:
        """Same experiment with fixed windows of ``window`` rounds."""
        return replace(self, window_mode='fixed', window=window, adaptive=None)

    def to_dict(self) -> Dict[str, Any]:
        """Fully resolved settings, defaults included."""
        doc = asdict(self)
        doc['noise']['p_data'], doc['noise']['p_meas'] = effective_rates(self.noise)
        return doc


@dataclass(frozen=True)
class ShotOutcome:
    """Per-shot result: error flag, observable mismatches and window records."""

    shot: int
    error: bool
    observable_errors: npt.NDArray[np.uint8]
    records: Tuple[WindowRecord, ...]
    final_threshold: Optional[float] = None


@dataclass
class ExperimentReport:
    """
    Aggregated result of one experiment.

    Attributes:
        spec: Resolved experiment settings.
        shots: Shots run.
        errors: Shots with any observable mismatch.
        ler: errors / shots.
        ler_ci: 95% Wilson interval of ``ler``.
        ler_per_round: 1 - (1 - LER)^(1/rounds).
        ler_per_round_ci: ``ler_ci`` converted per round.
        observable_errors: Mismatch count per tracked observable.
        windows: Windows decoded over all shots.
        retries: Windows retried.
        retry_rate: retries / windows.
        timing: Mean, median and p95 per-window wall time (ns).
        normalized_time: Mean window time over the target run's, adaptive only.
        q_histogram: Bin edges and counts of the per-window Q values.
        thresholds: Final threshold per shot, adaptive only.
        metadata: Version, git revision, cluster source and defaults.
        records: Every window record (CSV only).
        trace: Controller trace rows with their shot index (CSV only).
    """

    spec: Dict[str, Any]
    shots: int
    errors: int
    ler: float
    ler_ci: Tuple[float, float]
    ler_per_round: float
    ler_per_round_ci: Tuple[float, float]
    observable_errors: List[int]
    windows: int
    retries: int
    retry_rate: float
    timing: Dict[str, float]
    normalized_time: Optional[float]
    q_histogram: Dict[str, List[float]]
    thresholds: List[float]
    metadata: Dict[str, Any]
    records: List[WindowRecord] = field(default_factory=list, repr=False)
    trace: List[Tuple[int, TraceRow]] = field(default_factory=list, repr=False)

    @property
    def mean_window_time_ns(self) -> float:
        return self.timing['mean_ns']

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        """JSON document; ``include_timing=False`` drops every wall-time field."""
        doc = {
            'spec': self.spec,
            'shots': self.shots,
            'errors': self.errors,
            'ler': self.ler,
            'ler_ci': list(self.ler_ci),
            'ler_per_round': self.ler_per_round,
            'ler_per_round_ci': list(self.ler_per_round_ci),
            'observable_errors': self.observable_errors,
            'windows': self.windows,
            'retries': self.retries,
            'retry_rate': self.retry_rate,
            'q_histogram': self.q_histogram,
            'thresholds': self.thresholds,
            'metadata': self.metadata,
        }
        if include_timing:
            doc['timing'] = self.timing
            doc['normalized_time'] = self.normalized_time
        return doc


def git_revision(start: Optional[Path] = None) -> str:
    """Commit hash of the enclosing git checkout, or ``unknown``."""
    here = (start or Path.cwd()).resolve()
    for folder in (here, *here.parents):
        head = folder / '.git' / 'HEAD'
        if not head.is_file():
            continue
        try:
            text = head.read_text(encoding='utf-8').strip()
            if text.startswith('ref:'):
                ref = folder / '.git' / text.split(None, 1)[1]
                return ref.read_text(encoding='utf-8').strip() if ref.is_file() else 'unknown'
            return text
        except OSError:
            return 'unknown'
    return 'unknown'


def build_dem(spec: ExperimentSpec) -> DetectorModel:
    """Global DEM of the experiment."""
    return build_memory_dem(spec.code.build(), spec.basis, spec.rounds, spec.noise)


class _ShotRunner:
    """Everything one shot needs; shared read-only across worker threads."""

    def __init__(self, spec: ExperimentSpec, dem: DetectorModel):
        self.spec = spec
        self.dem = dem
        self.inner = BpLsdDecoder(spec.bp, spec.weight_mode)
        self.engine = (
            None
            if spec.window_mode == 'global'
            else WindowEngine(
                dem, spec.window_config(), self.inner, spec.check_residual, self.q_config()
            )
        )
        self.shared: Optional[AdaptiveController] = None
        if spec.window_mode == 'adaptive' and spec.adaptive.tuner_mode == 'shared':
            self.shared = AdaptiveController(spec.adaptive, record_trace=spec.record_trace)
        # Worker threads only read the caches built here.
        if self.engine is None:
            tanner_graph(dem)
        else:
            sizes = spec.adaptive.escalation_sizes() if spec.window_mode == 'adaptive' else []
            cached = self.engine.warm(sizes)
            logger.debug("Prepared %d window sub-DEMs", cached)

    def controller(self) -> Optional[AdaptiveController]:
        if self.spec.window_mode != 'adaptive':
            return None
        if self.shared is not None:
            return self.shared
        return AdaptiveController(self.spec.adaptive, record_trace=self.spec.record_trace)

    def __call__(self, shot: int) -> Tuple[ShotOutcome, List[TraceRow]]:
        syndrome, truth = sample_shot(self.dem, shot_seed(self.spec.seed, shot))
        trace: List[TraceRow] = []
        final_c = None
        if self.engine is None:
            predicted, result, elapsed = decode_global(self.dem, syndrome, self.inner)
            q = q_metric(result.stats, self.q_config().alpha)
            records: Tuple[WindowRecord, ...] = (
                WindowRecord(
                    index=0,
                    committed_correction=tuple(int(f) for f in np.flatnonzero(result.correction)),
                    q_value=q,
                    retried=False,
                    window_rounds_used=self.dem.rounds,
                    wall_time_ns=elapsed,
                    cluster_count=result.stats.cluster_count,
                    shot=shot,
                ),
            )
        else:
            ctl = self.controller()
            mark = len(ctl.trace) if ctl is not None else 0
            predicted, window_records = self.engine.decode_stream(syndrome, ctl, shot)
            for record in window_records:
                # Cluster stats are only needed inside the window chain.
                record.stats = None
                record.commit_mask = None
            records = tuple(window_records)
            if ctl is not None:
                trace = ctl.trace[mark:]
                final_c = ctl.state.c
        mismatch = (predicted ^ truth).astype(np.uint8)
        return (
            ShotOutcome(
                shot=shot,
                error=bool(mismatch.any()),
                observable_errors=mismatch,
                records=records,
                final_threshold=final_c,
            ),
            trace,
        )

    def q_config(self) -> QConfig:
        return self.spec.adaptive.q_config if self.spec.adaptive is not None else QConfig()


def run_shots(
    spec: ExperimentSpec, dem: Optional[DetectorModel] = None
) -> Tuple[List[ShotOutcome], List[Tuple[int, TraceRow]]]:
    """
    Decode every shot of ``spec``.

    Returns:
        Tuple of (outcomes in shot order, controller trace rows tagged by shot).
    """
    runner = _ShotRunner(spec, dem if dem is not None else build_dem(spec))
    threads = spec.threads
    if runner.shared is not None and threads > 1:
        logger.warning(
            "Shared controller mode decodes shots in order; ignoring threads=%d", threads
        )
        threads = 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(runner, range(spec.shots)))
    else:
        results = [runner(shot) for shot in range(spec.shots)]
    outcomes = [r[0] for r in results]
    trace = [(o.shot, row) for o, (_, rows) in zip(outcomes, results) for row in rows]
    return outcomes, trace


def q_histogram(values: List[float], bins: int = Q_HISTOGRAM_BINS) -> Dict[str, List[float]]:
    """Histogram of Q values as JSON-friendly lists."""
    if not values:
        return {'edges': [], 'counts': []}
    top = max(values)
    counts, edges = np.histogram(values, bins=bins, range=(0.0, top if top > 0 else 1.0))
    return {'edges': [float(e) for e in edges], 'counts': [int(c) for c in counts]}


def summarize(
    spec: ExperimentSpec,
    dem: DetectorModel,
    outcomes: List[ShotOutcome],
    trace: Optional[List[Tuple[int, TraceRow]]] = None,
    reference_time_ns: Optional[float] = None,
) -> ExperimentReport:
    """Aggregate shot outcomes into a report."""
    shots = len(outcomes)
    errors = sum(o.error for o in outcomes)
    ler = errors / shots
    lo, hi = wilson_interval(errors, shots)
    records = [r for o in outcomes for r in o.records]
    retries = sum(r.retried for r in records)
    timing = timing_summary([r.wall_time_ns for r in records])
    per_obs = (
        np.sum([o.observable_errors for o in outcomes], axis=0).astype(int).tolist()
        if dem.n_observables
        else []
    )
    normalized = None
    if reference_time_ns:
        normalized = timing['mean_ns'] / reference_time_ns
    adaptive = spec.adaptive
    metadata: Dict[str, Any] = {
        'version': __version__,
        'git_revision': git_revision(),
        'seed_derivation': 'blake2b(f"{seed}:{shot}", digest_size=8), little-endian',
        'cluster_source': (
            'lsd growth clusters when BP fails, correction components when BP converges'
        ),
        'ler_per_round_formula': '1 - (1 - LER)^(1/rounds)',
        'detectors': dem.n_detectors,
        'faults': dem.n_faults,
        'observables': dem.n_observables,
    }
    if adaptive is not None:
        metadata.update(
            alpha=adaptive.q_config.alpha,
            delta=adaptive.tuner.delta,
            c0=adaptive.tuner.c0,
            band=[adaptive.tuner.r_min, adaptive.tuner.r_max],
            tuner_mode=adaptive.tuner_mode,
        )
    return ExperimentReport(
        spec=spec.to_dict(),
        shots=shots,
        errors=errors,
        ler=ler,
        ler_ci=(lo, hi),
        ler_per_round=ler_per_round(ler, spec.rounds),
        ler_per_round_ci=(ler_per_round(lo, spec.rounds), ler_per_round(hi, spec.rounds)),
        observable_errors=per_obs,
        windows=len(records),
        retries=retries,
        retry_rate=retries / len(records) if records else 0.0,
        timing=timing,
        normalized_time=normalized,
        q_histogram=q_histogram([float(r.q_value) for r in records]),
        thresholds=[o.final_threshold for o in outcomes if o.final_threshold is not None],
        metadata=metadata,
        records=records,
        trace=list(trace or []),
    )


def run_experiment(
    spec: ExperimentSpec, dem: Optional[DetectorModel] = None
) -> ExperimentReport:
    """
    Run one experiment and aggregate its report.

    In adaptive mode the fixed target-size run is also decoded on the same
    seeds and the report's ``normalized_time`` is the ratio of mean
    per-window wall times. With ``threads > 1`` those wall times include
    interpreter contention between workers; the timing studies in
    ``adawin.harness.studies`` always decode on one thread.

    Args:
        spec: Experiment settings.
        dem: Optional prebuilt DEM (defaults to ``build_dem(spec)``).

    Returns:
        ExperimentReport.
    """
    dem = dem if dem is not None else build_dem(spec)
    logger.info(
        "Running %s %s p=%g, %d rounds, %s windows, %d shots",
        spec.code.family, spec.noise.kind, spec.noise.p, spec.rounds, spec.window_mode, spec.shots,
    )
    outcomes, trace = run_shots(spec, dem)
    reference = None
    if spec.window_mode == 'adaptive':
        target, _ = run_shots(spec.as_fixed(spec.adaptive.target_window), dem)
        reference = timing_summary([r.wall_time_ns for o in target for r in o.records])['mean_ns']
    report = summarize(spec, dem, outcomes, trace, reference)
    logger.info(
        "Finished: LER=%.4g [%.4g, %.4g], retry rate %.3f",
        report.ler, report.ler_ci[0], report.ler_ci[1], report.retry_rate,
    )
    return report
