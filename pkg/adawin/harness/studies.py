"""
Studies built on ``run_experiment``.

Each study returns a ``Table`` whose name selects its CSV schema:

- adaptive_comparison: baseline, target and adaptive runs on the same seeds
- ler_vs_q_bins: logical error probability per global-Q bin
- detector_separation: nearest-neighbour distances among triggered detectors
- commit_size_sweep: LER per commit size with the buffer fixed at d - 1
- window_time_scaling: per-window decoding time against W
- oracle_check: BP+LSD against the exhaustive minimum-weight oracle
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from adawin.codes import (
    DetectorModel,
    NoiseModelSpec,
    build_code_capacity_dem,
    build_memory_dem,
    build_repetition,
    build_toric,
    sample_shot,
)
from adawin.decoders import BpLsdDecoder, oracle_decode
from adawin.errors import DecodingError
from adawin.harness.experiment import (
    ExperimentReport,
    ExperimentSpec,
    build_dem,
    run_experiment,
    run_shots,
    summarize,
)
from adawin.harness.reports import Table
from adawin.harness.stats import shot_seed, spearman, wilson_interval
from adawin.window import schedule

logger = logging.getLogger(__name__)

# Agreement needed for an oracle check to pass (ties excluded).
ORACLE_PASS_RATE = 0.99


def _timing_spec(spec: ExperimentSpec) -> ExperimentSpec:
    """Timing studies decode on one thread so wall times are comparable."""
    if spec.threads > 1:
        logger.info("Timing study: decoding on 1 thread instead of %d", spec.threads)
        return replace(spec, threads=1)
    return spec


def _ler_row(mode: str, window: str, spec: ExperimentSpec, report: ExperimentReport) -> dict:
    return {
        'mode': mode,
        'window': window,
        'p': spec.noise.p,
        'shots': report.shots,
        'errors': report.errors,
        'ler': report.ler,
        'ci_lo': report.ler_ci[0],
        'ci_hi': report.ler_ci[1],
        'ler_per_round': report.ler_per_round,
        'retry_rate': report.retry_rate,
        'normalized_time': report.normalized_time,
    }


def adaptive_comparison(
    spec: ExperimentSpec,
    pairs: Optional[Sequence[Tuple[int, int]]] = None,
) -> Table:
    """
    Fixed baseline, fixed target and adaptive decoding on identical seeds.

    Args:
        spec: Adaptive experiment; its ``adaptive`` block gives the default
            (baseline, target) pair and every other setting.
        pairs: Optional (baseline, target) pairs to run instead, e.g. for
            window-size limit studies.

    Returns:
        ``ler_vs_p`` table with three rows per pair. Times are normalised
        to the pair's fixed target run.
        Shots are decoded on a single thread whatever ``spec.threads`` says.
    """
    if spec.adaptive is None:
        raise ValueError("adaptive_comparison needs an adaptive configuration")
    spec = _timing_spec(spec)
    pairs = list(pairs or [(spec.adaptive.baseline_window, spec.adaptive.target_window)])
    dem = build_dem(spec)
    table = Table('ler_vs_p', meta={'alpha': spec.adaptive.q_config.alpha,
                                    'delta': spec.adaptive.tuner.delta,
                                    'c0': spec.adaptive.tuner.c0})
    for baseline, target in pairs:
        logger.info(
            "Comparing W=%d against W=%d and adaptive %d->%d", baseline, target, baseline, target
        )
        adaptive_cfg = replace(spec.adaptive, baseline_window=baseline, target_window=target)
        adaptive_spec = replace(spec, window_mode='adaptive', adaptive=adaptive_cfg)
        target_report = run_experiment(spec.as_fixed(target), dem)
        base_report = run_experiment(spec.as_fixed(baseline), dem)
        outcomes, trace = run_shots(adaptive_spec, dem)
        adaptive_report = summarize(
            adaptive_spec, dem, outcomes, trace, target_report.mean_window_time_ns
        )
        ref = target_report.mean_window_time_ns
        base_report.normalized_time = base_report.mean_window_time_ns / ref
        target_report.normalized_time = 1.0
        table.rows.append(_ler_row('baseline', str(baseline), spec, base_report))
        table.rows.append(_ler_row('target', str(target), spec, target_report))
        table.rows.append(_ler_row('adaptive', f"{baseline}->{target}", spec, adaptive_report))
    return table


def ler_vs_q_bins(spec: ExperimentSpec, q_bins: Union[int, Sequence[float]] = 10) -> Table:
    """
    Logical error probability per bin of globally computed Q.

    Args:
        spec: Experiment; decoded globally whatever its window mode.
        q_bins: Number of equal-population bins, or explicit bin edges.

    Returns:
        ``ler_vs_q`` table; ``meta`` holds the Spearman correlation between
        bin mean Q and bin probability.
    """
    global_spec = replace(spec, window_mode='global', adaptive=None)
    outcomes, _ = run_shots(global_spec)
    q = np.array([o.records[0].q_value for o in outcomes], dtype=np.float64)
    err = np.array([o.error for o in outcomes], dtype=bool)

    if isinstance(q_bins, int):
        if q_bins < 1:
            raise ValueError(f"q_bins must be >= 1, got {q_bins}")
        edges = np.unique(np.quantile(q, np.linspace(0.0, 1.0, q_bins + 1)))
    else:
        edges = np.asarray(sorted(q_bins), dtype=np.float64)
    if edges.size < 2:
        edges = np.array([q.min(), q.max()]) if q.size else np.array([0.0, 0.0])

    # Last bin is closed on the right.
    which = np.clip(np.searchsorted(edges, q, side='right') - 1, 0, edges.size - 2)
    table = Table('ler_vs_q')
    for b in range(edges.size - 1):
        members = which == b
        shots = int(members.sum())
        if shots == 0:
            continue
        errors = int(err[members].sum())
        lo, hi = wilson_interval(errors, shots)
        table.rows.append({
            'bin': b,
            'q_lo': float(edges[b]),
            'q_hi': float(edges[b + 1]),
            'q_mean': float(q[members].mean()),
            'shots': shots,
            'errors': errors,
            'probability': errors / shots,
            'ci_lo': lo,
            'ci_hi': hi,
        })
    rho, pval = spearman(table.column('q_mean'), table.column('probability'))
    table.meta.update(spearman_rho=rho, spearman_p=pval)
    return table


@dataclass(frozen=True)
class SeparationStats:
    """
    Maximum nearest-neighbour distances per (shot, window).

    Attributes:
        space: One value per (shot, window) with at least two triggered detectors.
        time: Same, in rounds.
    """

    space: Tuple[int, ...]
    time: Tuple[int, ...]

    @staticmethod
    def cdf(values: Sequence[int]) -> List[Tuple[int, float]]:
        """(distance, fraction <= distance) for every distinct distance."""
        if not values:
            return []
        uniq, counts = np.unique(np.asarray(values), return_counts=True)
        cum = np.cumsum(counts) / len(values)
        return [(int(u), float(c)) for u, c in zip(uniq, cum)]

    def fraction_within(self, limit: int) -> Tuple[float, float]:
        """Fraction of (shot, window) pairs with max-NN <= limit, (space, time)."""
        def frac(vals: Tuple[int, ...]) -> float:
            return float(np.mean(np.asarray(vals) <= limit)) if vals else 1.0

        return frac(self.space), frac(self.time)

    def to_table(self) -> Table:
        table = Table('separation_cdf')
        for axis, values in (('space', self.space), ('time', self.time)):
            for distance, cdf in self.cdf(values):
                table.rows.append({'axis': axis, 'distance': distance, 'cdf': cdf})
        return table


def torus_distance(
    a: npt.ArrayLike, b: npt.ArrayLike, periods: Tuple[int, int]
) -> npt.NDArray[np.int64]:
    """
    Manhattan distance with wraparound between coordinate arrays.

    Examples:
        >>> int(torus_distance([0, 0], [6, 0], (7, 7)))
        1
    """
    delta = np.abs(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64))
    per = np.asarray(periods, dtype=np.int64)
    return np.minimum(delta, per - delta).sum(axis=-1)


def max_nearest_neighbour(
    coords: npt.NDArray[np.int64],
    rounds: npt.NDArray[np.int64],
    periods: Tuple[int, int],
) -> Optional[Tuple[int, int]]:
    """
    Largest nearest-neighbour distance among a set of triggered detectors.

    Space and time are measured separately: each detector's nearest
    neighbour in space is the closest other detector on the torus, and in
    time the one with the smallest round difference.

    Returns:
        (max space NN, max time NN), or None with fewer than two detectors.
    """
    if len(rounds) < 2:
        return None
    space = torus_distance(coords[:, None, :], coords[None, :, :], periods).astype(float)
    time = np.abs(rounds[:, None] - rounds[None, :]).astype(float)
    np.fill_diagonal(space, np.inf)
    np.fill_diagonal(time, np.inf)
    return int(space.min(axis=1).max()), int(time.min(axis=1).max())


def detector_separation(
    spec: ExperimentSpec, dem: Optional[DetectorModel] = None
) -> SeparationStats:
    """
    Nearest-neighbour statistics of triggered detectors per window.

    Windows follow the fixed schedule of ``spec`` (W = d is the intended
    setting). Only the sampled syndromes are needed, so no decoding happens.

    Raises:
        ValueError: If the DEM carries no detector coordinates.
    """
    dem = dem if dem is not None else build_dem(spec)
    if dem.coords is None or dem.periods is None:
        raise ValueError("Separation statistics need detector coordinates on a torus")
    spans = schedule(replace(spec, window_mode='fixed', adaptive=None).window_config())
    space: List[int] = []
    time: List[int] = []
    for shot in range(spec.shots):
        syndrome, _ = sample_shot(dem, shot_seed(spec.seed, shot))
        fired = np.flatnonzero(syndrome)
        fired_rounds = dem.round_of_detector[fired]
        for span in spans:
            inside = fired[(fired_rounds >= span.start) & (fired_rounds < span.stop)]
            result = max_nearest_neighbour(
                dem.coords[inside], dem.round_of_detector[inside], dem.periods
            )
            if result is not None:
                space.append(result[0])
                time.append(result[1])
    return SeparationStats(space=tuple(space), time=tuple(time))


def commit_size_sweep(spec: ExperimentSpec, commits: Sequence[int] = (1, 2, 3)) -> Table:
    """
    LER per commit size with the buffer fixed at d - 1 (W = C + d - 1).

    Windows that would exceed the experiment are clamped to its length.
    """
    d = spec.code.distance
    dem = build_dem(spec)
    table = Table('commit_sweep', meta={'buffer': d - 1})
    for c in commits:
        window = min(c + d - 1, spec.rounds)
        point = replace(spec.as_fixed(window), commit=c)
        report = run_experiment(point, dem)
        table.rows.append({
            'commit': c,
            'window': window,
            'shots': report.shots,
            'errors': report.errors,
            'ler': report.ler,
            'ci_lo': report.ler_ci[0],
            'ci_hi': report.ler_ci[1],
            'ler_per_round': report.ler_per_round,
        })
    return table


def window_time_scaling(spec: ExperimentSpec, sizes: Sequence[int]) -> Table:
    """
    Mean per-window decoding time for each window size.

    Times are normalised to W = d when d is among ``sizes``, otherwise to
    the largest size. Every point uses the same shots and seeds.
    Shots are decoded on a single thread.
    """
    if not sizes:
        raise ValueError("window_time_scaling needs at least one window size")
    spec = _timing_spec(spec)
    dem = build_dem(spec)
    reports = {w: run_experiment(spec.as_fixed(w), dem) for w in sorted(sizes)}
    d = spec.code.distance
    ref_w = d if d in reports else max(reports)
    ref = reports[ref_w].mean_window_time_ns
    table = Table('time_vs_w', meta={'reference_window': ref_w})
    for w, report in reports.items():
        table.rows.append({
            'window': w,
            'windows': report.windows,
            'mean_ns': report.timing['mean_ns'],
            'median_ns': report.timing['median_ns'],
            'p95_ns': report.timing['p95_ns'],
            'normalized': report.mean_window_time_ns / ref if ref else None,
        })
    return table


@dataclass(frozen=True)
class OracleCheckSummary:
    """
    BP+LSD against the exhaustive oracle on one DEM.

    Attributes:
        shots: Syndromes sampled.
        compared: Syndromes with an unambiguous oracle answer.
        ties_excluded: Syndromes whose tied minimum-weight solutions disagree.
        agreements: Compared syndromes where the observable actions match.
        decoder_failures: Syndromes where the decoder raised.
    """

    shots: int
    compared: int
    ties_excluded: int
    agreements: int
    decoder_failures: int = 0

    @property
    def agreement_rate(self) -> float:
        return self.agreements / self.compared if self.compared else 1.0

    @property
    def passed(self) -> bool:
        return self.agreement_rate >= ORACLE_PASS_RATE and self.decoder_failures == 0


def oracle_check(
    dem: DetectorModel,
    shots: int,
    seed: int = 0,
    decoder: Optional[BpLsdDecoder] = None,
) -> OracleCheckSummary:
    """
    Compare BP+LSD with the exhaustive oracle on sampled syndromes.

    Raises:
        ValueError: If the DEM is too large for the oracle.
    """
    decoder = decoder or BpLsdDecoder()
    compared = ties = agreements = failures = 0
    for shot in range(shots):
        syndrome, _ = sample_shot(dem, shot_seed(seed, shot))
        best = oracle_decode(dem, syndrome)
        if best.ambiguous:
            ties += 1
            continue
        compared += 1
        try:
            result = decoder(dem, syndrome)
        except DecodingError:
            failures += 1
            continue
        action = dem.observables.matvec(result.correction)
        mask = sum(1 << int(i) for i in np.flatnonzero(action))
        agreements += int(mask in best.observable_actions)
    return OracleCheckSummary(shots, compared, ties, agreements, failures)


def oracle_fragments(p: float = 0.05) -> List[Tuple[str, DetectorModel]]:
    """
    Small DEMs for the exhaustive validation suite (at most 12 faults each).

    Repetition codes in the code-capacity and memory settings, and toric
    d=3 fragments cut from the code-capacity model.
    """
    noise = NoiseModelSpec('depolarizing', p)
    fragments = [
        (f"repetition-d{d}-capacity", build_code_capacity_dem(build_repetition(d), 'Z', p))
        for d in (3, 5, 7)
    ]
    fragments.append(
        ("repetition-d3-memory-r2", build_memory_dem(build_repetition(3), 'Z', 2, noise))
    )
    fragments.append(
        ("repetition-d4-memory-r2", build_memory_dem(build_repetition(4), 'Z', 2, noise))
    )
    toric = build_code_capacity_dem(build_toric(3), 'Z', p)
    fragments.append(("toric-d3-capacity-h", toric.restrict_faults(range(0, 9))))
    mixed = list(range(0, 6)) + list(range(9, 15))
    fragments.append(("toric-d3-capacity-mixed", toric.restrict_faults(mixed)))
    return fragments
