"""Tests for the experiment harness, studies and report output."""

import hashlib
import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from adawin.adaptive import AdaptiveConfig
from adawin.codes import NoiseModelSpec, build_code_capacity_dem, build_repetition
from adawin.harness import (
    CodeSpec,
    ExperimentSpec,
    SeparationStats,
    Table,
    adaptive_comparison,
    build_dem,
    ci_overlap,
    commit_size_sweep,
    detector_separation,
    format_oracle,
    format_report,
    format_table,
    ler_per_round,
    ler_vs_q_bins,
    max_nearest_neighbour,
    oracle_check,
    oracle_fragments,
    records_csv,
    rows_to_csv,
    run_experiment,
    shot_seed,
    spearman,
    timing_summary,
    torus_distance,
    trace_csv,
    wilson_interval,
    window_time_scaling,
    write_json,
    write_text_atomic,
)
from adawin.window import RECORD_COLUMNS


def _spec(**kwargs):
    base = dict(
        code=CodeSpec('toric', 3),
        noise=NoiseModelSpec('depolarizing', 0.02),
        rounds=6,
        window=3,
        commit=1,
        shots=20,
        seed=3,
    )
    base.update(kwargs)
    return ExperimentSpec(**base)


def _adaptive_spec(**kwargs):
    return _spec(window_mode='adaptive', adaptive=AdaptiveConfig(2, 3), **kwargs)


class TestStats:
    """Tests for seeds, intervals and rank correlation."""

    def test_shot_seed_is_blake2b(self):
        digest = hashlib.blake2b(b"7:12", digest_size=8).digest()
        assert shot_seed(7, 12) == int.from_bytes(digest, 'little')

    def test_shot_seeds_differ(self):
        assert len({shot_seed(0, s) for s in range(1000)}) == 1000

    def test_wilson_contains_estimate(self):
        lo, hi = wilson_interval(30, 1000)
        assert lo < 0.03 < hi

    def test_wilson_edges(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and 0.0 < hi < 0.05
        lo, hi = wilson_interval(100, 100)
        assert hi == 1.0 and lo > 0.95

    @pytest.mark.parametrize("errors,shots", [(1, 0), (-1, 10), (11, 10)])
    def test_wilson_invalid(self, errors, shots):
        with pytest.raises(ValueError):
            wilson_interval(errors, shots)

    def test_ci_overlap(self):
        assert ci_overlap((0.1, 0.2), (0.2, 0.3))
        assert not ci_overlap((0.1, 0.2), (0.25, 0.3))

    def test_ler_per_round(self):
        assert ler_per_round(0.5, 1) == pytest.approx(0.5)
        assert ler_per_round(1 - 0.9 ** 10, 10) == pytest.approx(0.1)
        assert ler_per_round(1.0, 5) == 1.0

    def test_ler_per_round_invalid(self):
        with pytest.raises(ValueError):
            ler_per_round(0.1, 0)

    def test_timing_summary(self):
        summary = timing_summary([10, 20, 30, 40])
        assert summary['mean_ns'] == 25.0
        assert summary['median_ns'] == 25.0
        assert timing_summary([])['mean_ns'] == 0.0

    def test_spearman_monotone(self):
        rho, _ = spearman([0.1, 0.2, 0.3, 0.4], [0.01, 0.03, 0.05, 0.2])
        assert rho == pytest.approx(1.0)

    def test_spearman_degenerate(self):
        assert all(math.isnan(v) for v in spearman([1.0, 2.0], [1.0, 2.0]))
        assert all(math.isnan(v) for v in spearman([1.0, 2.0, 3.0], [0.5, 0.5, 0.5]))


class TestExperimentSpec:
    """Tests for experiment validation."""

    def test_adaptive_needs_config(self):
        with pytest.raises(ValueError):
            _spec(window_mode='adaptive')

    def test_target_beyond_rounds(self):
        with pytest.raises(ValueError):
            _spec(window_mode='adaptive', adaptive=AdaptiveConfig(3, 7))

    def test_window_geometry_checked(self):
        with pytest.raises(ValueError):
            _spec(window=1, commit=1)

    @pytest.mark.parametrize("kwargs", [{'shots': 0}, {'threads': 0}, {'basis': 'Y'},
                                        {'window_mode': 'sliding'}, {'weight_mode': 'size'}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            _spec(**kwargs)

    def test_bb_code_spec(self):
        assert CodeSpec('bb', name='72_12_6').distance == 6
        with pytest.raises(ValueError):
            CodeSpec('bb')
        with pytest.raises(ValueError):
            CodeSpec('bb', name='1_2_3')

    def test_resolved_rates(self):
        doc = _spec(noise=NoiseModelSpec('SI100', 0.001)).to_dict()
        assert doc['noise']['p_data'] == pytest.approx(0.0031)
        assert doc['noise']['p_meas'] == pytest.approx(0.007)


class TestRunExperiment:
    """Tests for Monte-Carlo runs."""

    def test_report_fields(self):
        report = run_experiment(_spec())
        assert report.shots == 20
        assert report.windows == 20 * 4
        assert 0.0 <= report.ler <= 1.0
        assert report.ler_ci[0] <= report.ler <= report.ler_ci[1]
        assert report.retries == 0
        assert report.normalized_time is None
        assert sum(report.q_histogram['counts']) == report.windows
        assert report.metadata['detectors'] == 54

    def test_reproducible(self):
        a = run_experiment(_spec())
        b = run_experiment(_spec())
        assert a.errors == b.errors
        assert [r.committed_correction for r in a.records] == [
            r.committed_correction for r in b.records
        ]

    def test_thread_count_does_not_change_results(self):
        a = run_experiment(_adaptive_spec())
        b = run_experiment(_adaptive_spec(threads=3))
        assert a.errors == b.errors
        assert [(r.shot, r.index, r.retried, r.q_value) for r in a.records] == [
            (r.shot, r.index, r.retried, r.q_value) for r in b.records
        ]
        assert a.thresholds == b.thresholds

    def test_global_mode(self):
        report = run_experiment(_spec(window_mode='global'))
        assert report.windows == 20
        assert all(r.window_rounds_used == 6 for r in report.records)

    def test_adaptive_report(self):
        report = run_experiment(_adaptive_spec(record_trace=True))
        assert report.normalized_time is not None and report.normalized_time > 0
        assert len(report.thresholds) == 20
        assert report.metadata['alpha'] == 2.0
        assert report.metadata['tuner_mode'] == 'per_shot'
        assert len(report.trace) == report.windows
        assert report.retry_rate == report.retries / report.windows

    def test_shared_tuner_ignores_threads(self):
        cfg = AdaptiveConfig(2, 3, tuner_mode='shared')
        report = run_experiment(_spec(window_mode='adaptive', adaptive=cfg, threads=4))
        assert report.windows == 20 * 5

    def test_report_without_timing(self):
        doc = run_experiment(_spec(shots=5)).to_dict(include_timing=False)
        assert 'timing' not in doc
        assert 'normalized_time' not in doc
        assert doc['spec']['shots'] == 5

    def test_format_report(self):
        text = format_report(run_experiment(_spec(shots=5)))
        assert 'toric d=3' in text
        assert 'LER' in text


class TestStudies:
    """Tests for the study runners on small configurations."""

    def test_adaptive_comparison(self):
        table = adaptive_comparison(_adaptive_spec(shots=10))
        assert table.name == 'ler_vs_p'
        assert [r['mode'] for r in table.rows] == ['baseline', 'target', 'adaptive']
        assert table.rows[1]['normalized_time'] == 1.0
        assert table.rows[2]['window'] == '2->3'
        assert all(r['shots'] == 10 for r in table.rows)
        assert table.meta['c0'] == 0.003

    def test_adaptive_comparison_needs_adaptive(self):
        with pytest.raises(ValueError):
            adaptive_comparison(_spec())

    def test_ler_vs_q_bins(self):
        table = ler_vs_q_bins(_spec(shots=60, noise=NoiseModelSpec('depolarizing', 0.03)), 4)
        assert sum(table.column('shots')) == 60
        assert all(0.0 <= p <= 1.0 for p in table.column('probability'))
        assert 'spearman_rho' in table.meta

    def test_ler_vs_q_explicit_edges(self):
        table = ler_vs_q_bins(_spec(shots=30), [0.0, 1.0])
        assert len(table.rows) == 1
        assert table.rows[0]['shots'] == 30

    def test_torus_distance(self):
        assert int(torus_distance([0, 0], [6, 0], (7, 7))) == 1
        assert int(torus_distance([1, 1], [4, 5], (7, 7))) == 6

    def test_max_nearest_neighbour(self):
        coords = np.array([[0, 0], [0, 1], [2, 2]])
        assert max_nearest_neighbour(coords, np.array([0, 0, 2]), (3, 3)) == (2, 2)
        assert max_nearest_neighbour(coords[:1], np.array([0]), (3, 3)) is None

    def test_cdf(self):
        assert SeparationStats.cdf([1, 1, 2, 3]) == [(1, 0.5), (2, 0.75), (3, 1.0)]
        assert SeparationStats.cdf([]) == []

    def test_detector_separation_bounded_by_torus(self):
        stats = detector_separation(_spec(shots=30, noise=NoiseModelSpec('depolarizing', 0.05)))
        assert stats.space
        assert max(stats.space) <= 2
        assert max(stats.time) <= 2
        assert stats.fraction_within(2) == (1.0, 1.0)
        table = stats.to_table()
        assert table.name == 'separation_cdf'
        assert [r['cdf'] for r in table.rows if r['axis'] == 'space'][-1] == 1.0

    def test_detector_separation_needs_torus(self):
        with pytest.raises(ValueError):
            detector_separation(_spec(code=CodeSpec('repetition', 3)))

    def test_commit_size_sweep(self):
        table = commit_size_sweep(_spec(shots=10), commits=(1, 2))
        assert table.column('window') == [3, 4]
        assert table.meta['buffer'] == 2

    def test_window_time_scaling(self):
        table = window_time_scaling(_spec(shots=5), [2, 3])
        assert table.meta['reference_window'] == 3
        assert table.column('window') == [2, 3]
        assert table.rows[1]['normalized'] == pytest.approx(1.0)

    def test_window_time_scaling_needs_sizes(self):
        with pytest.raises(ValueError):
            window_time_scaling(_spec(), [])

    def test_timing_studies_decode_on_one_thread(self, caplog):
        with caplog.at_level(logging.INFO, logger='adawin.harness.studies'):
            scaling = window_time_scaling(_spec(shots=5, threads=3), [2, 3])
            comparison = adaptive_comparison(_adaptive_spec(shots=5, threads=2))
        assert "1 thread instead of 3" in caplog.text
        assert "1 thread instead of 2" in caplog.text
        assert scaling.column('windows') == window_time_scaling(_spec(shots=5), [2, 3]).column(
            'windows'
        )
        assert [r['errors'] for r in comparison.rows] == [
            r['errors'] for r in adaptive_comparison(_adaptive_spec(shots=5)).rows
        ]

    def test_single_thread_specs_are_not_logged(self, caplog):
        with caplog.at_level(logging.INFO, logger='adawin.harness.studies'):
            window_time_scaling(_spec(shots=3), [3])
        assert "thread instead" not in caplog.text


class TestOracleCheck:
    """Tests for the BP+LSD oracle comparison."""

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_repetition_capacity_agrees(self, d):
        dem = build_code_capacity_dem(build_repetition(d), 'Z', 0.05)
        summary = oracle_check(dem, 100, seed=1)
        assert summary.compared + summary.ties_excluded == 100
        assert summary.passed
        assert format_oracle('rep', summary).startswith('PASS')

    def test_fragments_are_small(self):
        fragments = oracle_fragments()
        assert len(fragments) >= 6
        assert all(dem.n_faults <= 12 for _, dem in fragments)

    def test_oversized_dem(self):
        with pytest.raises(ValueError):
            oracle_check(build_dem(_spec()), 1)

    @pytest.mark.slow
    def test_every_fragment_agrees(self):
        for name, dem in oracle_fragments():
            summary = oracle_check(dem, 500, seed=2)
            assert summary.passed, format_oracle(name, summary)


class TestReports:
    """Tests for tables and atomic writes."""

    def test_unknown_table(self):
        with pytest.raises(ValueError):
            Table('nope')

    def test_table_csv(self):
        table = Table('commit_sweep', rows=[{'commit': 1, 'window': 3, 'ler': 0.25}])
        lines = table.to_csv().splitlines()
        assert lines[0] == 'commit,window,shots,errors,ler,ci_lo,ci_hi,ler_per_round'
        assert lines[1] == '1,3,,,0.25,,,'

    def test_rows_to_csv_none(self):
        assert rows_to_csv(('a', 'b'), [{'a': None, 'b': 2}]) == 'a,b\n,2\n'

    def test_format_table(self):
        text = format_table(Table('separation_cdf', rows=[{'axis': 'space', 'distance': 1,
                                                           'cdf': 0.5}], meta={'limit': 3}))
        assert text.splitlines()[0].split() == ['axis', 'distance', 'cdf']
        assert 'limit: 3' in text

    def test_atomic_write(self, tmp_path):
        path = write_text_atomic(tmp_path / 'a' / 'b.txt', 'hello')
        assert path.read_text(encoding='utf-8') == 'hello'
        assert [p.name for p in path.parent.iterdir()] == ['b.txt']

    def test_write_json_overwrites(self, tmp_path):
        path = tmp_path / 'doc.json'
        write_json(path, {'a': 1})
        write_json(path, {'b': 2})
        assert '"b": 2' in path.read_text(encoding='utf-8')
        assert '"a"' not in path.read_text(encoding='utf-8')

    def test_records_and_trace_csv(self):
        report = run_experiment(_adaptive_spec(shots=3, record_trace=True))
        records = records_csv(report.records).splitlines()
        assert records[0] == ','.join(RECORD_COLUMNS)
        assert len(records) == report.windows + 1
        trace = trace_csv(report.trace).splitlines()
        assert trace[0].startswith('shot,window,q')
        assert len(trace) == len(report.trace) + 1


@pytest.mark.slow
class TestAcceptance:
    """Longer statistical checks; run with ``-m slow``."""

    def test_windowed_ler_close_to_global(self):
        spec = ExperimentSpec(
            code=CodeSpec('toric', 3),
            noise=NoiseModelSpec('depolarizing', 0.01),
            rounds=15,
            window=3,
            commit=1,
            shots=4000,
            seed=11,
        )
        windowed = run_experiment(spec)
        whole = run_experiment(replace(spec, window_mode='global'))
        assert windowed.ler <= 2 * whole.ler or ci_overlap(
            windowed.ler_ci, (whole.ler_ci[0], 2 * whole.ler_ci[1])
        )

    def test_separation_is_local(self):
        for p in (0.003, 0.005, 0.008):
            spec = ExperimentSpec(
                code=CodeSpec('toric', 7),
                noise=NoiseModelSpec('depolarizing', p),
                rounds=21,
                window=7,
                commit=1,
                shots=300,
                seed=5,
            )
            space, time = detector_separation(spec).fraction_within(3)
            assert space >= 0.8
            assert time >= 0.8

    def test_si100_is_worse_than_neutral_atom(self):
        reports = {
            kind: run_experiment(_spec(noise=NoiseModelSpec(kind, 0.004), shots=2000))
            for kind in ('NA', 'SI100')
        }
        na, si = reports['NA'], reports['SI100']
        assert si.ler_per_round >= na.ler_per_round or ci_overlap(si.ler_ci, na.ler_ci)

    def test_window_time_falls_with_window_size(self):
        spec = ExperimentSpec(
            code=CodeSpec('toric', 7),
            noise=NoiseModelSpec('depolarizing', 0.005),
            rounds=21,
            window=7,
            commit=1,
            shots=100,
            seed=17,
        )
        table = window_time_scaling(spec, [3, 5, 7])
        normalized = dict(zip(table.column('window'), table.column('normalized')))
        assert table.meta['reference_window'] == 7
        assert normalized[3] <= 0.6
        assert normalized[3] < normalized[5] < normalized[7]

    def test_logical_errors_rise_with_q(self):
        spec = ExperimentSpec(
            code=CodeSpec('toric', 5),
            noise=NoiseModelSpec('depolarizing', 0.02),
            rounds=10,
            window_mode='global',
            shots=4000,
            seed=23,
        )
        table = ler_vs_q_bins(spec, 8)
        assert table.meta['spearman_rho'] > 0
        assert table.meta['spearman_p'] < 0.01

    def test_commit_size_does_not_change_ler(self):
        spec = ExperimentSpec(
            code=CodeSpec('toric', 7),
            noise=NoiseModelSpec('depolarizing', 0.005),
            rounds=21,
            window=7,
            commit=1,
            shots=1000,
            seed=29,
        )
        table = commit_size_sweep(spec, (1, 2, 3))
        assert table.column('window') == [7, 8, 9]
        cis = list(zip(table.column('ci_lo'), table.column('ci_hi')))
        assert all(ci_overlap(a, b) for i, a in enumerate(cis) for b in cis[i + 1:])

    @staticmethod
    def _assert_gap_closed(table):
        rows = {r['mode']: r for r in table.rows}
        base, target, adaptive = rows['baseline'], rows['target'], rows['adaptive']

        def ci(row):
            return (row['ci_lo'], row['ci_hi'])

        assert adaptive['ler'] <= base['ler'] or ci_overlap(ci(adaptive), ci(base))
        assert adaptive['ler'] <= 1.5 * target['ler'] or ci_overlap(ci(adaptive), ci(target))
        assert 0.3 <= adaptive['normalized_time'] <= 0.7
        assert 0.15 <= adaptive['retry_rate'] <= 0.35

    @staticmethod
    def _gap_spec(code, noise, rounds, baseline, target, shots):
        # One controller across shots so the retry rate is the steady-state one.
        return ExperimentSpec(
            code=code,
            noise=noise,
            rounds=rounds,
            window_mode='adaptive',
            commit=1,
            adaptive=AdaptiveConfig(baseline, target, tuner_mode='shared'),
            shots=shots,
            seed=31,
        )

    @pytest.mark.parametrize("p", [0.003, 0.005, 0.008])
    def test_adaptive_closes_gap_on_toric(self, p):
        spec = self._gap_spec(
            CodeSpec('toric', 7), NoiseModelSpec('depolarizing', p), 21, 3, 7, 400
        )
        self._assert_gap_closed(adaptive_comparison(spec))

    @pytest.mark.parametrize("p", [0.001, 0.002, 0.003])
    def test_adaptive_closes_gap_on_bb72(self, p):
        spec = self._gap_spec(
            CodeSpec('bb', name='72_12_6'), NoiseModelSpec('depolarizing', p), 12, 2, 3, 300
        )
        self._assert_gap_closed(adaptive_comparison(spec))

    @pytest.mark.parametrize("kind", ['NA', 'SI100'])
    def test_adaptive_closes_gap_under_hardware_noise(self, kind):
        spec = self._gap_spec(CodeSpec('toric', 7), NoiseModelSpec(kind, 0.003), 21, 3, 7, 400)
        self._assert_gap_closed(adaptive_comparison(spec))
