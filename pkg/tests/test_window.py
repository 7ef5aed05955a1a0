"""Tests for window geometry, sub-DEM extraction and the window engine."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from adawin.codes import NoiseModelSpec, build_memory_dem, build_toric, sample_shot
from adawin.decoders import BpLsdDecoder, QConfig, q_metric
from adawin.decoders.bp import tanner_graph
from adawin.errors import DimensionError
from adawin.gf2 import bitvector
from adawin.window import (
    RECORD_COLUMNS,
    WindowConfig,
    WindowEngine,
    WindowSpan,
    apply_artificial_defects,
    decode_global,
    decode_stream,
    extract_sub_dem,
    extract_window,
    schedule,
)


@pytest.fixture(scope="module")
def dem4():
    # 36 detectors; faults 0..26 start in round 0, 27..53 in round 1,
    # 54..80 in round 2 and 81..98 in round 3.
    return build_memory_dem(build_toric(3), 'Z', 4, NoiseModelSpec('depolarizing', 0.01))


@pytest.fixture(scope="module")
def dem6():
    return build_memory_dem(build_toric(3), 'Z', 6, NoiseModelSpec('depolarizing', 0.02))


def _committed_mask(dem, records):
    faults = [f for r in records for f in r.committed_correction]
    assert len(faults) == len(set(faults))
    return bitvector(dem.n_faults, faults)


class TestWindowConfig:
    """Tests for window geometry validation."""

    def test_buffer(self):
        assert WindowConfig(7, 1, 35).buffer_rounds == 6
        assert WindowConfig(5, 2, 10).buffer_rounds == 3

    @pytest.mark.parametrize("w,c,total", [(3, 0, 10), (3, 3, 10), (2, 3, 10), (11, 1, 10)])
    def test_invalid(self, w, c, total):
        with pytest.raises(ValueError):
            WindowConfig(w, c, total)


class TestSchedule:
    """Tests for the window schedule."""

    def test_starts_step_by_commit(self):
        spans = schedule(WindowConfig(4, 2, 10))
        assert [s.start for s in spans] == [0, 2, 4, 6]
        assert [s.commit_range for s in spans[:-1]] == [(0, 2), (2, 4), (4, 6)]

    def test_final_window_commits_the_rest(self):
        last = schedule(WindowConfig(4, 2, 10))[-1]
        assert last.round_range == (6, 10)
        assert last.commit_range == (6, 10)
        assert last.is_final

    def test_single_window(self):
        spans = schedule(WindowConfig(5, 1, 5))
        assert len(spans) == 1
        assert spans[0].commit_range == (0, 5)

    def test_final_window_may_be_short(self):
        spans = schedule(WindowConfig(3, 2, 6))
        assert [s.round_range for s in spans] == [(0, 3), (2, 5), (4, 6)]
        assert spans[-1].size == 2

    def test_commit_regions_tile_the_experiment(self):
        spans = schedule(WindowConfig(5, 1, 12))
        covered = [r for s in spans for r in range(*s.commit_range)]
        assert covered == list(range(12))
        assert [s.index for s in spans] == list(range(len(spans)))

    def test_resized_keeps_commit_range(self):
        span = WindowSpan(0, 2, 5, 3)
        bigger = span.resized(7, 8)
        assert bigger.round_range == (2, 8)
        assert bigger.commit_range == (2, 3)


class TestExtractWindow:
    """Tests for sub-DEM extraction."""

    def test_whole_range_is_the_dem(self, dem4):
        sub = extract_sub_dem(dem4, (0, 4))
        assert sub.h == dem4.h
        assert np.array_equal(sub.priors, dem4.priors)

    def test_index_maps(self, dem4):
        window = extract_window(dem4, (1, 3))
        assert window.detectors.tolist() == list(range(9, 27))
        assert window.faults.tolist() == list(range(27, 81))
        assert window.start == 1

    def test_rounds_are_relative(self, dem4):
        sub = extract_window(dem4, (1, 3)).dem
        assert sub.rounds == 2
        assert sorted(set(sub.round_of_detector.tolist())) == [0, 1]

    def test_upper_boundary_truncation(self, dem4):
        window = extract_window(dem4, (1, 3))
        # Time faults of round 2 reach round 3 and lose that detector.
        local = window.faults.tolist().index(72)
        assert len(dem4.h.cols[72]) == 2
        assert len(window.dem.h.cols[local]) == 1
        assert window.dem.priors[local] == dem4.priors[72]

    def test_earlier_faults_are_dropped(self, dem4):
        window = extract_window(dem4, (1, 3))
        # Time faults between rounds 0 and 1 belong to the previous commit.
        assert 18 not in window.faults.tolist()

    def test_commit_mask(self, dem4):
        window = extract_window(dem4, (1, 3))
        mask = window.commit_mask(2)
        assert int(mask.sum()) == 27
        assert mask[:27].all()

    @pytest.mark.parametrize("round_range", [(2, 2), (-1, 2), (0, 5), (3, 1)])
    def test_bad_range(self, dem4, round_range):
        with pytest.raises(ValueError):
            extract_window(dem4, round_range)


class TestArtificialDefects:
    """Tests for forwarding committed corrections."""

    def test_time_fault_crossing_boundary(self, dem4):
        tail = np.zeros(27, dtype=np.uint8)
        out = apply_artificial_defects(tail, [18], dem4, 1)
        assert np.flatnonzero(out).tolist() == [0]

    def test_nothing_committed(self, dem4):
        tail = np.ones(27, dtype=np.uint8)
        out = apply_artificial_defects(tail, [], dem4, 1)
        assert out.tolist() == tail.tolist()
        assert out is not tail

    def test_space_fault_before_boundary_is_silent(self, dem4):
        out = apply_artificial_defects(np.zeros(27, dtype=np.uint8), [0], dem4, 1)
        assert not out.any()

    def test_toggles_existing_defect(self, dem4):
        tail = np.zeros(27, dtype=np.uint8)
        tail[0] = 1
        assert not apply_artificial_defects(tail, [18], dem4, 1).any()

    def test_slice_length_mismatch(self, dem4):
        with pytest.raises(DimensionError):
            apply_artificial_defects(np.zeros(26, dtype=np.uint8), [18], dem4, 1)


class TestWindowEngine:
    """Tests for fixed sliding-window decoding."""

    def test_round_count_must_match(self, dem4):
        with pytest.raises(ValueError):
            WindowEngine(dem4, WindowConfig(3, 1, 5), BpLsdDecoder())

    def test_syndrome_length(self, dem4):
        engine = WindowEngine(dem4, WindowConfig(3, 1, 4), BpLsdDecoder())
        with pytest.raises(DimensionError):
            engine.decode_stream(np.zeros(35, dtype=np.uint8))

    def test_zero_syndrome(self, dem4):
        engine = WindowEngine(dem4, WindowConfig(3, 1, 4), BpLsdDecoder())
        predicted, records = engine.decode_stream(np.zeros(36, dtype=np.uint8))
        assert not predicted.any()
        assert len(records) == len(engine.spans) == 2
        assert all(not r.committed_correction for r in records)

    def test_single_window_matches_global_decode(self, dem4):
        inner = BpLsdDecoder()
        engine = WindowEngine(dem4, WindowConfig(4, 1, 4), inner)
        for seed in range(15):
            syndrome, _ = sample_shot(dem4, seed)
            predicted, records = engine.decode_stream(syndrome)
            expected, result, _ = decode_global(dem4, syndrome, inner)
            assert len(records) == 1
            assert predicted.tolist() == expected.tolist()
            assert records[0].committed_correction == tuple(
                int(f) for f in np.flatnonzero(result.correction)
            )

    def test_commits_explain_the_syndrome(self, dem6):
        engine = WindowEngine(dem6, WindowConfig(3, 1, 6), BpLsdDecoder(), check_residual=True)
        for seed in range(25):
            syndrome, _ = sample_shot(dem6, seed)
            predicted, records = engine.decode_stream(syndrome, shot=seed)
            mask = _committed_mask(dem6, records)
            assert np.array_equal(dem6.syndrome_of(mask), syndrome)
            assert predicted.tolist() == dem6.observable_flips(mask).tolist()
            assert all(r.shot == seed for r in records)

    def test_single_fault_is_corrected(self, dem4):
        engine = WindowEngine(dem4, WindowConfig(3, 1, 4), BpLsdDecoder(), check_residual=True)
        error = bitvector(dem4.n_faults, [27])
        predicted, records = engine.decode_stream(dem4.syndrome_of(error))
        assert predicted.tolist() == dem4.observable_flips(error).tolist()
        assert [r.committed_correction for r in records] == [(), (27,)]

    def test_records(self, dem6):
        engine = WindowEngine(dem6, WindowConfig(4, 2, 6), BpLsdDecoder())
        syndrome, _ = sample_shot(dem6, 3)
        _, records = engine.decode_stream(syndrome)
        assert [r.index for r in records] == [0, 1]
        assert [r.window_rounds_used for r in records] == [4, 4]
        assert all(not r.retried for r in records)
        assert [r.q_value for r in records] == [q_metric(r.stats, 2.0) for r in records]
        assert all(r.wall_time_ns >= 1 for r in records)
        assert tuple(records[0].to_row()) == RECORD_COLUMNS

    def test_sub_dems_are_cached(self, dem6):
        engine = WindowEngine(dem6, WindowConfig(3, 1, 6), BpLsdDecoder())
        assert engine.sub_dem(1, 3) is engine.sub_dem(1, 3)
        assert engine.sub_dem(4, 5) is engine.sub_dem(4, 2)

    def test_escalation(self, dem6):
        engine = WindowEngine(dem6, WindowConfig(3, 1, 6), BpLsdDecoder())
        residual = np.zeros(dem6.n_detectors, dtype=np.uint8)
        first, last = engine.spans[0], engine.spans[-1]
        bigger = engine.escalation(first, residual)(5)
        assert bigger.round_range == (0, 5)
        assert bigger.commit_range == first.commit_range
        assert engine.escalation(last, residual)(5) is None

    def test_module_level_decode_stream(self, dem6):
        cfg = WindowConfig(3, 1, 6)
        syndrome, _ = sample_shot(dem6, 11)
        a = decode_stream(dem6, syndrome, cfg, BpLsdDecoder())
        b = WindowEngine(dem6, cfg, BpLsdDecoder()).decode_stream(syndrome)
        assert a[0].tolist() == b[0].tolist()
        assert [r.committed_correction for r in a[1]] == [r.committed_correction for r in b[1]]

    def test_fixed_windows_are_scored(self, dem4):
        error = bitvector(dem4.n_faults, [27])
        syndrome = dem4.syndrome_of(error)
        _, records = WindowEngine(dem4, WindowConfig(3, 1, 4), BpLsdDecoder()).decode_stream(
            syndrome
        )
        assert records[1].q_value > 0.0
        assert records[1].q_value == pytest.approx(q_metric(records[1].stats, 2.0))

    def test_q_config_sets_alpha(self, dem4):
        syndrome = dem4.syndrome_of(bitvector(dem4.n_faults, [27, 40]))
        cfg = WindowConfig(4, 1, 4)
        _, plain = WindowEngine(dem4, cfg, BpLsdDecoder()).decode_stream(syndrome)
        _, cubic = WindowEngine(dem4, cfg, BpLsdDecoder(), q_config=QConfig(3.0)).decode_stream(
            syndrome
        )
        assert cubic[0].q_value == pytest.approx(q_metric(cubic[0].stats, 3.0))
        assert cubic[0].q_value <= plain[0].q_value

    def test_module_level_decode_stream_scores_windows(self, dem6):
        syndrome, _ = sample_shot(dem6, 11)
        _, records = decode_stream(dem6, syndrome, WindowConfig(3, 1, 6), BpLsdDecoder())
        assert [r.q_value for r in records] == [q_metric(r.stats, 2.0) for r in records]

    def test_warm_prepares_every_window(self, dem6):
        engine = WindowEngine(dem6, WindowConfig(3, 1, 6), BpLsdDecoder())
        # Starts 0..3 at size 3, plus 0+5, 1+5 and 2+4 (clamped); 3 stays at 3.
        assert engine.warm([5]) == 7
        graphs = [tanner_graph(engine.sub_dem(s.start, s.size).dem) for s in engine.spans]
        syndrome, _ = sample_shot(dem6, 4)
        engine.decode_stream(syndrome)
        assert engine.warm([5]) == 7
        assert all(
            tanner_graph(engine.sub_dem(s.start, s.size).dem) is g
            for s, g in zip(engine.spans, graphs)
        )

    def test_threaded_decoding_shares_the_cache(self, dem6):
        engine = WindowEngine(dem6, WindowConfig(3, 1, 6), BpLsdDecoder())
        syndromes = [sample_shot(dem6, seed)[0] for seed in range(8)]
        with ThreadPoolExecutor(max_workers=4) as pool:
            threaded = list(pool.map(lambda s: engine.decode_stream(s)[0].tolist(), syndromes))
        serial = [engine.decode_stream(s)[0].tolist() for s in syndromes]
        assert threaded == serial
        assert engine.warm() == len(engine.spans)
