"""Tests for BP, LSD and the exhaustive oracle."""

import numpy as np
import pytest

from adawin.codes import (
    DetectorModel,
    NoiseModelSpec,
    build_code_capacity_dem,
    build_memory_dem,
    build_repetition,
    build_toric,
    sample_shot,
)
from adawin.decoders import (
    MAX_ORACLE_FAULTS,
    BpConfig,
    BpLsdDecoder,
    BpResult,
    ClusterStats,
    bp_decode,
    cluster_weight,
    committed_cluster_carryover,
    lsd_decode,
    oracle_decode,
)
from adawin.errors import DecodingError, DimensionError
from adawin.gf2 import SparseBitMatrix, bitvector


@pytest.fixture(scope="module")
def rep3():
    return build_code_capacity_dem(build_repetition(3), 'Z', 0.1)


@pytest.fixture(scope="module")
def rep7():
    return build_code_capacity_dem(build_repetition(7), 'Z', 0.05)


@pytest.fixture(scope="module")
def toric_memory():
    return build_memory_dem(build_toric(3), 'Z', 3, NoiseModelSpec('depolarizing', 0.02))


def _converged(dem, faults):
    """A converged BpResult whose hard decision is the given fault set."""
    e = bitvector(dem.n_faults, faults)
    return dem.syndrome_of(e), BpResult(dem.weights.copy(), e, True, 1)


class TestBpConfig:
    """Tests for BP settings."""

    def test_defaults(self):
        cfg = BpConfig()
        assert cfg.max_iterations == 30
        assert cfg.scaling_factor == 0.625
        assert cfg.parallel_schedule

    @pytest.mark.parametrize("kwargs", [{'max_iterations': 0}, {'scaling_factor': 0.0},
                                        {'scaling_factor': 1.5}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            BpConfig(**kwargs)


class TestBpDecode:
    """Tests for min-sum BP."""

    @pytest.mark.parametrize("parallel", [True, False])
    def test_zero_syndrome(self, rep3, parallel):
        result = bp_decode(rep3, [0, 0], BpConfig(parallel_schedule=parallel))
        assert result.converged
        assert result.iterations_used == 1
        assert not result.hard_decision.any()
        assert np.all(result.posterior_llrs > 0)

    @pytest.mark.parametrize("parallel", [True, False])
    def test_boundary_defect(self, rep3, parallel):
        """A defect on the first check is explained by the end qubit."""
        result = bp_decode(rep3, [1, 0], BpConfig(parallel_schedule=parallel))
        assert result.converged
        assert result.hard_decision.tolist() == [1, 0, 0]
        assert result.posterior_llrs[0] < 0

    def test_iteration_budget(self, rep3):
        result = bp_decode(rep3, [1, 0], BpConfig(max_iterations=1))
        assert not result.converged
        assert result.iterations_used == 1

    def test_length_mismatch(self, rep3):
        with pytest.raises(DimensionError):
            bp_decode(rep3, [1, 0, 0])

    def test_converged_means_syndrome_matches(self, toric_memory):
        for seed in range(20):
            syndrome, _ = sample_shot(toric_memory, seed)
            result = bp_decode(toric_memory, syndrome)
            if result.converged:
                assert np.array_equal(toric_memory.syndrome_of(result.hard_decision), syndrome)


class TestLsdDecode:
    """Tests for LSD_0 post-processing."""

    def test_zero_syndrome(self, rep3):
        correction, stats = lsd_decode(rep3, [0, 0], bp_decode(rep3, [0, 0]))
        assert not correction.any()
        assert stats.cluster_count == 0
        assert stats.total_weight == pytest.approx(rep3.total_weight)

    def test_growth_after_failed_bp(self, rep3):
        bp = bp_decode(rep3, [1, 0], BpConfig(max_iterations=1))
        correction, stats = lsd_decode(rep3, [1, 0], bp)
        assert correction.tolist() == [1, 0, 0]
        assert stats.from_growth
        assert stats.cluster_count == 1
        assert stats.clusters[0].llr_weight == pytest.approx(np.log(9.0))

    def test_components_of_converged_solution(self, rep7):
        syndrome, bp = _converged(rep7, [1, 5])
        correction, stats = lsd_decode(rep7, syndrome, bp)
        assert correction.tolist() == bp.hard_decision.tolist()
        assert not stats.from_growth
        assert sorted(c.fault_set for c in stats.clusters) == [(1,), (5,)]

    def test_adjacent_faults_share_a_component(self, rep7):
        syndrome, bp = _converged(rep7, [1, 2])
        _, stats = lsd_decode(rep7, syndrome, bp)
        assert stats.cluster_count == 1
        assert stats.clusters[0].detector_set == (0, 1, 2)

    def test_unsolvable_syndrome(self):
        # One fault flipping both detectors cannot explain a single defect.
        dem = DetectorModel(
            h=SparseBitMatrix(2, 1, [(0, 0), (1, 0)]),
            priors=np.array([0.1]),
            observables=SparseBitMatrix(0, 1),
            round_of_detector=np.zeros(2, dtype=np.int64),
            rounds=1,
        )
        with pytest.raises(DecodingError):
            lsd_decode(dem, [1, 0], bp_decode(dem, [1, 0]))

    def test_bad_weight_mode(self, rep3):
        with pytest.raises(ValueError):
            lsd_decode(rep3, [0, 0], bp_decode(rep3, [0, 0]), weight_mode='size')

    def test_reproduces_sampled_syndromes(self, toric_memory):
        decoder = BpLsdDecoder(BpConfig(max_iterations=3))
        for seed in range(40):
            syndrome, _ = sample_shot(toric_memory, seed)
            result = decoder(toric_memory, syndrome)
            assert np.array_equal(toric_memory.syndrome_of(result.correction), syndrome)
            faults = [f for c in result.stats.clusters for f in c.fault_set]
            assert len(faults) == len(set(faults))

    def test_serial_schedule_decoder(self, toric_memory):
        decoder = BpLsdDecoder(BpConfig(parallel_schedule=False, max_iterations=5))
        syndrome, _ = sample_shot(toric_memory, 3)
        result = decoder(toric_memory, syndrome)
        assert np.array_equal(toric_memory.syndrome_of(result.correction), syndrome)


class TestClusterWeights:
    """Tests for cluster weight modes and commit carry-over."""

    def test_solution_mode(self):
        w = np.array([1.0, 2.0, 4.0])
        assert cluster_weight(w, np.array([1, 0, 1], dtype=np.uint8), 'solution') == 5.0

    def test_membership_mode(self):
        w = np.array([1.0, 2.0, 4.0])
        assert cluster_weight(w, np.array([1, 0, 1], dtype=np.uint8), 'membership') == 7.0

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            cluster_weight(np.ones(1), np.ones(1, dtype=np.uint8), 'other')

    def test_carryover_restricts_to_commit_region(self, rep7):
        syndrome, bp = _converged(rep7, [1, 2, 5])
        _, stats = lsd_decode(rep7, syndrome, bp)
        mask = bitvector(rep7.n_faults, [0, 1, 2])
        carried = committed_cluster_carryover(stats, mask)
        assert [c.fault_set for c in carried.clusters] == [(1, 2)]
        assert all(c.carried for c in carried.clusters)
        assert carried.clusters[0].llr_weight == pytest.approx(2 * rep7.weights[0])

    def test_carryover_partial_cluster(self, rep7):
        syndrome, bp = _converged(rep7, [1, 2])
        _, stats = lsd_decode(rep7, syndrome, bp)
        carried = committed_cluster_carryover(stats, bitvector(rep7.n_faults, [2]))
        assert carried.clusters[0].fault_set == (2,)

    def test_with_carryover_keeps_normaliser(self, rep7):
        syndrome, bp = _converged(rep7, [1])
        _, stats = lsd_decode(rep7, syndrome, bp)
        extra = ClusterStats(clusters=stats.clusters, total_weight=1.0)
        merged = stats.with_carryover(extra)
        assert merged.cluster_count == 2
        assert merged.total_weight == stats.total_weight


class TestOracle:
    """Tests for the exhaustive minimum-weight decoder."""

    def test_zero_syndrome(self, rep3):
        result = oracle_decode(rep3, [0, 0])
        assert not result.correction.any()
        assert result.weight == 0.0
        assert not result.ambiguous

    def test_single_fault(self, rep3):
        result = oracle_decode(rep3, [1, 0])
        assert result.correction.tolist() == [1, 0, 0]
        assert result.ties == 1
        assert result.observable_actions == frozenset({1})

    def test_middle_fault(self, rep7):
        syndrome = rep7.syndrome_of(bitvector(7, [3]))
        assert oracle_decode(rep7, syndrome).correction.tolist() == [0, 0, 0, 1, 0, 0, 0]

    def test_ties_are_counted(self):
        # Two identical faults explain the same defect.
        dem = DetectorModel(
            h=SparseBitMatrix(1, 2, [(0, 0), (0, 1)]),
            priors=np.array([0.1, 0.1]),
            observables=SparseBitMatrix(1, 2, [(0, 0)]),
            round_of_detector=np.zeros(1, dtype=np.int64),
            rounds=1,
        )
        result = oracle_decode(dem, [1])
        assert result.ties == 2
        assert result.ambiguous

    def test_too_many_faults(self, toric_memory):
        assert toric_memory.n_faults > MAX_ORACLE_FAULTS
        with pytest.raises(ValueError, match="24"):
            oracle_decode(toric_memory, np.zeros(toric_memory.n_detectors, dtype=np.uint8))

    def test_unreachable_syndrome(self):
        dem = DetectorModel(
            h=SparseBitMatrix(2, 1, [(0, 0), (1, 0)]),
            priors=np.array([0.1]),
            observables=SparseBitMatrix(0, 1),
            round_of_detector=np.zeros(2, dtype=np.int64),
            rounds=1,
        )
        with pytest.raises(DecodingError):
            oracle_decode(dem, [1, 0])

    def test_length_mismatch(self, rep3):
        with pytest.raises(DimensionError):
            oracle_decode(rep3, [1])

    def test_agrees_with_brute_force_weight(self, rep7):
        """Minimum weight equals the lighter of the two complementary solutions."""
        e = bitvector(7, [0, 1, 2, 3])
        result = oracle_decode(rep7, rep7.syndrome_of(e))
        assert result.weight == pytest.approx(3 * rep7.weights[0])
        assert result.correction.tolist() == [0, 0, 0, 0, 1, 1, 1]
