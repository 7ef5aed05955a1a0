"""Tests for code constructions, polynomials and noise models."""

import numpy as np
import pytest

from adawin.codes import (
    BB_CATALOG,
    NoiseModelSpec,
    build_bb,
    build_bb_from_strings,
    build_bb_named,
    build_repetition,
    build_toric,
    effective_rates,
    format_polynomial,
    logical_supports,
    parse_polynomial,
)
from adawin.gf2 import SparseBitMatrix, rank


def _anticommutation(xs, zs):
    return (np.array(xs, dtype=int) @ np.array(zs, dtype=int).T) % 2


class TestPolynomials:
    """Tests for BB polynomial strings."""

    def test_parse(self):
        assert parse_polynomial("x^3 + y + y^2") == [(3, 0), (0, 1), (0, 2)]

    def test_parse_constant_and_products(self):
        assert parse_polynomial("1 + x^2*y") == [(0, 0), (2, 1)]
        assert parse_polynomial("x y^3") == [(1, 3)]

    def test_parse_empty_term(self):
        with pytest.raises(ValueError):
            parse_polynomial("x + ")

    def test_parse_garbage(self):
        with pytest.raises(ValueError):
            parse_polynomial("x + z")

    def test_format(self):
        assert format_polynomial([(3, 0), (0, 1), (2, 1), (0, 0)]) == "x^3 + y + x^2*y + 1"

    def test_format_then_parse(self):
        terms = [(9, 0), (0, 1), (0, 2)]
        assert parse_polynomial(format_polynomial(terms)) == terms


class TestToricCode:
    """Tests for the toric code."""

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_parameters(self, d):
        code = build_toric(d)
        assert code.n == 2 * d * d
        assert code.k == 2
        assert code.hx.n_rows == d * d

    def test_checks_have_weight_four(self):
        code = build_toric(5)
        assert all(len(row) == 4 for row in code.hx.rows)
        assert all(len(row) == 4 for row in code.hz.rows)

    def test_every_qubit_in_two_checks(self):
        code = build_toric(3)
        assert all(len(col) == 2 for col in code.hz.cols)

    def test_logicals_pair_up(self):
        code = build_toric(5)
        assert _anticommutation(code.logical_x, code.logical_z).tolist() == [[1, 0], [0, 1]]

    def test_logicals_commute_with_checks(self):
        code = build_toric(3)
        for op in code.logical_z:
            assert not code.hx.matvec(op).any()
        for op in code.logical_x:
            assert not code.hz.matvec(op).any()

    def test_logical_weight_is_distance(self):
        assert [len(s) for s in logical_supports(build_toric(7), 'Z')] == [7, 7]

    def test_coords_and_periods(self):
        code = build_toric(3)
        assert code.periods == (3, 3)
        assert code.check_coords('Z').shape == (9, 2)

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_toric(2)

    def test_bad_basis(self):
        with pytest.raises(ValueError):
            build_toric(3).checks('Y')


class TestBivariateBicycle:
    """Tests for bivariate bicycle codes."""

    def test_gross_family_72(self):
        code = build_bb(6, 6, "x^3 + y + y^2", "y^3 + x + x^2", d=6)
        assert (code.n, code.k, code.d) == (72, 12, 6)

    def test_catalog_90(self):
        code = build_bb_named('90_8_10')
        assert (code.n, code.k) == (90, 8)

    def test_checks_commute(self):
        code = build_bb_named('72_12_6')
        assert code.hx.matmul(code.hz.transpose()).is_zero()

    def test_check_weight_six(self):
        code = build_bb_named('72_12_6')
        assert all(len(row) == 6 for row in code.hx.rows)

    def test_logicals(self):
        code = build_bb_named('72_12_6')
        assert len(code.logical_x) == len(code.logical_z) == 12
        for op in code.logical_z:
            assert not code.hx.matvec(op).any()
        # Independent modulo stabilizers: full-rank pairing.
        pairing = SparseBitMatrix.from_dense(_anticommutation(code.logical_x, code.logical_z))
        assert rank(pairing) == 12

    def test_from_strings_matches_pairs(self):
        a = build_bb_from_strings(6, 6, "x^3 + y + y^2", "y^3 + x + x^2")
        b = build_bb(6, 6, [(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)])
        assert a.hx == b.hx
        assert a.hz == b.hz

    def test_repeated_terms_cancel(self):
        code = build_bb(3, 3, "x + x + y", "1 + y")
        assert all(len(row) == 3 for row in code.hx.rows)

    def test_small_group(self):
        with pytest.raises(ValueError):
            build_bb(1, 6, "x", "y")

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            build_bb_named('1_2_3')

    def test_catalog_entries(self):
        assert set(BB_CATALOG) >= {'72_12_6', '90_8_10', '144_12_12'}


class TestRepetitionCode:
    """Tests for the repetition code."""

    def test_parameters(self):
        code = build_repetition(5)
        assert (code.n, code.k) == (5, 1)
        assert code.hz.n_rows == 4
        assert code.hx.n_rows == 0

    def test_chain(self):
        assert build_repetition(3).hz.to_dense().tolist() == [[1, 1, 0], [0, 1, 1]]

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_repetition(1)


class TestNoiseModels:
    """Tests for the noise model rate mapping."""

    def test_depolarizing(self):
        assert effective_rates(NoiseModelSpec('depolarizing', 0.01)) == (0.01, 0.01)

    def test_neutral_atom(self):
        p_data, p_meas = effective_rates(NoiseModelSpec('NA', 0.01))
        assert p_data == pytest.approx(0.011)
        assert p_meas == pytest.approx(0.011)

    def test_superconducting(self):
        p_data, p_meas = effective_rates(NoiseModelSpec('SI100', 0.001))
        assert p_data == pytest.approx(0.0031)
        assert p_meas == pytest.approx(0.007)

    def test_si100_is_noisier(self):
        na = effective_rates(NoiseModelSpec('NA', 0.002))
        si = effective_rates(NoiseModelSpec('SI100', 0.002))
        assert si[0] > na[0] and si[1] > na[1]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            NoiseModelSpec('trapped-ion', 0.01)

    @pytest.mark.parametrize("p", [0.0, 0.5, -0.1])
    def test_rate_range(self, p):
        with pytest.raises(ValueError):
            NoiseModelSpec('depolarizing', p)
