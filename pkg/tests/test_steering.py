from math import pi, sqrt

import numpy as np
import pytest

from spintomo import steering
from spintomo.steering import (
    NOTE_WERNER_DOMAIN,
    VARIANT_DUAL_SYMBOL,
    VARIANT_SYMBOL_DUAL,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    chsh_max,
    chsh_value,
    correlation_direct,
    correlation_tensor,
    correlation_tomographic_qudit,
    correlation_tomographic_two_qubit,
    max_correlation,
    max_correlation_grid,
    observable_first,
    observable_second,
    product_observable,
    sphere_directions,
    steering_check,
    werner_report,
)
from spintomo.matcore import random_density, werner

from test_matcore import observable_matrix_reference


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


class TestObservables:
    def test_z_axis_layouts(self):
        np.testing.assert_array_equal(observable_first(Z_AXIS), np.diag([1, 1, -1, -1]))
        np.testing.assert_array_equal(observable_second(Z_AXIS), np.diag([1, -1, 1, -1]))
        np.testing.assert_array_equal(product_observable(Z_AXIS, Z_AXIS).product,
                                      np.diag([1, -1, -1, 1]))

    def test_single_side_printed_layout(self):
        rng = np.random.default_rng(60)
        k1x, k1y, k1z = k1 = random_unit(rng)
        got = observable_first(k1)
        want = np.array([
            [k1z, 0, k1x - 1j * k1y, 0],
            [0, k1z, 0, k1x - 1j * k1y],
            [k1x + 1j * k1y, 0, -k1z, 0],
            [0, k1x + 1j * k1y, 0, -k1z],
        ])
        np.testing.assert_allclose(got, want, atol=1e-15)
        k2x, k2y, k2z = k2 = random_unit(rng)
        got = observable_second(k2)
        want = np.array([
            [k2z, k2x - 1j * k2y, 0, 0],
            [k2x + 1j * k2y, -k2z, 0, 0],
            [0, 0, k2z, k2x - 1j * k2y],
            [0, 0, k2x + 1j * k2y, -k2z],
        ])
        np.testing.assert_allclose(got, want, atol=1e-15)

    def test_product_matches_entrywise_layout(self):
        rng = np.random.default_rng(61)
        for _ in range(10):
            k1, k2 = random_unit(rng), random_unit(rng)
            triple = product_observable(k1, k2)
            np.testing.assert_allclose(triple.product,
                                       observable_matrix_reference(k1, k2), atol=1e-14)

    def test_commute_and_factor(self):
        rng = np.random.default_rng(62)
        for _ in range(10):
            triple = product_observable(random_unit(rng), random_unit(rng))
            comm = triple.first @ triple.second - triple.second @ triple.first
            assert np.abs(comm).max() < 1e-14
            np.testing.assert_allclose(triple.product, triple.first @ triple.second,
                                       atol=1e-14)

    def test_squares_to_identity_and_pm_one_spectrum(self):
        rng = np.random.default_rng(63)
        for _ in range(10):
            triple = product_observable(random_unit(rng), random_unit(rng))
            np.testing.assert_allclose(triple.first @ triple.first, np.eye(4), atol=1e-14)
            vals = np.sort(np.linalg.eigvalsh(triple.product))
            np.testing.assert_allclose(vals, [-1, -1, 1, 1], atol=1e-12)

    def test_non_unit_direction_rejected(self):
        with pytest.raises(ValueError):
            observable_first([0, 0, 1.0 + 1e-6])


class TestCorrelationDirect:
    def test_werner_zz(self):
        for p in (-1 / 3, 0.0, 0.4, 1.0):
            assert correlation_direct(werner(p).mat, Z_AXIS, Z_AXIS) \
                == pytest.approx(p, abs=1e-14)

    def test_werner_yy_is_minus_p(self):
        assert correlation_direct(werner(0.6).mat, Y_AXIS, Y_AXIS) \
            == pytest.approx(-0.6, abs=1e-14)

    def test_maximally_mixed_vanishes(self):
        rng = np.random.default_rng(64)
        for _ in range(5):
            assert correlation_direct(np.eye(4) / 4, random_unit(rng), random_unit(rng)) \
                == pytest.approx(0.0, abs=1e-15)

    def test_bounded_by_one(self):
        rng = np.random.default_rng(65)
        for seed in range(20):
            rho = random_density(4, 6000 + seed).mat
            e = correlation_direct(rho, random_unit(rng), random_unit(rng))
            assert abs(e) <= 1 + 1e-12


class TestCorrelationTomographic:
    def test_werner_equivalence(self, grid_single, grid_pair):
        rho = werner(0.4).mat
        want = 0.4
        assert correlation_tomographic_two_qubit(rho, Z_AXIS, Z_AXIS, grid_pair,
                                                 VARIANT_SYMBOL_DUAL) \
            == pytest.approx(want, abs=1e-8)
        assert correlation_tomographic_two_qubit(rho, Z_AXIS, Z_AXIS, grid_pair,
                                                 VARIANT_DUAL_SYMBOL) \
            == pytest.approx(want, abs=1e-8)
        assert correlation_tomographic_qudit(rho, Z_AXIS, Z_AXIS, grid_single) \
            == pytest.approx(want, abs=1e-8)

    def test_random_states_all_forms_agree(self, grid_single, grid_pair):
        rng = np.random.default_rng(66)
        for seed in range(15):
            rho = random_density(4, 7000 + seed).mat
            k1, k2 = random_unit(rng), random_unit(rng)
            direct = correlation_direct(rho, k1, k2)
            for variant in (VARIANT_SYMBOL_DUAL, VARIANT_DUAL_SYMBOL):
                got = correlation_tomographic_two_qubit(rho, k1, k2, grid_pair, variant)
                assert got == pytest.approx(direct, abs=1e-8)
            got = correlation_tomographic_qudit(rho, k1, k2, grid_single)
            assert got == pytest.approx(direct, abs=1e-8)

    def test_maximally_mixed(self, grid_pair):
        got = correlation_tomographic_two_qubit(np.eye(4) / 4, X_AXIS, Z_AXIS, grid_pair)
        assert got == pytest.approx(0.0, abs=1e-10)

    def test_unknown_variant(self, grid_pair):
        with pytest.raises(ValueError):
            correlation_tomographic_two_qubit(werner(0.1).mat, Z_AXIS, Z_AXIS,
                                              grid_pair, variant="bogus")


class TestCorrelationTensor:
    def test_werner_diagonal(self):
        for p in (-1 / 3, 0.0, 0.5, 1.0):
            np.testing.assert_allclose(correlation_tensor(werner(p).mat),
                                       np.diag([p, -p, p]), atol=1e-14)

    def test_maximally_mixed_zero(self):
        np.testing.assert_allclose(correlation_tensor(np.eye(4) / 4), np.zeros((3, 3)),
                                   atol=1e-15)

    def test_bilinear_identity(self):
        rng = np.random.default_rng(67)
        for seed in range(5):
            rho = random_density(4, 8000 + seed).mat
            t = correlation_tensor(rho)
            for _ in range(4):
                k1, k2 = random_unit(rng), random_unit(rng)
                assert k1 @ t @ k2 == pytest.approx(correlation_direct(rho, k1, k2),
                                                    abs=1e-12)

    def test_entries_bounded(self):
        for seed in range(10):
            t = correlation_tensor(random_density(4, 8100 + seed).mat)
            assert np.abs(t).max() <= 1 + 1e-12


class TestMaxCorrelation:
    def test_werner_tensor(self):
        value, k1, k2 = max_correlation(np.diag([0.4, -0.4, 0.4]))
        assert value == pytest.approx(0.4, abs=1e-14)
        # grid-search oracle
        assert max_correlation_grid(np.diag([0.4, -0.4, 0.4])) \
            == pytest.approx(0.4, abs=1e-3)

    def test_zero_tensor(self):
        value, k1, k2 = max_correlation(np.zeros((3, 3)))
        assert value == 0.0
        assert np.linalg.norm(k1) == pytest.approx(1.0)

    def test_degenerate_tie_break_is_lexicographic(self):
        value, k1, k2 = max_correlation(np.diag([1.0, -1.0, 1.0]))
        assert value == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(k1, X_AXIS, atol=1e-12)
        np.testing.assert_allclose(k2, X_AXIS, atol=1e-12)

    def test_matches_brute_force_on_random_tensors(self):
        rng = np.random.default_rng(68)
        dirs = sphere_directions()
        for _ in range(10):
            t = rng.uniform(-1, 1, (3, 3))
            value, k1, k2 = max_correlation(t)
            # SVD value dominates every grid pair and is attained at (k1, k2)
            grid_best = (dirs @ t @ dirs.T).max()
            assert value >= grid_best - 1e-12
            assert k1 @ t @ k2 == pytest.approx(value, abs=1e-12)
            assert value == pytest.approx(max_correlation_grid(t), abs=1e-9)

    def test_scaling_invariance_of_argmax(self):
        t = np.diag([0.3, -0.2, 0.1])
        v1, k1a, k2a = max_correlation(t)
        v2, k1b, k2b = max_correlation(2.5 * t)
        assert v2 == pytest.approx(2.5 * v1, abs=1e-14)
        np.testing.assert_allclose(k1a, k1b, atol=1e-12)
        np.testing.assert_allclose(k2a, k2b, atol=1e-12)


class TestChsh:
    def test_maximally_mixed_is_zero(self):
        rng = np.random.default_rng(69)
        dirs = [random_unit(rng) for _ in range(4)]
        assert chsh_value(np.eye(4) / 4, *dirs) == pytest.approx(0.0, abs=1e-14)

    def test_canonical_quadruple_saturates(self):
        b = np.array([1, 0, 1]) / sqrt(2)
        c = np.array([1, 0, -1]) / sqrt(2)
        got = chsh_value(werner(1.0).mat, X_AXIS, b, c, Z_AXIS)
        assert got == pytest.approx(2 * sqrt(2), abs=1e-12)

    def test_werner_maximum_scales_with_p(self):
        for p in (-1 / 3, 0.2, 0.5, 1 / sqrt(2), 1.0):
            result = chsh_max(werner(p).mat)
            assert result.value == pytest.approx(2 * sqrt(2) * abs(p), abs=1e-3)
            # the SVD candidate and the refined grid search cross-validate
            assert result.candidate_value == pytest.approx(result.value, abs=1e-9)

    def test_separable_werner_respects_classical_bound(self):
        for p in (-1 / 3, 0.1, 1 / 3):
            assert chsh_max(werner(p).mat).value <= 2 + 1e-6

    def test_achieved_by_its_own_directions(self):
        result = chsh_max(werner(0.8).mat)
        dirs = [np.array(result.directions[k]) for k in "abcd"]
        assert chsh_value(werner(0.8).mat, *dirs) == pytest.approx(result.value, abs=1e-9)

    def test_product_states_respect_classical_bound(self):
        for seed in range(20):
            rho = np.kron(random_density(2, seed).mat, random_density(2, 100 + seed).mat)
            assert chsh_max(rho).value <= 2 + 1e-6

    def test_werner_one_violates_classical_bound(self):
        result = chsh_max(werner(1.0).mat)
        assert result.value > 2
        assert result.value == pytest.approx(2 * sqrt(2), abs=1e-3)


class TestSteeringCheck:
    def test_werner_04(self, grid_single, grid_pair):
        report = steering_check(werner(0.4).mat, grid_pair=grid_pair,
                                grid_single=grid_single, p=0.4)
        assert report.lhs == pytest.approx(0.4, abs=1e-10)
        assert report.rhs_all_entries == pytest.approx(2 / 3 * 0.4, abs=1e-12)
        assert report.rhs_diagonal == pytest.approx(2 / 3 * 0.4, abs=1e-12)
        assert report.inequality_holds
        assert report.chsh_max == pytest.approx(2 * sqrt(2) * 0.4, abs=1e-3)
        assert not report.bell_violated

    def test_werner_zero_equality(self, grid_single, grid_pair):
        report = steering_check(werner(0.0).mat, grid_pair=grid_pair,
                                grid_single=grid_single)
        assert report.lhs == pytest.approx(0.0, abs=1e-14)
        assert report.rhs_all_entries == pytest.approx(0.0, abs=1e-14)
        assert report.inequality_holds

    def test_werner_one_bell_violation(self, grid_single, grid_pair):
        report = steering_check(werner(1.0).mat, grid_pair=grid_pair,
                                grid_single=grid_single)
        assert report.bell_violated
        assert report.chsh_max == pytest.approx(2 * sqrt(2), abs=1e-3)

    def test_lhs_dominates_every_entry(self):
        for seed in range(10):
            rho = random_density(4, 8200 + seed).mat
            report = steering_check(rho)
            t = correlation_tensor(rho)
            assert report.lhs >= np.abs(t).max() - 1e-12

    def test_report_dict_schema(self, grid_single, grid_pair):
        report = steering_check(werner(0.5).mat, grid_pair=grid_pair,
                                grid_single=grid_single, p=0.5)
        d = report.as_dict()
        for key in ("p", "tensor", "lhs", "rhs_all_entries", "rhs_diagonal",
                    "inequality_holds", "chsh_max", "bell_violated",
                    "correlation_forms", "max_directions", "notes"):
            assert key in d
        assert set(d["correlation_forms"]) == {"direct", "tomo_2q_a", "tomo_2q_b",
                                               "tomo_qudit"}


class TestWernerReport:
    def test_p_04_aggregates(self, grid_single, grid_pair):
        report = werner_report(0.4, grid_pair, grid_single, n_spot_points=3)
        assert report.correlation_zz == pytest.approx(0.4, abs=1e-12)
        assert report.correlation_form_spread < 1e-8
        assert report.tomogram_spot_checks["qudit_closed_form_max_dev"] < 1e-10
        assert report.tomogram_spot_checks["two_qubit_closed_form_max_dev"] < 1e-10
        assert report.kernel_mapping_residual["qudit_to_two_qubit"] < 1e-8
        assert report.kernel_mapping_residual["two_qubit_to_qudit"] < 1e-8
        assert NOTE_WERNER_DOMAIN in report.notes

    def test_entangled_flag_values(self, grid_single, grid_pair):
        report = werner_report(1.0, grid_pair, grid_single, n_spot_points=2)
        assert report.steering.bell_violated
        assert report.steering.chsh_max > 2

    def test_zero_parameter_trivial(self, grid_single, grid_pair):
        report = werner_report(0.0, grid_pair, grid_single, n_spot_points=2)
        assert report.correlation_zz == pytest.approx(0.0, abs=1e-14)
        assert report.steering.lhs == pytest.approx(0.0, abs=1e-14)
        assert report.steering.chsh_max == pytest.approx(0.0, abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            werner_report(1.5)

    def test_serializable(self, grid_single, grid_pair):
        import json
        json.dumps(werner_report(0.3, grid_pair, grid_single, n_spot_points=2).as_dict())
