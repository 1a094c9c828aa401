from math import cos, pi, sin

import numpy as np
import pytest

from spintomo import kernel
from spintomo.kernel import (
    KernelPoint,
    closed_kernel_report,
    closed_kernel_terms,
    dual_kernels,
    kernel_pair_to_qudit,
    kernel_qudit_to_pair,
    kernel_qudit_to_pair_closed,
    map_qudit_to_two_qubit,
    map_state_qudit_to_two_qubit,
    map_state_two_qubit_to_qudit,
    map_two_qubit_to_qudit,
)
from spintomo.frames import (
    FramePoint2Q,
    FramePointQudit,
    QUDIT_PROJECTIONS,
    TWO_QUBIT_PROJECTIONS,
    make_grid,
    quantizer_2q,
    tomogram,
    tomogram_evaluator,
)
from spintomo.matcore import BASIS_QUDIT, BASIS_TWO_QUBIT, random_density, werner
from spintomo.su2 import EulerAngles


def rand_angles(rng):
    return EulerAngles(rng.uniform(0, 2 * pi), rng.uniform(0, pi))


def rand_kernel_point(rng):
    return KernelPoint(
        m=QUDIT_PROJECTIONS[rng.integers(4)],
        m1=TWO_QUBIT_PROJECTIONS[rng.integers(2)],
        m2=TWO_QUBIT_PROJECTIONS[rng.integers(2)],
        qudit=rand_angles(rng),
        qubit1=rand_angles(rng),
        qubit2=rand_angles(rng),
    )


def rand_two_qubit_target(rng):
    return FramePoint2Q(
        TWO_QUBIT_PROJECTIONS[rng.integers(2)],
        TWO_QUBIT_PROJECTIONS[rng.integers(2)],
        rand_angles(rng), rand_angles(rng),
    )


class TestKernelSanity:
    def test_flat_tomogram_maps_to_flat(self, grid_single):
        rng = np.random.default_rng(40)
        for _ in range(5):
            target = rand_two_qubit_target(rng)
            got = map_qudit_to_two_qubit(lambda m, n: 0.25, grid_single, target)
            assert got == pytest.approx(0.25, abs=1e-12)

    def test_flat_tomogram_reverse(self, grid_pair):
        rng = np.random.default_rng(41)
        target = FramePointQudit(QUDIT_PROJECTIONS[rng.integers(4)], rand_angles(rng))
        got = map_two_qubit_to_qudit(lambda m1, m2, n1, n2: 0.25, grid_pair, target)
        assert got == pytest.approx(0.25, abs=1e-12)

    def test_kernel_sum_rule(self, grid_single):
        # sum over m, integral over the sphere of the kernel = Tr U_pair = 1
        rng = np.random.default_rng(42)
        target = rand_two_qubit_target(rng)
        alpha = grid_single.sphere_alpha()
        beta = grid_single.sphere_beta()
        w = grid_single.sphere_weights()
        total = 0.0
        for m in QUDIT_PROJECTIONS:
            for a, b, wt in zip(alpha, beta, w):
                point = KernelPoint(m, target.m1, target.m2, EulerAngles(a, b),
                                    target.n1, target.n2)
                total += wt * kernel_qudit_to_pair(point)
        assert total.real == pytest.approx(1.0, abs=1e-10)
        assert abs(total.imag) < 1e-10

    def test_reverse_kernel_gamma_independent(self):
        rng = np.random.default_rng(43)
        base = None
        a, b = rng.uniform(0, 2 * pi), rng.uniform(0, pi)
        pair = (rand_angles(rng), rand_angles(rng))
        for gamma in np.linspace(0, 2 * pi, 10):
            point = KernelPoint(0.5, 0.5, -0.5, EulerAngles(a, b, gamma), *pair)
            val = kernel_pair_to_qudit(point)
            if base is None:
                base = val
            assert val == pytest.approx(base, abs=1e-12)


class TestWernerMapping:
    def test_qudit_to_pair_matches_closed_form(self, grid_single):
        rng = np.random.default_rng(44)
        for p in (-1 / 3, 0.0, 0.6, 1.0):
            rho = werner(p)
            w_fn = tomogram_evaluator(rho, BASIS_QUDIT)
            for _ in range(5):
                target = rand_two_qubit_target(rng)
                got = map_qudit_to_two_qubit(w_fn, grid_single, target)
                th1, ph1 = target.n1.polar, target.n1.azimuth
                th2, ph2 = target.n2.polar, target.n2.azimuth
                want = 0.25 + p * target.m1 * target.m2 * (
                    cos(th1) * cos(th2) + sin(th1) * sin(th2) * cos(ph1 + ph2))
                assert got == pytest.approx(want, abs=1e-10)
                assert got == pytest.approx(tomogram(rho.mat, target), abs=1e-10)

    def test_north_pole_value(self, grid_single):
        rho = werner(0.5)
        target = FramePoint2Q(0.5, 0.5, EulerAngles(0, 0), EulerAngles(0, 0))
        got = map_state_qudit_to_two_qubit(rho, grid_single, target)
        assert got == pytest.approx(0.375, abs=1e-10)

    def test_pair_to_qudit_beta_zero(self, grid_pair):
        for p in (-1 / 3, 0.0, 0.5, 1.0):
            got = map_state_two_qubit_to_qudit(
                werner(p), grid_pair, FramePointQudit(1.5, EulerAngles(0.3, 0.0)))
            assert got == pytest.approx((1 + p) / 4, abs=1e-10)

    def test_round_trip_qudit_to_pair_to_qudit(self, grid_single, grid_pair):
        rng = np.random.default_rng(45)
        rho = werner(0.8)
        for _ in range(2):
            qtarget = FramePointQudit(QUDIT_PROJECTIONS[rng.integers(4)], rand_angles(rng))
            # mapped two-qubit tomogram fed into the reverse map
            omega = lambda m1, m2, n1, n2: map_state_qudit_to_two_qubit(
                rho, grid_single, FramePoint2Q(m1, m2, n1, n2))
            via_pair = map_two_qubit_to_qudit(omega, grid_pair, qtarget)
            assert via_pair == pytest.approx(tomogram(rho.mat, qtarget), abs=1e-8)


class TestIntertwiningOnRandomStates:
    def test_forward(self, grid_single):
        rng = np.random.default_rng(46)
        for seed in range(10):
            rho = random_density(4, 4000 + seed)
            target = rand_two_qubit_target(rng)
            mapped = map_state_qudit_to_two_qubit(rho, grid_single, target)
            assert mapped == pytest.approx(tomogram(rho.mat, target), abs=1e-8)

    def test_reverse(self, grid_pair):
        rng = np.random.default_rng(47)
        for seed in range(10):
            rho = random_density(4, 5000 + seed)
            target = FramePointQudit(QUDIT_PROJECTIONS[rng.integers(4)], rand_angles(rng))
            mapped = map_state_two_qubit_to_qudit(rho, grid_pair, target)
            assert mapped == pytest.approx(tomogram(rho.mat, target), abs=1e-8)

    def test_evaluator_and_state_paths_agree(self, grid_single):
        rng = np.random.default_rng(48)
        rho = random_density(4, 51)
        target = rand_two_qubit_target(rng)
        slow = map_qudit_to_two_qubit(tomogram_evaluator(rho, BASIS_QUDIT),
                                      grid_single, target)
        fast = map_state_qudit_to_two_qubit(rho, grid_single, target)
        assert slow == pytest.approx(fast, abs=1e-13)

    def test_linearity_in_the_tomogram(self, grid_single):
        rng = np.random.default_rng(49)
        target = rand_two_qubit_target(rng)
        lam = 0.3
        w_a = tomogram_evaluator(werner(0.9), BASIS_QUDIT)
        w_b = tomogram_evaluator(werner(-0.2), BASIS_QUDIT)
        mix = lambda m, n: lam * w_a(m, n) + (1 - lam) * w_b(m, n)
        got = map_qudit_to_two_qubit(mix, grid_single, target)
        want = (lam * map_qudit_to_two_qubit(w_a, grid_single, target)
                + (1 - lam) * map_qudit_to_two_qubit(w_b, grid_single, target))
        assert got == pytest.approx(want, abs=1e-12)

    def test_coarse_grid_rejected(self):
        grid = make_grid(2, 2, spheres=1, enforce_minimum=False)
        with pytest.raises(ValueError):
            map_qudit_to_two_qubit(lambda m, n: 0.25, grid,
                                   FramePoint2Q(0.5, 0.5, EulerAngles(0, 0), EulerAngles(0, 0)))


class TestDualKernels:
    def test_components_are_the_swapped_kernels(self):
        rng = np.random.default_rng(50)
        point = rand_kernel_point(rng)
        first, second = dual_kernels(point)
        assert first == kernel_pair_to_qudit(point)
        assert second == kernel_qudit_to_pair(point)

    def test_dual_transport_qudit_to_pair(self, grid_single):
        # dual symbols move with the swapped kernel: integrating the qudit
        # dual symbol against the pair->qudit kernel yields the two-qubit
        # dual symbol Tr(rho * quantizer_2q)
        from spintomo.frames import quantizer_qudit

        rng = np.random.default_rng(51)
        rho = werner(0.5).mat
        alpha = grid_single.sphere_alpha()
        beta = grid_single.sphere_beta()
        w = grid_single.sphere_weights()
        for _ in range(3):
            target = rand_two_qubit_target(rng)
            total = 0.0
            for m in QUDIT_PROJECTIONS:
                for a, b, wt in zip(alpha, beta, w):
                    qp = FramePointQudit(m, EulerAngles(a, b))
                    w_dual = np.trace(rho @ quantizer_qudit(qp))
                    k = kernel_pair_to_qudit(KernelPoint(m, target.m1, target.m2,
                                                         EulerAngles(a, b),
                                                         target.n1, target.n2))
                    total += wt * w_dual * k
            want = np.trace(rho @ quantizer_2q(target))
            assert total.real == pytest.approx(want.real, abs=1e-8)
            assert abs(total.imag) < 1e-8

    def test_dual_transport_pair_to_qudit(self, grid_pair):
        # reverse direction: the two-qubit dual symbol of rho, integrated
        # against the qudit->pair kernel Tr(D_qudit U_pair), reproduces the
        # qudit dual symbol Tr(rho * quantizer_qudit). The kernel sum over
        # the pair grid is exactly the two-qubit frame pairing of the qudit
        # quantizer (symbol side) with rho (dual-symbol side).
        from spintomo.frames import frame_pairing_two_qubit, quantizer_qudit

        rng = np.random.default_rng(52)
        rho = werner(0.5).mat
        for _ in range(3):
            qtarget = FramePointQudit(QUDIT_PROJECTIONS[rng.integers(4)], rand_angles(rng))
            q_op = quantizer_qudit(qtarget)
            got = frame_pairing_two_qubit(q_op, rho, grid_pair)
            want = np.trace(rho @ q_op)
            assert got.real == pytest.approx(want.real, abs=1e-8)
            assert abs(got.imag) < 1e-8


class TestClosedFormKernel:
    def test_constant_term(self):
        rng = np.random.default_rng(53)
        point = rand_kernel_point(rng)
        terms = closed_kernel_terms(point)
        assert terms["constant"] == 0.25
        # zeroing every projection-dependent term by hand leaves the constant
        others = sum(v for k, v in terms.items() if k != "constant")
        assert kernel_qudit_to_pair_closed(point) == pytest.approx(0.25 + others)

    def test_finite_at_beta_zero(self):
        rng = np.random.default_rng(54)
        for _ in range(5):
            point = KernelPoint(
                QUDIT_PROJECTIONS[rng.integers(4)], 0.5, -0.5,
                EulerAngles(rng.uniform(0, 2 * pi), 0.0),
                rand_angles(rng), rand_angles(rng))
            at_zero = kernel_qudit_to_pair_closed(point)
            near = KernelPoint(point.m, point.m1, point.m2,
                               EulerAngles(point.qudit.azimuth, 1e-8),
                               point.qubit1, point.qubit2)
            assert np.isfinite(at_zero.real) and np.isfinite(at_zero.imag)
            assert abs(kernel_qudit_to_pair_closed(near) - at_zero) < 1e-6

    def test_cross_check_or_discrepancy_report(self, grid_single):
        report = closed_kernel_report(grid_single, n_points=20, seed=99)
        if report.agrees:
            rng = np.random.default_rng(55)
            for _ in range(20):
                point = rand_kernel_point(rng)
                assert kernel_qudit_to_pair_closed(point, report.best_reading) \
                    == pytest.approx(kernel_qudit_to_pair(point) * 8 * pi**2, abs=1e-10)
        else:
            stats = report.reading_stats[report.best_reading]
            assert stats["max_abs_deviation_measure_normalized"] > report.tolerance
            assert set(report.term_max_abs) == {
                "constant", "linear_group", "bracket_polar", "bracket_projections",
                "bracket_mixed", "bracket_double_azimuth"}
            assert len(report.notes) >= 1

    def test_report_serializable(self, grid_single):
        import json
        json.dumps(closed_kernel_report(grid_single, n_points=5, seed=1).as_dict())
