"""Harmonic-balance solver against closed forms and the time-domain oracle."""

import math

import numpy as np
import pytest

from ramanlight.atom import (AtomicSystem, DegenerateModelError, DriveConfig,
                             PumpModel, build_liouvillian, ketbra)
from ramanlight.floquet import (ConvergenceError, _assemble_banded,
                                _assemble_dense, choose_truncation,
                                extract_dc_coherences, harmonic_tail_ok,
                                integrate_to_period_average, solve_floquet,
                                steady_state_static)

SYSTEM = AtomicSystem()
PAPER_DRIVE = DriveConfig(omega_c=30.0, delta=0.2)


def liouvillian(drive=PAPER_DRIVE, rate=0.0, system=SYSTEM):
    return build_liouvillian(system, drive, PumpModel.direct(rate))


class TestBandedAssembly:
    def test_matches_dense_solution(self):
        liouv = liouvillian(rate=0.1)
        ab, rhs, half = _assemble_banded(liouv.l0, liouv.l_plus, liouv.l_minus,
                                         0.2, 3)
        import scipy.linalg
        x_banded = scipy.linalg.solve_banded((half, half), ab, rhs)
        a, b = _assemble_dense(liouv.l0, liouv.l_plus, liouv.l_minus, 0.2, 3)
        x_dense = np.linalg.solve(a, b)
        assert np.allclose(x_banded, x_dense, atol=1e-12)

    def test_banded_layout_reproduces_dense_matrix(self):
        rng = np.random.default_rng(5)
        l0 = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        lp = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        lm = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        ab, _, half = _assemble_banded(l0, lp, lm, 0.37, 2)
        a, _ = _assemble_dense(l0, lp, lm, 0.37, 2)
        size = a.shape[0]
        rebuilt = np.zeros_like(a)
        for j in range(size):
            for i in range(max(0, j - half), min(size, j + half + 1)):
                rebuilt[i, j] = ab[half + i - j, j]
        assert np.array_equal(rebuilt, a)


class TestSolveFloquet:
    def test_no_drive_reduces_to_static_steady_state(self):
        drive = DriveConfig(omega_c=0.0, delta=0.2)
        liouv = liouvillian(drive, rate=0.25)
        fd = solve_floquet(liouv, 0.2, 3)
        static = steady_state_static(liouv.l0)
        assert np.allclose(fd.harmonic(0), static, atol=1e-12)
        for n in range(1, 4):
            assert np.abs(fd.harmonic(n)).max() < 1e-14
            assert np.abs(fd.harmonic(-n)).max() < 1e-14

    def test_pump_only_fixed_point(self):
        drive = DriveConfig(omega_c=0.0, omega_p=0.0)
        fd = solve_floquet(liouvillian(drive, rate=0.3), 1.0, 1)
        assert np.allclose(fd.harmonic(0), ketbra(1, 1), atol=1e-12)

    def test_agrees_with_time_domain_oracle(self):
        liouv = liouvillian()
        order = choose_truncation(liouv, PAPER_DRIVE.delta)
        fd = solve_floquet(liouv, PAPER_DRIVE.delta, order)
        average, trace = integrate_to_period_average(
            liouv, PAPER_DRIVE.delta, tol=1e-12)
        assert np.abs(fd.harmonic(0) - average).max() < 1e-6
        assert trace.convergence < 1e-12

    def test_invariants_at_paper_point(self):
        fd = solve_floquet(liouvillian(rate=0.4), PAPER_DRIVE.delta, 11)
        assert fd.invariant_violations(atol=1e-10) == []

    def test_positivity_at_sixteen_phases(self):
        fd = solve_floquet(liouvillian(), PAPER_DRIVE.delta, 11)
        period = 2.0 * math.pi / PAPER_DRIVE.delta
        for phase in np.arange(16) / 16.0:
            rho = fd.reconstruct(phase * period)
            rho = 0.5 * (rho + rho.conj().T)
            assert np.linalg.eigvalsh(rho).min() >= -1e-8

    def test_degenerate_everything_off(self):
        drive = DriveConfig(omega_c=0.0, omega_p=0.0)
        with pytest.raises(DegenerateModelError):
            solve_floquet(liouvillian(drive, rate=0.0), 1.0, 1)

    def test_probe_off_pump_on_is_fine(self):
        drive = DriveConfig(omega_c=30.0, omega_p=0.0, delta=0.2)
        fd = solve_floquet(liouvillian(drive, rate=0.3), 0.2, 9)
        rho31, rho41 = extract_dc_coherences(fd)
        assert abs(rho31) < 1e-12
        assert abs(rho41) < 1e-12

    def test_extracted_coherences_match_conjugates(self):
        fd = solve_floquet(liouvillian(), PAPER_DRIVE.delta, 9)
        rho0 = fd.harmonic(0)
        rho31, rho41 = extract_dc_coherences(fd)
        assert rho31 == pytest.approx(np.conj(rho0[0, 2]), abs=1e-12)
        assert rho41 == pytest.approx(np.conj(rho0[0, 3]), abs=1e-12)

    def test_bad_order_and_delta(self):
        liouv = liouvillian()
        with pytest.raises(ValueError):
            solve_floquet(liouv, 0.2, 0)
        with pytest.raises(ValueError):
            solve_floquet(liouv, 0.0, 3)


class TestChooseTruncation:
    def test_no_drive_converges_immediately(self):
        drive = DriveConfig(omega_c=0.0, delta=0.2)
        assert choose_truncation(liouvillian(drive, rate=0.1), 0.2) == 1

    def test_paper_point_within_ladder(self):
        order = choose_truncation(liouvillian(), PAPER_DRIVE.delta)
        assert 1 <= order <= 25
        fd = solve_floquet(liouvillian(), PAPER_DRIVE.delta, order + 2)
        assert harmonic_tail_ok(fd)

    def test_zero_tolerance_rejected(self):
        with pytest.raises(ValueError):
            choose_truncation(liouvillian(), 0.2, tol=0.0)

    def test_non_convergence_reported(self):
        with pytest.raises(ConvergenceError):
            choose_truncation(liouvillian(), PAPER_DRIVE.delta, tol=1e-8,
                              order_max=3)


class TestTimeDomainOracle:
    def test_zero_generator_returns_initial_state(self):
        liouv = liouvillian(DriveConfig(omega_c=0.0, omega_p=0.0),
                            rate=0.0,
                            system=AtomicSystem(gamma31=0, gamma32=0, gamma41=0,
                                                gamma42=0, gamma2_deph=0))
        liouv.l0[:] = 0.0
        rho0 = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
        average, trace = integrate_to_period_average(liouv, 1.0, rho0, horizon=5)
        assert np.allclose(average, rho0, atol=1e-12)
        assert trace.periods >= 2

    def test_pump_only_exponential_decay(self):
        rate = 0.3
        drive = DriveConfig(omega_c=0.0, omega_p=0.0)
        liouv = liouvillian(drive, rate=rate)
        rho0 = ketbra(0, 0)
        samples = 512
        average, trace = integrate_to_period_average(
            liouv, 1.0, rho0, tol=1e-11, samples_per_period=samples)
        assert np.allclose(average, ketbra(1, 1), atol=1e-9)
        # period-averaged rho11 follows rho11(t) = e^{-rate t}; compare with
        # the same trapezoid sampling the integrator averages over
        period = 2.0 * math.pi
        grid = period * np.arange(samples + 1) / samples
        weights = np.full(samples + 1, 1.0 / samples)
        weights[0] = weights[-1] = 0.5 / samples
        for p in (0, 1, 2, 3):
            expected = float(weights @ np.exp(-rate * (p * period + grid)))
            measured = trace.average_history[p][0, 0].real
            assert measured == pytest.approx(expected, rel=1e-9)

    def test_final_period_samples_are_states(self):
        liouv = liouvillian()
        _, trace = integrate_to_period_average(liouv, PAPER_DRIVE.delta)
        for state in trace.states[:: 64]:
            assert abs(np.trace(state) - 1.0) < 1e-8
            assert np.abs(state - state.conj().T).max() < 1e-8

    def test_horizon_exhaustion(self):
        with pytest.raises(ConvergenceError):
            integrate_to_period_average(liouvillian(), PAPER_DRIVE.delta,
                                        horizon=2, tol=1e-14)

    def test_bad_initial_state_rejected(self):
        liouv = liouvillian()
        bad_trace = np.eye(4, dtype=complex)
        with pytest.raises(ValueError):
            integrate_to_period_average(liouv, 0.2, bad_trace)
        non_hermitian = np.diag([1.0, 0, 0, 0]).astype(complex)
        non_hermitian[0, 1] = 0.5
        with pytest.raises(ValueError):
            integrate_to_period_average(liouv, 0.2, non_hermitian)


class TestStaticSteadyState:
    def test_three_level_pump_only(self):
        # directly build a 2-level toy: decay 2->1 at rate 1
        import ramanlight.atom as atom
        op = np.zeros((2, 2), dtype=complex)
        op[0, 1] = 1.0
        l0 = atom.dissipator_superop(op, 1.0)
        rho = steady_state_static(l0)
        assert np.allclose(rho, np.diag([1.0, 0.0]), atol=1e-12)

    def test_degenerate_static_detected(self):
        l0 = np.zeros((4, 4), dtype=complex)  # 2-level, no dynamics at all
        with pytest.raises(DegenerateModelError):
            steady_state_static(l0)
