"""Pulse synthesis, propagation transfer function and distortion metrics."""

import math

import numpy as np
import pytest
import scipy.constants as const

from ramanlight.pulses import (BandwidthError, NoPeakError, Pulse, WindowError,
                               metrics, propagate, synthesize_gaussian,
                               vacuum_reference)
from ramanlight.spectra import (BranchCutError, SusceptibilitySpectrum,
                                physical_scale)

SCALE = physical_scale(5e17)


def flat_spectrum(value, half_width=40.0, points=4001):
    grid = np.linspace(-half_width, half_width, points)
    return SusceptibilitySpectrum(grid=grid,
                                  chi=np.full(points, value, dtype=complex))


class TestSynthesis:
    def test_intensity_fwhm(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        from ramanlight.pulses import _fwhm
        width = _fwhm(pulse.times, pulse.intensity())
        assert width == pytest.approx(2.0 * math.sqrt(math.log(2)) * 1e-6,
                                      rel=1e-4)

    def test_fwhm_scales_with_sigma(self):
        from ramanlight.pulses import _fwhm
        one = synthesize_gaussian(0.5e-6, 32e-6, 2 ** 14)
        two = synthesize_gaussian(1.0e-6, 32e-6, 2 ** 14)
        ratio = _fwhm(two.times, two.intensity()) / _fwhm(one.times, one.intensity())
        assert ratio == pytest.approx(2.0, rel=1e-4)

    def test_unit_peak_at_center(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        assert np.abs(pulse.envelope).max() == pytest.approx(1.0, abs=1e-12)

    def test_edge_content_below_threshold(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        assert abs(pulse.envelope[0]) < 1e-12
        assert abs(pulse.envelope[-1]) < 1e-12

    def test_window_too_small(self):
        with pytest.raises(WindowError):
            synthesize_gaussian(1e-6, 10e-6, 2 ** 14)

    def test_samples_must_be_power_of_two(self):
        with pytest.raises(ValueError):
            synthesize_gaussian(1e-6, 32e-6, 2 ** 14 + 1)
        with pytest.raises(ValueError):
            synthesize_gaussian(1e-6, 32e-6, 2 ** 10)


class TestPropagation:
    def test_zero_chi_equals_vacuum(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        out = propagate(pulse, flat_spectrum(0.0), SCALE)
        reference = vacuum_reference(pulse, SCALE)
        assert np.allclose(out.envelope, reference.envelope, atol=1e-13)
        # L/c is far below one sample; the peak must not move by even one
        summary = metrics(pulse, out, reference)
        assert abs(summary.peak_delay) < pulse.dt

    def test_vacuum_delay_value(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        reference = vacuum_reference(pulse, SCALE)
        summary = metrics(pulse, reference, pulse)
        assert summary.peak_delay == pytest.approx(SCALE.length / const.c,
                                                   abs=1e-3 * pulse.dt)

    def test_constant_chi_closed_form_delay(self):
        chi0 = 2e-4
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        value = chi0 * SCALE.gamma3 / SCALE.k  # scaled so k chi_s = chi0
        out = propagate(pulse, flat_spectrum(value), SCALE)
        reference = vacuum_reference(pulse, SCALE)
        summary = metrics(pulse, out, reference)
        expected = (math.sqrt(1.0 + chi0) - 1.0) * SCALE.length / const.c
        assert summary.peak_delay == pytest.approx(expected, rel=0.01)
        assert summary.stretch == pytest.approx(1.0, abs=1e-6)

    def test_lossless_energy_conservation(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        out = propagate(pulse, flat_spectrum(1e-4 * SCALE.gamma3 / SCALE.k), SCALE)
        summary = metrics(pulse, out, vacuum_reference(pulse, SCALE))
        assert summary.transmission == pytest.approx(1.0, abs=1e-9)

    def test_linearity(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        doubled = Pulse(times=pulse.times, envelope=2.0 * pulse.envelope,
                        center_time=pulse.center_time)
        spectrum = flat_spectrum(3e-5 + 1e-5j)
        out_one = propagate(pulse, spectrum, SCALE)
        out_two = propagate(doubled, spectrum, SCALE)
        assert np.allclose(out_two.envelope, 2.0 * out_one.envelope, atol=1e-12)

    def test_zero_length_roundtrip(self):
        scale = physical_scale(5e17, length=1e-30)
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        out = propagate(pulse, flat_spectrum(0.02), scale)
        assert np.allclose(out.envelope, pulse.envelope, atol=1e-12)

    def test_bandwidth_guard(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        with pytest.raises(BandwidthError):
            propagate(pulse, flat_spectrum(0.0, half_width=0.01, points=101),
                      SCALE)

    def test_branch_cut_guard(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        value = -1.5 * SCALE.gamma3 / SCALE.k
        with pytest.raises(BranchCutError):
            propagate(pulse, flat_spectrum(value), SCALE)


class TestMetrics:
    def test_identity(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        summary = metrics(pulse, pulse, pulse)
        assert summary.peak_delay == 0.0
        assert summary.stretch == 1.0
        assert summary.transmission == 1.0

    def test_single_sample_shift(self):
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        shifted = Pulse(times=pulse.times,
                        envelope=np.roll(pulse.envelope, 1),
                        center_time=pulse.center_time)
        summary = metrics(pulse, shifted, pulse)
        assert summary.peak_delay == pytest.approx(pulse.dt, rel=0.01)

    def test_no_peak_error(self):
        times = np.linspace(0.0, 1.0, 64)
        flat = Pulse(times=times, envelope=np.zeros(64, dtype=complex),
                     center_time=0.5)
        with pytest.raises(NoPeakError):
            metrics(flat, flat, flat)

    def test_grid_mismatch_rejected(self):
        a = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        b = synthesize_gaussian(1e-6, 64e-6, 2 ** 15)
        with pytest.raises(ValueError):
            metrics(a, b, a)


class TestPulseValidation:
    def test_non_uniform_grid_rejected(self):
        times = np.array([0.0, 1.0, 3.0])
        with pytest.raises(ValueError):
            Pulse(times=times, envelope=np.ones(3, dtype=complex),
                  center_time=1.0)

    def test_non_finite_envelope_rejected(self):
        times = np.linspace(0.0, 1.0, 8)
        envelope = np.ones(8, dtype=complex)
        envelope[3] = np.nan
        with pytest.raises(ValueError):
            Pulse(times=times, envelope=envelope, center_time=0.5)


class TestGridDensity:
    def test_halving_grid_step_leaves_peak_delay(self):
        # medium spectrum sampled at two densities: cubic interpolation must
        # already be converged at the coarser one
        import numpy as np
        from ramanlight.atom import AtomicSystem, DriveConfig, PumpModel
        from ramanlight.spectra import make_chi_evaluator, scan_evaluator
        evaluator = make_chi_evaluator(AtomicSystem(),
                                       DriveConfig(omega_c=30.0, delta=0.2),
                                       PumpModel.direct(0.0))
        pulse = synthesize_gaussian(1e-6, 32e-6, 2 ** 14)
        reference = vacuum_reference(pulse, SCALE)
        delays = []
        for points in (601, 1201):
            spectrum = scan_evaluator(evaluator,
                                      np.linspace(-0.25, 0.25, points))
            out = propagate(pulse, spectrum, SCALE)
            delays.append(metrics(pulse, out, reference).peak_delay)
        assert abs(delays[1] - delays[0]) <= 1e-3 * abs(delays[1])
