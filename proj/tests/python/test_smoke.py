"""Smoke tests for the python bindings: a quick end-to-end pass through the
simulator and the Fourier analysis, plus a few unit conversions."""

import math

import pytest

import fpmode


def test_unit_conversions():
    beta = fpmode.wavelength_to_wavenumber(775.0)
    assert beta == pytest.approx(2.0 * math.pi / 775e-9, rel=1e-12)
    assert fpmode.wavenumber_to_wavelength(beta) == pytest.approx(775.0, rel=1e-12)

    alpha = fpmode.alpha_from_k(1e-5, 775.0)
    assert alpha == pytest.approx(0.1621, rel=1e-3)
    assert fpmode.k_from_alpha(alpha, 775.0) == pytest.approx(1e-5, rel=1e-12)
    assert fpmode.alpha_to_db_per_mm(0.5) == pytest.approx(2.171, rel=1e-3)

    assert fpmode.group_index_from_velocity(68.0) == pytest.approx(4.409, rel=1e-3)
    assert fpmode.free_spectral_range_nm(775.0, 3.75, 2.0) * 1e3 == pytest.approx(40.0, rel=0.01)


def test_fresnel_and_finesse():
    f = fpmode.fresnel_estimates(3.4, 0.0)
    assert f.reflectivity_R == pytest.approx(0.2975, rel=1e-3)
    assert fpmode.coefficient_finesse(0.3) == pytest.approx(2.46, rel=1e-2)
    with pytest.raises(ValueError):
        fpmode.coefficient_finesse(1.5)


def two_mode_resonator():
    beta0 = fpmode.wavelength_to_wavenumber(775.0)
    m1 = fpmode.ModeSpec()
    m1.label = "a"
    m1.dispersion = fpmode.DispersionModel.at_wavelength(775.0, 3.13, (3.702 - 3.13) / beta0)
    m1.k = 1e-5
    m1.reflectivity_R = 0.3
    m1.excitation_x = 0.8
    m2 = fpmode.ModeSpec()
    m2.label = "b"
    m2.dispersion = fpmode.DispersionModel.at_wavelength(775.0, 3.40, (4.409 - 3.40) / beta0)
    m2.k = 1e-5
    m2.reflectivity_R = 0.3
    m2.excitation_x = 0.2
    res = fpmode.ResonatorSpec()
    res.length_mm = 0.9
    res.modes = [m1, m2]
    return res


def test_simulate_and_recover_two_modes():
    res = two_mode_resonator()
    grid = fpmode.uniform_grid(768.0, 782.0, 0.002)
    spectrum = fpmode.multimode_spectrum(res, grid)
    assert len(spectrum) == len(grid)

    conditioned = fpmode.detrend(spectrum)
    signal = fpmode.resample_uniform_wavenumber(conditioned, 2)
    fourier = fpmode.mode_spectrum(signal)
    detections = fpmode.detect_modes(fourier, 0.9)
    confirmed = [d for d in detections if d.confirmed]
    assert len(confirmed) == 2

    confirmed = fpmode.excitation_fractions(fourier, confirmed)
    ng = sorted(d.group_index for d in confirmed)
    assert ng[0] == pytest.approx(3.702, rel=0.005)
    assert ng[1] == pytest.approx(4.409, rel=0.005)
    fractions = sorted(d.excitation_fraction for d in confirmed)
    assert fractions[1] == pytest.approx(0.8, abs=0.04)

    ratios = [d.r_tilde for d in confirmed]
    assert ratios[0] == pytest.approx(ratios[1], rel=0.02)


def test_instrument_chain_and_loss_fit():
    res = two_mode_resonator()
    inst = fpmode.InstrumentSpec()
    inst.pixel_pitch_pm = 5.0
    inst.noise_sigma = 0.01
    inst.rng_seed = 3
    plan = fpmode.ExposurePlan()
    plan.central_wavelengths_nm = [775.0]
    plan.span_nm = 12.0
    exposures = fpmode.simulate_exposures(res, inst, plan)
    assert len(exposures) == 1
    again = fpmode.simulate_exposures(res, inst, plan)
    assert exposures[0].intensity == again[0].intensity  # deterministic

    ms = []
    for L in (0.9, 2.0):
        for i in range(4):
            m = fpmode.LossMeasurement()
            m.waveguide_id = f"wg{L}-{i}"
            m.length_mm = L
            m.r_tilde = 0.35 * math.exp(-0.5 * L)
            m.sigma = 0.02 * m.r_tilde
            ms.append(m)
    fit = fpmode.fit_alpha_R(ms)
    assert fit.R == pytest.approx(0.35, rel=1e-6)
    assert fit.alpha_per_mm == pytest.approx(0.5, rel=1e-6)


def test_calibration_round_trip():
    truth = fpmode.CzernyTurnerParams()
    truth.gamma_rad = 0.1745
    truth.focal_mm = 750.0
    truth.groove_spacing_nm = 1e6 / 1800.0
    truth.order_m = 1
    truth.dx_in_mm = 0.8

    on_axis = fpmode.CzernyTurnerParams()
    on_axis.gamma_rad = truth.gamma_rad
    on_axis.focal_mm = truth.focal_mm
    on_axis.groove_spacing_nm = truth.groove_spacing_nm
    on_axis.order_m = 1
    on_axis.dx_in_mm = 0.0
    assert fpmode.czerny_turner_wavelength(on_axis, 775.0, 0.0) == pytest.approx(
        775.0, rel=1e-12
    )

    lines = []
    for c in range(6):
        lam_c = 766.0 + 7.0 * c
        for dx in (-5.0, -2.0, 1.0, 4.0):
            lines.append(
                fpmode.LineObservation(
                    fpmode.czerny_turner_wavelength(truth, lam_c, dx), lam_c, dx
                )
            )
    initial = fpmode.CzernyTurnerParams()
    initial.gamma_rad = truth.gamma_rad * 1.03
    initial.focal_mm = truth.focal_mm + 2.0
    initial.groove_spacing_nm = truth.groove_spacing_nm
    initial.order_m = 1
    initial.dx_in_mm = 0.0
    fit = fpmode.fit_calibration(lines, initial)
    assert fit.converged
    assert fit.rms_pm < 0.01

    report = fpmode.nonlinearity_report(fit.params, 767.75, 782.25)
    assert report.relative < 1e-3


def test_spectrogram_shape():
    res = two_mode_resonator()
    grid = fpmode.uniform_grid(768.0, 782.0, 0.002)
    spectrum = fpmode.multimode_spectrum(res, grid)
    signal = fpmode.resample_uniform_wavenumber(fpmode.detrend(spectrum), 2)
    gram = fpmode.spectrogram(signal, 0.7, 6)
    assert len(gram.slice_center_nm) == 6
    assert len(gram.amplitude) == 6 * len(gram.optical_length_mm)
