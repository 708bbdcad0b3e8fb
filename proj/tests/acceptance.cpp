// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Runs the full simulate-then-recover loop plus the closed-form
// anchors at their stated tolerances.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "fpmode/analyze.hpp"
#include "fpmode/calibrate.hpp"
#include "fpmode/errors.hpp"
#include "fpmode/fit.hpp"
#include "fpmode/model.hpp"
#include "fpmode/simulate.hpp"

using namespace fpmode;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

bool expect(bool ok, const std::string& what) {
    if (!ok)
        g_notes.push_back(what);
    return ok;
}

bool near(double value, double target, double tol, const std::string& what) {
    bool ok = std::abs(value - target) <= tol;
    if (!ok)
        g_notes.push_back(what + ": " + std::to_string(value) + " vs " +
                          std::to_string(target) + " (tol " + std::to_string(tol) + ")");
    return ok;
}

bool near_rel(double value, double target, double rel, const std::string& what) {
    return near(value, target, rel * std::abs(target), what);
}

void report(int id, const std::string& name, bool ok) {
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, name.c_str());
    for (const auto& note : g_notes)
        std::printf("         - %s\n", note.c_str());
    g_notes.clear();
    if (!ok)
        ++g_failures;
}

struct Analyzed {
    UniformBetaSignal signal;
    FourierSpectrum fs;
    std::vector<ModeDetection> detections;
};

Analyzed analyze(const Spectrum& spectrum, std::optional<double> length_mm,
                 Window window = Window::rectangular, int oversample = 2, int zero_pad = 8) {
    Analyzed a;
    Spectrum conditioned = detrend(spectrum, DetrendMethod::divide_smooth_baseline);
    a.signal = resample_uniform_wavenumber(conditioned, oversample);
    a.fs = mode_spectrum(a.signal, window, zero_pad);
    a.detections = detect_modes(a.fs, length_mm);
    std::vector<ModeDetection> confirmed;
    for (const auto& d : a.detections)
        if (d.confirmed)
            confirmed.push_back(d);
    if (!confirmed.empty()) {
        excitation_fractions(a.fs, confirmed);
        size_t c = 0;
        for (auto& d : a.detections)
            if (d.confirmed)
                d = confirmed[c++];
    }
    return a;
}

ModeSpec simple_mode(double n, double R, double k = 0.0) {
    ModeSpec m;
    m.label = "m";
    m.dispersion = DispersionModel::at_wavelength(775.0, n);
    m.k = k;
    m.reflectivity_R = R;
    return m;
}

// 1. Airy extrema of the lossless R = 0.3 resonator.
void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    const double n = 3.4, L = 0.9;
    ModeSpec mode = simple_mode(n, 0.3);
    const double nL = n * L * 1e-3;

    double max_t = 0.0, min_t = 1.0;
    // grid that lands exactly on the extrema, plus a dense sweep between
    for (int j = 7850; j <= 7950; ++j) {
        for (double frac : {0.0, 0.1, 0.25, 0.37, 0.5, 0.62, 0.75, 0.9}) {
            double beta = (static_cast<double>(j) + frac) * std::numbers::pi / nL;
            double t = single_mode_transmittance(beta, mode, L);
            max_t = std::max(max_t, t);
            min_t = std::min(min_t, t);
        }
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = near(max_t, 1.0, 1e-6, "max transmittance") &&
              near(min_t, 0.49 / 1.69, 1e-6, "min transmittance") &&
              near(min_t, 0.2899, 1e-4, "closed-form minimum") &&
              expect(elapsed < 1.0, "runtime under 1 s");
    report(1, "airy extrema: max T = 1, min T = 0.2899 within 1e-6", ok);
}

// 2. Harmonic-ratio law over R x alphaL, measured through the full pipeline.
void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    const double L = 0.9;
    for (double R : {0.1, 0.3, 0.5}) {
        for (double alpha_L : {0.0, 0.15, 0.5}) {
            ModeSpec mode = simple_mode(3.4, R, k_from_alpha(alpha_L / L, 775.0));
            ResonatorSpec res{L, {mode}};
            Spectrum s = multimode_spectrum(res, uniform_grid(769.0, 781.0, 0.002));
            Analyzed a = analyze(s, L);
            if (!expect(!a.detections.empty(), "mode detected")) {
                ok = false;
                continue;
            }
            const ModeDetection* best = &a.detections[0];
            for (const auto& d : a.detections)
                if (d.harmonic_amplitudes[0] > best->harmonic_amplitudes[0])
                    best = &d;
            // bias correction: the PSF is zero here, so the factor is 1
            InstrumentSpec no_psf;
            double factor = resolution_bias(3.4, L, no_psf);
            double measured = best->r_tilde * factor;
            double truth = R * std::exp(-alpha_L);
            ok = near_rel(measured, truth, 0.01,
                          "r_tilde at R=" + std::to_string(R) +
                              " alphaL=" + std::to_string(alpha_L)) &&
                 ok;
        }
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = expect(elapsed < 30.0, "runtime under 30 s") && ok;
    report(2, "harmonic ratios equal R*exp(-alpha*L) within 1%", ok);
}

// 3. Two-mode round trip: count, group indices, excitation split, equal loss.
void criterion_3() {
    ResonatorSpec res = fixtures::two_mode_waveguide();
    Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
    Analyzed a = analyze(s, 0.9);

    std::vector<const ModeDetection*> confirmed;
    for (const auto& d : a.detections)
        if (d.confirmed)
            confirmed.push_back(&d);

    bool ok = expect(confirmed.size() == 2, "exactly 2 confirmed modes, got " +
                                                std::to_string(confirmed.size()));
    if (ok) {
        const ModeDetection* lo = confirmed[0];
        const ModeDetection* hi = confirmed[1];
        ok = near_rel(*lo->group_index, 3.702, 0.005, "group index of mode 1") && ok;
        ok = near_rel(*hi->group_index, 4.409, 0.005, "group index of mode 2") && ok;
        ok = near(lo->excitation_fraction, 0.80, 0.03, "excitation fraction of mode 1") && ok;
        ok = near(hi->excitation_fraction, 0.20, 0.03, "excitation fraction of mode 2") && ok;
        ok = near_rel(lo->r_tilde, hi->r_tilde, 0.02,
                      "equal total loss despite different ladder slopes") &&
             ok;
    }
    report(3, "two-mode round trip: count, n_g (0.5%), split (+-0.03), loss (2%)", ok);
}

// 4. Fringe spacing anchor: 40 pm at n_g = 3.75, L = 2 mm.
void criterion_4() {
    ModeSpec mode = simple_mode(3.75, 0.3);
    ResonatorSpec res{2.0, {mode}};
    const double step = 0.00025;
    Spectrum s = multimode_spectrum(res, uniform_grid(774.6, 775.4, step));

    std::vector<double> maxima;
    for (size_t i = 1; i + 1 < s.size(); ++i)
        if (s.intensity[i] > s.intensity[i - 1] && s.intensity[i] >= s.intensity[i + 1]) {
            double l = s.intensity[i - 1], c = s.intensity[i], r = s.intensity[i + 1];
            double delta = 0.5 * (l - r) / (l - 2.0 * c + r);
            maxima.push_back(s.wavelength_nm[i] + delta * step);
        }
    bool ok = expect(maxima.size() > 10, "enough fringes found");
    if (ok) {
        double spacing = (maxima.back() - maxima.front()) /
                         static_cast<double>(maxima.size() - 1);
        ok = near_rel(spacing * 1e3, 40.0, 0.02, "fringe spacing (pm)");
    }
    report(4, "free spectral range: 40 pm +- 2% at n_g=3.75, L=2 mm", ok);
}

// 5. Joint alpha/R fit over a paper-like ensemble, 100 Monte-Carlo runs.
void criterion_5() {
    std::mt19937 rng(2026);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int in_band = 0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        std::vector<LossMeasurement> ms;
        int id = 0;
        for (double L : {0.9, 2.0})
            for (int i = 0; i < 16; ++i) {
                LossMeasurement m;
                m.waveguide_id = "wg" + std::to_string(id++);
                m.length_mm = L;
                m.r_tilde = std::max(
                    1e-3, 0.35 * std::exp(-0.5 * L) * (1.0 + 0.1 * gauss(rng)));
                m.sigma = 0.1 * m.r_tilde;
                m.group_index = 3.7;
                ms.push_back(m);
            }
        AlphaRFit fit = fit_alpha_R(ms);
        if (std::abs(fit.R - 0.35) <= 0.04 && std::abs(fit.alpha_per_mm - 0.5) <= 0.1)
            ++in_band;
    }
    bool ok = expect(in_band >= 90, "in-band runs: " + std::to_string(in_band) + "/100");
    report(5, "alpha/R ensemble fit inside 0.35+-0.04 and 0.5+-0.1 in >= 90/100 runs", ok);
}

// 6. Resolution-bias correction at a 10 pm PSF.
void criterion_6() {
    InstrumentSpec instrument;
    instrument.pixel_pitch_pm = 2.0;
    instrument.psf_fwhm_pm = 10.0;

    bool ok = true;
    // factors for the short sample bracket the published 1.07-1.14 range
    double f_lo = resolution_bias(3.1, 0.9, instrument);
    double f_hi = resolution_bias(4.1, 0.9, instrument);
    ok = expect(f_lo >= 1.02 && f_lo <= 1.12,
                "factor(n_g=3.1) = " + std::to_string(f_lo)) &&
         ok;
    ok = expect(f_hi >= 1.09 && f_hi <= 1.19,
                "factor(n_g=4.1) = " + std::to_string(f_hi)) &&
         ok;
    ok = expect(f_hi > f_lo, "factor grows with n_g") && ok;

    // end-to-end: corrected loss recovers the ground truth
    auto end_to_end = [&](double n, double L, double tol) {
        ModeSpec mode = simple_mode(n, 0.3, 1e-5);
        ResonatorSpec res{L, {mode}};
        ExposurePlan plan{{775.0}, 14.5, 0.0};
        Spectrum s = simulate_exposures(res, instrument, plan).front();
        Analyzed a = analyze(s, L);
        if (!expect(!a.detections.empty() && a.detections[0].harmonics_used >= 2,
                    "usable ladder"))
            return false;
        const ModeDetection& det = a.detections[0];
        BiasOptions opts;
        opts.harmonics_used = det.harmonics_used;
        double factor = resolution_bias(*det.group_index, L, instrument, opts);
        double corrected = det.r_tilde * factor;
        double beta0 = wavelength_to_wavenumber(775.0);
        double truth = 0.3 * std::exp(-2.0 * mode.k * (L * 1e-3) * beta0);
        bool uncorrected_biased = det.r_tilde < truth;
        return expect(uncorrected_biased, "raw value biased low") &&
               near_rel(corrected, truth, tol,
                        "corrected r_tilde at n_g=" + std::to_string(n) +
                            " L=" + std::to_string(L));
    };
    ok = end_to_end(3.1, 0.9, 0.02) && ok;
    ok = end_to_end(4.1, 0.9, 0.02) && ok;

    // the long sample's raw bias reaches tens of percent yet stays correctable
    double f_long = resolution_bias(3.1, 2.0, instrument);
    ok = expect(f_long > 1.2 && f_long < 2.5,
                "long-sample factor = " + std::to_string(f_long)) &&
         ok;
    ok = end_to_end(3.1, 2.0, 0.05) && ok;
    report(6, "resolution-bias correction at 10 pm PSF (short 2%, long 5%)", ok);
}

// 7. Spectrograph calibration from 110 noisy synthetic lines.
void criterion_7() {
    CzernyTurnerParams truth;
    truth.gamma_rad = 10.0 * std::numbers::pi / 180.0;
    truth.focal_mm = 750.0;
    truth.groove_spacing_nm = 1e6 / 1800.0;
    truth.order_m = 1;
    truth.dx_in_mm = 0.8;

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<LineObservation> lines;
    for (int c = 0; c < 11; ++c)
        for (int i = 0; i < 10; ++i) {
            double lc = 766.0 + 35.0 * c / 10.0;
            double dx = -6.0 + 12.0 * i / 9.0;
            lines.push_back(
                {czerny_turner_wavelength(truth, lc, dx) + 5e-3 * gauss(rng), lc, dx});
        }

    CzernyTurnerParams initial = truth;
    initial.gamma_rad *= 1.03;
    initial.focal_mm -= 5.0;
    initial.dx_in_mm = 0.0;
    CalibrationFit fit = fit_calibration(lines, initial);
    NonlinearityReport nl = nonlinearity_report(fit.params, 767.75, 782.25);

    bool ok = expect(lines.size() == 110, "110 observations");
    ok = expect(fit.converged, "fit converged") && ok;
    ok = expect(fit.rms_pm <= 10.0, "rms " + std::to_string(fit.rms_pm) + " pm <= 10 pm") && ok;
    ok = expect(nl.relative <= 1e-3,
                "nonlinearity " + std::to_string(nl.relative * 100.0) + "% <= 0.1%") &&
         ok;
    report(7, "calibration: rms <= 10 pm and nonlinearity <= 0.1% over 14.5 nm", ok);
}

// 8. Stitching three exposures reproduces the full-band mode positions.
void criterion_8() {
    ResonatorSpec res = fixtures::two_mode_waveguide();
    InstrumentSpec instrument;
    instrument.pixel_pitch_pm = 5.0;
    instrument.envelope_center_nm = 777.0;
    instrument.envelope_fwhm_nm = 17.4;

    ExposurePlan plan{{770.9, 775.0, 779.1}, 6.5, 2.4};
    auto exposures = simulate_exposures(res, instrument, plan);
    // per-exposure source drift
    const double drift[3] = {1.0, 1.15, 0.9};
    for (size_t e = 0; e < exposures.size(); ++e)
        for (auto& v : exposures[e].intensity)
            v *= drift[e];

    StitchResult stitched = stitch(exposures);
    double span = stitched.merged.wavelength_nm.back() - stitched.merged.wavelength_nm.front();
    bool ok = expect(span > 14.0 && span < 15.2,
                     "stitched span " + std::to_string(span) + " nm");
    ok = expect(stitched.overlap_rms_rel < 1e-6, "overlap consistency after scaling") && ok;

    ExposurePlan full{{775.0}, 14.7, 0.0};
    Spectrum reference = simulate_exposures(res, instrument, full).front();

    Analyzed a = analyze(stitched.merged, 0.9);
    Analyzed b = analyze(reference, 0.9);
    ok = expect(a.detections.size() == 2 && b.detections.size() == 2,
                "2 modes on both paths") &&
         ok;
    if (ok)
        for (size_t i = 0; i < 2; ++i)
            ok = near_rel(a.detections[i].optical_length_mm,
                          b.detections[i].optical_length_mm, 0.001,
                          "stitched vs full-band peak position") &&
                 ok;
    report(8, "three-exposure stitch matches the full band within 0.1%", ok);
}

// 9. Group-velocity readout for the two reference modes.
void criterion_9() {
    ResonatorSpec res = fixtures::two_mode_waveguide();
    Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
    Analyzed a = analyze(s, 0.9);
    bool ok = expect(a.detections.size() == 2, "both modes detected");
    if (ok) {
        double v1 = group_velocity_um_per_ps(*a.detections[0].group_index);
        double v2 = group_velocity_um_per_ps(*a.detections[1].group_index);
        ok = near(v1, 81.0, 1.0, "v_g of the low-index mode") &&
             near(v2, 68.0, 1.0, "v_g of the high-index mode") && ok;
    }
    report(9, "group velocities read 81 +- 1 and 68 +- 1 um/ps", ok);
}

// 10. Spectrogram ridges: flat without GVD, monotone drift with it, and the
// degenerate full-window case equals the global transform bit for bit.
void criterion_10() {
    auto ridge_of = [](const Spectrogram& gram, const DispersionModel& disp, double L) {
        std::vector<double> ridge;
        const size_t bins = gram.optical_length_mm.size();
        for (size_t c = 0; c < gram.slice_center_nm.size(); ++c) {
            FourierSpectrum col;
            col.optical_length_mm = gram.optical_length_mm;
            col.amplitude.assign(gram.amplitude.begin() + c * bins,
                                 gram.amplitude.begin() + (c + 1) * bins);
            col.bin_mm = gram.optical_length_mm[1] - gram.optical_length_mm[0];
            col.resolution_bin_mm = gram.resolution_bin_mm;
            double expected =
                group_index(disp, wavelength_to_wavenumber(gram.slice_center_nm[c])) * L;
            auto peak = detail::find_peak_near(col, expected, 5.0);
            ridge.push_back(peak ? peak->position_mm : -1.0);
        }
        return ridge;
    };

    bool ok = true;
    {
        ModeSpec mode = simple_mode(3.4, 0.3);
        ResonatorSpec res{0.9, {mode}};
        Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
        UniformBetaSignal sig =
            resample_uniform_wavenumber(detrend(s, DetrendMethod::divide_smooth_baseline), 2);
        Spectrogram gram = spectrogram(sig, 0.7, 8, Window::sinc, 8);
        auto ridge = ridge_of(gram, mode.dispersion, 0.9);
        double lo = ridge[0], hi = ridge[0];
        for (double r : ridge) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        ok = expect(hi - lo <= gram.resolution_bin_mm,
                    "flat ridge within one slice bin, spread " + std::to_string(hi - lo)) &&
             ok;
    }
    {
        const double c2 = 8e-14;
        ModeSpec mode;
        mode.label = "m";
        mode.dispersion = DispersionModel::at_wavelength(775.0, 3.4, 0.0, c2);
        mode.reflectivity_R = 0.3;
        ResonatorSpec res{0.9, {mode}};
        Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
        UniformBetaSignal sig =
            resample_uniform_wavenumber(detrend(s, DetrendMethod::divide_smooth_baseline), 2);
        Spectrogram gram = spectrogram(sig, 0.7, 8, Window::sinc, 8);
        auto ridge = ridge_of(gram, mode.dispersion, 0.9);
        // slices ascend in beta (descend in lambda); positive dn_g/dbeta
        // means the ridge climbs, matching the sign of -dn_g/dlambda
        bool monotone = true;
        for (size_t c = 1; c < ridge.size(); ++c)
            monotone = monotone && ridge[c] > ridge[c - 1];
        ok = expect(monotone, "monotone ridge drift under GVD") && ok;
        double dng_dbeta = 2.0 * mode.dispersion.c1 +
                           wavelength_to_wavenumber(775.0) * mode.dispersion.c2;
        ok = expect(dng_dbeta > 0.0 == (ridge.back() > ridge.front()),
                    "drift sign matches the analytic dispersion sign") &&
             ok;
    }
    {
        ResonatorSpec res = fixtures::two_mode_waveguide();
        Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
        UniformBetaSignal sig =
            resample_uniform_wavenumber(detrend(s, DetrendMethod::divide_smooth_baseline), 2);
        Spectrogram gram = spectrogram(sig, 1.0, 3, Window::sinc, 8);
        FourierSpectrum global = mode_spectrum(sig, Window::sinc, 8);
        bool identical = gram.optical_length_mm.size() == global.amplitude.size();
        if (identical)
            for (size_t c = 0; c < gram.slice_center_nm.size() && identical; ++c)
                for (size_t k = 0; k < global.amplitude.size(); ++k)
                    if (gram.amplitude[c * global.amplitude.size() + k] !=
                        global.amplitude[k]) {
                        identical = false;
                        break;
                    }
        ok = expect(identical, "full-window columns equal the global transform bitwise") && ok;
    }
    report(10, "spectrogram: flat ridge, signed GVD drift, degenerate window", ok);
}

// 11. Property battery: Parseval, shift theorem, scale invariance, seeded
// determinism.
void criterion_11(double elapsed_budget_s) {
    bool ok = true;
    {
        std::mt19937 rng(4);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> data(1000);
        for (auto& v : data)
            v = gauss(rng);
        for (Window w : {Window::rectangular, Window::hann, Window::sinc}) {
            auto tr = detail::windowed_dft(data.data(), data.size(), w, 4, true);
            double te = 0.0, fe = 0.0;
            for (double v : tr.processed)
                te += v * v;
            for (const auto& b : tr.bins)
                fe += std::norm(b);
            fe /= static_cast<double>(tr.n_padded);
            ok = expect(std::abs(fe - te) <= 1e-9 * te, "parseval, " + to_string(w)) && ok;
        }
    }
    {
        ResonatorSpec res = fixtures::two_mode_waveguide();
        Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
        Spectrum conditioned = detrend(s, DetrendMethod::divide_smooth_baseline);
        UniformBetaSignal sig = resample_uniform_wavenumber(conditioned, 2);
        FourierSpectrum base = mode_spectrum(sig, Window::rectangular, 8);
        const double shift_mm = 0.5;
        std::vector<std::complex<double>> rotated(sig.value.size());
        for (size_t j = 0; j < sig.value.size(); ++j) {
            double beta = sig.beta0 + static_cast<double>(j) * sig.dbeta;
            rotated[j] =
                sig.value[j] * std::exp(std::complex<double>(0.0, 2.0 * shift_mm * 1e-3 * beta));
        }
        FourierSpectrum moved =
            mode_spectrum_complex(rotated, sig.beta0, sig.dbeta, Window::rectangular, 8);
        for (double pos : {3.702 * 0.9, 4.409 * 0.9}) {
            auto p0 = detail::find_peak_near(base, pos, 3.0);
            auto p1 = detail::find_peak_near(moved, pos + shift_mm, 3.0);
            bool found = p0.has_value() && p1.has_value();
            ok = expect(found, "peaks found for shift check") && ok;
            if (found)
                ok = near(p1->position_mm - p0->position_mm, shift_mm, 0.002,
                          "shift theorem displacement") &&
                     ok;
        }
    }
    {
        ResonatorSpec res = fixtures::two_mode_waveguide();
        Spectrum s = multimode_spectrum(res, uniform_grid(767.75, 782.25, 0.002));
        Analyzed a = analyze(s, 0.9);
        Spectrum scaled = s;
        for (auto& v : scaled.intensity)
            v *= 13.7;
        Analyzed b = analyze(scaled, 0.9);
        bool same = a.detections.size() == b.detections.size();
        for (size_t i = 0; same && i < a.detections.size(); ++i) {
            same = std::abs(a.detections[i].optical_length_mm -
                            b.detections[i].optical_length_mm) <
                       1e-9 * a.detections[i].optical_length_mm &&
                   std::abs(a.detections[i].r_tilde - b.detections[i].r_tilde) <
                       1e-9 * a.detections[i].r_tilde &&
                   std::abs(a.detections[i].excitation_fraction -
                            b.detections[i].excitation_fraction) < 1e-9;
        }
        ok = expect(same, "detection is scale invariant") && ok;
    }
    {
        ResonatorSpec res = fixtures::two_mode_waveguide();
        InstrumentSpec instrument;
        instrument.pixel_pitch_pm = 5.0;
        instrument.noise_sigma = 0.01;
        instrument.rng_seed = 99;
        ExposurePlan plan{{775.0}, 14.5, 0.0};
        auto a = simulate_exposures(res, instrument, plan);
        auto b = simulate_exposures(res, instrument, plan);
        bool identical = a.size() == b.size();
        for (size_t e = 0; identical && e < a.size(); ++e)
            identical = a[e].intensity == b[e].intensity &&
                        a[e].wavelength_nm == b[e].wavelength_nm;
        ok = expect(identical, "fixed seed reproduces bit-identical spectra") && ok;
    }
    ok = expect(elapsed_budget_s < 300.0,
                "suite runtime " + std::to_string(elapsed_budget_s) + " s under 5 min") &&
         ok;
    report(11, "properties: parseval, shift theorem, scale invariance, determinism", ok);
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    criterion_11(elapsed);

    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/11 criteria passed in %.1f s\n", 11 - g_failures, elapsed);
    return g_failures == 0 ? 0 : 1;
}
