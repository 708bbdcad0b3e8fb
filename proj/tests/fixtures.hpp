#pragma once

// Shared fixtures and small independent probes used across the test suites.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fpmode/model.hpp"
#include "fpmode/simulate.hpp"

namespace fixtures {

// Two dispersive lossy modes typical of an AlGaAs ridge waveguide near
// 775 nm: n1 = 3.13 with n_g ~ 3.702 and n2 = 3.40 with n_g ~ 4.409, shared
// facet reflectivity 0.3 and absorption index 1e-5, excited 80/20.
inline fpmode::ResonatorSpec two_mode_waveguide(double length_mm = 0.9, double c2_1 = 0.0,
                                                double c2_2 = 0.0) {
    const double beta0 = fpmode::wavelength_to_wavenumber(775.0);
    fpmode::ModeSpec m1;
    m1.label = "bragg";
    m1.dispersion = fpmode::DispersionModel::at_wavelength(775.0, 3.13,
                                                           (3.702 - 3.13) / beta0, c2_1);
    m1.k = 1e-5;
    m1.reflectivity_R = 0.3;
    m1.excitation_x = 0.8;

    fpmode::ModeSpec m2 = m1;
    m2.label = "tir";
    m2.dispersion = fpmode::DispersionModel::at_wavelength(775.0, 3.40,
                                                           (4.409 - 3.40) / beta0, c2_2);
    m2.excitation_x = 0.2;
    return fpmode::ResonatorSpec{length_mm, {m1, m2}};
}

// Amplitude of the component exp(-i x beta) in a real signal sampled on a
// uniform beta grid; the mean is removed first. A direct Goertzel-style probe
// independent of the FFT pipeline.
inline double cosine_amplitude_at(const std::vector<double>& values, double beta0, double dbeta,
                                  double x) {
    const size_t n = values.size();
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(n);
    std::complex<double> acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
        double beta = beta0 + static_cast<double>(j) * dbeta;
        acc += (values[j] - mean) * std::exp(std::complex<double>(0.0, -x * beta));
    }
    return 2.0 * std::abs(acc) / static_cast<double>(n);
}

// Uniform wavenumber grid holding an integer number of fringe periods of a
// mode with phase-index slope n at length L (period pi/(n*L) in beta).
struct BetaGrid {
    double beta0;
    double dbeta;
    std::vector<double> beta;
};

inline BetaGrid integer_fringe_grid(double n_phase, double length_mm, double lambda_hi_nm,
                                    int fringes, size_t samples) {
    const double length_m = length_mm * 1e-3;
    const double period = std::numbers::pi / (n_phase * length_m);
    BetaGrid g;
    g.beta0 = fpmode::wavelength_to_wavenumber(lambda_hi_nm);
    double span = static_cast<double>(fringes) * period;
    g.dbeta = span / static_cast<double>(samples);
    g.beta.resize(samples);
    for (size_t j = 0; j < samples; ++j)
        g.beta[j] = g.beta0 + static_cast<double>(j) * g.dbeta;
    return g;
}

} // namespace fixtures
