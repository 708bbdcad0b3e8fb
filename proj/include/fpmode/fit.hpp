#pragma once

#include <array>
#include <string>
#include <vector>

#include "fpmode/model.hpp"

namespace fpmode {

struct LossRatio {
    double r_tilde = 0.0;
    double sigma = 0.0;
    int harmonics_used = 0;
    bool unphysical_gain = false; // some successive ratio >= 1
};

/// Total loss from a harmonic ladder: geometric mean of successive amplitude
/// ratios. Sigma comes from the scatter of the individual ratios, or from the
/// noise floors when only two harmonics are available (a small nominal value
/// is used when neither applies).
LossRatio total_loss_ratio(const std::vector<double>& harmonic_amplitudes,
                           const std::vector<double>& noise_floors = {});

struct BiasOptions {
    int harmonics_used = 2;      // must match the measurement's ladder depth
    double r_tilde_ref = 0.3;    // reference loss of the simulated fixture
    double band_center_nm = 0.0; // 0 -> instrument envelope center, else 775
    double band_span_nm = 14.5;
    int dense_oversample = 8;
    int resample_oversample = 2;
    int zero_pad_factor = 8;
};

/// Correction factor for the resolution-induced downward bias of the total
/// loss: a noiseless single-mode fixture with the given group index and length
/// is pushed through the instrument response (PSF + pixelation only) and the
/// analysis pipeline; the factor is r_tilde_ref / r_tilde_measured. Exactly 1
/// for a zero-width PSF. Results are cached; the cache is safe for concurrent
/// use. Corrected loss = measured * factor.
double resolution_bias(double group_index, double length_mm, const InstrumentSpec& instrument,
                       const BiasOptions& options = {});

struct LossMeasurement {
    std::string waveguide_id;
    double length_mm = 0.0;
    double r_tilde = 0.0; // bias-corrected total loss
    double sigma = 0.0;   // standard uncertainty of r_tilde
    double group_index = 0.0;
};

struct AlphaRFit {
    double alpha_per_mm = 0.0;
    double alpha_db_per_mm = 0.0;
    double R = 0.0;
    double sigma_alpha = 0.0;
    double sigma_R = 0.0;
    // Covariance of (ln R, alpha) from the weighted linear fit.
    std::array<std::array<double, 2>, 2> covariance_log{};
    std::vector<double> residuals_log;        // y_i - model, y = ln r_tilde
    std::vector<double> residuals_normalized; // residual / sigma_y
    double chi2_per_dof = 0.0;
    bool negative_alpha = false; // unphysical gain, returned but flagged
};

/// Weighted least squares of ln r_tilde = ln R - alpha * L across waveguide
/// lengths; weights 1/(sigma/r_tilde)^2. per_length_averages first collapses
/// the measurements to one weighted point per distinct length.
AlphaRFit fit_alpha_R(const std::vector<LossMeasurement>& measurements,
                      bool per_length_averages = false);

struct AlphaFromRtilde {
    double alpha_per_mm = 0.0;
    double alpha_db_per_mm = 0.0;
    double sigma_alpha = 0.0;
    bool exceeds_R = false; // r_tilde > R, negative loss returned with warning
};

/// alpha = ln(R / r_tilde) / L, with optional propagation of the r_tilde and
/// R uncertainties.
AlphaFromRtilde loss_from_r_tilde(double r_tilde, double R, double length_mm,
                                  double sigma_r_tilde = 0.0, double sigma_R = 0.0);

} // namespace fpmode
