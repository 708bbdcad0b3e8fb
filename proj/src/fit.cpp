#include "fpmode/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <mutex>
#include <tuple>

#include "fpmode/analyze.hpp"
#include "fpmode/errors.hpp"
#include "fpmode/simulate.hpp"

namespace fpmode {

LossRatio total_loss_ratio(const std::vector<double>& harmonic_amplitudes,
                           const std::vector<double>& noise_floors) {
    if (harmonic_amplitudes.size() < 2)
        throw DomainError("total loss needs at least 2 harmonic amplitudes");
    for (double a : harmonic_amplitudes)
        if (!(a > 0.0))
            throw DomainError("harmonic amplitudes must be positive");

    LossRatio out;
    const size_t m = harmonic_amplitudes.size();
    std::vector<double> log_ratios(m - 1);
    for (size_t i = 0; i + 1 < m; ++i) {
        double r = harmonic_amplitudes[i + 1] / harmonic_amplitudes[i];
        if (r >= 1.0)
            out.unphysical_gain = true;
        log_ratios[i] = std::log(r);
    }
    double mean = 0.0;
    for (double lr : log_ratios)
        mean += lr;
    mean /= static_cast<double>(log_ratios.size());
    out.r_tilde = std::exp(mean);
    out.harmonics_used = static_cast<int>(m);

    if (log_ratios.size() >= 2) {
        double var = 0.0;
        for (double lr : log_ratios)
            var += (lr - mean) * (lr - mean);
        var /= static_cast<double>(log_ratios.size() - 1);
        out.sigma = out.r_tilde * std::sqrt(var / static_cast<double>(log_ratios.size()));
    } else if (noise_floors.size() >= 2) {
        double rel0 = noise_floors[0] / harmonic_amplitudes[0];
        double rel1 = noise_floors[1] / harmonic_amplitudes[1];
        out.sigma = out.r_tilde * std::sqrt(rel0 * rel0 + rel1 * rel1);
    } else {
        out.sigma = out.r_tilde * 1e-3; // nominal, no scatter information
    }
    out.sigma = std::max(out.sigma, out.r_tilde * 1e-9);
    return out;
}

namespace {

struct BiasKey {
    double group_index;
    double length_mm;
    double pitch_pm;
    double psf_pm;
    int harmonics;
    double ref;
    double center;
    double span;

    bool operator<(const BiasKey& o) const {
        return std::tie(group_index, length_mm, pitch_pm, psf_pm, harmonics, ref, center, span) <
               std::tie(o.group_index, o.length_mm, o.pitch_pm, o.psf_pm, o.harmonics, o.ref,
                        o.center, o.span);
    }
};

double simulate_bias_factor(double group_index, double length_mm,
                            const InstrumentSpec& instrument, const BiasOptions& options) {
    const double center = options.band_center_nm > 0.0 ? options.band_center_nm
                          : instrument.envelope_center_nm > 0.0 ? instrument.envelope_center_nm
                                                                : 775.0;

    // The convolution kernel is truncated at +-5 sigma (relative floor about
    // 1e-6); once the analytic Gaussian damping of the highest harmonic falls
    // near that floor the measured ladder reflects truncation artifacts, not
    // resonator physics.
    {
        const double lambda_m = center * 1e-9;
        const double sigma_lambda_m =
            instrument.psf_fwhm_pm * 1e-12 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
        const double sigma_beta = 2.0 * std::numbers::pi * sigma_lambda_m / (lambda_m * lambda_m);
        const double x_top =
            2.0 * options.harmonics_used * group_index * length_mm * 1e-3;
        if (std::exp(-0.5 * sigma_beta * sigma_beta * x_top * x_top) < 1e-3)
            throw UncorrectableError(
                "instrument resolution damps the harmonic ladder below the numerical floor");
    }
    // Dispersionless reference fixture: n = n_g, lossless, R = r_tilde_ref.
    ModeSpec mode;
    mode.label = "reference";
    mode.dispersion = DispersionModel::at_wavelength(center, group_index);
    mode.k = 0.0;
    mode.reflectivity_R = options.r_tilde_ref;
    mode.excitation_x = 1.0;
    ResonatorSpec resonator{length_mm, {mode}};

    InstrumentSpec stripped;
    stripped.pixel_pitch_pm = instrument.pixel_pitch_pm;
    stripped.psf_fwhm_pm = instrument.psf_fwhm_pm;
    stripped.noise_sigma = 0.0;
    stripped.rng_seed = 0;

    ExposurePlan plan;
    plan.central_wavelengths_nm = {center};
    plan.span_nm = options.band_span_nm;
    Spectrum exposure =
        simulate_exposures(resonator, stripped, plan, options.dense_oversample).front();

    UniformBetaSignal sig =
        resample_uniform_wavenumber(exposure, options.resample_oversample);
    FourierSpectrum fs =
        mode_spectrum(sig, Window::rectangular, options.zero_pad_factor);

    const double pad_ratio = fs.resolution_bin_mm / fs.bin_mm;
    std::vector<double> floor =
        detail::noise_floor(fs.amplitude, static_cast<size_t>(64.0 * pad_ratio), 0.9);

    auto fundamental = detail::find_peak_near(fs, group_index * length_mm, 2.0);
    if (!fundamental || fundamental->amplitude < 3.0 * floor[fundamental->index])
        throw UncorrectableError("bias fixture has no usable fundamental peak");
    std::vector<double> amps{fundamental->amplitude};
    for (int m = 2; m <= options.harmonics_used; ++m) {
        auto harmonic =
            detail::find_peak_near(fs, static_cast<double>(m) * fundamental->position_mm, 1.0);
        if (!harmonic || harmonic->amplitude < 1.25 * floor[harmonic->index] ||
            harmonic->amplitude < 1e-9 * fundamental->amplitude)
            throw UncorrectableError(
                "instrument resolution damps the harmonic ladder below the numerical floor");
        amps.push_back(harmonic->amplitude);
    }
    double measured = total_loss_ratio(amps).r_tilde;
    return options.r_tilde_ref / measured;
}

} // namespace

double resolution_bias(double group_index, double length_mm, const InstrumentSpec& instrument,
                       const BiasOptions& options) {
    if (!(group_index > 1.0))
        throw DomainError("group index must exceed 1");
    if (!(length_mm > 0.0))
        throw DomainError("length must be positive");
    validate(instrument);
    if (options.harmonics_used < 2)
        throw ConfigError("bias correction needs at least 2 harmonics");
    if (!(options.r_tilde_ref > 0.0) || !(options.r_tilde_ref < 1.0))
        throw ConfigError("reference loss must lie in (0,1)");
    if (instrument.psf_fwhm_pm == 0.0)
        return 1.0;

    static std::mutex mutex;
    static std::map<BiasKey, double> cache;
    BiasKey key{group_index,
                length_mm,
                instrument.pixel_pitch_pm,
                instrument.psf_fwhm_pm,
                options.harmonics_used,
                options.r_tilde_ref,
                options.band_center_nm,
                options.band_span_nm};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    double factor = simulate_bias_factor(group_index, length_mm, instrument, options);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, factor);
    return factor;
}

AlphaRFit fit_alpha_R(const std::vector<LossMeasurement>& measurements,
                      bool per_length_averages) {
    if (measurements.size() < 2)
        throw UnderdeterminedError("need at least 2 loss measurements");
    for (const auto& m : measurements) {
        if (!(m.length_mm > 0.0))
            throw DomainError("measurement length must be positive");
        if (!(m.r_tilde > 0.0) || !(m.r_tilde < 1.0))
            throw DomainError("total loss must lie in (0,1)");
        if (!(m.sigma > 0.0))
            throw DomainError("measurement sigma must be positive");
    }

    struct Point {
        double length;
        double y;       // ln r_tilde
        double sigma_y; // sigma / r_tilde
    };
    std::vector<Point> points;
    if (per_length_averages) {
        std::map<double, std::pair<double, double>> groups; // L -> (sum w*y, sum w)
        for (const auto& m : measurements) {
            double sy = m.sigma / m.r_tilde;
            double w = 1.0 / (sy * sy);
            auto& g = groups[m.length_mm];
            g.first += w * std::log(m.r_tilde);
            g.second += w;
        }
        for (const auto& [length, g] : groups)
            points.push_back({length, g.first / g.second, 1.0 / std::sqrt(g.second)});
    } else {
        for (const auto& m : measurements)
            points.push_back({m.length_mm, std::log(m.r_tilde), m.sigma / m.r_tilde});
    }

    double min_len = points.front().length, max_len = points.front().length;
    for (const auto& p : points) {
        min_len = std::min(min_len, p.length);
        max_len = std::max(max_len, p.length);
    }
    if (max_len - min_len < 1e-9)
        throw UnderdeterminedError("measurements span a single length; alpha and R are degenerate");

    // y = b + m*L with b = ln R, m = -alpha.
    double S = 0, Sx = 0, Sxx = 0, Sy = 0, Sxy = 0;
    for (const auto& p : points) {
        double w = 1.0 / (p.sigma_y * p.sigma_y);
        S += w;
        Sx += w * p.length;
        Sxx += w * p.length * p.length;
        Sy += w * p.y;
        Sxy += w * p.length * p.y;
    }
    double det = S * Sxx - Sx * Sx;
    if (!(det > 0.0))
        throw UnderdeterminedError("degenerate design matrix");
    double b = (Sxx * Sy - Sx * Sxy) / det;
    double slope = (S * Sxy - Sx * Sy) / det;

    AlphaRFit out;
    out.alpha_per_mm = -slope;
    out.alpha_db_per_mm = alpha_to_db_per_mm(out.alpha_per_mm);
    out.R = std::exp(b);
    out.negative_alpha = out.alpha_per_mm < 0.0;

    // cov(b, m): [[Sxx, -Sx], [-Sx, S]] / det; alpha = -m flips the sign of
    // the cross term.
    out.covariance_log[0][0] = Sxx / det;
    out.covariance_log[0][1] = Sx / det;
    out.covariance_log[1][0] = Sx / det;
    out.covariance_log[1][1] = S / det;
    out.sigma_R = out.R * std::sqrt(out.covariance_log[0][0]);
    out.sigma_alpha = std::sqrt(out.covariance_log[1][1]);

    double chi2 = 0.0;
    for (const auto& p : points) {
        double r = p.y - (b + slope * p.length);
        out.residuals_log.push_back(r);
        out.residuals_normalized.push_back(r / p.sigma_y);
        chi2 += (r / p.sigma_y) * (r / p.sigma_y);
    }
    size_t dof = points.size() > 2 ? points.size() - 2 : 1;
    out.chi2_per_dof = chi2 / static_cast<double>(dof);
    return out;
}

AlphaFromRtilde loss_from_r_tilde(double r_tilde, double R, double length_mm,
                                  double sigma_r_tilde, double sigma_R) {
    if (!(r_tilde > 0.0) || !(R > 0.0) || !(R < 1.0) || !(length_mm > 0.0))
        throw DomainError("loss_from_r_tilde requires positive inputs with R in (0,1)");
    AlphaFromRtilde out;
    out.alpha_per_mm = std::log(R / r_tilde) / length_mm;
    out.alpha_db_per_mm = alpha_to_db_per_mm(out.alpha_per_mm);
    out.exceeds_R = r_tilde > R;
    double rel_r = sigma_r_tilde > 0.0 ? sigma_r_tilde / r_tilde : 0.0;
    double rel_R = sigma_R > 0.0 ? sigma_R / R : 0.0;
    out.sigma_alpha = std::sqrt(rel_r * rel_r + rel_R * rel_R) / length_mm;
    return out;
}

} // namespace fpmode
