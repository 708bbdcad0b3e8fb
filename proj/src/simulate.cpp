#include "fpmode/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fpmode/errors.hpp"
#include "fpmode/interpolate.hpp"

namespace fpmode {

namespace {

constexpr double kPi = std::numbers::pi;

// Deterministic standard-normal stream (Box-Muller over mt19937_64), so the
// simulator output does not depend on the standard library's distribution.
class NormalStream {
  public:
    explicit NormalStream(unsigned long long seed) : rng_(seed) {}

    double next() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    double uniform() {
        // in (0, 1]
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
};

void check_uniform_axis(const std::vector<double>& axis) {
    if (axis.size() < 2)
        throw DataError("need at least 2 samples");
    double step = axis[1] - axis[0];
    for (size_t i = 1; i < axis.size(); ++i) {
        double d = axis[i] - axis[i - 1];
        if (std::abs(d - step) > 1e-6 * step)
            throw ConfigError("instrument filtering requires a uniform wavelength grid");
    }
}

} // namespace

double single_mode_transmittance(double beta, const ModeSpec& mode, double length_mm) {
    if (!(beta > 0.0))
        throw DomainError("wavenumber must be positive");
    validate(mode);
    if (!(length_mm > 0.0))
        throw DomainError("length must be positive");
    const double length_m = length_mm * 1e-3;
    const double attenuation = std::exp(-2.0 * mode.k * length_m * beta);
    const double reflectivity = mode.reflectivity_R;
    const double phase = mode.facet_phase_phi + mode.dispersion.index(beta) * length_m * beta;
    const double s = std::sin(phase);
    const double one_minus = 1.0 - reflectivity * attenuation;
    const double denom = one_minus * one_minus + 4.0 * reflectivity * attenuation * s * s;
    return (1.0 - reflectivity) * (1.0 - reflectivity) * attenuation / denom;
}

Spectrum multimode_spectrum(const ResonatorSpec& resonator,
                            const std::vector<double>& wavelength_grid_nm) {
    validate(resonator);
    if (wavelength_grid_nm.size() < 2)
        throw DataError("wavelength grid must hold at least 2 samples");
    for (size_t i = 1; i < wavelength_grid_nm.size(); ++i)
        if (!(wavelength_grid_nm[i] > wavelength_grid_nm[i - 1]))
            throw DataError("wavelength grid must be strictly increasing");

    Spectrum out;
    out.wavelength_nm = wavelength_grid_nm;
    out.intensity.assign(wavelength_grid_nm.size(), 0.0);
    out.source_tag = "model";
    for (size_t i = 0; i < wavelength_grid_nm.size(); ++i) {
        double beta = wavelength_to_wavenumber(wavelength_grid_nm[i]);
        double sum = 0.0;
        for (const auto& mode : resonator.modes)
            sum += mode.excitation_x *
                   single_mode_transmittance(beta, mode, resonator.length_mm);
        out.intensity[i] = sum;
    }
    return out;
}

Spectrum apply_instrument(const Spectrum& spectrum, const InstrumentSpec& instrument,
                          std::optional<InstrumentWindow> window) {
    validate(spectrum);
    validate(instrument);
    check_uniform_axis(spectrum.wavelength_nm);

    const auto& axis = spectrum.wavelength_nm;
    const double step = axis[1] - axis[0];
    std::vector<double> values = spectrum.intensity;

    if (instrument.envelope_fwhm_nm > 0.0) {
        const double c = instrument.envelope_center_nm;
        const double w = instrument.envelope_fwhm_nm;
        for (size_t i = 0; i < values.size(); ++i) {
            double u = (axis[i] - c) / w;
            values[i] *= std::exp(-4.0 * std::numbers::ln2 * u * u);
        }
    }

    if (instrument.etalon) {
        const double fsr = instrument.etalon->fsr_nm;
        const double depth = instrument.etalon->modulation_depth;
        for (size_t i = 0; i < values.size(); ++i)
            values[i] *= 1.0 + depth * std::cos(2.0 * kPi * axis[i] / fsr);
    }

    const double sigma_nm = instrument.psf_fwhm_pm * 1e-3 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    double pad_nm = 0.0;
    if (sigma_nm > 0.0) {
        const long half = std::lround(std::ceil(5.0 * sigma_nm / step));
        if (2 * half + 1 > static_cast<long>(values.size()))
            throw ConfigError("PSF kernel is wider than the spectrum span");
        std::vector<double> kernel(2 * half + 1);
        double norm = 0.0;
        for (long j = -half; j <= half; ++j) {
            double u = static_cast<double>(j) * step / sigma_nm;
            kernel[j + half] = std::exp(-0.5 * u * u);
            norm += kernel[j + half];
        }
        for (auto& k : kernel)
            k /= norm;
        std::vector<double> blurred(values.size(), 0.0);
        const long n = static_cast<long>(values.size());
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            for (long j = -half; j <= half; ++j) {
                long idx = std::clamp(i + j, 0L, n - 1);
                acc += kernel[j + half] * values[idx];
            }
            blurred[i] = acc;
        }
        values.swap(blurred);
        pad_nm = static_cast<double>(half) * step;
    }

    // Pixel grid at absolute multiples of the pitch, so neighboring exposures
    // land on one common grid.
    const double pitch_nm = instrument.pixel_pitch_pm * 1e-3;
    double lo = axis.front() + pad_nm;
    double hi = axis.back() - pad_nm;
    if (window) {
        if (window->span_nm <= 0.0)
            throw ConfigError("instrument window span must be positive");
        double wlo = window->center_nm - window->span_nm / 2.0;
        double whi = window->center_nm + window->span_nm / 2.0;
        if (wlo < lo - 1e-9 || whi > hi + 1e-9)
            throw ConfigError("spectrum does not cover the requested pixel grid after PSF padding");
        lo = wlo;
        hi = whi;
    }
    const long k_lo = static_cast<long>(std::ceil(lo / pitch_nm - 1e-9));
    const long k_hi = static_cast<long>(std::floor(hi / pitch_nm + 1e-9));
    if (k_hi - k_lo + 1 < 2)
        throw ConfigError("pixel grid would hold fewer than 2 samples");

    CubicSpline spline(axis, values);
    Spectrum out;
    out.wavelength_nm.reserve(k_hi - k_lo + 1);
    out.intensity.reserve(k_hi - k_lo + 1);
    for (long k = k_lo; k <= k_hi; ++k) {
        double lambda = static_cast<double>(k) * pitch_nm;
        out.wavelength_nm.push_back(lambda);
        out.intensity.push_back(std::max(0.0, spline(lambda)));
    }

    if (instrument.noise_sigma > 0.0) {
        NormalStream noise(instrument.rng_seed);
        for (auto& v : out.intensity)
            v = std::max(0.0, v * (1.0 + instrument.noise_sigma * noise.next()));
    }

    out.exposure_center_nm =
        window ? std::optional<double>(window->center_nm) : spectrum.exposure_center_nm;
    out.source_tag = spectrum.source_tag.empty() ? "instrument" : spectrum.source_tag + "|instrument";
    out.warnings = spectrum.warnings;
    return out;
}

std::vector<Spectrum> simulate_exposures(const ResonatorSpec& resonator,
                                         const InstrumentSpec& instrument,
                                         const ExposurePlan& plan, int dense_oversample) {
    validate(resonator);
    validate(instrument);
    if (plan.central_wavelengths_nm.empty())
        throw ConfigError("exposure plan has no central wavelengths");
    if (!(plan.span_nm > 0.0))
        throw ConfigError("exposure span must be positive");
    if (dense_oversample < 1)
        throw ConfigError("dense oversample factor must be >= 1");

    std::vector<double> centers = plan.central_wavelengths_nm;
    std::sort(centers.begin(), centers.end());
    std::string overlap_warning;
    if (centers.size() >= 2) {
        double max_gap = 0.0;
        for (size_t i = 1; i < centers.size(); ++i)
            max_gap = std::max(max_gap, centers[i] - centers[i - 1]);
        if (plan.span_nm - max_gap <= 0.0)
            overlap_warning = "exposures do not overlap; stitching will fail";
    }

    const double pitch_nm = instrument.pixel_pitch_pm * 1e-3;
    const double dense_step = pitch_nm / static_cast<double>(dense_oversample);
    const double sigma_nm =
        instrument.psf_fwhm_pm * 1e-3 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double pad_nm = 5.0 * sigma_nm + 4.0 * dense_step + dense_step;

    std::vector<Spectrum> out;
    out.reserve(centers.size());
    for (size_t i = 0; i < centers.size(); ++i) {
        const double lo = centers[i] - plan.span_nm / 2.0 - pad_nm;
        const double hi = centers[i] + plan.span_nm / 2.0 + pad_nm;
        Spectrum model = multimode_spectrum(resonator, uniform_grid(lo, hi, dense_step));
        InstrumentSpec seeded = instrument;
        seeded.rng_seed = instrument.rng_seed + i;
        Spectrum exposure =
            apply_instrument(model, seeded, InstrumentWindow{centers[i], plan.span_nm});
        exposure.source_tag = "exposure" + std::to_string(i);
        if (!overlap_warning.empty())
            exposure.warnings.push_back(overlap_warning);
        out.push_back(std::move(exposure));
    }
    return out;
}

std::vector<double> uniform_grid(double lo_nm, double hi_nm, double step_nm) {
    if (!(step_nm > 0.0) || !(hi_nm > lo_nm))
        throw ConfigError("uniform_grid requires hi > lo and a positive step");
    size_t count = static_cast<size_t>(std::floor((hi_nm - lo_nm) / step_nm + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (size_t i = 0; i < count; ++i)
        grid[i] = lo_nm + static_cast<double>(i) * step_nm;
    return grid;
}

} // namespace fpmode
