#include "fpmode/model.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "fpmode/errors.hpp"

namespace fpmode {

namespace {
constexpr double kPi = std::numbers::pi;

bool finite(double x) { return std::isfinite(x); }
} // namespace

double wavelength_to_wavenumber(double lambda_nm) {
    if (!finite(lambda_nm) || lambda_nm <= 0.0)
        throw DomainError("wavelength must be positive and finite");
    return 2.0 * kPi / (lambda_nm * 1e-9);
}

double wavenumber_to_wavelength(double beta_rad_per_m) {
    if (!finite(beta_rad_per_m) || beta_rad_per_m <= 0.0)
        throw DomainError("wavenumber must be positive and finite");
    return 2.0 * kPi / beta_rad_per_m * 1e9;
}

double alpha_from_k(double k, double lambda0_nm) {
    if (!finite(k) || k < 0.0)
        throw DomainError("absorption index k must be non-negative");
    if (!finite(lambda0_nm) || lambda0_nm <= 0.0)
        throw DomainError("reference wavelength must be positive");
    double alpha_per_m = 4.0 * kPi * k / (lambda0_nm * 1e-9);
    return alpha_per_m * 1e-3;
}

double k_from_alpha(double alpha_per_mm, double lambda0_nm) {
    if (!finite(alpha_per_mm) || alpha_per_mm < 0.0)
        throw DomainError("loss coefficient must be non-negative");
    if (!finite(lambda0_nm) || lambda0_nm <= 0.0)
        throw DomainError("reference wavelength must be positive");
    double alpha_per_m = alpha_per_mm * 1e3;
    return alpha_per_m * (lambda0_nm * 1e-9) / (4.0 * kPi);
}

double alpha_to_db_per_mm(double alpha_per_mm) {
    return 10.0 * std::log10(std::numbers::e) * alpha_per_mm;
}

double alpha_from_db_per_mm(double db_per_mm) {
    return db_per_mm / (10.0 * std::log10(std::numbers::e));
}

double group_velocity_um_per_ps(double group_index) {
    if (!finite(group_index) || group_index <= 0.0)
        throw DomainError("group index must be positive");
    return kSpeedOfLightUmPerPs / group_index;
}

double group_index_from_velocity(double v_g_um_per_ps) {
    if (!finite(v_g_um_per_ps) || v_g_um_per_ps <= 0.0)
        throw DomainError("group velocity must be positive");
    return kSpeedOfLightUmPerPs / v_g_um_per_ps;
}

double free_spectral_range_nm(double lambda_nm, double group_index, double length_mm) {
    if (lambda_nm <= 0.0 || group_index <= 0.0 || length_mm <= 0.0)
        throw DomainError("free_spectral_range_nm requires positive arguments");
    double lambda_m = lambda_nm * 1e-9;
    double fsr_m = lambda_m * lambda_m / (2.0 * group_index * length_mm * 1e-3);
    return fsr_m * 1e9;
}

double DispersionModel::index(double beta) const {
    double d = beta - beta_ref;
    return c0 + c1 * d + 0.5 * c2 * d * d;
}

DispersionModel DispersionModel::at_wavelength(double lambda_ref_nm, double c0, double c1,
                                               double c2) {
    DispersionModel m;
    m.beta_ref = wavelength_to_wavenumber(lambda_ref_nm);
    m.c0 = c0;
    m.c1 = c1;
    m.c2 = c2;
    return m;
}

double group_index(const DispersionModel& dispersion, double beta) {
    if (!finite(beta) || beta <= 0.0)
        throw DomainError("wavenumber must be positive");
    double d = beta - dispersion.beta_ref;
    return dispersion.index(beta) + beta * (dispersion.c1 + dispersion.c2 * d);
}

FresnelEstimate fresnel_estimates(double n, double k) {
    if (!finite(n) || n <= 0.0)
        throw DomainError("refractive index must be positive");
    if (!finite(k) || k < 0.0)
        throw DomainError("absorption index must be non-negative");
    FresnelEstimate out;
    double num = (n - 1.0) * (n - 1.0) + k * k;
    double den = (n + 1.0) * (n + 1.0) + k * k;
    out.reflectivity_R = num / den;
    double circle = n * n + k * k - 1.0;
    if (std::abs(circle) < 1e-12 * (n * n + k * k + 1.0)) {
        // On the n^2+k^2=1 circle the arctan argument blows up; the limit is
        // well defined only along k = 0.
        if (k == 0.0) {
            out.facet_phase_phi = 0.0;
            return out;
        }
        throw DegenerateInputError("facet phase is undefined for n^2 + k^2 = 1");
    }
    out.facet_phase_phi = std::atan(-2.0 * k / circle);
    return out;
}

double coefficient_finesse(double r_tilde) {
    if (!finite(r_tilde) || r_tilde <= 0.0 || r_tilde >= 1.0)
        throw DomainError("total loss must lie in (0,1)");
    return kPi * std::sqrt(r_tilde) / (1.0 - r_tilde);
}

void validate(const Spectrum& spectrum) {
    if (spectrum.wavelength_nm.size() != spectrum.intensity.size())
        throw DataError("spectrum axis and intensity lengths differ");
    if (spectrum.wavelength_nm.size() < 2)
        throw DataError("spectrum must hold at least 2 samples");
    for (size_t i = 0; i < spectrum.size(); ++i) {
        if (!finite(spectrum.wavelength_nm[i]) || spectrum.wavelength_nm[i] <= 0.0)
            throw DataError("spectrum wavelengths must be positive and finite");
        if (i > 0 && spectrum.wavelength_nm[i] <= spectrum.wavelength_nm[i - 1])
            throw DataError("spectrum wavelengths must be strictly increasing");
        if (!finite(spectrum.intensity[i]) || spectrum.intensity[i] < 0.0)
            throw DataError("spectrum intensities must be non-negative and finite");
    }
}

void validate(const DispersionModel& dispersion) {
    if (!finite(dispersion.beta_ref) || dispersion.beta_ref <= 0.0)
        throw DomainError("dispersion beta_ref must be positive");
    if (!finite(dispersion.c0) || dispersion.c0 <= 1.0)
        throw DomainError("effective index c0 must exceed 1");
    if (!finite(dispersion.c1) || !finite(dispersion.c2))
        throw DomainError("dispersion coefficients must be finite");
}

void validate(const ModeSpec& mode) {
    validate(mode.dispersion);
    if (!finite(mode.k) || mode.k < 0.0)
        throw DomainError("mode '" + mode.label + "': absorption index must be >= 0");
    if (!finite(mode.reflectivity_R) || mode.reflectivity_R <= 0.0 || mode.reflectivity_R >= 1.0)
        throw DomainError("mode '" + mode.label + "': reflectivity must lie in (0,1)");
    if (!finite(mode.excitation_x) || mode.excitation_x < 0.0)
        throw DomainError("mode '" + mode.label + "': excitation weight must be >= 0");
    if (!finite(mode.facet_phase_phi))
        throw DomainError("mode '" + mode.label + "': facet phase must be finite");
}

void validate(const ResonatorSpec& resonator) {
    if (!finite(resonator.length_mm) || resonator.length_mm <= 0.0)
        throw DomainError("resonator length must be positive");
    if (resonator.modes.empty())
        throw ConfigError("resonator has no modes");
    std::set<std::string> labels;
    for (const auto& mode : resonator.modes) {
        validate(mode);
        if (!labels.insert(mode.label).second)
            throw ConfigError("duplicate mode label '" + mode.label + "'");
    }
}

void validate(const InstrumentSpec& instrument) {
    if (!finite(instrument.pixel_pitch_pm) || instrument.pixel_pitch_pm <= 0.0)
        throw DomainError("pixel pitch must be positive");
    if (!finite(instrument.psf_fwhm_pm) || instrument.psf_fwhm_pm < 0.0)
        throw DomainError("PSF FWHM must be >= 0");
    if (!finite(instrument.noise_sigma) || instrument.noise_sigma < 0.0)
        throw DomainError("noise sigma must be >= 0");
    if (instrument.envelope_fwhm_nm > 0.0 && instrument.envelope_center_nm <= 0.0)
        throw DomainError("envelope center must be positive when an envelope is set");
    if (instrument.etalon) {
        if (instrument.etalon->fsr_nm <= 0.0)
            throw DomainError("etalon FSR must be positive");
        if (instrument.etalon->modulation_depth < 0.0 || instrument.etalon->modulation_depth >= 1.0)
            throw DomainError("etalon modulation depth must lie in [0,1)");
    }
}

} // namespace fpmode
