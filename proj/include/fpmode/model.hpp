#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fpmode {

// Unit conventions used throughout the library:
//   wavelengths      nm      (vacuum)
//   wavenumbers      rad/m   (vacuum, beta = 2*pi/lambda)
//   lengths          mm      (waveguide and optical lengths)
//   pixel pitch/PSF  pm
//   loss coefficient 1/mm (and dB/mm where stated)
// All types below are immutable values; all free functions are pure.

inline constexpr double kSpeedOfLightUmPerPs = 299.792458;

/// beta = 2*pi/lambda with lambda converted to meters.
double wavelength_to_wavenumber(double lambda_nm);
double wavenumber_to_wavelength(double beta_rad_per_m);

/// alpha = 4*pi*k/lambda0, reported per mm.
double alpha_from_k(double k, double lambda0_nm);
double k_from_alpha(double alpha_per_mm, double lambda0_nm);

/// Power loss conversion, dB/mm = 10*log10(e) * alpha.
double alpha_to_db_per_mm(double alpha_per_mm);
double alpha_from_db_per_mm(double db_per_mm);

/// v_g = c/n_g in um/ps, and back.
double group_velocity_um_per_ps(double group_index);
double group_index_from_velocity(double v_g_um_per_ps);

/// Fringe spacing of a resonator, in wavelength: lambda^2 / (2 n_g L).
double free_spectral_range_nm(double lambda_nm, double group_index, double length_mm);

// Second-order Taylor expansion of the effective index around beta_ref:
//   n(beta) = c0 + c1*d + 0.5*c2*d^2,  d = beta - beta_ref
struct DispersionModel {
    double beta_ref = 0.0; // rad/m
    double c0 = 1.0;
    double c1 = 0.0; // dn/dbeta, m/rad
    double c2 = 0.0; // d2n/dbeta2, m^2/rad^2

    double index(double beta) const;

    static DispersionModel at_wavelength(double lambda_ref_nm, double c0,
                                         double c1 = 0.0, double c2 = 0.0);
};

/// n_g = n + beta * dn/dbeta.
double group_index(const DispersionModel& dispersion, double beta);

struct FresnelEstimate {
    double reflectivity_R = 0.0;
    double facet_phase_phi = 0.0; // rad
};

/// Fresnel estimates for a facet between a lossy medium (n, k) and air:
/// R = [(n-1)^2 + k^2] / [(n+1)^2 + k^2], phi = arctan(-2k / (n^2 + k^2 - 1)).
FresnelEstimate fresnel_estimates(double n, double k);

/// Coefficient of finesse, F = pi*sqrt(r)/(1-r) for total loss r in (0,1).
double coefficient_finesse(double r_tilde);

// One spatial mode of the waveguide.
struct ModeSpec {
    std::string label;
    DispersionModel dispersion;
    double k = 0.0;              // absorption index, dimensionless
    double reflectivity_R = 0.3; // facet intensity reflectivity, (0,1)
    double facet_phase_phi = 0.0;
    double excitation_x = 1.0; // non-negative coupling weight
};

struct ResonatorSpec {
    double length_mm = 0.0;
    std::vector<ModeSpec> modes;
};

struct EtalonSpec {
    double fsr_nm = 0.0;
    double modulation_depth = 0.0; // [0,1)
};

// The measurement chain: source envelope, parasitic etalon, spectrograph PSF,
// pixel sampling and intensity noise.
struct InstrumentSpec {
    double pixel_pitch_pm = 5.0;
    double psf_fwhm_pm = 0.0;      // Gaussian PSF FWHM; 0 disables
    double envelope_center_nm = 0; // Gaussian source envelope; fwhm <= 0 -> flat
    double envelope_fwhm_nm = 0;
    double noise_sigma = 0.0; // relative, scales with local intensity
    std::optional<EtalonSpec> etalon;
    unsigned long long rng_seed = 0;
};

// Sampled intensity versus vacuum wavelength.
struct Spectrum {
    std::vector<double> wavelength_nm; // strictly increasing
    std::vector<double> intensity;     // non-negative, arbitrary linear units
    std::optional<double> exposure_center_nm;
    std::string source_tag;
    std::vector<std::string> warnings;

    size_t size() const { return wavelength_nm.size(); }
};

// Per-mode quantities recovered from the Fourier-domain analysis.
struct ModeDetection {
    std::string label;
    double optical_length_mm = 0.0; // n_g * L, fundamental peak position
    std::optional<double> group_index;
    std::vector<double> harmonic_amplitudes; // passes m = 1..M
    double r_tilde = 0.0;                    // ratio-derived total loss (raw)
    double r_tilde_sigma = 0.0;
    int harmonics_used = 0; // harmonics feeding r_tilde
    bool confirmed = false; // second harmonic above the local noise floor
    double excitation_fraction = 0.0;
    bool unresolved = false;       // merged with a peak closer than the resolution limit
    bool window_truncated = false; // excitation window clipped at a neighbor midpoint
    bool unphysical_gain = false;  // some harmonic ratio >= 1
    bool low_fringe_warning = false;
    double fringe_count = 0.0; // fundamental position in resolution bins
};

void validate(const Spectrum& spectrum);
void validate(const DispersionModel& dispersion);
void validate(const ModeSpec& mode);
void validate(const ResonatorSpec& resonator);
void validate(const InstrumentSpec& instrument);

} // namespace fpmode
