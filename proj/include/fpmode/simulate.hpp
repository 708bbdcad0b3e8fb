#pragma once

#include <optional>
#include <vector>

#include "fpmode/model.hpp"

namespace fpmode {

// Exposure schedule for multi-window acquisition. The overlap field records
// the intended design value; the actual overlap follows from centers and span.
struct ExposurePlan {
    std::vector<double> central_wavelengths_nm;
    double span_nm = 0.0;
    double overlap_nm = 0.0;
};

/// Airy transmittance of one lossy dispersive mode:
///   T = (1-R)^2 A / [(1 - R A)^2 + 4 R A sin^2(phi + n(beta) L beta)],
/// with single-pass attenuation A = exp(-2 k L beta).
double single_mode_transmittance(double beta, const ModeSpec& mode, double length_mm);

/// Incoherent weighted sum over modes, I = sum_i x_i T_i, on the given grid.
Spectrum multimode_spectrum(const ResonatorSpec& resonator,
                            const std::vector<double>& wavelength_grid_nm);

struct InstrumentWindow {
    double center_nm = 0.0;
    double span_nm = 0.0;
};

/// Measurement chain, applied in order: source envelope, parasitic etalon,
/// Gaussian PSF convolution (truncated at +-5 sigma), resampling onto the
/// absolute pixel grid (multiples of the pitch), seeded intensity noise.
/// Without an explicit window the pixel grid covers the input span minus the
/// PSF padding. Deterministic for a fixed rng_seed.
Spectrum apply_instrument(const Spectrum& spectrum, const InstrumentSpec& instrument,
                          std::optional<InstrumentWindow> window = std::nullopt);

/// One instrument-filtered spectrum per plan entry, each tagged with its
/// central wavelength. Exposure i uses rng_seed + i. The model is evaluated
/// on a dense grid of dense_oversample points per pixel before filtering.
std::vector<Spectrum> simulate_exposures(const ResonatorSpec& resonator,
                                         const InstrumentSpec& instrument,
                                         const ExposurePlan& plan, int dense_oversample = 8);

/// Uniform wavelength grid [lo, hi] with the given step (inclusive of lo).
std::vector<double> uniform_grid(double lo_nm, double hi_nm, double step_nm);

} // namespace fpmode
