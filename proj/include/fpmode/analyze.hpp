#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fpmode/model.hpp"

namespace fpmode {

enum class Window { rectangular, hann, sinc };

std::string to_string(Window window);
Window window_from_string(const std::string& name);

enum class DetrendMethod { divide_smooth_baseline, subtract_mean };

std::string to_string(DetrendMethod method);
DetrendMethod detrend_from_string(const std::string& name);

// Intensity on a uniform vacuum-wavenumber grid, beta_j = beta0 + j*dbeta.
struct UniformBetaSignal {
    double beta0 = 0.0; // rad/m
    double dbeta = 0.0; // rad/m
    std::vector<double> value;
    double source_span_nm = 0.0;
};

/// Cubic resampling of a wavelength-sampled spectrum onto a uniform wavenumber
/// grid with oversample * n samples. Endpoints are preserved.
UniformBetaSignal resample_uniform_wavenumber(const Spectrum& spectrum, int oversample = 1);

/// divide_smooth_baseline divides by a centered moving average (window in
/// samples, 0 -> n/8; keep it wider than ~20 fringes); subtract_mean removes
/// the DC level only. Both preserve fringe phase.
std::vector<double> detrend(const std::vector<double>& intensity, DetrendMethod method,
                            size_t baseline_window = 0);
Spectrum detrend(const Spectrum& spectrum, DetrendMethod method, size_t baseline_window = 0);

// Modulus of the windowed, zero-padded transform versus optical length.
// Axis convention: with kernel exp(-i x beta) the conjugate variable x is
// halved, so a mode of group index n_g peaks at m * n_g * L for m = 1,2,...
// Amplitudes are scaled so a unit cosine fringe gives a first peak of 1.
struct FourierSpectrum {
    std::vector<double> optical_length_mm;
    std::vector<double> amplitude;
    std::string window;
    int zero_pad_factor = 1;
    double source_span_nm = 0.0;
    double beta_span = 0.0;         // n * dbeta, rad/m
    double resolution_bin_mm = 0.0; // unpadded bin, pi / (n * dbeta)
    double bin_mm = 0.0;            // padded axis spacing
    std::string axis_convention = "optical_length = x/2 with kernel exp(-i x beta)";
    bool resolution_warning = false; // strongest component below ~30 fringes
};

FourierSpectrum mode_spectrum(const UniformBetaSignal& signal,
                              Window window = Window::rectangular, int zero_pad_factor = 8,
                              bool subtract_mean = true);

/// Same transform for a complex-valued signal (only the non-negative half of
/// the axis is reported). Used for the phase-shift diagnostics.
FourierSpectrum mode_spectrum_complex(const std::vector<std::complex<double>>& values,
                                      double beta0, double dbeta,
                                      Window window = Window::rectangular,
                                      int zero_pad_factor = 8);

struct DetectParams {
    double noise_floor_quantile = 0.9;
    int floor_window_bins = 64;      // rolling-quantile span, in resolution bins
    double min_prominence = 3.0;     // candidate threshold, times the local floor
    double min_rel_amplitude = 3e-3; // candidate threshold, fraction of the global max
    double min_optical_length_mm = 0.5; // lower cutoff when the length is unknown
    double ng_lo = 1.0;                 // plausible group-index window when L is known
    double ng_hi = 6.0;
    int max_harmonics = 5;
    double merge_radius_bins = 2.0; // peaks closer than this are merged
    double min_fringes = 30.0;      // below this the position is unreliable
    // Harmonics are read as the maximum over a +-1 resolution bin search, so
    // "above the floor" carries a margin against the maximum of pure noise.
    double confirm_margin = 1.25;
};

/// Peak detection and harmonic characterization. Requires zero_pad_factor >= 4
/// on the input transform. Returns detections sorted by optical length; an
/// empty list means no peaks above the floor (not an error).
std::vector<ModeDetection> detect_modes(const FourierSpectrum& fs,
                                        std::optional<double> length_mm,
                                        const DetectParams& params = {});

/// Integrates |amplitude| around each first-pass peak (half the gap to the
/// nearest neighbor, capped at 10 resolution bins) and normalizes the results
/// to sum to 1 over the given detections. Fills excitation_fraction and the
/// window_truncated flag in place.
void excitation_fractions(const FourierSpectrum& fs, std::vector<ModeDetection>& detections);

struct Spectrogram {
    std::vector<double> slice_center_nm;  // one per column
    std::vector<double> optical_length_mm;
    std::vector<double> amplitude; // column-major: amplitude[c * bins + k]
    double window_fraction = 0.0;
    std::string window;
    double resolution_bin_mm = 0.0; // per-column resolution
    std::vector<std::string> warnings;
};

/// Sliding-window transforms with slice centers spanning the record. Columns
/// with window_fraction = 1 reproduce mode_spectrum exactly.
Spectrogram spectrogram(const UniformBetaSignal& signal, double window_fraction = 0.7,
                        int n_slices = 8, Window window = Window::sinc,
                        int zero_pad_factor = 8,
                        std::optional<double> min_mode_gap_mm = std::nullopt);

namespace detail {

// Windowed, mean-subtracted, zero-padded DFT used by both mode_spectrum and
// spectrogram; exposing it keeps the two bit-identical and testable.
struct TransformResult {
    std::vector<std::complex<double>> bins; // full padded FFT
    std::vector<double> processed;          // windowed (and padded) input
    double window_sum = 0.0;
    size_t n_signal = 0;
    size_t n_padded = 0;
};

TransformResult windowed_dft(const double* data, size_t n, Window window, int zero_pad_factor,
                             bool subtract_mean);

std::vector<double> window_coefficients(Window window, size_t n);

/// Rolling-quantile noise floor on the amplitude curve (window in samples).
std::vector<double> noise_floor(const std::vector<double>& amplitude, size_t window,
                                double quantile);

struct PeakRead {
    double position_mm = 0.0;
    double amplitude = 0.0;
    size_t index = 0;
};

/// Local maximum near expected_mm (within +- search_bins resolution bins),
/// refined by 3-point quadratic interpolation of the log amplitude.
std::optional<PeakRead> find_peak_near(const FourierSpectrum& fs, double expected_mm,
                                       double search_bins);

} // namespace detail

} // namespace fpmode
