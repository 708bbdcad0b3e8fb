#include "fpmode/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpmode/errors.hpp"
#include "fpmode/fft.hpp"
#include "fpmode/fit.hpp"
#include "fpmode/interpolate.hpp"

namespace fpmode {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(Window window) {
    switch (window) {
    case Window::rectangular: return "rectangular";
    case Window::hann: return "hann";
    case Window::sinc: return "sinc";
    }
    return "rectangular";
}

Window window_from_string(const std::string& name) {
    if (name == "rectangular" || name == "rect")
        return Window::rectangular;
    if (name == "hann")
        return Window::hann;
    if (name == "sinc")
        return Window::sinc;
    throw ConfigError("unknown window '" + name + "'");
}

std::string to_string(DetrendMethod method) {
    return method == DetrendMethod::divide_smooth_baseline ? "divide_smooth_baseline"
                                                           : "subtract_mean";
}

DetrendMethod detrend_from_string(const std::string& name) {
    if (name == "divide_smooth_baseline" || name == "divide")
        return DetrendMethod::divide_smooth_baseline;
    if (name == "subtract_mean")
        return DetrendMethod::subtract_mean;
    throw ConfigError("unknown detrend method '" + name + "'");
}

UniformBetaSignal resample_uniform_wavenumber(const Spectrum& spectrum, int oversample) {
    validate(spectrum);
    if (spectrum.size() < 16)
        throw DataError("resampling needs at least 16 samples");
    if (oversample < 1)
        throw ConfigError("oversample factor must be >= 1");

    const size_t n = spectrum.size();
    // Wavelengths ascend, so wavenumbers descend; build ascending-beta arrays.
    std::vector<double> beta(n), value(n);
    for (size_t i = 0; i < n; ++i) {
        beta[n - 1 - i] = wavelength_to_wavenumber(spectrum.wavelength_nm[i]);
        value[n - 1 - i] = spectrum.intensity[i];
    }

    CubicSpline spline(beta, value);
    UniformBetaSignal out;
    const size_t m = n * static_cast<size_t>(oversample);
    out.beta0 = beta.front();
    out.dbeta = (beta.back() - beta.front()) / static_cast<double>(m - 1);
    out.value.resize(m);
    for (size_t j = 0; j < m; ++j)
        out.value[j] = spline(out.beta0 + static_cast<double>(j) * out.dbeta);
    out.value.front() = value.front();
    out.value.back() = value.back();
    out.source_span_nm = spectrum.wavelength_nm.back() - spectrum.wavelength_nm.front();
    return out;
}

std::vector<double> detrend(const std::vector<double>& intensity, DetrendMethod method,
                            size_t baseline_window) {
    const size_t n = intensity.size();
    if (n < 2)
        throw DataError("detrend needs at least 2 samples");
    if (method == DetrendMethod::subtract_mean) {
        double mean = 0.0;
        for (double v : intensity)
            mean += v;
        mean /= static_cast<double>(n);
        std::vector<double> out(n);
        for (size_t i = 0; i < n; ++i)
            out[i] = intensity[i] - mean;
        return out;
    }
    size_t window = baseline_window ? baseline_window : std::max<size_t>(n / 8, 3);
    if (window > n)
        throw ConfigError("baseline window is wider than the signal");
    for (double v : intensity)
        if (!(v > 0.0))
            throw DomainError("baseline division requires positive intensities");
    std::vector<double> baseline = moving_average(intensity, window);
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = intensity[i] / baseline[i];
    return out;
}

Spectrum detrend(const Spectrum& spectrum, DetrendMethod method, size_t baseline_window) {
    validate(spectrum);
    Spectrum out = spectrum;
    out.intensity = detrend(spectrum.intensity, method, baseline_window);
    if (method == DetrendMethod::subtract_mean) {
        // The invariant of non-negative intensities does not survive mean
        // subtraction; shift is left to the transform stage instead.
        for (auto& v : out.intensity)
            v = std::max(v, 0.0);
    }
    return out;
}

namespace detail {

std::vector<double> window_coefficients(Window window, size_t n) {
    std::vector<double> w(n, 1.0);
    if (n == 1 || window == Window::rectangular)
        return w;
    const double denom = static_cast<double>(n - 1);
    switch (window) {
    case Window::rectangular:
        break;
    case Window::hann:
        for (size_t j = 0; j < n; ++j)
            w[j] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(j) / denom);
        break;
    case Window::sinc: {
        // Lanczos window, sinc(2j/(n-1) - 1).
        for (size_t j = 0; j < n; ++j) {
            double u = 2.0 * static_cast<double>(j) / denom - 1.0;
            w[j] = u == 0.0 ? 1.0 : std::sin(kPi * u) / (kPi * u);
        }
        break;
    }
    }
    return w;
}

TransformResult windowed_dft(const double* data, size_t n, Window window, int zero_pad_factor,
                             bool subtract_mean) {
    if (n < 2)
        throw DataError("transform needs at least 2 samples");
    if (zero_pad_factor < 1)
        throw ConfigError("zero-pad factor must be >= 1");

    TransformResult out;
    out.n_signal = n;
    out.n_padded = next_pow2(n * static_cast<size_t>(zero_pad_factor));

    double mean = 0.0;
    if (subtract_mean) {
        for (size_t j = 0; j < n; ++j)
            mean += data[j];
        mean /= static_cast<double>(n);
    }

    std::vector<double> w = window_coefficients(window, n);
    out.processed.assign(out.n_padded, 0.0);
    out.window_sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
        out.processed[j] = (data[j] - mean) * w[j];
        out.window_sum += w[j];
    }

    std::vector<std::complex<double>> bins(out.n_padded);
    for (size_t j = 0; j < out.n_padded; ++j)
        bins[j] = out.processed[j];
    fft_inplace(bins);
    out.bins = std::move(bins);
    return out;
}

std::vector<double> noise_floor(const std::vector<double>& amplitude, size_t window,
                                double quantile) {
    const size_t n = amplitude.size();
    window = std::clamp<size_t>(window, 8, n);
    quantile = std::clamp(quantile, 0.0, 1.0);
    const size_t nblocks = (n + window - 1) / window;
    std::vector<double> centers(nblocks), values(nblocks);
    std::vector<double> scratch;
    for (size_t b = 0; b < nblocks; ++b) {
        size_t lo = b * window;
        size_t hi = std::min(n, lo + window);
        scratch.assign(amplitude.begin() + lo, amplitude.begin() + hi);
        size_t rank = static_cast<size_t>(quantile * static_cast<double>(scratch.size() - 1));
        std::nth_element(scratch.begin(), scratch.begin() + rank, scratch.end());
        centers[b] = 0.5 * static_cast<double>(lo + hi - 1);
        values[b] = scratch[rank];
    }
    std::vector<double> floor(n);
    for (size_t i = 0; i < n; ++i)
        floor[i] = nblocks == 1 ? values[0]
                                : linear_interp(centers, values, static_cast<double>(i));
    return floor;
}

namespace {

// 3-point quadratic refinement on the log amplitude.
PeakRead refine(const FourierSpectrum& fs, size_t i) {
    PeakRead out;
    out.index = i;
    out.position_mm = fs.optical_length_mm[i];
    out.amplitude = fs.amplitude[i];
    if (i == 0 || i + 1 >= fs.amplitude.size())
        return out;
    double a = fs.amplitude[i - 1], b = fs.amplitude[i], c = fs.amplitude[i + 1];
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        return out;
    double la = std::log(a), lb = std::log(b), lc = std::log(c);
    double denom = la - 2.0 * lb + lc;
    if (!(denom < 0.0))
        return out;
    double delta = std::clamp(0.5 * (la - lc) / denom, -0.5, 0.5);
    out.position_mm = fs.optical_length_mm[i] + delta * fs.bin_mm;
    out.amplitude = std::exp(lb - 0.25 * (la - lc) * delta);
    return out;
}

} // namespace

std::optional<PeakRead> find_peak_near(const FourierSpectrum& fs, double expected_mm,
                                       double search_bins) {
    if (fs.amplitude.size() < 3 || fs.bin_mm <= 0.0)
        return std::nullopt;
    const double half_window = search_bins * fs.resolution_bin_mm;
    const auto& axis = fs.optical_length_mm;
    size_t lo = std::lower_bound(axis.begin(), axis.end(), expected_mm - half_window) -
                axis.begin();
    size_t hi = std::upper_bound(axis.begin(), axis.end(), expected_mm + half_window) -
                axis.begin();
    lo = std::max<size_t>(lo, 1);
    hi = std::min(hi, axis.size() - 1);
    if (lo >= hi)
        return std::nullopt;
    size_t best = lo;
    for (size_t i = lo; i < hi; ++i)
        if (fs.amplitude[i] > fs.amplitude[best])
            best = i;
    return refine(fs, best);
}

} // namespace detail

namespace {

FourierSpectrum assemble_spectrum(const detail::TransformResult& tr, double beta0, double dbeta,
                                  Window window, int zero_pad_factor, double source_span_nm) {
    (void)beta0;
    FourierSpectrum fs;
    const size_t half = tr.n_padded / 2 + 1;
    fs.optical_length_mm.resize(half);
    fs.amplitude.resize(half);
    const double dx = 2.0 * kPi / (static_cast<double>(tr.n_padded) * dbeta); // x-axis step
    for (size_t k = 0; k < half; ++k) {
        fs.optical_length_mm[k] = 0.5 * dx * static_cast<double>(k) * 1e3; // x/2, mm
        double scale = (k == 0) ? 1.0 / tr.window_sum : 2.0 / tr.window_sum;
        fs.amplitude[k] = scale * std::abs(tr.bins[k]);
    }
    fs.window = to_string(window);
    fs.zero_pad_factor = zero_pad_factor;
    fs.source_span_nm = source_span_nm;
    fs.beta_span = static_cast<double>(tr.n_signal) * dbeta;
    fs.resolution_bin_mm = kPi / (static_cast<double>(tr.n_signal) * dbeta) * 1e3;
    fs.bin_mm = kPi / (static_cast<double>(tr.n_padded) * dbeta) * 1e3;

    // Uncertainty-principle guard: the dominant component should sit beyond a
    // few dozen resolution bins ("fringes") for a usable mode spectrum.
    size_t guard = static_cast<size_t>(5.0 * fs.resolution_bin_mm / fs.bin_mm);
    if (guard + 1 < half) {
        size_t peak = guard + 1;
        for (size_t k = guard + 1; k < half; ++k)
            if (fs.amplitude[k] > fs.amplitude[peak])
                peak = k;
        double fringes = fs.optical_length_mm[peak] / fs.resolution_bin_mm;
        fs.resolution_warning = fringes < 30.0;
    }
    return fs;
}

} // namespace

FourierSpectrum mode_spectrum(const UniformBetaSignal& signal, Window window,
                              int zero_pad_factor, bool subtract_mean) {
    if (signal.value.size() < 16)
        throw DataError("mode spectrum needs at least 16 samples");
    if (!(signal.dbeta > 0.0))
        throw DataError("signal must have a positive wavenumber step");
    auto tr = detail::windowed_dft(signal.value.data(), signal.value.size(), window,
                                   zero_pad_factor, subtract_mean);
    return assemble_spectrum(tr, signal.beta0, signal.dbeta, window, zero_pad_factor,
                             signal.source_span_nm);
}

FourierSpectrum mode_spectrum_complex(const std::vector<std::complex<double>>& values,
                                      double beta0, double dbeta, Window window,
                                      int zero_pad_factor) {
    if (values.size() < 16)
        throw DataError("mode spectrum needs at least 16 samples");
    if (!(dbeta > 0.0))
        throw DataError("signal must have a positive wavenumber step");
    const size_t n = values.size();
    std::complex<double> mean = 0.0;
    for (const auto& v : values)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> w = detail::window_coefficients(window, n);
    detail::TransformResult tr;
    tr.n_signal = n;
    tr.n_padded = next_pow2(n * static_cast<size_t>(zero_pad_factor));
    std::vector<std::complex<double>> bins(tr.n_padded, 0.0);
    tr.window_sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
        bins[j] = (values[j] - mean) * w[j];
        tr.window_sum += w[j];
    }
    fft_inplace(bins);
    tr.bins = std::move(bins);
    return assemble_spectrum(tr, beta0, dbeta, window, zero_pad_factor, 0.0);
}

std::vector<ModeDetection> detect_modes(const FourierSpectrum& fs,
                                        std::optional<double> length_mm,
                                        const DetectParams& params) {
    if (fs.zero_pad_factor < 4)
        throw ConfigError("detect_modes requires a transform with zero_pad_factor >= 4");
    if (fs.amplitude.size() < 8)
        throw DataError("transform is too short");
    if (length_mm && !(*length_mm > 0.0))
        throw DomainError("length must be positive");

    const size_t n = fs.amplitude.size();
    const double pad_ratio = fs.resolution_bin_mm / fs.bin_mm;
    const size_t floor_window =
        std::max<size_t>(16, static_cast<size_t>(params.floor_window_bins * pad_ratio));
    std::vector<double> floor =
        detail::noise_floor(fs.amplitude, floor_window, params.noise_floor_quantile);

    double lo_mm = length_mm ? params.ng_lo * *length_mm
                             : std::max(params.min_optical_length_mm, 3.0 * fs.resolution_bin_mm);
    double hi_mm = length_mm ? params.ng_hi * *length_mm
                             : fs.optical_length_mm.back() - fs.resolution_bin_mm;
    size_t lo = std::lower_bound(fs.optical_length_mm.begin(), fs.optical_length_mm.end(), lo_mm) -
                fs.optical_length_mm.begin();
    size_t hi = std::upper_bound(fs.optical_length_mm.begin(), fs.optical_length_mm.end(), hi_mm) -
                fs.optical_length_mm.begin();
    lo = std::max<size_t>(lo, 1);
    hi = std::min(hi, n - 1);

    double global_max = 0.0;
    for (size_t i = lo; i < hi; ++i)
        global_max = std::max(global_max, fs.amplitude[i]);

    struct Candidate {
        size_t index;
        double amplitude;
    };
    std::vector<Candidate> candidates;
    for (size_t i = lo; i < hi; ++i) {
        double a = fs.amplitude[i];
        if (a <= fs.amplitude[i - 1] || a < fs.amplitude[i + 1])
            continue;
        if (a < params.min_prominence * floor[i])
            continue;
        if (a < params.min_rel_amplitude * global_max)
            continue;
        candidates.push_back({i, a});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.amplitude > b.amplitude; });

    struct Accepted {
        size_t index;
        bool unresolved = false;
    };
    std::vector<Accepted> accepted;
    const double merge_mm = params.merge_radius_bins * fs.resolution_bin_mm;
    for (const auto& cand : candidates) {
        bool merged = false;
        for (auto& acc : accepted) {
            double gap = std::abs(fs.optical_length_mm[cand.index] -
                                  fs.optical_length_mm[acc.index]);
            if (gap < merge_mm) {
                acc.unresolved = true; // unresolvable companion
                merged = true;
                break;
            }
        }
        if (!merged)
            accepted.push_back({cand.index});
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const Accepted& a, const Accepted& b) { return a.index < b.index; });

    std::vector<ModeDetection> detections;
    detections.reserve(accepted.size());
    const double ol_max = fs.optical_length_mm.back();
    for (size_t idx = 0; idx < accepted.size(); ++idx) {
        auto fundamental = detail::find_peak_near(
            fs, fs.optical_length_mm[accepted[idx].index], params.merge_radius_bins);
        if (!fundamental)
            continue;
        ModeDetection det;
        det.label = "mode" + std::to_string(idx + 1);
        det.unresolved = accepted[idx].unresolved;
        det.optical_length_mm = fundamental->position_mm;
        det.harmonic_amplitudes.push_back(fundamental->amplitude);

        std::vector<double> ladder_floors{floor[fundamental->index]};
        for (int m = 2; m <= params.max_harmonics; ++m) {
            double target = static_cast<double>(m) * fundamental->position_mm;
            if (target > ol_max - fs.resolution_bin_mm)
                break;
            auto harmonic = detail::find_peak_near(fs, target, 1.0);
            if (!harmonic)
                break;
            det.harmonic_amplitudes.push_back(harmonic->amplitude);
            ladder_floors.push_back(floor[harmonic->index]);
        }

        size_t usable = 0;
        while (usable < det.harmonic_amplitudes.size() &&
               det.harmonic_amplitudes[usable] > params.confirm_margin * ladder_floors[usable])
            ++usable;
        det.confirmed = usable >= 2;
        if (usable >= 2) {
            std::vector<double> amps(det.harmonic_amplitudes.begin(),
                                     det.harmonic_amplitudes.begin() + usable);
            std::vector<double> floors(ladder_floors.begin(), ladder_floors.begin() + usable);
            LossRatio ratio = total_loss_ratio(amps, floors);
            det.r_tilde = ratio.r_tilde;
            det.r_tilde_sigma = ratio.sigma;
            det.harmonics_used = ratio.harmonics_used;
            det.unphysical_gain = ratio.unphysical_gain;
        }
        if (length_mm)
            det.group_index = det.optical_length_mm / *length_mm;
        det.fringe_count = det.optical_length_mm / fs.resolution_bin_mm;
        det.low_fringe_warning = det.fringe_count < params.min_fringes;
        detections.push_back(std::move(det));
    }
    return detections;
}

void excitation_fractions(const FourierSpectrum& fs, std::vector<ModeDetection>& detections) {
    if (detections.empty())
        throw DomainError("excitation fractions need at least one detection");
    std::vector<size_t> order(detections.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return detections[a].optical_length_mm < detections[b].optical_length_mm;
    });

    const double cap = 10.0 * fs.resolution_bin_mm;
    std::vector<double> integrals(detections.size(), 0.0);
    double total = 0.0;
    for (size_t oi = 0; oi < order.size(); ++oi) {
        auto& det = detections[order[oi]];
        double pos = det.optical_length_mm;
        double gap_lo = oi > 0 ? pos - detections[order[oi - 1]].optical_length_mm : 2.0 * cap;
        double gap_hi = oi + 1 < order.size()
                            ? detections[order[oi + 1]].optical_length_mm - pos
                            : 2.0 * cap;
        double half = std::min({cap, gap_lo / 2.0, gap_hi / 2.0});
        det.window_truncated = half < cap;

        const auto& axis = fs.optical_length_mm;
        size_t lo = std::lower_bound(axis.begin(), axis.end(), pos - half) - axis.begin();
        size_t hi = std::upper_bound(axis.begin(), axis.end(), pos + half) - axis.begin();
        double integral = 0.0;
        for (size_t i = lo; i + 1 < hi; ++i)
            integral += 0.5 * (fs.amplitude[i] + fs.amplitude[i + 1]) * fs.bin_mm;
        integrals[order[oi]] = integral;
        total += integral;
    }
    for (size_t i = 0; i < detections.size(); ++i)
        detections[i].excitation_fraction = total > 0.0 ? integrals[i] / total : 0.0;
}

Spectrogram spectrogram(const UniformBetaSignal& signal, double window_fraction, int n_slices,
                        Window window, int zero_pad_factor,
                        std::optional<double> min_mode_gap_mm) {
    if (!(window_fraction > 0.0) || window_fraction > 1.0)
        throw ConfigError("window fraction must lie in (0,1]");
    if (n_slices < 2)
        throw ConfigError("spectrogram needs at least 2 slices");
    const size_t n = signal.value.size();
    if (n < 32)
        throw DataError("signal is too short for a spectrogram");

    size_t width = std::max<size_t>(16, static_cast<size_t>(std::lround(
                                            window_fraction * static_cast<double>(n))));
    width = std::min(width, n);

    Spectrogram out;
    out.window_fraction = window_fraction;
    out.window = to_string(window);

    const double c_lo = 0.5 * static_cast<double>(width - 1);
    const double c_hi = static_cast<double>(n - 1) - c_lo;
    for (int s = 0; s < n_slices; ++s) {
        double center = n_slices == 1
                            ? 0.5 * (c_lo + c_hi)
                            : c_lo + (c_hi - c_lo) * static_cast<double>(s) /
                                         static_cast<double>(n_slices - 1);
        size_t start = static_cast<size_t>(std::clamp<double>(
            std::lround(center - c_lo), 0.0, static_cast<double>(n - width)));

        auto tr = detail::windowed_dft(signal.value.data() + start, width, window,
                                       zero_pad_factor, true);
        FourierSpectrum column = assemble_spectrum(tr, signal.beta0, signal.dbeta, window,
                                                   zero_pad_factor, signal.source_span_nm);
        if (out.optical_length_mm.empty()) {
            out.optical_length_mm = column.optical_length_mm;
            out.resolution_bin_mm = column.resolution_bin_mm;
            out.amplitude.reserve(static_cast<size_t>(n_slices) * column.amplitude.size());
        }
        double beta_center =
            signal.beta0 + (static_cast<double>(start) + c_lo) * signal.dbeta;
        out.slice_center_nm.push_back(wavenumber_to_wavelength(beta_center));
        out.amplitude.insert(out.amplitude.end(), column.amplitude.begin(),
                             column.amplitude.end());
    }
    if (min_mode_gap_mm && out.resolution_bin_mm > *min_mode_gap_mm / 2.0)
        out.warnings.push_back("slice window too short to resolve adjacent modes");
    return out;
}

} // namespace fpmode
