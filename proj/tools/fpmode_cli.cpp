// fpmode: simulate and analyze multimode Fabry-Perot transmission spectra.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fpmode/analyze.hpp"
#include "fpmode/calibrate.hpp"
#include "fpmode/errors.hpp"
#include "fpmode/fit.hpp"
#include "fpmode/io.hpp"
#include "fpmode/model.hpp"
#include "fpmode/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fpmode;

namespace {

constexpr int kSchemaVersion = 1;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    long long seed = -1; // < 0: keep the configured seed
    int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON configuration document");
    cmd->add_option("--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the configured rng seed");
    cmd->add_flag("-v,--verbose", opts.verbosity, "increase verbosity");
}

json load_config(const CommonOpts& opts) {
    if (opts.config_path.empty())
        return json::object();
    return io::load_json(opts.config_path);
}

DetectParams detect_params_from(const json& cfg) {
    DetectParams p;
    if (!cfg.contains("detect"))
        return p;
    const json& d = cfg["detect"];
    p.noise_floor_quantile = d.value("noise_floor_quantile", p.noise_floor_quantile);
    p.floor_window_bins = d.value("floor_window_bins", p.floor_window_bins);
    p.min_prominence = d.value("min_prominence", p.min_prominence);
    p.min_rel_amplitude = d.value("min_rel_amplitude", p.min_rel_amplitude);
    p.min_optical_length_mm = d.value("min_optical_length_mm", p.min_optical_length_mm);
    p.ng_lo = d.value("ng_lo", p.ng_lo);
    p.ng_hi = d.value("ng_hi", p.ng_hi);
    p.max_harmonics = d.value("max_harmonics", p.max_harmonics);
    p.merge_radius_bins = d.value("merge_radius_bins", p.merge_radius_bins);
    p.min_fringes = d.value("min_fringes", p.min_fringes);
    p.confirm_margin = d.value("confirm_margin", p.confirm_margin);
    return p;
}

int run_simulate(const CommonOpts& opts) {
    json cfg = load_config(opts);
    if (!cfg.contains("resonator"))
        throw ConfigError("missing field: resonator");
    if (!cfg.contains("instrument"))
        throw ConfigError("missing field: instrument");
    ResonatorSpec resonator = io::resonator_from_json(cfg["resonator"], "resonator");
    InstrumentSpec instrument = io::instrument_from_json(cfg["instrument"], "instrument");
    if (opts.seed >= 0)
        instrument.rng_seed = static_cast<unsigned long long>(opts.seed);

    ExposurePlan plan;
    if (cfg.contains("plan")) {
        plan = io::plan_from_json(cfg["plan"], "plan");
    } else {
        plan.central_wavelengths_nm = {instrument.envelope_center_nm > 0.0
                                           ? instrument.envelope_center_nm
                                           : 775.0};
        plan.span_nm = 14.5;
    }
    int dense_oversample = cfg.value("dense_oversample", 8);

    validate(resonator);
    validate(instrument);
    auto exposures = simulate_exposures(resonator, instrument, plan, dense_oversample);

    fs::path dir(opts.out_dir);
    json manifest{{"schema_version", kSchemaVersion},
                  {"plan", io::to_json(plan)},
                  {"rng_seed", instrument.rng_seed},
                  {"dense_oversample", dense_oversample}};
    json files = json::array();
    json warnings = json::array();
    for (size_t i = 0; i < exposures.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "exposure_%02zu.csv", i);
        io::write_spectrum_csv(dir / name, exposures[i]);
        files.push_back(name);
        for (const auto& w : exposures[i].warnings)
            warnings.push_back(w);
    }
    manifest["files"] = files;
    manifest["warnings"] = warnings;
    io::atomic_write_json(dir / "manifest.json", manifest);
    std::cout << "wrote " << exposures.size() << " exposure(s) and manifest.json to "
              << dir.string() << "\n";
    return 0;
}

int run_calibrate(const CommonOpts& opts, const std::string& lines_path,
                  const std::string& initial_path, double band_lo, double band_hi) {
    json cfg = load_config(opts);
    auto lines = io::read_lines_csv(lines_path);
    json initial_doc = io::load_json(initial_path);
    const json& pj = initial_doc.contains("params") ? initial_doc["params"] : initial_doc;
    CzernyTurnerParams initial = io::czerny_params_from_json(pj, "params");

    std::vector<CtParam> free_params{CtParam::gamma, CtParam::focal, CtParam::dx_in};
    if (initial_doc.contains("free_params")) {
        free_params.clear();
        for (const auto& name : initial_doc["free_params"])
            free_params.push_back(ct_param_from_string(name.get<std::string>()));
    }

    CalibrationFit fit = fit_calibration(lines, initial, free_params);
    NonlinearityOptions nopts;
    if (cfg.contains("nonlinearity")) {
        nopts.lambda_c_nm = cfg["nonlinearity"].value("lambda_c_nm", 0.0);
        nopts.dx_half_range_mm =
            cfg["nonlinearity"].value("dx_half_range_mm", nopts.dx_half_range_mm);
    }
    NonlinearityReport nl = nonlinearity_report(fit.params, band_lo, band_hi, nopts);

    json free_names = json::array();
    for (auto p : fit.free_params)
        free_names.push_back(to_string(p));
    json out{{"schema_version", kSchemaVersion},
             {"model", "czerny_turner"},
             {"params", io::to_json(fit.params)},
             {"fit",
              {{"converged", fit.converged},
               {"iterations", fit.iterations},
               {"message", fit.message},
               {"rms_pm", fit.rms_pm},
               {"residuals_pm", fit.residuals_pm},
               {"free_params", free_names},
               {"covariance", fit.covariance}}},
             {"nonlinearity",
              {{"max_abs_deviation_pm", nl.max_abs_deviation_nm * 1e3},
               {"relative", nl.relative},
               {"band_nm", {band_lo, band_hi}}}}};
    io::atomic_write_json(fs::path(opts.out_dir) / "calibration.json", out);
    std::cout << "calibration rms: " << fit.rms_pm << " pm over " << lines.size()
              << " lines; nonlinearity " << nl.relative * 100.0 << " % of the band\n";
    if (!fit.converged)
        throw FitError("calibration fit did not converge: " + fit.message);
    return 0;
}

struct AnalyzeFlags {
    std::vector<std::string> spectra;
    std::string calibration_path;
    double length_mm = 0.0;
    int oversample = 2;
    int zero_pad = 8;
    std::string window = "rectangular";
    std::string detrend_method = "divide_smooth_baseline";
    size_t baseline_window = 0;
    double pixel_pitch_pm = 0.0;
    double psf_fwhm_pm = -1.0;
};

int run_analyze(const CommonOpts& opts, const AnalyzeFlags& flags) {
    json cfg = load_config(opts);
    const int oversample = cfg.value("oversample", flags.oversample);
    const int zero_pad = cfg.value("zero_pad_factor", flags.zero_pad);
    const std::string window_name = cfg.value("window", flags.window);
    const std::string detrend_name = cfg.value("detrend", flags.detrend_method);
    double length_mm = flags.length_mm > 0.0 ? flags.length_mm : cfg.value("length_mm", 0.0);

    std::optional<CzernyTurnerParams> calibration;
    if (!flags.calibration_path.empty()) {
        json cal = io::load_json(flags.calibration_path);
        const json& pj = cal.contains("params") ? cal["params"] : cal;
        calibration = io::czerny_params_from_json(pj, "params");
    }

    std::optional<InstrumentSpec> instr;
    if (cfg.contains("instrument"))
        instr = io::instrument_from_json(cfg["instrument"], "instrument");
    if (flags.psf_fwhm_pm >= 0.0) {
        if (!instr)
            instr = InstrumentSpec{};
        instr->psf_fwhm_pm = flags.psf_fwhm_pm;
    }
    if (flags.pixel_pitch_pm > 0.0) {
        if (!instr)
            instr = InstrumentSpec{};
        instr->pixel_pitch_pm = flags.pixel_pitch_pm;
    }

    std::vector<Spectrum> exposures;
    for (const auto& path : flags.spectra)
        exposures.push_back(io::to_spectrum(io::read_spectrum_file(path), calibration));

    StitchResult stitched = stitch(exposures);
    Spectrum merged = std::move(stitched.merged);

    Spectrum conditioned = merged;
    if (detrend_name != "none")
        conditioned = detrend(merged, detrend_from_string(detrend_name), flags.baseline_window);

    UniformBetaSignal signal = resample_uniform_wavenumber(conditioned, oversample);
    FourierSpectrum fourier = mode_spectrum(signal, window_from_string(window_name), zero_pad);
    DetectParams dparams = detect_params_from(cfg);
    std::vector<ModeDetection> detections = detect_modes(
        fourier, length_mm > 0.0 ? std::optional<double>(length_mm) : std::nullopt, dparams);

    if (detections.empty())
        throw DataError("no modes above the noise floor; the record may hold too few "
                        "fringes or too little contrast");

    std::vector<ModeDetection> confirmed;
    for (const auto& det : detections)
        if (det.confirmed)
            confirmed.push_back(det);
    if (!confirmed.empty()) {
        excitation_fractions(fourier, confirmed);
        size_t c = 0;
        for (auto& det : detections)
            if (det.confirmed)
                det = confirmed[c++];
    }

    bool all_low = true;
    for (const auto& det : detections)
        all_low = all_low && det.low_fringe_warning;
    if (all_low)
        throw DataError("every detected mode sits below the fringe-count limit; record a "
                        "wider band or a longer sample");

    json modes = json::array();
    for (const auto& det : detections) {
        json m{{"label", det.label},
               {"optical_length_mm", det.optical_length_mm},
               {"harmonic_amplitudes", det.harmonic_amplitudes},
               {"confirmed", det.confirmed},
               {"excitation_fraction", det.excitation_fraction},
               {"fringe_count", det.fringe_count},
               {"harmonics_used", det.harmonics_used},
               {"unresolved", det.unresolved},
               {"window_truncated", det.window_truncated},
               {"unphysical_gain", det.unphysical_gain},
               {"low_fringe_warning", det.low_fringe_warning}};
        if (det.harmonics_used >= 2) {
            m["r_tilde_raw"] = det.r_tilde;
            m["r_tilde_sigma"] = det.r_tilde_sigma;
            m["r_tilde"] = det.r_tilde; // refined below when correctable
        }
        if (det.group_index) {
            m["group_index"] = *det.group_index;
            m["group_velocity_um_per_ps"] = group_velocity_um_per_ps(*det.group_index);
            if (instr && instr->psf_fwhm_pm > 0.0 && det.harmonics_used >= 2) {
                BiasOptions bopts;
                bopts.harmonics_used = det.harmonics_used;
                bopts.band_span_nm = std::max(signal.source_span_nm, 1.0);
                double factor = resolution_bias(*det.group_index, length_mm, *instr, bopts);
                m["bias_correction_factor"] = factor;
                m["r_tilde"] = det.r_tilde * factor;
            }
        }
        modes.push_back(std::move(m));
    }

    json warnings = json::array();
    for (const auto& w : merged.warnings)
        warnings.push_back(w);
    for (const auto& w : stitched.warnings)
        warnings.push_back(w);
    if (fourier.resolution_warning)
        warnings.push_back("dominant component below ~30 fringes");

    json report{{"schema_version", kSchemaVersion},
                {"tool", "fpmode analyze"},
                {"parameters",
                 {{"window", window_name},
                  {"oversample", oversample},
                  {"zero_pad_factor", zero_pad},
                  {"detrend", detrend_name},
                  {"n_exposures", flags.spectra.size()}}},
                {"spectrum",
                 {{"samples", merged.size()},
                  {"wavelength_lo_nm", merged.wavelength_nm.front()},
                  {"wavelength_hi_nm", merged.wavelength_nm.back()},
                  {"span_nm", merged.wavelength_nm.back() - merged.wavelength_nm.front()},
                  {"stitch_scales", stitched.scales},
                  {"stitch_overlap_rms_rel", stitched.overlap_rms_rel}}},
                {"fourier",
                 {{"resolution_bin_mm", fourier.resolution_bin_mm},
                  {"bin_mm", fourier.bin_mm},
                  {"axis_convention", fourier.axis_convention},
                  {"resolution_warning", fourier.resolution_warning}}},
                {"n_modes", detections.size()},
                {"modes", modes},
                {"warnings", warnings}};
    if (length_mm > 0.0)
        report["parameters"]["length_mm"] = length_mm;

    fs::path dir(opts.out_dir);
    io::atomic_write_json(dir / "report.json", report);
    std::ostringstream csv;
    csv << "optical_length_mm,amplitude\n";
    for (size_t i = 0; i < fourier.amplitude.size(); ++i)
        csv << io::format_double(fourier.optical_length_mm[i]) << ','
            << io::format_double(fourier.amplitude[i]) << '\n';
    io::atomic_write_text(dir / "fourier.csv", csv.str());

    std::cout << "detected " << detections.size() << " mode(s), " << confirmed.size()
              << " confirmed; report.json and fourier.csv written to " << dir.string() << "\n";
    if (opts.verbosity > 0)
        std::cout << report.dump(2) << "\n";
    return 0;
}

int run_fit_loss(const CommonOpts& opts, const std::string& measurements_path, bool per_length) {
    auto measurements = io::read_measurements_csv(measurements_path);
    AlphaRFit fit = fit_alpha_R(measurements, per_length);

    json per_point = json::array();
    for (size_t i = 0; i < fit.residuals_log.size(); ++i) {
        json row{{"residual_log", fit.residuals_log[i]},
                 {"residual_normalized", fit.residuals_normalized[i]}};
        if (!per_length && i < measurements.size()) {
            row["waveguide_id"] = measurements[i].waveguide_id;
            row["length_mm"] = measurements[i].length_mm;
        }
        per_point.push_back(std::move(row));
    }
    json out{{"schema_version", kSchemaVersion},
             {"alpha_per_mm", fit.alpha_per_mm},
             {"alpha_db_per_mm", fit.alpha_db_per_mm},
             {"R", fit.R},
             {"sigma_alpha", fit.sigma_alpha},
             {"sigma_R", fit.sigma_R},
             {"covariance_log",
              {{fit.covariance_log[0][0], fit.covariance_log[0][1]},
               {fit.covariance_log[1][0], fit.covariance_log[1][1]}}},
             {"chi2_per_dof", fit.chi2_per_dof},
             {"negative_alpha", fit.negative_alpha},
             {"per_length_averages", per_length},
             {"residuals", per_point}};
    io::atomic_write_json(fs::path(opts.out_dir) / "fit.json", out);
    std::cout << "alpha = " << fit.alpha_per_mm << " /mm (" << fit.alpha_db_per_mm
              << " dB/mm), R = " << fit.R << "; fit.json written\n";
    return 0;
}

struct SpectrogramFlags {
    std::string spectrum_path;
    double window_fraction = 0.7;
    int n_slices = 8;
    std::string window = "sinc";
    int oversample = 2;
    int zero_pad = 8;
    std::string detrend_method = "divide_smooth_baseline";
};

int run_spectrogram(const CommonOpts& opts, const SpectrogramFlags& flags) {
    Spectrum s = io::to_spectrum(io::read_spectrum_file(flags.spectrum_path));
    Spectrum conditioned = flags.detrend_method == "none"
                               ? s
                               : detrend(s, detrend_from_string(flags.detrend_method));
    UniformBetaSignal signal = resample_uniform_wavenumber(conditioned, flags.oversample);
    Spectrogram gram = spectrogram(signal, flags.window_fraction, flags.n_slices,
                                   window_from_string(flags.window), flags.zero_pad);

    std::ostringstream csv;
    csv << "optical_length_mm";
    for (double c : gram.slice_center_nm)
        csv << ',' << io::format_double(c);
    csv << '\n';
    const size_t bins = gram.optical_length_mm.size();
    for (size_t k = 0; k < bins; ++k) {
        csv << io::format_double(gram.optical_length_mm[k]);
        for (size_t c = 0; c < gram.slice_center_nm.size(); ++c)
            csv << ',' << io::format_double(gram.amplitude[c * bins + k]);
        csv << '\n';
    }
    io::atomic_write_text(fs::path(opts.out_dir) / "spectrogram.csv", csv.str());
    std::cout << "spectrogram.csv written (" << gram.slice_center_nm.size() << " slices x "
              << bins << " bins)\n";
    return 0;
}

json error_json(const std::string& type, const std::string& message, int code) {
    return json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-domain Fabry-Perot characterization of multimode waveguides"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fpmode 0.1.0");

    CommonOpts common;

    auto* sim = app.add_subcommand("simulate", "forward-model transmission spectra");
    add_common(sim, common);

    auto* cal = app.add_subcommand("calibrate", "fit the spectrograph calibration");
    add_common(cal, common);
    std::string lines_path, initial_path;
    double band_lo = 767.75, band_hi = 782.25;
    cal->add_option("lines", lines_path, "reference line CSV")->required();
    cal->add_option("--initial", initial_path, "initial Czerny-Turner parameters JSON")
        ->required();
    cal->add_option("--band-lo", band_lo, "nonlinearity band start (nm)");
    cal->add_option("--band-hi", band_hi, "nonlinearity band end (nm)");

    auto* ana = app.add_subcommand("analyze", "Fourier-domain mode analysis");
    add_common(ana, common);
    AnalyzeFlags aflags;
    ana->add_option("spectra", aflags.spectra, "spectrum CSV files")->required();
    ana->add_option("--calibration", aflags.calibration_path,
                    "calibration JSON for pixel-space spectra");
    ana->add_option("--length-mm", aflags.length_mm, "waveguide length (mm)");
    ana->add_option("--oversample", aflags.oversample, "wavenumber resampling factor");
    ana->add_option("--zero-pad", aflags.zero_pad, "transform zero-pad factor");
    ana->add_option("--window", aflags.window, "rectangular | hann | sinc");
    ana->add_option("--detrend", aflags.detrend_method,
                    "divide_smooth_baseline | subtract_mean | none");
    ana->add_option("--baseline-window", aflags.baseline_window,
                    "baseline moving-average window (samples)");
    ana->add_option("--pixel-pitch-pm", aflags.pixel_pitch_pm,
                    "pixel pitch for bias correction");
    ana->add_option("--psf-fwhm-pm", aflags.psf_fwhm_pm,
                    "instrument PSF FWHM for bias correction");

    auto* fitc = app.add_subcommand("fit-loss", "joint facet-reflectivity / loss fit");
    add_common(fitc, common);
    std::string measurements_path;
    bool per_length = false;
    fitc->add_option("measurements", measurements_path, "loss measurement CSV")->required();
    fitc->add_flag("--per-length", per_length, "collapse to one point per length first");

    auto* gram = app.add_subcommand("spectrogram", "sliding-window mode spectrogram");
    add_common(gram, common);
    SpectrogramFlags gflags;
    gram->add_option("spectrum", gflags.spectrum_path, "spectrum CSV")->required();
    gram->add_option("--window-fraction", gflags.window_fraction, "slice width fraction");
    gram->add_option("--n-slices", gflags.n_slices, "number of slices");
    gram->add_option("--window", gflags.window, "rectangular | hann | sinc");
    gram->add_option("--oversample", gflags.oversample, "wavenumber resampling factor");
    gram->add_option("--zero-pad", gflags.zero_pad, "transform zero-pad factor");
    gram->add_option("--detrend", gflags.detrend_method,
                     "divide_smooth_baseline | subtract_mean | none");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << error_json("UsageError", e.what(), 2).dump() << "\n";
        return 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(common);
        if (cal->parsed())
            return run_calibrate(common, lines_path, initial_path, band_lo, band_hi);
        if (ana->parsed())
            return run_analyze(common, aflags);
        if (fitc->parsed())
            return run_fit_loss(common, measurements_path, per_length);
        if (gram->parsed())
            return run_spectrogram(common, gflags);
    } catch (const ConfigError& e) {
        std::cerr << error_json("ConfigError", e.what(), 2).dump() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << error_json("DomainError", e.what(), 2).dump() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << error_json("FitError", e.what(), 3).dump() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << error_json("DataError", e.what(), 3).dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << error_json("InternalError", e.what(), 1).dump() << "\n";
        return 1;
    }
    return 0;
}
