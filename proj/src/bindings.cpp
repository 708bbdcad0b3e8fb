#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpmode/analyze.hpp"
#include "fpmode/calibrate.hpp"
#include "fpmode/fit.hpp"
#include "fpmode/model.hpp"
#include "fpmode/simulate.hpp"

namespace py = pybind11;
using namespace fpmode;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Modally resolved Fabry-Perot simulation and Fourier analysis for "
              "multimode waveguides.";

    m.attr("SPEED_OF_LIGHT_UM_PER_PS") = kSpeedOfLightUmPerPs;

    // unit conversions
    m.def("wavelength_to_wavenumber", &wavelength_to_wavenumber, py::arg("lambda_nm"));
    m.def("wavenumber_to_wavelength", &wavenumber_to_wavelength, py::arg("beta_rad_per_m"));
    m.def("alpha_from_k", &alpha_from_k, py::arg("k"), py::arg("lambda0_nm"));
    m.def("k_from_alpha", &k_from_alpha, py::arg("alpha_per_mm"), py::arg("lambda0_nm"));
    m.def("alpha_to_db_per_mm", &alpha_to_db_per_mm, py::arg("alpha_per_mm"));
    m.def("alpha_from_db_per_mm", &alpha_from_db_per_mm, py::arg("db_per_mm"));
    m.def("group_velocity_um_per_ps", &group_velocity_um_per_ps, py::arg("group_index"));
    m.def("group_index_from_velocity", &group_index_from_velocity, py::arg("v_g_um_per_ps"));
    m.def("free_spectral_range_nm", &free_spectral_range_nm, py::arg("lambda_nm"),
          py::arg("group_index"), py::arg("length_mm"));
    m.def("coefficient_finesse", &coefficient_finesse, py::arg("r_tilde"));

    py::class_<DispersionModel>(m, "DispersionModel")
        .def(py::init<>())
        .def_readwrite("beta_ref", &DispersionModel::beta_ref)
        .def_readwrite("c0", &DispersionModel::c0)
        .def_readwrite("c1", &DispersionModel::c1)
        .def_readwrite("c2", &DispersionModel::c2)
        .def("index", &DispersionModel::index, py::arg("beta"))
        .def_static("at_wavelength", &DispersionModel::at_wavelength, py::arg("lambda_ref_nm"),
                    py::arg("c0"), py::arg("c1") = 0.0, py::arg("c2") = 0.0);
    m.def("group_index", &group_index, py::arg("dispersion"), py::arg("beta"));

    py::class_<FresnelEstimate>(m, "FresnelEstimate")
        .def_readonly("reflectivity_R", &FresnelEstimate::reflectivity_R)
        .def_readonly("facet_phase_phi", &FresnelEstimate::facet_phase_phi);
    m.def("fresnel_estimates", &fresnel_estimates, py::arg("n"), py::arg("k"));

    py::class_<ModeSpec>(m, "ModeSpec")
        .def(py::init<>())
        .def_readwrite("label", &ModeSpec::label)
        .def_readwrite("dispersion", &ModeSpec::dispersion)
        .def_readwrite("k", &ModeSpec::k)
        .def_readwrite("reflectivity_R", &ModeSpec::reflectivity_R)
        .def_readwrite("facet_phase_phi", &ModeSpec::facet_phase_phi)
        .def_readwrite("excitation_x", &ModeSpec::excitation_x);

    py::class_<ResonatorSpec>(m, "ResonatorSpec")
        .def(py::init<>())
        .def_readwrite("length_mm", &ResonatorSpec::length_mm)
        .def_readwrite("modes", &ResonatorSpec::modes);

    py::class_<EtalonSpec>(m, "EtalonSpec")
        .def(py::init<>())
        .def_readwrite("fsr_nm", &EtalonSpec::fsr_nm)
        .def_readwrite("modulation_depth", &EtalonSpec::modulation_depth);

    py::class_<InstrumentSpec>(m, "InstrumentSpec")
        .def(py::init<>())
        .def_readwrite("pixel_pitch_pm", &InstrumentSpec::pixel_pitch_pm)
        .def_readwrite("psf_fwhm_pm", &InstrumentSpec::psf_fwhm_pm)
        .def_readwrite("envelope_center_nm", &InstrumentSpec::envelope_center_nm)
        .def_readwrite("envelope_fwhm_nm", &InstrumentSpec::envelope_fwhm_nm)
        .def_readwrite("noise_sigma", &InstrumentSpec::noise_sigma)
        .def_readwrite("etalon", &InstrumentSpec::etalon)
        .def_readwrite("rng_seed", &InstrumentSpec::rng_seed);

    py::class_<Spectrum>(m, "Spectrum")
        .def(py::init<>())
        .def_readwrite("wavelength_nm", &Spectrum::wavelength_nm)
        .def_readwrite("intensity", &Spectrum::intensity)
        .def_readwrite("exposure_center_nm", &Spectrum::exposure_center_nm)
        .def_readwrite("source_tag", &Spectrum::source_tag)
        .def_readwrite("warnings", &Spectrum::warnings)
        .def("__len__", &Spectrum::size);

    py::class_<ModeDetection>(m, "ModeDetection")
        .def_readonly("label", &ModeDetection::label)
        .def_readonly("optical_length_mm", &ModeDetection::optical_length_mm)
        .def_readonly("group_index", &ModeDetection::group_index)
        .def_readonly("harmonic_amplitudes", &ModeDetection::harmonic_amplitudes)
        .def_readonly("r_tilde", &ModeDetection::r_tilde)
        .def_readonly("r_tilde_sigma", &ModeDetection::r_tilde_sigma)
        .def_readonly("harmonics_used", &ModeDetection::harmonics_used)
        .def_readonly("confirmed", &ModeDetection::confirmed)
        .def_readonly("excitation_fraction", &ModeDetection::excitation_fraction)
        .def_readonly("unresolved", &ModeDetection::unresolved)
        .def_readonly("window_truncated", &ModeDetection::window_truncated)
        .def_readonly("unphysical_gain", &ModeDetection::unphysical_gain)
        .def_readonly("low_fringe_warning", &ModeDetection::low_fringe_warning)
        .def_readonly("fringe_count", &ModeDetection::fringe_count);

    // forward model
    py::class_<ExposurePlan>(m, "ExposurePlan")
        .def(py::init<>())
        .def_readwrite("central_wavelengths_nm", &ExposurePlan::central_wavelengths_nm)
        .def_readwrite("span_nm", &ExposurePlan::span_nm)
        .def_readwrite("overlap_nm", &ExposurePlan::overlap_nm);

    m.def("single_mode_transmittance", &single_mode_transmittance, py::arg("beta"),
          py::arg("mode"), py::arg("length_mm"));
    m.def("multimode_spectrum", &multimode_spectrum, py::arg("resonator"),
          py::arg("wavelength_grid_nm"));
    m.def(
        "apply_instrument",
        [](const Spectrum& s, const InstrumentSpec& i, std::optional<double> center,
           std::optional<double> span) {
            std::optional<InstrumentWindow> w;
            if (center && span)
                w = InstrumentWindow{*center, *span};
            return apply_instrument(s, i, w);
        },
        py::arg("spectrum"), py::arg("instrument"), py::arg("window_center_nm") = py::none(),
        py::arg("window_span_nm") = py::none());
    m.def("simulate_exposures", &simulate_exposures, py::arg("resonator"), py::arg("instrument"),
          py::arg("plan"), py::arg("dense_oversample") = 8);
    m.def("uniform_grid", &uniform_grid, py::arg("lo_nm"), py::arg("hi_nm"), py::arg("step_nm"));

    // calibration and stitching
    py::class_<CzernyTurnerParams>(m, "CzernyTurnerParams")
        .def(py::init<>())
        .def_readwrite("gamma_rad", &CzernyTurnerParams::gamma_rad)
        .def_readwrite("focal_mm", &CzernyTurnerParams::focal_mm)
        .def_readwrite("groove_spacing_nm", &CzernyTurnerParams::groove_spacing_nm)
        .def_readwrite("order_m", &CzernyTurnerParams::order_m)
        .def_readwrite("dx_in_mm", &CzernyTurnerParams::dx_in_mm);

    py::class_<LineObservation>(m, "LineObservation")
        .def(py::init<>())
        .def(py::init([](double lt, double lc, double dx) {
                 return LineObservation{lt, lc, dx};
             }),
             py::arg("lambda_true_nm"), py::arg("lambda_c_nm"), py::arg("dx_cam_mm"))
        .def_readwrite("lambda_true_nm", &LineObservation::lambda_true_nm)
        .def_readwrite("lambda_c_nm", &LineObservation::lambda_c_nm)
        .def_readwrite("dx_cam_mm", &LineObservation::dx_cam_mm);

    py::enum_<CtParam>(m, "CtParam")
        .value("gamma", CtParam::gamma)
        .value("focal", CtParam::focal)
        .value("dx_in", CtParam::dx_in);

    py::class_<CalibrationFit>(m, "CalibrationFit")
        .def_readonly("params", &CalibrationFit::params)
        .def_readonly("free_params", &CalibrationFit::free_params)
        .def_readonly("residuals_pm", &CalibrationFit::residuals_pm)
        .def_readonly("rms_pm", &CalibrationFit::rms_pm)
        .def_readonly("converged", &CalibrationFit::converged)
        .def_readonly("iterations", &CalibrationFit::iterations)
        .def_readonly("message", &CalibrationFit::message)
        .def_readonly("covariance", &CalibrationFit::covariance);

    m.def("czerny_turner_wavelength", &czerny_turner_wavelength, py::arg("params"),
          py::arg("lambda_c_nm"), py::arg("dx_cam_mm"));
    m.def("fit_calibration", &fit_calibration, py::arg("observations"), py::arg("initial"),
          py::arg("free_params") =
              std::vector<CtParam>{CtParam::gamma, CtParam::focal, CtParam::dx_in});

    py::class_<NonlinearityReport>(m, "NonlinearityReport")
        .def_readonly("max_abs_deviation_nm", &NonlinearityReport::max_abs_deviation_nm)
        .def_readonly("relative", &NonlinearityReport::relative)
        .def_readonly("slope_nm_per_mm", &NonlinearityReport::slope_nm_per_mm);
    m.def(
        "nonlinearity_report",
        [](const CzernyTurnerParams& p, double lo, double hi, double lambda_c,
           double dx_half_range) {
            NonlinearityOptions o;
            o.lambda_c_nm = lambda_c;
            o.dx_half_range_mm = dx_half_range;
            return nonlinearity_report(p, lo, hi, o);
        },
        py::arg("params"), py::arg("band_lo_nm"), py::arg("band_hi_nm"),
        py::arg("lambda_c_nm") = 0.0, py::arg("dx_half_range_mm") = 6.912);

    py::class_<StitchResult>(m, "StitchResult")
        .def_readonly("merged", &StitchResult::merged)
        .def_readonly("scales", &StitchResult::scales)
        .def_readonly("overlap_rms_rel", &StitchResult::overlap_rms_rel)
        .def_readonly("warnings", &StitchResult::warnings);
    m.def("stitch", &stitch, py::arg("exposures"), py::arg("mismatch_warn_threshold") = 0.05);

    // analysis
    py::enum_<Window>(m, "Window")
        .value("rectangular", Window::rectangular)
        .value("hann", Window::hann)
        .value("sinc", Window::sinc);

    py::enum_<DetrendMethod>(m, "DetrendMethod")
        .value("divide_smooth_baseline", DetrendMethod::divide_smooth_baseline)
        .value("subtract_mean", DetrendMethod::subtract_mean);

    py::class_<UniformBetaSignal>(m, "UniformBetaSignal")
        .def(py::init<>())
        .def_readwrite("beta0", &UniformBetaSignal::beta0)
        .def_readwrite("dbeta", &UniformBetaSignal::dbeta)
        .def_readwrite("value", &UniformBetaSignal::value)
        .def_readwrite("source_span_nm", &UniformBetaSignal::source_span_nm);

    py::class_<FourierSpectrum>(m, "FourierSpectrum")
        .def_readonly("optical_length_mm", &FourierSpectrum::optical_length_mm)
        .def_readonly("amplitude", &FourierSpectrum::amplitude)
        .def_readonly("window", &FourierSpectrum::window)
        .def_readonly("zero_pad_factor", &FourierSpectrum::zero_pad_factor)
        .def_readonly("source_span_nm", &FourierSpectrum::source_span_nm)
        .def_readonly("beta_span", &FourierSpectrum::beta_span)
        .def_readonly("resolution_bin_mm", &FourierSpectrum::resolution_bin_mm)
        .def_readonly("bin_mm", &FourierSpectrum::bin_mm)
        .def_readonly("axis_convention", &FourierSpectrum::axis_convention)
        .def_readonly("resolution_warning", &FourierSpectrum::resolution_warning);

    py::class_<Spectrogram>(m, "Spectrogram")
        .def_readonly("slice_center_nm", &Spectrogram::slice_center_nm)
        .def_readonly("optical_length_mm", &Spectrogram::optical_length_mm)
        .def_readonly("amplitude", &Spectrogram::amplitude)
        .def_readonly("window_fraction", &Spectrogram::window_fraction)
        .def_readonly("window", &Spectrogram::window)
        .def_readonly("resolution_bin_mm", &Spectrogram::resolution_bin_mm)
        .def_readonly("warnings", &Spectrogram::warnings);

    m.def("resample_uniform_wavenumber", &resample_uniform_wavenumber, py::arg("spectrum"),
          py::arg("oversample") = 1);
    m.def(
        "detrend",
        [](const Spectrum& s, DetrendMethod method, size_t baseline_window) {
            return detrend(s, method, baseline_window);
        },
        py::arg("spectrum"), py::arg("method") = DetrendMethod::divide_smooth_baseline,
        py::arg("baseline_window") = 0);
    m.def("mode_spectrum", &mode_spectrum, py::arg("signal"),
          py::arg("window") = Window::rectangular, py::arg("zero_pad_factor") = 8,
          py::arg("subtract_mean") = true);

    py::class_<DetectParams>(m, "DetectParams")
        .def(py::init<>())
        .def_readwrite("noise_floor_quantile", &DetectParams::noise_floor_quantile)
        .def_readwrite("floor_window_bins", &DetectParams::floor_window_bins)
        .def_readwrite("min_prominence", &DetectParams::min_prominence)
        .def_readwrite("min_rel_amplitude", &DetectParams::min_rel_amplitude)
        .def_readwrite("min_optical_length_mm", &DetectParams::min_optical_length_mm)
        .def_readwrite("ng_lo", &DetectParams::ng_lo)
        .def_readwrite("ng_hi", &DetectParams::ng_hi)
        .def_readwrite("max_harmonics", &DetectParams::max_harmonics)
        .def_readwrite("merge_radius_bins", &DetectParams::merge_radius_bins)
        .def_readwrite("min_fringes", &DetectParams::min_fringes)
        .def_readwrite("confirm_margin", &DetectParams::confirm_margin);

    m.def("detect_modes", &detect_modes, py::arg("fourier_spectrum"),
          py::arg("length_mm") = py::none(), py::arg("params") = DetectParams{});
    m.def(
        "excitation_fractions",
        [](const FourierSpectrum& fs, std::vector<ModeDetection> detections) {
            excitation_fractions(fs, detections);
            return detections;
        },
        py::arg("fourier_spectrum"), py::arg("detections"));
    m.def("spectrogram", &spectrogram, py::arg("signal"), py::arg("window_fraction") = 0.7,
          py::arg("n_slices") = 8, py::arg("window") = Window::sinc,
          py::arg("zero_pad_factor") = 8, py::arg("min_mode_gap_mm") = py::none());

    // quantitative extraction
    py::class_<LossRatio>(m, "LossRatio")
        .def_readonly("r_tilde", &LossRatio::r_tilde)
        .def_readonly("sigma", &LossRatio::sigma)
        .def_readonly("harmonics_used", &LossRatio::harmonics_used)
        .def_readonly("unphysical_gain", &LossRatio::unphysical_gain);
    m.def("total_loss_ratio", &total_loss_ratio, py::arg("harmonic_amplitudes"),
          py::arg("noise_floors") = std::vector<double>{});

    py::class_<BiasOptions>(m, "BiasOptions")
        .def(py::init<>())
        .def_readwrite("harmonics_used", &BiasOptions::harmonics_used)
        .def_readwrite("r_tilde_ref", &BiasOptions::r_tilde_ref)
        .def_readwrite("band_center_nm", &BiasOptions::band_center_nm)
        .def_readwrite("band_span_nm", &BiasOptions::band_span_nm)
        .def_readwrite("dense_oversample", &BiasOptions::dense_oversample)
        .def_readwrite("resample_oversample", &BiasOptions::resample_oversample)
        .def_readwrite("zero_pad_factor", &BiasOptions::zero_pad_factor);
    m.def("resolution_bias", &resolution_bias, py::arg("group_index"), py::arg("length_mm"),
          py::arg("instrument"), py::arg("options") = BiasOptions{});

    py::class_<LossMeasurement>(m, "LossMeasurement")
        .def(py::init<>())
        .def_readwrite("waveguide_id", &LossMeasurement::waveguide_id)
        .def_readwrite("length_mm", &LossMeasurement::length_mm)
        .def_readwrite("r_tilde", &LossMeasurement::r_tilde)
        .def_readwrite("sigma", &LossMeasurement::sigma)
        .def_readwrite("group_index", &LossMeasurement::group_index);

    py::class_<AlphaRFit>(m, "AlphaRFit")
        .def_readonly("alpha_per_mm", &AlphaRFit::alpha_per_mm)
        .def_readonly("alpha_db_per_mm", &AlphaRFit::alpha_db_per_mm)
        .def_readonly("R", &AlphaRFit::R)
        .def_readonly("sigma_alpha", &AlphaRFit::sigma_alpha)
        .def_readonly("sigma_R", &AlphaRFit::sigma_R)
        .def_readonly("residuals_log", &AlphaRFit::residuals_log)
        .def_readonly("residuals_normalized", &AlphaRFit::residuals_normalized)
        .def_readonly("chi2_per_dof", &AlphaRFit::chi2_per_dof)
        .def_readonly("negative_alpha", &AlphaRFit::negative_alpha);
    m.def("fit_alpha_R", &fit_alpha_R, py::arg("measurements"),
          py::arg("per_length_averages") = false);

    py::class_<AlphaFromRtilde>(m, "AlphaFromRtilde")
        .def_readonly("alpha_per_mm", &AlphaFromRtilde::alpha_per_mm)
        .def_readonly("alpha_db_per_mm", &AlphaFromRtilde::alpha_db_per_mm)
        .def_readonly("sigma_alpha", &AlphaFromRtilde::sigma_alpha)
        .def_readonly("exceeds_R", &AlphaFromRtilde::exceeds_R);
    m.def("loss_from_r_tilde", &loss_from_r_tilde, py::arg("r_tilde"), py::arg("R"),
          py::arg("length_mm"), py::arg("sigma_r_tilde") = 0.0, py::arg("sigma_R") = 0.0);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "0.1.0";
#endif
}
