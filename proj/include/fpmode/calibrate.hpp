#pragma once

#include <string>
#include <vector>

#include "fpmode/model.hpp"

namespace fpmode {

// Geometry of a Czerny-Turner spectrograph.
struct CzernyTurnerParams {
    double gamma_rad = 0.0;        // inclusion angle between grating and mirrors
    double focal_mm = 0.0;         // mirror focal length
    double groove_spacing_nm = 0;  // d
    int order_m = 1;               // diffraction order
    double dx_in_mm = 0.0;         // input-fiber off-center distance
};

// One reference-lamp line: true wavelength, spectrograph central-wavelength
// setting, observed off-center distance on the camera.
struct LineObservation {
    double lambda_true_nm = 0.0;
    double lambda_c_nm = 0.0;
    double dx_cam_mm = 0.0;
};

/// Wavelength seen at camera offset dx_cam for a central-wavelength setting:
///   lambda = d/m [ sin(Psi - gamma/2 - atan(dx_in/f))
///              +   sin(Psi + gamma/2 + atan(dx_cam/f)) ],
///   Psi = arcsin(m lambda_c / (2 d cos(gamma/2))).
double czerny_turner_wavelength(const CzernyTurnerParams& params, double lambda_c_nm,
                                double dx_cam_mm);

enum class CtParam { gamma, focal, dx_in };

std::string to_string(CtParam p);
CtParam ct_param_from_string(const std::string& name);

struct CalibrationFit {
    CzernyTurnerParams params;
    std::vector<CtParam> free_params;
    std::vector<double> residuals_pm; // lambda_pred - lambda_true per line
    double rms_pm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string message;
    std::vector<double> covariance; // row-major p x p over free_params
};

/// Least squares of the Czerny-Turner model against reference lines. The
/// groove spacing and order are hardware constants and stay fixed; gamma,
/// focal and dx_in default to free.
CalibrationFit fit_calibration(const std::vector<LineObservation>& observations,
                               const CzernyTurnerParams& initial,
                               std::vector<CtParam> free_params = {CtParam::gamma, CtParam::focal,
                                                                   CtParam::dx_in});

struct NonlinearityReport {
    double max_abs_deviation_nm = 0.0; // from the best-fit line over the sweep
    double relative = 0.0;             // deviation / band width
    double slope_nm_per_mm = 0.0;      // fitted dispersion at the sensor
};

struct NonlinearityOptions {
    double lambda_c_nm = 0.0;       // 0 -> band center
    double dx_half_range_mm = 6.912; // half the sensor width (1536 x 9 um pixels)
    int samples = 801;
};

/// Bow of the pixel-to-wavelength mapping: sweep dx_cam across the sensor at
/// a fixed central wavelength, remove the best-fit line, and report the
/// largest deviation relative to the analysis band width. This bounds the
/// artificial dispersion a calibration residual can imprint on the band.
NonlinearityReport nonlinearity_report(const CzernyTurnerParams& params, double band_lo_nm,
                                       double band_hi_nm, const NonlinearityOptions& options = {});

struct StitchResult {
    Spectrum merged;
    std::vector<double> scales; // per exposure, first anchored to 1
    double overlap_rms_rel = 0.0;
    std::vector<std::string> warnings;
};

/// Merge calibrated exposures into one broadband spectrum: each exposure is
/// scale-matched to its predecessor with one multiplicative factor (least
/// squares over the overlap), then overlapping regions are averaged on the
/// union wavelength axis.
StitchResult stitch(const std::vector<Spectrum>& exposures, double mismatch_warn_threshold = 0.05);

} // namespace fpmode
