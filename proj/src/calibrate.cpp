#include "fpmode/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "fpmode/errors.hpp"
#include "fpmode/interpolate.hpp"
#include "fpmode/levmar.hpp"

namespace fpmode {

namespace {

void validate(const CzernyTurnerParams& p) {
    if (!(p.focal_mm > 0.0))
        throw DomainError("focal length must be positive");
    if (!(p.groove_spacing_nm > 0.0))
        throw DomainError("groove spacing must be positive");
    if (p.order_m < 1)
        throw DomainError("diffraction order must be >= 1");
    if (!(std::abs(p.gamma_rad) < std::numbers::pi))
        throw DomainError("inclusion angle must satisfy |gamma| < pi");
}

} // namespace

double czerny_turner_wavelength(const CzernyTurnerParams& params, double lambda_c_nm,
                                double dx_cam_mm) {
    validate(params);
    if (!(lambda_c_nm > 0.0))
        throw DomainError("central wavelength must be positive");
    const double m = static_cast<double>(params.order_m);
    const double d = params.groove_spacing_nm;
    const double half_gamma = params.gamma_rad / 2.0;
    const double arg = m * lambda_c_nm / (2.0 * d * std::cos(half_gamma));
    if (std::abs(arg) > 1.0)
        throw GratingGeometryError("grating equation has no solution for this setting");
    const double psi = std::asin(arg);
    const double theta_in = psi - half_gamma - std::atan(params.dx_in_mm / params.focal_mm);
    const double theta_cam = psi + half_gamma + std::atan(dx_cam_mm / params.focal_mm);
    return d / m * (std::sin(theta_in) + std::sin(theta_cam));
}

std::string to_string(CtParam p) {
    switch (p) {
    case CtParam::gamma: return "gamma";
    case CtParam::focal: return "focal";
    case CtParam::dx_in: return "dx_in";
    }
    return "gamma";
}

CtParam ct_param_from_string(const std::string& name) {
    if (name == "gamma")
        return CtParam::gamma;
    if (name == "focal")
        return CtParam::focal;
    if (name == "dx_in")
        return CtParam::dx_in;
    throw ConfigError("unknown calibration parameter '" + name + "'");
}

namespace {

CzernyTurnerParams apply_free(const CzernyTurnerParams& base, const std::vector<CtParam>& free,
                              const std::vector<double>& values) {
    CzernyTurnerParams p = base;
    for (size_t i = 0; i < free.size(); ++i) {
        switch (free[i]) {
        case CtParam::gamma: p.gamma_rad = values[i]; break;
        case CtParam::focal: p.focal_mm = values[i]; break;
        case CtParam::dx_in: p.dx_in_mm = values[i]; break;
        }
    }
    return p;
}

} // namespace

CalibrationFit fit_calibration(const std::vector<LineObservation>& observations,
                               const CzernyTurnerParams& initial,
                               std::vector<CtParam> free_params) {
    validate(initial);
    if (free_params.empty())
        throw ConfigError("calibration fit needs at least one free parameter");
    std::set<CtParam> unique(free_params.begin(), free_params.end());
    if (unique.size() != free_params.size())
        throw ConfigError("duplicate free parameter");
    if (observations.size() < free_params.size())
        throw DataError("fewer observations than free parameters");
    for (const auto& obs : observations)
        if (!std::isfinite(obs.lambda_true_nm) || !std::isfinite(obs.lambda_c_nm) ||
            !std::isfinite(obs.dx_cam_mm))
            throw DataError("non-finite line observation");

    std::set<double> centers;
    for (const auto& obs : observations)
        centers.insert(obs.lambda_c_nm);
    if (centers.size() < 2)
        throw RankDeficiencyError(
            "observations share a single central-wavelength setting; the geometry is degenerate");

    std::vector<double> p0(free_params.size()), steps(free_params.size());
    for (size_t i = 0; i < free_params.size(); ++i) {
        switch (free_params[i]) {
        case CtParam::gamma:
            p0[i] = initial.gamma_rad;
            steps[i] = 1e-7;
            break;
        case CtParam::focal:
            p0[i] = initial.focal_mm;
            steps[i] = 1e-4 * std::max(1.0, std::abs(initial.focal_mm));
            break;
        case CtParam::dx_in:
            p0[i] = initial.dx_in_mm;
            steps[i] = 1e-5;
            break;
        }
    }

    auto residual_fn = [&](const std::vector<double>& values, std::vector<double>& r) {
        CzernyTurnerParams p = apply_free(initial, free_params, values);
        for (size_t i = 0; i < observations.size(); ++i)
            r[i] = czerny_turner_wavelength(p, observations[i].lambda_c_nm,
                                            observations[i].dx_cam_mm) -
                   observations[i].lambda_true_nm;
    };

    LevMarResult lm = levmar(residual_fn, p0, observations.size(), steps);

    CalibrationFit out;
    out.params = apply_free(initial, free_params, lm.params);
    out.converged = lm.converged;
    out.iterations = lm.iterations;
    out.message = lm.message;

    std::vector<double> r(observations.size());
    residual_fn(lm.params, r);
    out.residuals_pm.resize(r.size());
    double sse = 0.0;
    for (size_t i = 0; i < r.size(); ++i) {
        out.residuals_pm[i] = r[i] * 1e3;
        sse += r[i] * r[i];
    }
    out.rms_pm = std::sqrt(sse / static_cast<double>(r.size())) * 1e3;

    // Covariance from sigma^2 (JtJ)^-1 with sigma^2 estimated from residuals.
    const size_t p = free_params.size();
    double sigma2 =
        observations.size() > p ? sse / static_cast<double>(observations.size() - p) : 0.0;
    out.covariance.assign(p * p, 0.0);
    std::vector<double> inv_col;
    for (size_t c = 0; c < p; ++c) {
        std::vector<double> e(p, 0.0);
        e[c] = 1.0;
        if (!solve_dense(lm.jtj, e, p, inv_col))
            break;
        for (size_t rr = 0; rr < p; ++rr)
            out.covariance[rr * p + c] = sigma2 * inv_col[rr];
    }
    out.free_params = std::move(free_params);
    return out;
}

NonlinearityReport nonlinearity_report(const CzernyTurnerParams& params, double band_lo_nm,
                                       double band_hi_nm, const NonlinearityOptions& options) {
    validate(params);
    if (!(band_hi_nm > band_lo_nm) || !(band_lo_nm > 0.0))
        throw DomainError("nonlinearity band must satisfy 0 < lo < hi");
    if (options.samples < 3)
        throw ConfigError("nonlinearity sweep needs at least 3 samples");

    const double lambda_c =
        options.lambda_c_nm > 0.0 ? options.lambda_c_nm : 0.5 * (band_lo_nm + band_hi_nm);
    const int n = options.samples;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = -options.dx_half_range_mm +
                2.0 * options.dx_half_range_mm * static_cast<double>(i) /
                    static_cast<double>(n - 1);
        ys[i] = czerny_turner_wavelength(params, lambda_c, xs[i]);
    }

    // Ordinary least-squares line.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double fn = static_cast<double>(n);
    const double det = fn * sxx - sx * sx;
    const double slope = (fn * sxy - sx * sy) / det;
    const double offset = (sxx * sy - sx * sxy) / det;

    NonlinearityReport out;
    out.slope_nm_per_mm = slope;
    for (int i = 0; i < n; ++i)
        out.max_abs_deviation_nm =
            std::max(out.max_abs_deviation_nm, std::abs(ys[i] - (offset + slope * xs[i])));
    out.relative = out.max_abs_deviation_nm / (band_hi_nm - band_lo_nm);
    return out;
}

StitchResult stitch(const std::vector<Spectrum>& exposures, double mismatch_warn_threshold) {
    if (exposures.empty())
        throw DataError("stitch needs at least one exposure");
    for (const auto& e : exposures)
        fpmode::validate(e);

    StitchResult out;
    if (exposures.size() == 1) {
        out.merged = exposures.front();
        out.scales = {1.0};
        return out;
    }

    std::vector<size_t> order(exposures.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return exposures[a].wavelength_nm.front() < exposures[b].wavelength_nm.front();
    });

    std::vector<Spectrum> scaled;
    scaled.reserve(exposures.size());
    out.scales.assign(exposures.size(), 1.0);
    scaled.push_back(exposures[order[0]]);

    double mismatch_sq = 0.0;
    double mismatch_mean = 0.0;
    size_t mismatch_count = 0;
    for (size_t i = 1; i < order.size(); ++i) {
        const Spectrum& prev = scaled.back();
        Spectrum cur = exposures[order[i]];
        const double ov_lo = cur.wavelength_nm.front();
        const double ov_hi = prev.wavelength_nm.back();
        if (!(ov_hi > ov_lo))
            throw DataError("consecutive exposures do not overlap");

        double num = 0.0, den = 0.0;
        std::vector<std::pair<double, double>> pairs; // (target, raw)
        for (size_t j = 0; j < cur.size(); ++j) {
            double lambda = cur.wavelength_nm[j];
            if (lambda < ov_lo || lambda > ov_hi)
                continue;
            double target = linear_interp(prev.wavelength_nm, prev.intensity, lambda);
            num += target * cur.intensity[j];
            den += cur.intensity[j] * cur.intensity[j];
            pairs.emplace_back(target, cur.intensity[j]);
        }
        if (pairs.size() < 2 || !(den > 0.0))
            throw DataError("overlap region holds too few usable samples");
        double scale = num / den;
        out.scales[i] = scale;
        for (auto& v : cur.intensity)
            v *= scale;
        for (const auto& [target, raw] : pairs) {
            double diff = scale * raw - target;
            mismatch_sq += diff * diff;
            mismatch_mean += target;
            ++mismatch_count;
        }
        scaled.push_back(std::move(cur));
    }
    if (mismatch_count > 0) {
        mismatch_mean /= static_cast<double>(mismatch_count);
        out.overlap_rms_rel =
            std::sqrt(mismatch_sq / static_cast<double>(mismatch_count)) /
            std::max(mismatch_mean, 1e-300);
        if (out.overlap_rms_rel > mismatch_warn_threshold)
            out.warnings.push_back("overlap mismatch above threshold after scale matching");
    }

    // Union axis; overlapping exposures are averaged at each union wavelength.
    std::vector<double> axis;
    for (const auto& e : scaled)
        axis.insert(axis.end(), e.wavelength_nm.begin(), e.wavelength_nm.end());
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               axis.end());

    out.merged.wavelength_nm = axis;
    out.merged.intensity.resize(axis.size());
    for (size_t i = 0; i < axis.size(); ++i) {
        double acc = 0.0;
        int covering = 0;
        for (const auto& e : scaled) {
            if (axis[i] < e.wavelength_nm.front() - 1e-12 ||
                axis[i] > e.wavelength_nm.back() + 1e-12)
                continue;
            acc += linear_interp(e.wavelength_nm, e.intensity, axis[i]);
            ++covering;
        }
        out.merged.intensity[i] = covering > 0 ? acc / covering : 0.0;
    }
    out.merged.source_tag = "stitched";
    for (const auto& e : scaled)
        for (const auto& w : e.warnings)
            out.merged.warnings.push_back(w);
    return out;
}

} // namespace fpmode
