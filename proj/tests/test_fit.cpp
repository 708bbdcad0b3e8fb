#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpmode/analyze.hpp"
#include "fpmode/errors.hpp"
#include "fpmode/fit.hpp"
#include "fpmode/model.hpp"

using namespace fpmode;

TEST_CASE("total loss from an exact geometric ladder") {
    LossRatio r = total_loss_ratio({1.0, 0.3, 0.09, 0.027});
    CHECK(r.r_tilde == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.sigma < 1e-9);
    CHECK(r.harmonics_used == 4);
    CHECK(!r.unphysical_gain);

    // invariant under uniform amplitude scaling
    LossRatio scaled = total_loss_ratio({5.0, 1.5, 0.45, 0.135});
    CHECK(scaled.r_tilde == doctest::Approx(r.r_tilde).epsilon(1e-12));

    // geometric mean of uneven ratios
    LossRatio uneven = total_loss_ratio({1.0, 0.32, 0.088});
    CHECK(uneven.r_tilde == doctest::Approx(std::sqrt(0.088)).epsilon(1e-12));
    CHECK(uneven.sigma > 0.0);

    // two harmonics: sigma comes from the noise floors
    LossRatio two = total_loss_ratio({1.0, 0.3}, {0.01, 0.01});
    CHECK(two.r_tilde == doctest::Approx(0.3).epsilon(1e-12));
    double expected_sigma = 0.3 * std::sqrt(0.01 * 0.01 + (0.01 / 0.3) * (0.01 / 0.3));
    CHECK(two.sigma == doctest::Approx(expected_sigma).epsilon(1e-9));

    LossRatio gain = total_loss_ratio({1.0, 1.2});
    CHECK(gain.unphysical_gain);

    CHECK_THROWS_AS(total_loss_ratio({1.0}), DomainError);
    CHECK_THROWS_AS(total_loss_ratio({1.0, 0.0}), DomainError);
}

TEST_CASE("loss from total loss and known reflectivity") {
    auto lossless = loss_from_r_tilde(0.35, 0.35, 0.9);
    CHECK(lossless.alpha_per_mm == doctest::Approx(0.0).epsilon(1e-15));

    // forward: r = R exp(-alpha L), then invert
    double r = 0.35 * std::exp(-0.46 * 0.9);
    CHECK(r == doctest::Approx(0.231).epsilon(2e-3));
    auto inv = loss_from_r_tilde(r, 0.35, 0.9);
    CHECK(inv.alpha_per_mm == doctest::Approx(0.46).epsilon(1e-12));
    CHECK(inv.alpha_db_per_mm ==
          doctest::Approx(10.0 * std::log10(std::numbers::e) * 0.46).epsilon(1e-12));
    CHECK(!inv.exceeds_R);

    // uncertainty dominated by the reflectivity error
    auto with_sigma = loss_from_r_tilde(r, 0.35, 0.9, 0.005, 0.04);
    double expected = std::sqrt(std::pow(0.005 / r, 2) + std::pow(0.04 / 0.35, 2)) / 0.9;
    CHECK(with_sigma.sigma_alpha == doctest::Approx(expected).epsilon(1e-12));
    CHECK(with_sigma.sigma_alpha == doctest::Approx(0.12).epsilon(0.1));

    auto gain = loss_from_r_tilde(0.4, 0.35, 0.9);
    CHECK(gain.exceeds_R);
    CHECK(gain.alpha_per_mm < 0.0);

    CHECK_THROWS_AS(loss_from_r_tilde(-0.1, 0.35, 0.9), DomainError);
    CHECK_THROWS_AS(loss_from_r_tilde(0.2, 1.1, 0.9), DomainError);
}

namespace {

std::vector<LossMeasurement> exact_measurements(double R, double alpha) {
    std::vector<LossMeasurement> out;
    int id = 0;
    for (double L : {0.9, 2.0})
        for (int i = 0; i < 3; ++i) {
            LossMeasurement m;
            m.waveguide_id = "wg" + std::to_string(id++);
            m.length_mm = L;
            m.r_tilde = R * std::exp(-alpha * L);
            m.sigma = 0.02 * m.r_tilde;
            m.group_index = 3.7;
            out.push_back(m);
        }
    return out;
}

} // namespace

TEST_CASE("alpha-R fit recovers exact data") {
    auto fit = fit_alpha_R(exact_measurements(0.35, 0.5));
    CHECK(fit.R == doctest::Approx(0.35).epsilon(1e-10));
    CHECK(fit.alpha_per_mm == doctest::Approx(0.5).epsilon(1e-10));
    for (double r : fit.residuals_log)
        CHECK(std::abs(r) < 1e-10);
    CHECK(!fit.negative_alpha);

    // per-length averaging gives the same answer on balanced exact data
    auto grouped = fit_alpha_R(exact_measurements(0.35, 0.5), true);
    CHECK(grouped.R == doctest::Approx(0.35).epsilon(1e-10));
    CHECK(grouped.alpha_per_mm == doctest::Approx(0.5).epsilon(1e-10));

    auto gain = fit_alpha_R(exact_measurements(0.35, -0.1));
    CHECK(gain.negative_alpha);

    std::vector<LossMeasurement> single = {exact_measurements(0.35, 0.5)[0],
                                           exact_measurements(0.35, 0.5)[1]};
    CHECK_THROWS_AS(fit_alpha_R(single), UnderdeterminedError);
}

TEST_CASE("ensemble fit lands inside the quoted uncertainty bands") {
    std::mt19937 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<LossMeasurement> ms;
    int id = 0;
    for (double L : {0.9, 2.0})
        for (int i = 0; i < 16; ++i) {
            LossMeasurement m;
            m.waveguide_id = "wg" + std::to_string(id++);
            m.length_mm = L;
            m.r_tilde = 0.35 * std::exp(-0.5 * L) * (1.0 + 0.1 * gauss(rng));
            m.sigma = 0.1 * m.r_tilde;
            m.group_index = 3.7;
            ms.push_back(m);
        }
    auto fit = fit_alpha_R(ms);
    CHECK(std::abs(fit.R - 0.35) < 0.04);
    CHECK(std::abs(fit.alpha_per_mm - 0.5) < 0.1);
    CHECK(fit.sigma_R > 0.0);
    CHECK(fit.sigma_alpha > 0.0);
    CHECK(fit.chi2_per_dof > 0.2);
    CHECK(fit.chi2_per_dof < 3.0);
}

TEST_CASE("alpha estimate is unbiased over repeated noisy ensembles") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double truth = 0.5;
    double sum_alpha = 0.0;
    double typical_sigma = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<LossMeasurement> ms;
        int id = 0;
        for (double L : {0.9, 2.0})
            for (int i = 0; i < 12; ++i) {
                LossMeasurement m;
                m.waveguide_id = "wg" + std::to_string(id++);
                m.length_mm = L;
                m.r_tilde = 0.35 * std::exp(-truth * L) * (1.0 + 0.1 * gauss(rng));
                m.sigma = 0.1 * m.r_tilde;
                ms.push_back(m);
            }
        auto fit = fit_alpha_R(ms);
        sum_alpha += fit.alpha_per_mm;
        typical_sigma += fit.sigma_alpha;
    }
    double mean_alpha = sum_alpha / trials;
    typical_sigma /= trials;
    CHECK(std::abs(mean_alpha - truth) < 0.5 * typical_sigma);
}

TEST_CASE("resolution bias factor") {
    InstrumentSpec sharp{.pixel_pitch_pm = 2.0};
    CHECK(resolution_bias(3.5, 0.9, sharp) == 1.0); // zero PSF

    InstrumentSpec blurred = sharp;
    blurred.psf_fwhm_pm = 10.0;

    // analytic gaussian damping cross-check: the transform of a gaussian PSF
    // multiplies the ladder by exp(-sigma_beta^2 x^2 / 2), so the first ratio
    // is biased by exp(-6 sigma_beta^2 (n_g L)^2)
    auto analytic_factor = [](double ng, double L_mm, double psf_fwhm_pm) {
        double sigma_lambda_m = psf_fwhm_pm * 1e-12 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
        double lambda_m = 775e-9;
        double sigma_beta = 2.0 * std::numbers::pi * sigma_lambda_m / (lambda_m * lambda_m);
        double ol = ng * L_mm * 1e-3;
        return std::exp(6.0 * sigma_beta * sigma_beta * ol * ol);
    };
    for (double ng : {3.1, 4.1}) {
        double simulated = resolution_bias(ng, 0.9, blurred);
        double analytic = analytic_factor(ng, 0.9, 10.0);
        CHECK(analytic < 1.3); // weak-damping regime
        CHECK(simulated == doctest::Approx(analytic).epsilon(0.2));
    }

    // strictly increasing in n_g (hence n_g*L) and in the PSF width
    double prev = 1.0;
    for (double ng : {3.1, 3.4, 3.7, 4.0}) {
        double f = resolution_bias(ng, 0.9, blurred);
        CHECK(f > prev);
        prev = f;
    }
    prev = 1.0;
    for (double psf : {5.0, 10.0, 15.0, 20.0}) {
        InstrumentSpec inst = sharp;
        inst.psf_fwhm_pm = psf;
        double f = resolution_bias(3.7, 0.9, inst);
        CHECK(f > prev);
        prev = f;
    }
    CHECK(resolution_bias(3.7, 2.0, blurred) > resolution_bias(3.7, 0.9, blurred));

    // cache: repeated lookups agree exactly
    CHECK(resolution_bias(3.7, 0.9, blurred) == resolution_bias(3.7, 0.9, blurred));

    // insensitive to the reference loss choice
    BiasOptions ref_lo, ref_hi;
    ref_lo.r_tilde_ref = 0.2;
    ref_hi.r_tilde_ref = 0.5;
    double f_lo = resolution_bias(3.7, 0.9, blurred, ref_lo);
    double f_hi = resolution_bias(3.7, 0.9, blurred, ref_hi);
    CHECK(f_lo == doctest::Approx(f_hi).epsilon(0.01));

    // hopeless resolution cannot be corrected
    InstrumentSpec hopeless = sharp;
    hopeless.psf_fwhm_pm = 200.0;
    CHECK_THROWS_AS(resolution_bias(4.1, 2.0, hopeless), UncorrectableError);
}
