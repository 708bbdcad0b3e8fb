#include "fpmode/levmar.hpp"

#include <cmath>

#include "fpmode/errors.hpp"

namespace fpmode {

bool solve_dense(std::vector<double> a, std::vector<double> b, size_t n, std::vector<double>& x) {
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300)
            return false;
        if (pivot != col) {
            for (size_t c = 0; c < n; ++c)
                std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (size_t c = col; c < n; ++c)
                a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (size_t c = r + 1; c < n; ++c)
            acc -= a[r * n + c] * x[c];
        x[r] = acc / a[r * n + r];
    }
    return true;
}

namespace {

double cost_of(const std::vector<double>& r) {
    double c = 0.0;
    for (double v : r)
        c += v * v;
    return c;
}

void numeric_jacobian(const ResidualFn& residuals, const std::vector<double>& params,
                      const std::vector<double>& steps, size_t n_residuals,
                      std::vector<double>& jacobian) {
    const size_t p = params.size();
    std::vector<double> r_plus(n_residuals), r_minus(n_residuals);
    for (size_t j = 0; j < p; ++j) {
        double h = steps[j];
        std::vector<double> probe = params;
        probe[j] += h;
        residuals(probe, r_plus);
        probe[j] = params[j] - h;
        residuals(probe, r_minus);
        for (size_t i = 0; i < n_residuals; ++i)
            jacobian[i * p + j] = (r_plus[i] - r_minus[i]) / (2.0 * h);
    }
}

} // namespace

LevMarResult levmar(const ResidualFn& residuals, std::vector<double> initial, size_t n_residuals,
                    const std::vector<double>& diff_steps, const LevMarOptions& options) {
    const size_t p = initial.size();
    if (p == 0 || diff_steps.size() != p)
        throw ConfigError("levmar: parameter and step counts must match and be non-empty");
    if (n_residuals < p)
        throw DataError("levmar: fewer residuals than parameters");

    LevMarResult out;
    out.params = std::move(initial);
    std::vector<double> r(n_residuals);
    residuals(out.params, r);
    out.cost = cost_of(r);

    std::vector<double> jacobian(n_residuals * p);
    std::vector<double> jtj(p * p), jtr(p), step, trial(p), r_trial(n_residuals);
    double lambda = options.lambda0;

    for (out.iterations = 0; out.iterations < options.max_iterations && !out.converged;
         ++out.iterations) {
        numeric_jacobian(residuals, out.params, diff_steps, n_residuals, jacobian);
        for (size_t a = 0; a < p; ++a) {
            jtr[a] = 0.0;
            for (size_t b = a; b < p; ++b) {
                double acc = 0.0;
                for (size_t i = 0; i < n_residuals; ++i)
                    acc += jacobian[i * p + a] * jacobian[i * p + b];
                jtj[a * p + b] = acc;
                jtj[b * p + a] = acc;
            }
            for (size_t i = 0; i < n_residuals; ++i)
                jtr[a] += jacobian[i * p + a] * r[i];
        }

        double grad_max = 0.0;
        for (size_t a = 0; a < p; ++a)
            grad_max = std::max(grad_max, std::abs(jtr[a]));
        if (grad_max <= 1e-12 * (1.0 + out.cost)) {
            out.converged = true;
            out.message = "gradient below tolerance";
            break;
        }

        bool improved = false;
        while (lambda < 1e12) {
            std::vector<double> damped = jtj;
            for (size_t a = 0; a < p; ++a)
                damped[a * p + a] += lambda * std::max(jtj[a * p + a], 1e-30);
            std::vector<double> rhs(p);
            for (size_t a = 0; a < p; ++a)
                rhs[a] = -jtr[a];
            if (!solve_dense(damped, rhs, p, step)) {
                lambda *= 10.0;
                continue;
            }
            for (size_t a = 0; a < p; ++a)
                trial[a] = out.params[a] + step[a];
            residuals(trial, r_trial);
            double trial_cost = cost_of(r_trial);
            if (trial_cost < out.cost) {
                improved = true;
                double drop = out.cost - trial_cost;
                double max_step = 0.0;
                for (size_t a = 0; a < p; ++a)
                    max_step = std::max(max_step,
                                        std::abs(step[a]) / (1.0 + std::abs(out.params[a])));
                out.params = trial;
                r = r_trial;
                out.cost = trial_cost;
                lambda = std::max(lambda * 0.1, 1e-12);
                if (drop <= options.cost_tolerance * (out.cost + 1e-300) ||
                    max_step <= options.step_tolerance) {
                    out.converged = true;
                    out.message = "converged";
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!improved && !out.converged) {
            // Damping escalated to its cap without an acceptable step: the
            // steps tried were vanishingly small gradient steps, so this is a
            // numerical local minimum.
            out.converged = true;
            out.message = "no further improvement possible";
            break;
        }
    }
    if (!out.converged && out.message.empty())
        out.message = "maximum iterations reached";

    numeric_jacobian(residuals, out.params, diff_steps, n_residuals, jacobian);
    for (size_t a = 0; a < p; ++a)
        for (size_t b = a; b < p; ++b) {
            double acc = 0.0;
            for (size_t i = 0; i < n_residuals; ++i)
                acc += jacobian[i * p + a] * jacobian[i * p + b];
            jtj[a * p + b] = acc;
            jtj[b * p + a] = acc;
        }
    out.jtj = jtj;
    return out;
}

} // namespace fpmode
