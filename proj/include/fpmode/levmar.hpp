#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fpmode {

// Small damped Gauss-Newton (Levenberg-Marquardt) solver for dense problems
// with a handful of parameters. The Jacobian comes from central differences
// with per-parameter steps.
struct LevMarOptions {
    int max_iterations = 200;
    double cost_tolerance = 1e-14; // relative cost decrease
    double step_tolerance = 1e-12; // relative parameter step
    double lambda0 = 1e-3;
};

struct LevMarResult {
    std::vector<double> params;
    double cost = 0.0; // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    std::string message;
    std::vector<double> jtj; // row-major p x p normal matrix at the solution
};

using ResidualFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

LevMarResult levmar(const ResidualFn& residuals, std::vector<double> initial,
                    size_t n_residuals, const std::vector<double>& diff_steps,
                    const LevMarOptions& options = {});

/// Solves A x = b for a small dense row-major system in place; returns false
/// when the pivot collapses.
bool solve_dense(std::vector<double> a, std::vector<double> b, size_t n, std::vector<double>& x);

} // namespace fpmode
