#pragma once

#include <cstddef>
#include <vector>

namespace fpmode {

// Natural cubic spline through (x, y) with strictly increasing x.
// Evaluation outside the knot range extrapolates the boundary cubic.
class CubicSpline {
  public:
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double xq) const;

  private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at knots
};

/// Piecewise-linear interpolation; xs strictly increasing, clamped at ends.
double linear_interp(const std::vector<double>& xs, const std::vector<double>& ys, double xq);

/// Centered moving average; the window shrinks near the edges.
std::vector<double> moving_average(const std::vector<double>& values, size_t window);

} // namespace fpmode
