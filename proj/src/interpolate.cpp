#include "fpmode/interpolate.hpp"

#include <algorithm>
#include <cmath>

#include "fpmode/errors.hpp"

namespace fpmode {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n)
        throw DataError("cubic spline needs at least 3 matched samples");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw DataError("cubic spline abscissae must be strictly increasing");

    // Natural spline: tridiagonal solve for second derivatives.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        double h0 = x_[i] - x_[i - 1];
        double h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    // Thomas algorithm; the natural boundary rows have zero off-diagonals.
    std::vector<double> c(n, 0.0);
    c[0] = 0.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        double lower = x_[i] - x_[i - 1];
        double denom = diag[i] - lower * c[i - 1];
        c[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
    }
    for (size_t i = n - 1; i-- > 1;)
        m_[i] = rhs[i] - c[i] * m_[i + 1];
}

double CubicSpline::operator()(double xq) const {
    const size_t n = x_.size();
    size_t hi = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin();
    hi = std::clamp<size_t>(hi, 1, n - 1);
    size_t lo = hi - 1;
    double h = x_[hi] - x_[lo];
    double a = (x_[hi] - xq) / h;
    double b = (xq - x_[lo]) / h;
    return a * y_[lo] + b * y_[hi] +
           ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
}

double linear_interp(const std::vector<double>& xs, const std::vector<double>& ys, double xq) {
    if (xs.empty() || xs.size() != ys.size())
        throw DataError("linear_interp: malformed table");
    if (xq <= xs.front())
        return ys.front();
    if (xq >= xs.back())
        return ys.back();
    size_t hi = std::upper_bound(xs.begin(), xs.end(), xq) - xs.begin();
    size_t lo = hi - 1;
    double t = (xq - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

std::vector<double> moving_average(const std::vector<double>& values, size_t window) {
    const size_t n = values.size();
    if (window == 0 || window > n)
        throw ConfigError("moving average window must lie in [1, n]");
    std::vector<double> prefix(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + values[i];
    std::vector<double> out(n);
    const size_t half = window / 2;
    for (size_t i = 0; i < n; ++i) {
        size_t lo = i > half ? i - half : 0;
        size_t hi = std::min(n, i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

} // namespace fpmode
