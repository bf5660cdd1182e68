#include "cbi/numerics/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "cbi/errors.hpp"

namespace cbi::interp {

MonotoneHermite::MonotoneHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dydx)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(dydx)) {
    detail::require(x_.size() >= 2 && y_.size() == x_.size() && d_.size() == x_.size(),
                    "MonotoneHermite: need >= 2 nodes with matching values and slopes");
    for (std::size_t i = 1; i < x_.size(); ++i)
        detail::require(x_[i] > x_[i - 1], "MonotoneHermite: nodes must be strictly increasing");

    // Fritsch-Carlson limiter on the supplied slopes.
    const std::size_t n = x_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        if (delta == 0.0) {
            d_[i] = 0.0;
            d_[i + 1] = 0.0;
            continue;
        }
        if (d_[i] * delta < 0.0) d_[i] = 0.0;
        if (d_[i + 1] * delta < 0.0) d_[i + 1] = 0.0;
        const double a = d_[i] / delta;
        const double b = d_[i + 1] / delta;
        const double r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            d_[i] = tau * a * delta;
            d_[i + 1] = tau * b * delta;
        }
    }
}

std::size_t MonotoneHermite::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
    return std::min(i, x_.size() - 2);
}

double MonotoneHermite::value(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * d_[i + 1];
}

double MonotoneHermite::derivative(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (6 * t - 6 * t2) * y_[i + 1]) / h + (3 * t2 - 4 * t + 1) * d_[i] +
           (3 * t2 - 2 * t) * d_[i + 1];
}

}  // namespace cbi::interp
