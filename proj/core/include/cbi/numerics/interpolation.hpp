#pragma once

#include <span>
#include <vector>

namespace cbi::interp {

/// Piecewise cubic Hermite interpolant on strictly increasing nodes.
/// Slopes are limited (Fritsch-Carlson) so the interpolant is monotone on
/// every interval where the data are monotone.
class MonotoneHermite {
public:
    MonotoneHermite() = default;
    MonotoneHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dydx);

    double value(double x) const;
    double derivative(double x) const;

    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }
    std::span<const double> nodes() const { return x_; }
    std::span<const double> values() const { return y_; }
    std::span<const double> slopes() const { return d_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_, y_, d_;
};

}  // namespace cbi::interp
