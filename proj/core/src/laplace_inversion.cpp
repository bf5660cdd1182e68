#include "cbi/numerics/laplace_inversion.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cbi/errors.hpp"

namespace cbi::inversion {

namespace {

constexpr int kMaxOrder = 30;

using Coefficients = std::array<std::vector<long double>, kMaxOrder + 1>;

long double factorial(int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Coefficients make_coefficients() {
    Coefficients all;
    for (int n = 2; n <= kMaxOrder; n += 2) {
        const int half = n / 2;
        std::vector<long double> v(n);
        for (int k = 1; k <= n; ++k) {
            long double s = 0.0L;
            for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
                s += std::pow(static_cast<long double>(j), half) * factorial(2 * j) /
                     (factorial(half - j) * factorial(j) * factorial(j - 1) * factorial(k - j) *
                      factorial(2 * j - k));
            }
            v[k - 1] = ((k + half) % 2 == 0 ? 1.0L : -1.0L) * s;
        }
        all[n] = std::move(v);
    }
    return all;
}

const Coefficients& coefficients() {
    static const Coefficients c = make_coefficients();
    return c;
}

}  // namespace

double stehfest(const RealTransform& F, double t, int order) {
    if (!(t > 0.0)) throw ValidationError("stehfest: t must be positive");
    if (order < 2 || order > kMaxOrder || order % 2 != 0)
        throw ValidationError("stehfest: order must be even and in [2, 30]");
    const auto& v = coefficients()[order];
    const long double a = std::numbers::ln2_v<long double> / t;
    long double acc = 0.0L;
    for (int k = 1; k <= order; ++k) acc += v[k - 1] * static_cast<long double>(F(static_cast<double>(k * a)));
    return static_cast<double>(acc * a);
}

double talbot(const ComplexTransform& F, double t, int nodes) {
    if (!(t > 0.0)) throw ValidationError("talbot: t must be positive");
    if (nodes < 4) throw ValidationError("talbot: need at least 4 nodes");
    const double r = 2.0 * nodes / (5.0 * t);
    double acc = 0.5 * std::real(F({r, 0.0})) * std::exp(r * t);
    for (int k = 1; k < nodes; ++k) {
        const double theta = k * std::numbers::pi / nodes;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        acc += std::real(std::exp(t * s) * F(s) * std::complex<double>(1.0, sigma));
    }
    return r / nodes * acc;
}

Result invert(const RealTransform& F, const std::optional<ComplexTransform>& Fc, double t,
              const Options& opts, double floor) {
    const double hi = stehfest(F, t, opts.stehfest_order);
    const double lo = stehfest(F, t, opts.stehfest_order - 2);
    const double gap = std::abs(hi - lo);
    if (std::isfinite(hi) && gap <= opts.oscillation_tol * std::max(std::abs(hi), floor))
        return {hi, Method::Stehfest, gap};
    if (Fc) {
        const double v = talbot(*Fc, t, opts.talbot_nodes);
        if (std::isfinite(v)) return {v, Method::Talbot, 0.0};
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "Laplace inversion failed at t = " << t << ": Stehfest orders " << opts.stehfest_order
        << " and " << opts.stehfest_order - 2 << " disagree (" << hi << " vs " << lo
        << ") and no contour fallback is available";
    throw NumericError(msg.str());
}

}  // namespace cbi::inversion
