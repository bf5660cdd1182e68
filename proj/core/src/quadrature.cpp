#include "cbi/numerics/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cbi/errors.hpp"

namespace cbi::quad {

namespace {

void check_finite(const Result& r, const char* rule, double a, double b) {
    if (!std::isfinite(r.value)) {
        throw NumericError(std::string(rule) + ": non-finite integral on [" + std::to_string(a) +
                           ", " + std::to_string(b) + "]");
    }
}

}  // namespace

namespace {

struct Gk15 {
    double value;
    double error;
};

// One Gauss-Kronrod 15/7 panel on [a, b] with the error scaled to the panel.
Gk15 gk15_panel(const Integrand& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    static const auto& xk = GK::abscissa();
    static const auto& wk = GK::weights();
    static const auto& wg = G::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double f0 = f(c);
    double k = wk[0] * f0, g = wg[0] * f0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
        k += wk[i] * s;
        if (i % 2 == 0) g += wg[i / 2] * s;
    }
    k *= h;
    g *= h;
    return {k, std::max(std::abs(k - g), 50.0 * std::numeric_limits<double>::epsilon() * std::abs(k))};
}

Result gk_recurse(const Integrand& f, double a, double b, const Gk15& p, double tol, unsigned depth) {
    const double mid = 0.5 * (a + b);
    if (p.error <= tol || depth == 0 || !(mid > a && mid < b)) return {p.value, p.error};
    const Gk15 l = gk15_panel(f, a, mid), r = gk15_panel(f, mid, b);
    const Result rl = gk_recurse(f, a, mid, l, 0.5 * tol, depth - 1);
    const Result rr = gk_recurse(f, mid, b, r, 0.5 * tol, depth - 1);
    return {rl.value + rr.value, rl.error + rr.error};
}

}  // namespace

// Boost's adaptive driver compares an unscaled panel error against a scaled
// tolerance and cannot terminate on short intervals, so the recursion is ours.
Result gauss_kronrod(const Integrand& f, double a, double b, const Options& opts) {
    if (a == b) return {};
    if (b < a) {
        Result r = gauss_kronrod(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    const Gk15 top = gk15_panel(f, a, b);
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(top.value));
    const Result r = gk_recurse(f, a, b, top, tol, opts.max_depth);
    check_finite(r, "gauss_kronrod", a, b);
    return r;
}

Result tanh_sinh(const Integrand& f, double a, double b, const Options& opts) {
    if (a == b) return {};
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    Result r;
    try {
        double l1 = 0.0;
        r.value = rule.integrate(f, a, b, opts.rel_tol, &r.error, &l1);
    } catch (const std::exception& e) {
        throw NumericError(std::string("tanh_sinh: ") + e.what());
    }
    check_finite(r, "tanh_sinh", a, b);
    return r;
}

Result half_line(const Integrand& f, double a, const Options& opts) {
    thread_local boost::math::quadrature::exp_sinh<double> rule(9);
    Result r;
    try {
        double l1 = 0.0;
        r.value = rule.integrate([&](double t) { return f(a + t); }, opts.rel_tol, &r.error, &l1);
        if (std::isfinite(r.value) && r.error <= std::max(opts.abs_tol, 1e3 * opts.rel_tol * std::abs(r.value)))
            return r;
    } catch (const std::exception&) {
        // fall through to the compactified rule
    }
    // x = a + t / (1 - t) maps [0, 1) onto [a, inf).
    r = tanh_sinh(
        [&](double t) {
            if (t >= 1.0) return 0.0;
            const double s = 1.0 - t;
            const double v = f(a + t / s);
            return v / (s * s);
        },
        0.0, 1.0, opts);
    return r;
}

Result graded_to_zero(const Integrand& f, double a, const Options& opts, int max_pieces) {
    Result total;
    int small_run = 0;
    double hi = a;
    for (int j = 0; j < max_pieces; ++j) {
        const double lo = 0.5 * hi;
        const Result piece = gauss_kronrod(f, lo, hi, opts);
        total.value += piece.value;
        total.error += piece.error;
        hi = lo;
        const double scale = std::max(std::abs(total.value), opts.abs_tol);
        if (std::abs(piece.value) <= 0.1 * opts.rel_tol * scale) {
            if (++small_run >= 3) return total;
        } else {
            small_run = 0;
        }
        if (hi < std::numeric_limits<double>::min()) return total;
    }
    throw NumericError("graded_to_zero: dyadic pieces did not decay below tolerance; integral over (0, " +
                       std::to_string(a) + "] appears divergent");
}

}  // namespace cbi::quad
