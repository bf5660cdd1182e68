#include "cbi/numerics/special_functions.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

#include "cbi/errors.hpp"
#include "cbi/numerics/quadrature.hpp"

namespace cbi::special {

namespace {

// Modified Lentz evaluation of the Legendre continued fraction for Gamma(s, z);
// valid for any real s once z is not small.
double upper_gamma_cf(double s, double z) {
    constexpr double tiny = 1e-300;
    double b = z + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return std::exp(-z + s * std::log(z)) * h;
    }
    throw NumericError("upper_gamma: continued fraction did not converge");
}

template <class T>
T alternating_tail(T z, int first) {
    // sum_{n >= first} (-z)^n / n!
    T term = T(1);
    for (int n = 1; n <= first; ++n) term *= -z / T(n);
    T sum = term;
    for (int n = first + 1; n < first + 30; ++n) {
        term *= -z / T(n);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

double gamma_fn(double s) { return boost::math::tgamma(s); }

double expint_e1(double z) {
    if (!(z > 0.0)) throw ValidationError("expint_e1: argument must be positive");
    return boost::math::expint(1, z);
}

double lower_gamma(double s, double z) {
    if (!(s > 0.0)) throw ValidationError("lower_gamma: s must be positive");
    if (z <= 0.0) return 0.0;
    return boost::math::tgamma_lower(s, z);
}

double upper_gamma(double s, double z) {
    if (!(z > 0.0)) throw ValidationError("upper_gamma: z must be positive");
    if (s > 0.0) return boost::math::tgamma(s, z);
    if (s == 0.0) return expint_e1(z);
    if (z >= 1.0) return upper_gamma_cf(s, z);
    // Gamma(s, z) = Gamma(s, 1) + int_z^1 t^{s-1} e^{-t} dt, with t = e^v.
    const double head = upper_gamma_cf(s, 1.0);
    const auto body = quad::gauss_kronrod([s](double v) { return std::exp(s * v - std::exp(v)); },
                                          std::log(z), 0.0, {.rel_tol = 1e-13, .abs_tol = 0.0});
    return head + body.value;
}

double h2(double z) {
    if (std::abs(z) < 0.5) return alternating_tail(z, 2);
    return std::expm1(-z) + z;
}

std::complex<double> h2(std::complex<double> z) {
    if (std::abs(z) < 0.5) return alternating_tail(z, 2);
    return std::exp(-z) - 1.0 + z;
}

double h3(double z) {
    if (std::abs(z) < 0.5) return -alternating_tail(z, 3);
    return -std::expm1(-z) - z + 0.5 * z * z;
}

std::complex<double> h3(std::complex<double> z) {
    if (std::abs(z) < 0.5) return -alternating_tail(z, 3);
    return 1.0 - std::exp(-z) - z + 0.5 * z * z;
}

double one_minus_exp(double z) { return -std::expm1(-z); }

std::complex<double> one_minus_exp(std::complex<double> z) {
    if (std::abs(z) < 0.5) return -alternating_tail(z, 1);
    return 1.0 - std::exp(-z);
}

}  // namespace cbi::special
