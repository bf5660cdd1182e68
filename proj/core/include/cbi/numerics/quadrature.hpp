#pragma once

#include <functional>
#include <limits>

namespace cbi::quad {

using Integrand = std::function<double(double)>;

struct Options {
    double rel_tol = 1e-10;
    /// accepted absolute error; 0 means relative only
    double abs_tol = 0.0;
    unsigned max_depth = 18;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15-point) on a finite interval.  Suited to smooth
/// integrands and integrands with interior kinks.
Result gauss_kronrod(const Integrand& f, double a, double b, const Options& opts = {});

/// Double-exponential (tanh-sinh) rule on a finite interval.  Clusters nodes at
/// both endpoints, so integrable endpoint singularities are handled.
Result tanh_sinh(const Integrand& f, double a, double b, const Options& opts = {});

/// Integral over [a, +inf) for integrands with at least exponential-like or
/// integrable algebraic decay.
Result half_line(const Integrand& f, double a, const Options& opts = {});

/// Sum of integrals over the dyadic pieces [a 2^-(j+1), a 2^-j], j = 0..,
/// i.e. the integral over (0, a].  Stops once a piece falls below
/// rel_tol * |total|.  Used for integrands that are continuous but possibly
/// non-smooth or slowly decaying at 0.
Result graded_to_zero(const Integrand& f, double a, const Options& opts = {},
                      int max_pieces = 200);

}  // namespace cbi::quad
