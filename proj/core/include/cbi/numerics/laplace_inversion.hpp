#pragma once

#include <complex>
#include <functional>
#include <optional>

namespace cbi::inversion {

using RealTransform = std::function<double(double)>;
using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;

enum class Method { Stehfest, Talbot };

struct Options {
    int stehfest_order = 16;      ///< even, 2..30
    int talbot_nodes = 32;
    /// Stehfest is declared oscillating when the order-N and order-(N-2)
    /// results differ by more than this (relative to max(|value|, floor)).
    double oscillation_tol = 1e-3;
};

struct Result {
    double value = 0.0;
    Method method = Method::Stehfest;
    double discrepancy = 0.0;  ///< |f_N - f_{N-2}| for Stehfest, 0 for Talbot
};

/// Gaver-Stehfest inversion at t > 0, accumulated in long double.
double stehfest(const RealTransform& F, double t, int order);

/// Fixed-Talbot (Abate-Valko) contour inversion at t > 0.  F must be the
/// analytic continuation of the transform to the left half-plane, with all
/// singularities on or near the non-positive real axis.
double talbot(const ComplexTransform& F, double t, int nodes);

/// Stehfest first; Talbot when Stehfest oscillates and a complex transform is
/// supplied.  Throws NumericError naming t when neither is usable.
Result invert(const RealTransform& F, const std::optional<ComplexTransform>& Fc, double t,
              const Options& opts = {}, double floor = 1e-300);

}  // namespace cbi::inversion
