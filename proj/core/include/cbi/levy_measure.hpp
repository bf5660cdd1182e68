#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace cbi {

/// Finitely many atoms: sum_i w_i delta_{xi_i}.
struct FiniteAtoms {
    std::vector<double> weights;
    std::vector<double> locations;
};

/// Density c e^{-rho xi} on (0, inf).
struct ExponentialDensity {
    double c = 1.0;
    double rho = 1.0;
};

/// Density c xi^{-1-a} e^{-rho xi} on (0, inf), a in (0, 2), rho >= 0.
struct TemperedStable {
    double c = 1.0;
    double a = 0.5;
    double rho = 1.0;
};

/// How a tabulated tail continues beyond its last node x_N.
enum class TailExtrapolation {
    None,      ///< tail(x_N) must be 0; measure supported on [x_0, x_N]
    Power,     ///< tail(x) = T_N (x / x_N)^{-s}
    LogPower,  ///< tail(x) = T_N (log x_N / log x)^{p}, requires x_N > 1
};

/// Tail function x -> measure(x, inf) given at nodes and interpolated
/// linearly (uniform density per segment).  Below the first node the tail is
/// flat, so the measure has no mass on (0, x_0).  The extrapolation exponent
/// is fitted from the last segment unless given explicitly.
struct TabulatedTail {
    std::vector<double> x;
    std::vector<double> tail;
    TailExtrapolation extrapolation = TailExtrapolation::None;
    std::optional<double> exponent;
};

/// A Levy measure on (0, inf) drawn from one of four parametric families.
/// Immutable after construction; every query is a pure function.
class LevyMeasure {
public:
    using Family = std::variant<FiniteAtoms, ExponentialDensity, TemperedStable, TabulatedTail>;

    explicit LevyMeasure(Family family);

    static LevyMeasure atoms(std::vector<double> weights, std::vector<double> locations);
    static LevyMeasure exponential(double c, double rho);
    static LevyMeasure tempered_stable(double c, double a, double rho);
    static LevyMeasure tabulated(std::vector<double> x, std::vector<double> tail,
                                 TailExtrapolation extrapolation = TailExtrapolation::None,
                                 std::optional<double> exponent = std::nullopt);

    const Family& family() const { return family_; }
    std::string family_name() const;

    /// measure((x, inf)); +inf allowed only as x -> 0 for infinite activity.
    double tail(double x) const;
    double total_mass() const;
    bool finite_activity() const;
    /// int (xi ^ 1) measure(dxi) < inf, i.e. admissible as immigration measure.
    bool finite_variation() const;

    /// int_{(lo, hi]} xi measure(dxi), possibly +inf.
    double first_moment(double lo, double hi) const;
    /// int_{xi > 1} log xi measure(dxi), +inf when divergent.
    double log_moment() const;

    /// Phi(u) = int (1 - e^{-u xi}) measure(dxi), for finite-variation measures.
    double laplace_increment(double u) const;
    std::complex<double> laplace_increment(std::complex<double> u) const;

    /// Psi(u) = int (e^{-u xi} - 1 + u xi 1{xi <= 1}) measure(dxi).
    double compensated(double u) const;
    std::complex<double> compensated(std::complex<double> u) const;

    /// True when the complex overloads are exact analytic continuations into
    /// the left half-plane (needed by contour inversion).
    bool has_analytic_continuation() const;

    /// int_{(lo, hi]} g(xi) measure(dxi) for a bounded continuous g.  For
    /// infinite-activity measures g must vanish at least linearly at 0 when lo = 0.
    double integrate(const std::function<double(double)>& g, double lo, double hi,
                     double rel_tol = 1e-11) const;

    /// Draws a jump size from measure restricted to (cutoff, inf), normalised.
    /// cutoff is ignored (treated as 0) for finite-activity families.
    double sample_jump(std::mt19937_64& rng, double cutoff) const;

    /// measure scaled by a positive factor.
    LevyMeasure scaled(double factor) const;

private:
    Family family_;
};

}  // namespace cbi
