#pragma once

#include <memory>
#include <vector>

#include "cbi/mechanisms.hpp"
#include "cbi/numerics/interpolation.hpp"
#include "cbi/numerics/laplace_inversion.hpp"

namespace cbi {

enum class ScaleMethod {
    Auto,       ///< renewal for atoms / compact tabulated mu, inversion otherwise
    Inversion,  ///< transform inversion on a geometric grid
    Renewal,    ///< Volterra renewal equation on a uniform grid
};

struct ScaleOptions {
    double xmax = 20.0;
    std::size_t nodes = 2048;
    /// first grid node is xmax * min_ratio
    double min_ratio = 1e-6;
    inversion::Options inversion;
    /// skip the closed forms (used to validate the numeric path)
    bool force_numeric = false;
    bool parallel = true;
    ScaleMethod method = ScaleMethod::Auto;
    /// uniform cells on [0, xmax] for the renewal solver
    std::size_t renewal_cells = 16384;
};

/// Scale function W of the dual spectrally negative process:
/// int_0^inf e^{-ux} W(x) dx = -1/R(u), W = 0 on (-inf, 0).
class ScaleFunction {
public:
    enum class Provenance { ClosedFormOU, ClosedFormBrownian, NumericInversion, NumericRenewal };

    /// W(x); 0 for x < 0, W(0) at x = 0.
    double operator()(double x) const { return value(x); }
    double value(double x) const;
    /// Right derivative W'_+(x), x >= 0; +inf possible at x = 0.
    double derivative(double x) const;

    double w0() const { return w0_; }
    double lambda0() const { return lambda0_; }
    Provenance provenance() const { return provenance_; }
    bool is_numeric() const {
        return provenance_ == Provenance::NumericInversion || provenance_ == Provenance::NumericRenewal;
    }
    const BranchingMechanism& branching() const { return bran_; }

    /// Numeric paths only: grid nodes, node values and node slopes.
    const interp::MonotoneHermite* interpolant() const { return interp_.get(); }
    double xmax() const { return xmax_; }

private:
    friend ScaleFunction build_scale(const BranchingMechanism&, const ScaleOptions&);
    explicit ScaleFunction(BranchingMechanism bran) : bran_(std::move(bran)) {}

    double invert_value(double x) const;
    double invert_derivative(double x) const;
    double beyond_grid(double x, bool derivative) const;

    BranchingMechanism bran_;
    Provenance provenance_ = Provenance::NumericInversion;
    double w0_ = 0.0;
    double lambda0_ = 0.0;
    double slope0_ = 0.0;  // W'_+(0)
    double xmax_ = 0.0;
    double rho_ = 0.0;  // R'(0+)
    inversion::Options inv_opts_;
    std::shared_ptr<const interp::MonotoneHermite> interp_;
};

std::string to_string(ScaleFunction::Provenance p);

/// lambda0 = int_{(0,1]} xi mu(dxi) - beta when the dual process has bounded
/// variation, +inf otherwise.  Rejects supercritical mechanisms.
double effective_drift(const BranchingMechanism& bran);

/// W'_+(0): 1/alpha with diffusion, mu(0,inf)/lambda0^2 for bounded
/// variation, +inf otherwise.
double scale_slope_at_zero(const BranchingMechanism& bran);

/// Requires R not identically zero and R'(0+) <= 0.
ScaleFunction build_scale(const BranchingMechanism& bran, const ScaleOptions& opts = {});
ScaleFunction build_scale(const BranchingMechanism& bran, double xmax);

/// n(excursion height > x) = W'_+(x) / W(x), x > 0.
double excursion_height_intensity(const ScaleFunction& sf, double x);

}  // namespace cbi
