#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbi/mechanisms.hpp"
#include "cbi/scale.hpp"

namespace cbi {

struct LimitOptions {
    ScaleOptions scale;
    ExistenceOptions existence;
    double quad_rel_tol = 1e-11;

    /// k near 0: geometric grid down to k_min_ratio * xmax; c from the last
    /// richardson_nodes nodes.
    double k_min_ratio = 1e-8;
    int richardson_nodes = 6;

    /// int_0^1 k/x: dyadic pieces [2^-(j+1), 2^-j], j < atom_max_dyads.
    int atom_max_dyads = 50;
    int atom_run = 8;

    /// k monotonicity grid for the self-decomposability test.
    std::size_t sd_grid = 240;
    double sd_lo_ratio = 1e-4;  ///< grid from sd_lo_ratio * xmax
    double sd_hi_ratio = 0.5;   ///< to sd_hi_ratio * xmax

    inversion::Options density_inversion;
};

struct Support {
    enum class Kind { Point, HalfLine };
    Kind kind = Kind::HalfLine;
    double left = 0.0;  ///< the point, or the left end of the half-line
};

struct AtomInfo {
    enum class Kind { AbsolutelyContinuous, AtomAt, Undetermined };
    Kind kind = Kind::Undetermined;
    double location = 0.0;
    double mass = 0.0;
    double integral_0_1 = 0.0;  ///< int_0^1 k/x (partial sum when divergent)
    double total_nu = 0.0;      ///< nu(0, inf); +inf when divergent
    int dyads = 0;
    std::string note;
};

struct BoundaryAsymptotics {
    double c = 0.0;      ///< lim_{x->0} k(x)
    double kappa = 0.0;  ///< exp(-c Ein(1) + c E1(1) - int_1^inf k/x)
};

enum class SdStatus { SelfDecomposable, NotSelfDecomposable, Undetermined };

struct SdCertificate {
    SdStatus status = SdStatus::Undetermined;
    std::string reason;
    /// x1 < x2 with k(x1) < k(x2)
    std::optional<std::pair<double, double>> witness;
};

struct ClassReport {
    std::string placement;  ///< "SD+", "CLIM \\ SD+", "CLIM (SD+ undetermined)"
    bool infinitely_divisible = true;
    bool point_mass = false;
    SdCertificate sd;
    AtomInfo atom;
};

struct Triplet {
    double gamma = 0.0;
    std::function<double(double)> k;
};

/// l(u) = -int_0^u F(s)/R(s) ds.  Requires a limit to exist.
double laplace_exponent(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double u,
                        double rel_tol = 1e-12);

/// gamma = b W(0) and k(x) = b W'(x) + W(x) m(x,inf) + int_(0,x] (W(x) - W(x-xi)) m(dxi).
/// The returned k keeps copies of imm and sf.
Triplet triplet(const ImmigrationMechanism& imm, const BranchingMechanism& bran, const ScaleFunction& sf,
                double rel_tol = 1e-11);

/// k(x) through the excursion intensity n = W'/W:
/// W(x) (b n(x) + m(x,inf) + int_(0,x] (1 - exp(-int_{x-xi}^x n)) m(dxi)).
double k_via_excursions(const ImmigrationMechanism& imm, const ScaleFunction& sf, double x,
                        double rel_tol = 1e-10);

Support support(const ImmigrationMechanism& imm, const BranchingMechanism& bran);

/// Limit law L of a CBI process with its triplet and diagnostics.
/// Immutable; all evaluators are thread-safe.
class LimitLaw {
public:
    const ImmigrationMechanism& immigration() const { return imm_; }
    const BranchingMechanism& branching() const { return bran_; }
    const ScaleFunction& scale() const { return *sf_; }
    const LimitOptions& options() const { return opts_; }

    double gamma() const { return gamma_; }
    double k(double x) const;
    double k_excursion(double x) const;
    double l(double u) const;
    Support support() const { return support_; }
    bool degenerate() const { return support_.kind == Support::Kind::Point; }

    const AtomInfo& atom() const { return atom_; }
    double atom_mass() const { return atom_.mass; }
    double total_nu() const { return atom_.total_nu; }
    const std::optional<BoundaryAsymptotics>& boundary() const { return boundary_; }
    /// K(x) = exp(int_x^1 (c - k(y))/y dy); requires boundary().
    double K(double x) const;
    const SdCertificate& sd() const { return sd_; }

private:
    friend LimitLaw build_limit_law(const ImmigrationMechanism&, const BranchingMechanism&, const LimitOptions&);
    LimitLaw(ImmigrationMechanism imm, BranchingMechanism bran, LimitOptions opts)
        : imm_(std::move(imm)), bran_(std::move(bran)), opts_(std::move(opts)) {}

    ImmigrationMechanism imm_;
    BranchingMechanism bran_;
    LimitOptions opts_;
    std::shared_ptr<const ScaleFunction> sf_;
    std::function<double(double)> k_;
    double gamma_ = 0.0;
    Support support_;
    AtomInfo atom_;
    std::optional<BoundaryAsymptotics> boundary_;
    SdCertificate sd_;
};

/// Throws ValidationError when no limit exists, NumericError when the
/// existence test is inconclusive.
LimitLaw build_limit_law(const ImmigrationMechanism& imm, const BranchingMechanism& bran,
                         const LimitOptions& opts = {});

AtomInfo atom_and_continuity(const LimitLaw& law);
std::optional<BoundaryAsymptotics> boundary_asymptotics(const LimitLaw& law);
SdCertificate is_self_decomposable(const LimitLaw& law);
ClassReport class_membership(const LimitLaw& law);

/// Density of the absolutely continuous part of L at each x (0 for x <= gamma),
/// by inversion of u -> e^{-(l(u) - gamma u)} - atom mass.
/// Throws ValidationError for degenerate laws.
std::vector<double> density(const LimitLaw& law, const std::vector<double>& xs);

std::string to_string(SdStatus s);
std::string to_string(AtomInfo::Kind k);

}  // namespace cbi
