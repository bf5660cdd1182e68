#include "cbi/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>

#include "cbi/errors.hpp"
#include "cbi/numerics/parallel.hpp"
#include "cbi/numerics/quadrature.hpp"
#include "cbi/numerics/special_functions.hpp"

namespace cbi {

namespace {

// Integrands built on k carry the inner quadrature error (~1e-11 relative),
// so outer rules use a looser tolerance and a shallow recursion.
constexpr quad::Options kOuter{.rel_tol = 1e-9, .abs_tol = 1e-300, .max_depth = 10};
// A tabulated W is C1 with ~1e-5 relative noise; tighter tolerances only
// chase the interpolation kinks.
constexpr quad::Options kOuterNumeric{.rel_tol = 1e-7, .abs_tol = 1e-300, .max_depth = 8};
constexpr double kNumericKTol = 1e-9;

bool numeric_scale(const ScaleFunction& sf) { return sf.is_numeric(); }

quad::Options outer_opts(const LimitLaw& law) { return numeric_scale(law.scale()) ? kOuterNumeric : kOuter; }

double k_tolerance(const ScaleFunction& sf, double requested) {
    return numeric_scale(sf) ? std::max(requested, kNumericKTol) : requested;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
using cplx = std::complex<double>;
using detail::require;

double k_value(const ImmigrationMechanism& imm, const ScaleFunction& sf, double x, double rel_tol) {
    require(x > 0.0, "k: x must be > 0");
    double v = imm.b > 0.0 ? imm.b * sf.derivative(x) : 0.0;
    if (imm.m) {
        const double wx = sf(x);
        v += wx * imm.m->tail(x);
        // W(x) - W(x - xi) by the midpoint slope for small xi, where rounding in
        // the difference would be amplified by a singular density
        auto increment = [&](double xi) {
            if (xi < 1e-4 * x) return xi * sf.derivative(x - 0.5 * xi);
            return std::max(0.0, wx - sf(x - xi));
        };
        v += imm.m->integrate(increment, 0.0, x, rel_tol);
    }
    return v;
}

// nu(1, inf) = int_1^inf k(x)/x dx without evaluating k beyond the grid:
// l(U) - gamma U = int_0^inf (1 - e^{-Ux}) k(x)/x dx, so
// int_1^inf k/x = l(U) - gamma U - int_0^1 (1 - e^{-Ux}) k/x + int_1^inf e^{-Ux} k/x,
// and with U = 40/xmax the last integral is cut at xmax with error ~ e^{-40}.
double nu_above_one(const LimitLaw& law) {
    const double xmax = std::max(law.options().scale.xmax, 2.0);
    const double U = 40.0 / xmax;
    const double head = law.l(U) - law.gamma() * U;
    const double near = quad::gauss_kronrod([&](double x) { return -std::expm1(-U * x) * law.k(x) / x; }, 0.0, 1.0,
                                            outer_opts(law))
                            .value;
    const double far =
        quad::gauss_kronrod([&](double x) { return std::exp(-U * x) * law.k(x) / x; }, 1.0, xmax, outer_opts(law)).value;
    return head - near + far;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(8);
    os << v;
    return os.str();
}

}  // namespace

double laplace_exponent(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double u, double rel_tol) {
    require(u >= 0.0, "laplace_exponent: u must be >= 0");
    if (u == 0.0 || is_zero(imm)) return 0.0;
    auto g = [&](double s) { return -eval_F(imm, s) / eval_R(bran, s); };
    try {
        return quad::graded_to_zero(g, u, {.rel_tol = rel_tol, .abs_tol = 1e-300}).value;
    } catch (const NumericError& e) {
        throw NumericError(std::string("laplace_exponent: ") + e.what() +
                           " (inconsistent with the existence decision)");
    }
}

Triplet triplet(const ImmigrationMechanism& imm, const BranchingMechanism& bran, const ScaleFunction& sf,
                double rel_tol) {
    (void)bran;
    Triplet t;
    t.gamma = imm.b * sf.w0();
    auto sfp = std::make_shared<const ScaleFunction>(sf);
    t.k = [imm, sfp, rel_tol](double x) { return k_value(imm, *sfp, x, rel_tol); };
    return t;
}

double k_via_excursions(const ImmigrationMechanism& imm, const ScaleFunction& sf, double x, double rel_tol) {
    require(x > 0.0, "k_via_excursions: x must be > 0");
    const double wx = sf(x);
    // W(x) b n(x) with n = W'/W
    double v = imm.b > 0.0 ? wx * imm.b * excursion_height_intensity(sf, x) : 0.0;
    if (!imm.m) return v;

    const quad::Options inner_opts{.rel_tol = rel_tol, .abs_tol = 1e-300, .max_depth = 12};
    auto n = [&](double z) { return sf.derivative(z) / sf(z); };
    // int_lo^hi n over a stretch where n is smooth
    auto smooth_part = [&](double lo, double hi) -> double {
        if (lo >= hi) return 0.0;
        if (lo > 0.5 * hi) return quad::gauss_kronrod(n, lo, hi, inner_opts).value;
        // log variable near 0, where n may grow like 1/z
        return quad::gauss_kronrod(
                   [&](double w) {
                       const double z = std::exp(w);
                       return n(z) * z;
                   },
                   std::log(lo), std::log(hi), inner_opts)
            .value;
    };
    // A tabulated W' has kinks at the nodes: integrate node to node, with the
    // node-to-node integrals up to x accumulated once.
    std::span<const double> nodes;
    std::vector<double> cum;
    if (const auto* ip = sf.interpolant(); ip && x <= ip->back_x()) {
        nodes = ip->nodes();
        nodes = nodes.first(std::size_t(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin()));
        cum.assign(nodes.size(), 0.0);
        for (std::size_t i = 1; i < nodes.size(); ++i) cum[i] = cum[i - 1] + smooth_part(nodes[i - 1], nodes[i]);
    }
    // int_y^x n(z) dz
    auto height_integral = [&](double y) -> double {
        if (y >= x) return 0.0;
        if (y <= 0.0) {
            if (sf.w0() == 0.0) return kInf;
            if (nodes.empty()) return quad::tanh_sinh(n, 0.0, x, inner_opts).value;
            return quad::tanh_sinh(n, 0.0, nodes.front(), inner_opts).value + cum.back() +
                   smooth_part(nodes.back(), x);
        }
        if (nodes.empty() || y >= nodes.back()) return smooth_part(y, x);
        const std::size_t j = std::size_t(std::upper_bound(nodes.begin(), nodes.end(), y) - nodes.begin());
        if (j == 0) return smooth_part(y, nodes.front()) + cum.back() + smooth_part(nodes.back(), x);
        return smooth_part(y, nodes[j]) + (cum.back() - cum[j]) + smooth_part(nodes.back(), x);
    };
    const double survive = imm.m->integrate(
        [&](double xi) {
            const double h = height_integral(x - xi);
            return std::isinf(h) ? 1.0 : -std::expm1(-h);
        },
        0.0, x, rel_tol);
    return v + wx * (imm.m->tail(x) + survive);
}

Support support(const ImmigrationMechanism& imm, const BranchingMechanism& bran) {
    if (is_zero(imm)) return {Support::Kind::Point, 0.0};
    if (!imm.m && !bran.mu && bran.alpha == 0.0) {
        require(bran.beta < 0.0, "support: degenerate mechanism needs beta < 0");
        return {Support::Kind::Point, -imm.b / bran.beta};
    }
    const double lambda0 = effective_drift(bran);
    return {Support::Kind::HalfLine, imm.b == 0.0 ? 0.0 : imm.b / lambda0};
}

double LimitLaw::k(double x) const { return k_(x); }

double LimitLaw::k_excursion(double x) const { return k_via_excursions(imm_, *sf_, x, k_tolerance(*sf_, 1e-10)); }

double LimitLaw::l(double u) const { return laplace_exponent(imm_, bran_, u); }

double LimitLaw::K(double x) const {
    require(boundary_.has_value(), "K: boundary asymptotics not available for this law");
    require(x > 0.0, "K: x must be > 0");
    const double c = boundary_->c;
    const double lx = std::log(x);
    if (lx == 0.0) return 1.0;
    const double v = quad::gauss_kronrod([&](double w) { return c - k_(std::exp(w)); }, std::min(lx, 0.0),
                                         std::max(lx, 0.0), outer_opts(*this))
                         .value;
    return std::exp(lx < 0.0 ? v : -v);
}

LimitLaw build_limit_law(const ImmigrationMechanism& imm, const BranchingMechanism& bran, const LimitOptions& opts) {
    const LimitExistence ex = limit_exists(imm, bran, opts.existence);
    if (ex.decision == LimitExistence::Decision::NotExists)
        throw ValidationError("no limit distribution: " + ex.reason);
    if (ex.decision == LimitExistence::Decision::Inconclusive)
        throw NumericError("limit existence undecided: " + ex.reason);

    LimitLaw law(imm, bran, opts);
    law.sf_ = std::make_shared<const ScaleFunction>(build_scale(bran, opts.scale));
    Triplet t = triplet(imm, bran, *law.sf_, k_tolerance(*law.sf_, opts.quad_rel_tol));
    law.gamma_ = t.gamma;
    law.k_ = std::move(t.k);
    law.support_ = support(imm, bran);
    law.atom_ = atom_and_continuity(law);
    law.boundary_ = boundary_asymptotics(law);
    law.sd_ = is_self_decomposable(law);
    return law;
}

AtomInfo atom_and_continuity(const LimitLaw& law) {
    AtomInfo a;
    a.location = law.support().left;
    if (law.degenerate()) {
        a.kind = AtomInfo::Kind::AtomAt;
        a.mass = 1.0;
        a.total_nu = 0.0;
        a.note = "degenerate law (k = 0): point mass";
        return a;
    }
    const auto& opts = law.options();
    auto integrand = [&](double x) { return law.k(x) / x; };

    double prev = 0.0, sum = 0.0, last_ratio = 0.0;
    int conv_run = 0, div_run = 0;
    bool divergent = false, converged = false;
    for (int j = 0; j < opts.atom_max_dyads; ++j) {
        const double hi = std::ldexp(1.0, -j);
        quad::Options po = outer_opts(law);
        po.abs_tol = 1e-12 * sum;
        const double piece = quad::gauss_kronrod(integrand, 0.5 * hi, hi, po).value;
        sum += piece;
        a.dyads = j + 1;
        if (j > 0) {
            const double r = prev > 0.0 ? piece / prev : (piece > 0.0 ? kInf : 0.0);
            last_ratio = r;
            conv_run = r <= 0.9 ? conv_run + 1 : 0;
            div_run = r >= 0.99 ? div_run + 1 : 0;
        }
        prev = piece;
        if (div_run >= opts.atom_run) {
            divergent = true;
            break;
        }
        if (conv_run >= opts.atom_run && piece <= 1e-6 * sum) break;
    }
    if (!divergent && conv_run >= opts.atom_run) {
        // geometric remainder of the dyadic series
        sum += prev * last_ratio / (1.0 - last_ratio);
        converged = true;
    }
    a.integral_0_1 = sum;
    if (divergent) {
        a.kind = AtomInfo::Kind::AbsolutelyContinuous;
        a.total_nu = kInf;
        a.mass = 0.0;
        a.note = "int_0^1 k(x)/x dx diverges (dyadic pieces do not decay)";
        return a;
    }
    if (!converged) {
        a.kind = AtomInfo::Kind::Undetermined;
        a.total_nu = kInf;
        a.note = "int_0^1 k(x)/x dx: dyadic pieces neither decay geometrically nor stay flat after " +
                 std::to_string(a.dyads) + " dyads (partial sum " + fmt(sum) + ")";
        return a;
    }
    const double tail = nu_above_one(law);
    a.kind = AtomInfo::Kind::AtomAt;
    a.total_nu = sum + tail;
    a.mass = std::exp(-a.total_nu);
    a.note = "compound Poisson: nu(0,inf) = " + fmt(a.total_nu);
    return a;
}

std::optional<BoundaryAsymptotics> boundary_asymptotics(const LimitLaw& law) {
    if (law.degenerate()) return std::nullopt;
    const auto& opts = law.options();
    const int n = std::max(2, opts.richardson_nodes);
    const double x_min = opts.k_min_ratio * opts.scale.xmax;
    std::vector<double> h(n), kv(n);
    for (int i = 0; i < n; ++i) {
        h[i] = std::ldexp(x_min, i);
        kv[i] = law.k(h[i]);
    }
    if (!(kv[0] > 0.0) || !(kv[n - 1] > 0.0)) return std::nullopt;
    // k blowing up as x -> 0: no finite limit
    const double slope = std::log(kv[n - 1] / kv[0]) / std::log(h[n - 1] / h[0]);
    if (slope < -0.01) return std::nullopt;

    // Neville extrapolation of the interpolating polynomial to x = 0.
    std::vector<double> p = kv;
    for (int m = 1; m < n; ++m) {
        for (int i = 0; i + m < n; ++i) p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
    }
    const double c = p[0];
    if (!std::isfinite(c) || !(c > 1e-3 * kv[n - 1])) return std::nullopt;

    const double e1 = special::expint_e1(1.0);
    const double ein1 = std::numbers::egamma + e1;
    const double tail = nu_above_one(law);
    return BoundaryAsymptotics{c, std::exp(-c * ein1 + c * e1 - tail)};
}

SdCertificate is_self_decomposable(const LimitLaw& law) {
    using S = SdStatus;
    const auto& imm = law.immigration();
    const auto& bran = law.branching();
    if (law.degenerate()) return {S::SelfDecomposable, "degenerate law: point mass", std::nullopt};
    if (!bran.mu && bran.alpha == 0.0)
        return {S::SelfDecomposable, "sufficient condition (a): no branching jumps, no diffusion", std::nullopt};
    if (!bran.mu && !imm.m)
        return {S::SelfDecomposable, "sufficient condition (b): no branching jumps, no immigration jumps",
                std::nullopt};

    const auto& opts = law.options();
    const std::size_t n = std::max<std::size_t>(opts.sd_grid, 2);
    const double lo = opts.sd_lo_ratio * opts.scale.xmax, hi = opts.sd_hi_ratio * opts.scale.xmax;
    std::vector<double> xs(n), ks(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    parallel::for_each_index(n, [&](std::size_t i) { ks[i] = law.k(xs[i]); });

    const double scale = *std::max_element(ks.begin(), ks.end());
    const bool numeric = numeric_scale(law.scale());
    const double tol = (numeric ? 1e-4 : 1e-9) * std::max(scale, 1e-300);
    std::size_t imin = 0;
    double best = 0.0;
    std::optional<std::pair<double, double>> witness;
    std::pair<double, double> witness_k;
    for (std::size_t j = 1; j < n; ++j) {
        const double rise = ks[j] - ks[imin];
        if (rise > tol && rise > best) {
            best = rise;
            witness = std::make_pair(xs[imin], xs[j]);
            witness_k = {ks[imin], ks[j]};
        }
        if (ks[j] < ks[imin]) imin = j;
    }
    if (witness) {
        return {S::NotSelfDecomposable,
                "k is not nonincreasing: k(" + fmt(witness->first) + ") = " + fmt(witness_k.first) + " < k(" +
                    fmt(witness->second) + ") = " + fmt(witness_k.second),
                witness};
    }
    if (!imm.m) {
        return {S::SelfDecomposable,
                "sufficient condition (c): no immigration jumps and W concave on the test grid [" + fmt(lo) + ", " +
                    fmt(hi) + "]",
                std::nullopt};
    }
    const AtomInfo& atom = law.atom();
    if (atom.kind == AtomInfo::Kind::AtomAt && atom.total_nu > 0.0) {
        return {S::NotSelfDecomposable,
                "law has an atom of mass " + fmt(atom.mass) +
                    " but is not degenerate; nondegenerate SD+ laws are absolutely continuous",
                std::nullopt};
    }
    return {S::Undetermined, "k nonincreasing on the test grid, no sufficient condition applies", std::nullopt};
}

ClassReport class_membership(const LimitLaw& law) {
    ClassReport r;
    r.sd = law.sd();
    r.atom = law.atom();
    r.point_mass = law.degenerate();
    switch (r.sd.status) {
        case SdStatus::SelfDecomposable:
            r.placement = "SD+";
            break;
        case SdStatus::NotSelfDecomposable:
            r.placement = "CLIM \\ SD+";
            break;
        case SdStatus::Undetermined:
            r.placement = "CLIM (SD+ undetermined)";
            break;
    }
    return r;
}

std::vector<double> density(const LimitLaw& law, const std::vector<double>& xs) {
    require(!law.degenerate(), "density: degenerate law has no density");
    const AtomInfo& atom = law.atom();
    if (atom.kind == AtomInfo::Kind::Undetermined)
        throw NumericError("density: atom at the left end could not be determined: " + atom.note);
    const double mass = atom.kind == AtomInfo::Kind::AtomAt ? atom.mass : 0.0;
    const double gamma = law.gamma();
    const auto& imm = law.immigration();
    const auto& bran = law.branching();

    auto F = [&](double u) { return std::exp(-(law.l(u) - gamma * u)) - mass; };
    std::optional<inversion::ComplexTransform> Fc;
    if (has_analytic_continuation(imm) && has_analytic_continuation(bran)) {
        // l(z) = -z int_0^1 F(zs)/R(zs) ds along the segment [0, z]
        Fc = [&imm, &bran, gamma, mass](cplx z) {
            auto g = [&](double s) { return -eval_F(imm, z * s) / eval_R(bran, z * s); };
            const quad::Options o{.rel_tol = 1e-11, .abs_tol = 1e-300};
            const double re = quad::gauss_kronrod([&](double s) { return std::real(g(s)); }, 0.0, 1.0, o).value;
            const double im = quad::gauss_kronrod([&](double s) { return std::imag(g(s)); }, 0.0, 1.0, o).value;
            const cplx l = z * cplx(re, im);
            return std::exp(-(l - gamma * z)) - mass;
        };
    }
    std::vector<double> out(xs.size(), 0.0);
    parallel::for_each_index(xs.size(), [&](std::size_t i) {
        const double t = xs[i] - gamma;
        if (t <= 0.0) return;
        out[i] = inversion::invert(F, Fc, t, law.options().density_inversion, 1e-8).value;
    });
    return out;
}

std::string to_string(SdStatus s) {
    switch (s) {
        case SdStatus::SelfDecomposable:
            return "self-decomposable";
        case SdStatus::NotSelfDecomposable:
            return "not self-decomposable";
        case SdStatus::Undetermined:
            return "undetermined";
    }
    return "?";
}

std::string to_string(AtomInfo::Kind k) {
    switch (k) {
        case AtomInfo::Kind::AbsolutelyContinuous:
            return "absolutely continuous";
        case AtomInfo::Kind::AtomAt:
            return "atom";
        case AtomInfo::Kind::Undetermined:
            return "undetermined";
    }
    return "?";
}

}  // namespace cbi
