#include "cbi/mechanisms.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "cbi/errors.hpp"
#include "cbi/numerics/quadrature.hpp"

namespace cbi {

using detail::require;

ImmigrationMechanism::ImmigrationMechanism(double b_, std::optional<LevyMeasure> m_) : b(b_), m(std::move(m_)) {
    require(std::isfinite(b) && b >= 0.0, "immigration: b must be finite and >= 0");
    if (m) require(m->finite_variation(), "immigration: m must integrate (xi ^ 1); tempered-stable needs a < 1");
}

BranchingMechanism::BranchingMechanism(double alpha_, double beta_, std::optional<LevyMeasure> mu_)
    : alpha(alpha_), beta(beta_), mu(std::move(mu_)) {
    require(std::isfinite(alpha) && alpha >= 0.0, "branching: alpha must be finite and >= 0");
    require(std::isfinite(beta), "branching: beta must be finite");
}

double eval_F(const ImmigrationMechanism& imm, double u) {
    require(u >= 0.0, "eval_F: u must be >= 0");
    double v = imm.b * u;
    if (imm.m) v += imm.m->laplace_increment(u);
    return v;
}

std::complex<double> eval_F(const ImmigrationMechanism& imm, std::complex<double> u) {
    std::complex<double> v = imm.b * u;
    if (imm.m) v += imm.m->laplace_increment(u);
    return v;
}

double eval_R(const BranchingMechanism& bran, double u) {
    require(u >= 0.0, "eval_R: u must be >= 0");
    double v = -bran.alpha * u * u + bran.beta * u;
    if (bran.mu) v -= bran.mu->compensated(u);
    return v;
}

std::complex<double> eval_R(const BranchingMechanism& bran, std::complex<double> u) {
    std::complex<double> v = -bran.alpha * u * u + bran.beta * u;
    if (bran.mu) v -= bran.mu->compensated(u);
    return v;
}

double F_slope_at_zero(const ImmigrationMechanism& imm) {
    double v = imm.b;
    if (imm.m) v += imm.m->first_moment(0.0, std::numeric_limits<double>::infinity());
    return v;
}

double R_slope_at_zero(const BranchingMechanism& bran) {
    double v = bran.beta;
    if (bran.mu) v += bran.mu->first_moment(1.0, std::numeric_limits<double>::infinity());
    return v;
}

bool is_zero(const ImmigrationMechanism& imm) { return imm.b == 0.0 && !imm.m; }
bool is_zero(const BranchingMechanism& bran) { return bran.alpha == 0.0 && bran.beta == 0.0 && !bran.mu; }

bool is_degenerate(const ImmigrationMechanism& imm, const BranchingMechanism& bran) {
    return is_zero(imm) || (!imm.m && !bran.mu && bran.alpha == 0.0);
}

bool has_analytic_continuation(const ImmigrationMechanism& imm) {
    return !imm.m || imm.m->has_analytic_continuation();
}
bool has_analytic_continuation(const BranchingMechanism& bran) {
    return !bran.mu || bran.mu->has_analytic_continuation();
}

namespace {

double find_root(const BranchingMechanism& bran, const ClassifyOptions& opts) {
    double lo = opts.bracket_lo;
    if (!(eval_R(bran, lo) > 0.0)) {
        throw NumericError("classify: R'(0+) > 0 but R(" + std::to_string(lo) +
                           ") <= 0; lower the root bracket");
    }
    double hi = lo;
    for (;;) {
        hi = std::min(2.0 * hi, opts.bracket_hi);
        if (eval_R(bran, hi) <= 0.0) break;
        if (hi >= opts.bracket_hi) {
            throw NumericError("classify: R'(0+) > 0 but R stays positive up to u = " +
                               std::to_string(opts.bracket_hi) + "; widen the root bracket");
        }
        lo = hi;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (eval_R(bran, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BranchingClass classify(const BranchingMechanism& bran, const ClassifyOptions& opts) {
    require(opts.bracket_lo > 0.0 && opts.bracket_hi > opts.bracket_lo, "classify: invalid root bracket");
    BranchingClass c;
    if (is_zero(bran)) {
        c.kind = BranchingClass::Kind::DegenerateZero;
        return c;
    }
    c.rho = R_slope_at_zero(bran);
    if (c.rho > 0.0) {
        c.kind = BranchingClass::Kind::Supercritical;
        c.u0 = find_root(bran, opts);
    }
    return c;
}

std::string to_string(BranchingClass::Kind kind) {
    switch (kind) {
        case BranchingClass::Kind::Supercritical:
            return "supercritical";
        case BranchingClass::Kind::DegenerateZero:
            return "degenerate-zero";
        case BranchingClass::Kind::SubcriticalOrCritical:
            return "subcritical-or-critical";
    }
    return "?";
}

std::string to_string(LimitExistence::Decision d) {
    switch (d) {
        case LimitExistence::Decision::Exists:
            return "exists";
        case LimitExistence::Decision::NotExists:
            return "does not exist";
        case LimitExistence::Decision::Inconclusive:
            return "inconclusive";
    }
    return "?";
}

double log_moment(const LevyMeasure& measure) { return measure.log_moment(); }

namespace {

LimitExistence critical_test(const ImmigrationMechanism& imm, const BranchingMechanism& bran,
                             const ExistenceOptions& opts) {
    using D = LimitExistence::Decision;
    auto g = [&](double s) { return -eval_F(imm, s) / eval_R(bran, s); };
    const quad::Options qopts{.rel_tol = 1e-12, .abs_tol = 0.0};
    double partial = quad::gauss_kronrod(g, std::ldexp(opts.upper, -opts.first_dyad), opts.upper, qopts).value;
    std::vector<double> increments;
    for (int k = opts.first_dyad; k < opts.last_dyad; ++k) {
        const double hi = std::ldexp(opts.upper, -k);
        const double inc = quad::gauss_kronrod(g, 0.5 * hi, hi, qopts).value;
        if (!std::isfinite(inc)) return {D::NotExists, "critical: -F/R not integrable near 0"};
        partial += inc;
        increments.push_back(inc);
    }
    std::ostringstream os;
    os.precision(6);
    const double last = increments.back();
    if (std::abs(last) <= opts.rel_tol * std::abs(partial)) {
        os << "critical (rho = 0): int_0 -F/R converges, partial value " << partial;
        return {D::Exists, os.str()};
    }
    // Increments that do not decay at all over the last 8 dyads mean the
    // integral grows at least logarithmically.
    const std::size_t n = increments.size();
    bool flat = n > 8;
    for (std::size_t i = n - 8; flat && i < n; ++i) flat = increments[i] >= 0.99 * increments[i - 1];
    if (flat) {
        os << "critical (rho = 0): dyadic increments of int -F/R do not decay (last " << last
           << "); integral diverges";
        return {D::NotExists, os.str()};
    }
    os << "critical (rho = 0): int_0 -F/R not resolved at tolerance " << opts.rel_tol << " (last dyad "
       << last << ", partial " << partial << ")";
    return {D::Inconclusive, os.str()};
}

}  // namespace

LimitExistence limit_exists(const ImmigrationMechanism& imm, const BranchingMechanism& bran,
                            const ExistenceOptions& opts) {
    using D = LimitExistence::Decision;
    const BranchingClass cls = classify(bran, opts.classify);
    std::ostringstream os;
    os.precision(6);
    switch (cls.kind) {
        case BranchingClass::Kind::DegenerateZero:
            return {D::NotExists, "R is identically zero"};
        case BranchingClass::Kind::Supercritical:
            os << "supercritical, rho=" << cls.rho << ", u0=" << cls.u0;
            return {D::NotExists, os.str()};
        case BranchingClass::Kind::SubcriticalOrCritical:
            break;
    }
    if (is_zero(imm)) return {D::Exists, "no immigration; limit is the point mass at 0"};
    if (cls.rho < 0.0) {
        const double lm = imm.m ? imm.m->log_moment() : 0.0;
        os << "subcritical, rho=" << cls.rho << ", log-moment=" << lm;
        return {std::isfinite(lm) ? D::Exists : D::NotExists, os.str()};
    }
    return critical_test(imm, bran, opts);
}

}  // namespace cbi
