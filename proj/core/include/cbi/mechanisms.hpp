#pragma once

#include <complex>
#include <optional>
#include <string>

#include "cbi/levy_measure.hpp"

namespace cbi {

/// Immigration mechanism (b, m): F(u) = b u + int (1 - e^{-u xi}) m(dxi).
/// m must integrate (xi ^ 1), which excludes tempered-stable a >= 1.
struct ImmigrationMechanism {
    ImmigrationMechanism(double b = 0.0, std::optional<LevyMeasure> m = std::nullopt);

    double b;
    std::optional<LevyMeasure> m;
};

/// Branching mechanism (alpha, beta, mu):
/// R(u) = -alpha u^2 + beta u - int (e^{-u xi} - 1 + u xi 1{xi <= 1}) mu(dxi).
struct BranchingMechanism {
    BranchingMechanism(double alpha = 0.0, double beta = 0.0, std::optional<LevyMeasure> mu = std::nullopt);

    double alpha;
    double beta;
    std::optional<LevyMeasure> mu;
};

double eval_F(const ImmigrationMechanism& imm, double u);
std::complex<double> eval_F(const ImmigrationMechanism& imm, std::complex<double> u);
double eval_R(const BranchingMechanism& bran, double u);
std::complex<double> eval_R(const BranchingMechanism& bran, std::complex<double> u);

/// F'(0+) = b + int xi m(dxi), possibly +inf.
double F_slope_at_zero(const ImmigrationMechanism& imm);
/// rho = R'(0+) = beta + int_{xi > 1} xi mu(dxi), possibly +inf.
double R_slope_at_zero(const BranchingMechanism& bran);

bool is_zero(const ImmigrationMechanism& imm);
bool is_zero(const BranchingMechanism& bran);
/// The limit is a point mass: F = 0, or F(u) = bu with R(u) = beta u.
bool is_degenerate(const ImmigrationMechanism& imm, const BranchingMechanism& bran);
/// True when the complex overloads of F and R are analytic continuations.
bool has_analytic_continuation(const ImmigrationMechanism& imm);
bool has_analytic_continuation(const BranchingMechanism& bran);

struct BranchingClass {
    enum class Kind { Supercritical, DegenerateZero, SubcriticalOrCritical };
    Kind kind = Kind::SubcriticalOrCritical;
    double u0 = 0.0;   ///< positive root of R, supercritical only
    double rho = 0.0;  ///< R'(0+)
};

struct ClassifyOptions {
    double bracket_lo = 1e-12;
    double bracket_hi = 1e6;
};

/// Throws NumericError when R'(0+) > 0 but R has no sign change in the bracket.
BranchingClass classify(const BranchingMechanism& bran, const ClassifyOptions& opts = {});

std::string to_string(BranchingClass::Kind kind);

struct LimitExistence {
    enum class Decision { Exists, NotExists, Inconclusive };
    Decision decision = Decision::Inconclusive;
    std::string reason;
};

struct ExistenceOptions {
    ClassifyOptions classify;
    /// Critical case: dyadic partial integrals of -F/R over [2^-k, upper].
    int first_dyad = 10;
    int last_dyad = 40;
    double upper = 1.0;
    double rel_tol = 1e-8;
};

LimitExistence limit_exists(const ImmigrationMechanism& imm, const BranchingMechanism& bran,
                            const ExistenceOptions& opts = {});

std::string to_string(LimitExistence::Decision d);

/// int_{xi > 1} log xi measure(dxi), +inf when divergent.
double log_moment(const LevyMeasure& measure);

}  // namespace cbi
