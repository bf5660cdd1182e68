#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cbi/errors.hpp"
#include "cbi/mechanisms.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace cbi;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
using Decision = LimitExistence::Decision;
}  // namespace

TEST(Mechanisms, EvalFExamples) {
    const ImmigrationMechanism imm(0.0, LevyMeasure::exponential(1.0, 1.0));
    const double ref = double(oracle::integrate_to_inf([](long double x) { return -std::expm1(-x) * std::exp(-x); }, 0));
    EXPECT_NEAR(eval_F(imm, 1.0), 0.5, 1e-14);
    EXPECT_NEAR(eval_F(imm, 1.0), ref, 1e-14);
    EXPECT_DOUBLE_EQ(eval_F(ImmigrationMechanism(3.0), 2.0), 6.0);
    EXPECT_EQ(eval_F(imm, 0.0), 0.0);
}

TEST(Mechanisms, EvalRExamples) {
    EXPECT_DOUBLE_EQ(eval_R(BranchingMechanism(0.5, -1.0), 2.0), -4.0);
    for (double u : {0.0, 0.3, 5.0}) EXPECT_DOUBLE_EQ(eval_R(BranchingMechanism(0.0, -2.5), u), -2.5 * u);
    EXPECT_EQ(eval_R(BranchingMechanism(0.3, -1.0, LevyMeasure::tempered_stable(1.0, 1.5, 1.0)), 0.0), 0.0);
}

TEST(Mechanisms, ComplexOverloadsAgreeOnRealAxis) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 12; ++i) {
        const auto imm = testing_support::random_immigration(rng, i % 4);
        const auto bran = testing_support::random_subcritical(rng, i % 4, i % 2 == 0);
        for (double u : {0.2, 1.0, 4.0}) {
            EXPECT_NEAR(std::real(eval_F(imm, std::complex<double>(u, 0.0))), eval_F(imm, u), 1e-10);
            EXPECT_NEAR(std::real(eval_R(bran, std::complex<double>(u, 0.0))), eval_R(bran, u),
                        1e-10 * (1.0 + std::abs(eval_R(bran, u))));
        }
    }
}

TEST(Mechanisms, SlopesAtZero) {
    const BranchingMechanism bran(0.0, -1.0, LevyMeasure::atoms({2.0, 1.0}, {0.5, 3.0}));
    EXPECT_DOUBLE_EQ(R_slope_at_zero(bran), 2.0);
    const ImmigrationMechanism imm(0.5, LevyMeasure::exponential(2.0, 4.0));
    EXPECT_NEAR(F_slope_at_zero(imm), 0.5 + 2.0 / 16.0, 1e-15);
    const auto heavy = LevyMeasure::tabulated({1.0, 2.0}, {1.0, 0.5}, TailExtrapolation::Power, 0.5);
    EXPECT_TRUE(std::isinf(F_slope_at_zero(ImmigrationMechanism(0.0, heavy))));
}

TEST(Mechanisms, ClassifyExamples) {
    const auto sub = classify(BranchingMechanism(0.0, -1.0));
    EXPECT_EQ(sub.kind, BranchingClass::Kind::SubcriticalOrCritical);
    EXPECT_DOUBLE_EQ(sub.rho, -1.0);
    const auto sup = classify(BranchingMechanism(1.0, 2.0));
    EXPECT_EQ(sup.kind, BranchingClass::Kind::Supercritical);
    EXPECT_NEAR(sup.u0, 2.0, 1e-10);
    EXPECT_EQ(classify(BranchingMechanism(0.0, 0.0)).kind, BranchingClass::Kind::DegenerateZero);
}

TEST(Mechanisms, ClassifyMissingBracketIsNumericError) {
    // R(u) = u - 1e-9 u^2 changes sign at u = 1e9, beyond the bracket
    EXPECT_THROW(classify(BranchingMechanism(1e-9, 1.0)), NumericError);
    ClassifyOptions wide;
    wide.bracket_hi = 1e12;
    EXPECT_NEAR(classify(BranchingMechanism(1e-9, 1.0), wide).u0, 1e9, 1e-1);
}

TEST(Mechanisms, ClassifyFollowsSignOfRhoOnRandomMechanisms) {
    std::mt19937_64 rng(90);
    std::uniform_real_distribution<double> beta(-3.0, 3.0), alpha(0.05, 1.0);
    for (int i = 0; i < 100; ++i) {
        std::optional<LevyMeasure> mu;
        if (i % 5 != 0) mu = testing_support::random_measure(rng, i % 4, false);
        if (mu && i % 3 == 0) mu = mu->scaled(0.1 + alpha(rng) * 5.0);
        const BranchingMechanism bran(i % 2 ? alpha(rng) : 0.0, beta(rng), mu);
        const double rho = R_slope_at_zero(bran);
        const bool bv = bran.alpha == 0.0 && (!mu || mu->finite_variation());
        if (rho > 0.0 && bv && bran.beta >= (mu ? mu->first_moment(0.0, 1.0) : 0.0)) {
            // R(u) = (beta - int_(0,1] xi mu) u + int (1 - e^{-u xi}) mu > 0: no root to find
            EXPECT_THROW(classify(bran), NumericError);
            continue;
        }
        const auto cls = classify(bran);
        if (rho > 0.0) {
            EXPECT_EQ(cls.kind, BranchingClass::Kind::Supercritical);
            EXPECT_NEAR(eval_R(bran, cls.u0), 0.0, 1e-8 * (1.0 + cls.u0));
        } else {
            EXPECT_EQ(cls.kind, BranchingClass::Kind::SubcriticalOrCritical);
            EXPECT_DOUBLE_EQ(cls.rho, rho);
        }
    }
}

TEST(Mechanisms, LogMomentExamples) {
    EXPECT_DOUBLE_EQ(log_moment(LevyMeasure::atoms({1.0}, {std::exp(1.0)})), 1.0);
    EXPECT_NEAR(log_moment(LevyMeasure::exponential(1.0, 1.0)), 0.2193839, 1e-7);
    EXPECT_DOUBLE_EQ(log_moment(LevyMeasure::atoms({2.0}, {0.5})), 0.0);
}

TEST(Mechanisms, LimitExistsExamples) {
    const BranchingMechanism sub(0.5, -1.0);
    EXPECT_EQ(limit_exists(ImmigrationMechanism(0.0, LevyMeasure::exponential(1.0, 1.0)), sub).decision,
              Decision::Exists);
    // tail 1 / log x beyond x = 3: density 1 / (x log^2 x), infinite log-moment
    const auto heavy = LevyMeasure::tabulated({1.5, 3.0}, {1.0, 1.0 / std::log(3.0)}, TailExtrapolation::LogPower, 1.0);
    EXPECT_TRUE(std::isinf(log_moment(heavy)));
    EXPECT_EQ(limit_exists(ImmigrationMechanism(0.0, heavy), sub).decision, Decision::NotExists);
    EXPECT_EQ(limit_exists(ImmigrationMechanism(1.0), BranchingMechanism(1.0, 2.0)).decision, Decision::NotExists);
    EXPECT_EQ(limit_exists(ImmigrationMechanism(1.0), BranchingMechanism(0.0, 0.0)).decision, Decision::NotExists);
    EXPECT_EQ(limit_exists(ImmigrationMechanism(), sub).decision, Decision::Exists);
}

TEST(Mechanisms, CriticalExistence) {
    // untempered stable branching with a = 1.2 and rho = 0: R(u) ~ -u^1.2
    const auto mu = LevyMeasure::tempered_stable(1.0, 1.2, 0.0);
    const BranchingMechanism crit(0.0, -mu.first_moment(1.0, kInf), mu);
    ASSERT_EQ(R_slope_at_zero(crit), 0.0);
    // F ~ u: -F/R ~ u^{-0.2}, integrable
    EXPECT_EQ(limit_exists(ImmigrationMechanism(1.0), crit).decision, Decision::Exists);
    // Feller critical: -F/R = b / (alpha u), logarithmic divergence
    EXPECT_EQ(limit_exists(ImmigrationMechanism(1.0), BranchingMechanism(0.5, 0.0)).decision, Decision::NotExists);
}

TEST(Mechanisms, LogMomentTestAgreesWithDirectIntegration) {
    // for rho < 0, int_0 -F/R ds is finite exactly when int_{xi > 1} log xi m(dxi) is
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        std::optional<LevyMeasure> m;
        switch (i % 4) {
            case 0:
                m = testing_support::random_measure(rng, int(rng() % 4), true);
                break;
            case 1:
                m = LevyMeasure::tabulated({0.5, 2.0}, {1.0, 0.2 + 0.7 * unif(rng)}, TailExtrapolation::Power,
                                           0.2 + 1.5 * unif(rng));
                break;
            default:
                m = LevyMeasure::tabulated({0.5, 2.0}, {1.0, 0.2 + 0.7 * unif(rng)}, TailExtrapolation::LogPower,
                                           i % 4 == 2 ? 0.5 + 0.5 * unif(rng) : 2.5 + unif(rng));
        }
        const ImmigrationMechanism imm(0.0, m);
        const auto bran = testing_support::random_subcritical(rng, int(i % 5) - 1, i % 2 == 0);
        // dyadic pieces of int_0^1 -F/R; a divergent integral keeps a
        // non-negligible share of its total in the far dyads
        long double total = 0, far = 0;
        for (int k = 0; k < 200; ++k) {
            const long double hi = std::ldexp(1.0L, -k);
            const long double piece = oracle::integrate(
                [&](long double s) { return -eval_F(imm, double(s)) / eval_R(bran, double(s)); }, hi / 2, hi, 2);
            total += piece;
            if (k >= 100) far += piece;
        }
        const bool direct_finite = far < 0.05L * total;
        const auto decision = limit_exists(imm, bran).decision;
        EXPECT_EQ(decision == Decision::Exists, direct_finite)
            << testing_support::describe(imm, bran) << " far/total=" << double(far / total);
    }
}
