#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cbi/limit_law.hpp"
#include "cbi/riccati.hpp"
#include "instances.hpp"

using namespace cbi;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// psi for R(u) = -alpha u^2 - lambda u
double feller_psi(double alpha, double lambda, double t, double u) {
    const double e = std::exp(-lambda * t);
    return u * e / (1.0 + alpha * u / lambda * (1.0 - e));
}
double feller_phi(double b, double alpha, double lambda, double t, double u) {
    return b / alpha * std::log1p(alpha * u / lambda * -std::expm1(-lambda * t));
}
}  // namespace

TEST(Riccati, LinearBranchingExamples) {
    const BranchingMechanism bran(0.0, -1.0);
    EXPECT_NEAR(solve_psi(bran, 2.0, 3.0), 3.0 * std::exp(-2.0), 1e-9);
    EXPECT_EQ(solve_psi(bran, 0.0, 5.0), 5.0);
    EXPECT_NEAR(solve_phi(ImmigrationMechanism(1.0), bran, kInf, 1.0), 1.0, 1e-9);
    EXPECT_EQ(solve_phi(ImmigrationMechanism(), BranchingMechanism(0.5, -1.0), 3.0, 2.0), 0.0);
    EXPECT_EQ(solve_phi(ImmigrationMechanism(1.0), bran, 0.0, 2.0), 0.0);
}

TEST(Riccati, FellerClosedForm) {
    const BranchingMechanism bran(0.5, -1.0);
    EXPECT_NEAR(solve_psi(bran, 1.0, 1.0), feller_psi(0.5, 1.0, 1.0, 1.0), 1e-9);
    EXPECT_NEAR(solve_psi(bran, 1.0, 1.0), 0.2795, 1e-4);
    for (double t : {0.1, 1.0, 7.0})
        for (double u : {0.5, 3.0, 40.0}) {
            const auto sol = solve_riccati(ImmigrationMechanism(1.3), bran, t, u);
            EXPECT_NEAR(sol.psi, feller_psi(0.5, 1.0, t, u), 1e-8 * (1.0 + u));
            EXPECT_NEAR(sol.phi, feller_phi(1.3, 0.5, 1.0, t, u), 1e-8);
        }
}

TEST(Riccati, RandomLinearCases) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> ut(0.0, 5.0), uu(0.0, 10.0), ul(0.1, 3.0);
    for (int i = 0; i < 20; ++i) {
        const double t = ut(rng), u = uu(rng), lambda = ul(rng), b = ul(rng);
        const auto sol = solve_riccati(ImmigrationMechanism(b), BranchingMechanism(0.0, -lambda), t, u);
        EXPECT_NEAR(sol.psi, u * std::exp(-lambda * t), 1e-8);
        EXPECT_NEAR(sol.phi, b * u * -std::expm1(-lambda * t) / lambda, 1e-8);
        EXPECT_GT(sol.diagnostics.accepted_steps, 0);
    }
}

TEST(Riccati, TransientLaplaceExamples) {
    const ImmigrationMechanism imm(1.0);
    const BranchingMechanism bran(0.0, -1.0);
    EXPECT_EQ(transient_laplace(imm, bran, 2.0, 3.0, 0.0), 1.0);
    EXPECT_NEAR(transient_laplace(imm, bran, 0.0, 1.0, 1.0), 0.5314636, 1e-7);
    const ImmigrationMechanism ts(0.4, LevyMeasure::tempered_stable(0.5, 0.6, 1.0));
    const BranchingMechanism feller(0.5, -1.0);
    for (double u : {0.5, 2.0})
        EXPECT_NEAR(transient_laplace(ts, feller, 1.5, 60.0, u), std::exp(-laplace_exponent(ts, feller, u)), 1e-8);
}

TEST(Riccati, FlowProperty) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> ut(0.0, 3.0), uu(0.0, 8.0);
    for (int i = 0; i < 40; ++i) {
        const auto bran = testing_support::random_subcritical(rng, int(i % 5) - 1, i % 2 == 0);
        const double t = ut(rng), s = ut(rng), u = uu(rng);
        EXPECT_NEAR(solve_psi(bran, t + s, u), solve_psi(bran, t, solve_psi(bran, s, u)), 1e-8)
            << testing_support::describe({}, bran);
    }
}

TEST(Riccati, MonotoneDecayAndPhiBelowLimit) {
    std::mt19937_64 rng(35);
    for (int i = 0; i < 20; ++i) {
        const auto imm = testing_support::random_immigration(rng, i % 4);
        const auto bran = testing_support::random_subcritical(rng, int(i % 5) - 1, i % 3 == 0);
        const double u = 2.0, l = laplace_exponent(imm, bran, u);
        double prev_psi = u, prev_phi = 0.0;
        for (double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            const auto sol = solve_riccati(imm, bran, t, u);
            EXPECT_LT(sol.psi, prev_psi);
            EXPECT_GE(sol.psi, 0.0);
            EXPECT_GE(sol.phi, prev_phi - 1e-12);
            EXPECT_LE(sol.phi, l + 1e-8);
            prev_psi = sol.psi;
            prev_phi = sol.phi;
        }
        const auto inf = solve_riccati(imm, bran, kInf, u);
        EXPECT_EQ(inf.psi, 0.0);
        EXPECT_NEAR(inf.phi, l, 1e-7 * (1.0 + l)) << testing_support::describe(imm, bran);
    }
}

TEST(Riccati, PsiNondecreasingInU) {
    const BranchingMechanism bran(0.2, -0.5, LevyMeasure::tempered_stable(0.3, 1.5, 1.0));
    double prev = 0.0;
    for (double u = 0.0; u <= 20.0; u += 0.5) {
        const double v = solve_psi(bran, 1.0, u);
        EXPECT_GE(v, prev);
        prev = v;
    }
}
