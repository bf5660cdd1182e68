#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cbi/errors.hpp"
#include "cbi/levy_measure.hpp"
#include "oracles.hpp"

using namespace cbi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_0^inf g(xi) density(xi) dxi with a possible power singularity at 0
double against_density(const oracle::Fn& g, const oracle::Fn& density) {
    return double(oracle::integrate_half_line([&](long double x) { return g(x) * density(x); }));
}

struct DensityCase {
    const char* name;
    LevyMeasure measure;
    oracle::Fn density;
};

std::vector<DensityCase> density_cases() {
    return {
        {"exponential", LevyMeasure::exponential(1.3, 0.7),
         [](long double x) { return 1.3L * std::exp(-0.7L * x); }},
        {"tempered stable a<1", LevyMeasure::tempered_stable(0.8, 0.6, 1.5),
         [](long double x) { return 0.8L * std::pow(x, -1.6L) * std::exp(-1.5L * x); }},
        {"tempered stable a>1", LevyMeasure::tempered_stable(0.4, 1.4, 2.0),
         [](long double x) { return 0.4L * std::pow(x, -2.4L) * std::exp(-2.0L * x); }},
    };
}

}  // namespace

TEST(LevyMeasure, DensityFamiliesAgainstQuadrature) {
    for (const auto& c : density_cases()) {
        SCOPED_TRACE(c.name);
        const auto& m = c.measure;
        for (double x : {0.3, 1.0, 2.5}) {
            const double tail = double(oracle::integrate_to_inf(c.density, x));
            EXPECT_NEAR(m.tail(x), tail, 1e-9 * tail);
        }
        const double m1 = double(oracle::integrate([&](long double x) { return x * c.density(x); }, 0.5L, 2.0L));
        EXPECT_NEAR(m.first_moment(0.5, 2.0), m1, 1e-9 * m1);
        const double lm = double(oracle::integrate_to_inf([&](long double x) { return std::log(x) * c.density(x); }, 1.0L));
        EXPECT_NEAR(m.log_moment(), lm, 1e-9 * lm);
        for (double u : {0.1, 1.0, 7.0}) {
            const double comp = against_density(
                [&](long double x) {
                    // e^{-ux} - 1 + ux by its series where the difference cancels
                    const long double z = u * x;
                    if (x <= 1 && z < 1e-3L) return z * z / 2 * (1 - z / 3 * (1 - z / 4 * (1 - z / 5)));
                    return std::expm1(-z) + (x <= 1 ? z : 0.0L);
                },
                c.density);
            EXPECT_NEAR(m.compensated(u), comp, 1e-8 * std::abs(comp)) << "u=" << u;
            EXPECT_NEAR(std::real(m.compensated(std::complex<double>(u, 0.0))), m.compensated(u),
                        1e-10 * std::abs(comp));
            if (m.finite_variation()) {
                const double inc = against_density([&](long double x) { return -std::expm1(-u * x); }, c.density);
                EXPECT_NEAR(m.laplace_increment(u), inc, 1e-8 * inc);
                EXPECT_NEAR(std::real(m.laplace_increment(std::complex<double>(u, 0.0))), inc, 1e-8 * inc);
            }
        }
    }
}

TEST(LevyMeasure, ComplexContinuationMatchesDirectIntegral) {
    const auto m = LevyMeasure::tempered_stable(0.8, 0.6, 1.5);
    const std::complex<double> u(0.5, 2.0);
    auto re = [&](long double x) {
        const long double half = std::sin(x);  // 1 - cos 2x = 2 sin^2 x
        return 0.8L * std::pow(x, -1.6L) * std::exp(-1.5L * x) *
               (-std::expm1(-0.5L * x) * std::cos(2.0L * x) + 2 * half * half);
    };
    auto im = [&](long double x) {
        return 0.8L * std::pow(x, -1.6L) * std::exp(-1.5L * x) * (std::exp(-0.5L * x) * std::sin(2.0L * x));
    };
    const auto v = m.laplace_increment(u);
    EXPECT_NEAR(v.real(), double(oracle::integrate_half_line(re)), 1e-11);
    EXPECT_NEAR(v.imag(), double(oracle::integrate_half_line(im)), 1e-11);
    EXPECT_TRUE(m.has_analytic_continuation());
}

TEST(LevyMeasure, FiniteAtoms) {
    const auto m = LevyMeasure::atoms({1.0}, {std::numbers::e});
    EXPECT_DOUBLE_EQ(m.log_moment(), 1.0);
    EXPECT_DOUBLE_EQ(LevyMeasure::atoms({2.0}, {0.5}).log_moment(), 0.0);
    const auto two = LevyMeasure::atoms({0.5, 1.5}, {0.2, 3.0});
    EXPECT_DOUBLE_EQ(two.tail(0.1), 2.0);
    EXPECT_DOUBLE_EQ(two.tail(0.2), 1.5);  // right-continuous: (0.2, inf)
    EXPECT_DOUBLE_EQ(two.total_mass(), 2.0);
    EXPECT_NEAR(two.laplace_increment(1.0), 0.5 * -std::expm1(-0.2) + 1.5 * -std::expm1(-3.0), 1e-15);
    EXPECT_NEAR(two.compensated(2.0), 0.5 * (std::expm1(-0.4) + 0.4) + 1.5 * std::expm1(-6.0), 1e-15);
    EXPECT_TRUE(two.finite_activity());
}

TEST(LevyMeasure, TabulatedTailIsPiecewiseUniform) {
    const auto m = LevyMeasure::tabulated({0.5, 1.0, 2.0}, {1.0, 0.5, 0.0});
    EXPECT_DOUBLE_EQ(m.tail(0.1), 1.0);
    EXPECT_NEAR(m.tail(0.75), 0.75, 1e-15);
    EXPECT_NEAR(m.tail(1.5), 0.25, 1e-15);
    EXPECT_DOUBLE_EQ(m.tail(3.0), 0.0);
    // density 1 on (0.5, 1], 0.5 on (1, 2]
    EXPECT_NEAR(m.first_moment(0.0, kInf), 0.375 + 0.75, 1e-13);
    const double u = 1.7;
    const double inc = (std::exp(-u * 0.5) - std::exp(-u)) / u * -1.0 + 0.5 + 0.5 * (1.0 + (std::exp(-2 * u) - std::exp(-u)) / u);
    EXPECT_NEAR(m.laplace_increment(u), inc, 1e-13);
    EXPECT_TRUE(m.has_analytic_continuation());
    EXPECT_NEAR(std::real(m.laplace_increment(std::complex<double>(u, 0.0))), inc, 1e-13);
}

TEST(LevyMeasure, TabulatedExtrapolation) {
    // tail(x) = 0.25 (x / 2)^{-3} beyond x = 2
    const auto p = LevyMeasure::tabulated({1.0, 2.0}, {1.0, 0.25}, TailExtrapolation::Power, 3.0);
    EXPECT_NEAR(p.tail(4.0), 0.25 / 8.0, 1e-15);
    const double lm_ref =
        double(oracle::integrate([](long double x) { return std::log(x) * 0.75L; }, 1.0L, 2.0L) +
               oracle::integrate_to_inf([](long double x) { return std::log(x) * 0.25L * 3 * 8 / std::pow(x, 4.0L); },
                                        2.0L));
    EXPECT_NEAR(p.log_moment(), lm_ref, 1e-9);
    EXPECT_FALSE(p.has_analytic_continuation());
    // tail(x) = 0.5 (log 3 / log x)^1 gives int log xi dmu = inf
    const auto lp = LevyMeasure::tabulated({1.5, 3.0}, {1.0, 0.5}, TailExtrapolation::LogPower, 1.0);
    EXPECT_NEAR(lp.tail(9.0), 0.25, 1e-14);
    EXPECT_TRUE(std::isinf(lp.log_moment()));
}

TEST(LevyMeasure, LogMomentExponentialExample) {
    EXPECT_NEAR(LevyMeasure::exponential(1.0, 1.0).log_moment(), 0.2193839, 1e-7);
}

TEST(LevyMeasure, SamplingMatchesNormalisedTail) {
    std::mt19937_64 rng(3);
    const auto ts = LevyMeasure::tempered_stable(1.0, 0.7, 1.2);
    const double cutoff = 0.05;
    const int n = 200'000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = ts.sample_jump(rng, cutoff);
        ASSERT_GT(x, cutoff);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
    const double target = ts.first_moment(cutoff, kInf) / ts.tail(cutoff);
    EXPECT_NEAR(mean, target, 4.0 * se);

    const auto tab = LevyMeasure::tabulated({0.5, 1.0, 2.0}, {1.0, 0.5, 0.0});
    sum = 0.0;
    for (int i = 0; i < n; ++i) sum += tab.sample_jump(rng, 0.0);
    EXPECT_NEAR(sum / n, tab.first_moment(0.0, kInf) / tab.total_mass(), 0.01);
}

TEST(LevyMeasure, RejectsInvalidParameters) {
    EXPECT_THROW(LevyMeasure::atoms({1.0, -1.0}, {1.0, 2.0}), ValidationError);
    EXPECT_THROW(LevyMeasure::atoms({1.0}, {0.0}), ValidationError);
    EXPECT_THROW(LevyMeasure::atoms({1.0}, {1.0, 2.0}), ValidationError);
    EXPECT_THROW(LevyMeasure::exponential(1.0, 0.0), ValidationError);
    EXPECT_THROW(LevyMeasure::exponential(-1.0, 1.0), ValidationError);
    EXPECT_THROW(LevyMeasure::tempered_stable(1.0, 2.0, 1.0), ValidationError);
    EXPECT_THROW(LevyMeasure::tempered_stable(1.0, 0.0, 1.0), ValidationError);
    EXPECT_THROW(LevyMeasure::tabulated({1.0, 0.5}, {1.0, 0.0}), ValidationError);
    EXPECT_THROW(LevyMeasure::tabulated({0.5, 1.0}, {0.5, 1.0}), ValidationError);
    EXPECT_THROW(LevyMeasure::tabulated({0.5, 1.0}, {1.0, 0.5}), ValidationError);
}

TEST(LevyMeasure, ScaledMultipliesEveryQuery) {
    for (const auto& c : density_cases()) {
        const auto s = c.measure.scaled(2.5);
        EXPECT_NEAR(s.tail(0.7), 2.5 * c.measure.tail(0.7), 1e-13);
        EXPECT_NEAR(s.compensated(3.0), 2.5 * c.measure.compensated(3.0), 1e-12);
    }
    EXPECT_THROW(LevyMeasure::exponential(1.0, 1.0).scaled(0.0), ValidationError);
}
