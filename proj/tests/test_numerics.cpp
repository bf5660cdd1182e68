#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cbi/errors.hpp"
#include "cbi/numerics/interpolation.hpp"
#include "cbi/numerics/laplace_inversion.hpp"
#include "cbi/numerics/parallel.hpp"
#include "cbi/numerics/quadrature.hpp"
#include "cbi/numerics/special_functions.hpp"
#include "oracles.hpp"

using namespace cbi;

TEST(Quadrature, GaussKronrodOnShortInterval) {
    // intervals whose width times the tolerance is below machine epsilon
    const double a = 1.0, b = 1.0 + 1e-9;
    const auto r = quad::gauss_kronrod([](double x) { return std::exp(x); }, a, b, {.rel_tol = 1e-12});
    const double exact = std::exp(a) * std::expm1(b - a);
    EXPECT_NEAR(r.value, exact, 1e-12 * exact);
}

TEST(Quadrature, GaussKronrodReversedBounds) {
    const auto r = quad::gauss_kronrod([](double x) { return x * x; }, 2.0, 0.0);
    EXPECT_NEAR(r.value, -8.0 / 3.0, 1e-13);
}

TEST(Quadrature, GaussKronrodHonoursAbsoluteTolerance) {
    int calls = 0;
    auto f = [&](double x) {
        ++calls;
        return std::sin(50.0 * x) * 1e-8;
    };
    quad::gauss_kronrod(f, 0.0, 10.0, {.rel_tol = 1e-14, .abs_tol = 1e-3});
    const int loose = calls;
    calls = 0;
    const auto tight = quad::gauss_kronrod(f, 0.0, 10.0, {.rel_tol = 1e-12});
    EXPECT_LT(loose, calls);
    EXPECT_NEAR(tight.value, 1e-8 * (1.0 - std::cos(500.0)) / 50.0, 1e-19);
}

TEST(Quadrature, TanhSinhEndpointSingularity) {
    const auto r = quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0);
    EXPECT_NEAR(r.value, 4.0, 1e-10);
}

TEST(Quadrature, HalfLine) {
    const auto r = quad::half_line([](double x) { return std::exp(-x) * std::log1p(x); }, 0.0);
    const long double ref = oracle::integrate_to_inf([](long double x) { return std::exp(-x) * std::log1p(x); }, 0);
    EXPECT_NEAR(r.value, double(ref), 1e-10);
}

TEST(Quadrature, GradedToZeroLogSingularity) {
    const auto r = quad::graded_to_zero([](double x) { return -std::log(x); }, 1.0, {.rel_tol = 1e-12});
    EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Quadrature, GradedToZeroDetectsDivergence) {
    EXPECT_THROW(quad::graded_to_zero([](double x) { return 1.0 / x; }, 1.0, {.rel_tol = 1e-10}), NumericError);
}

TEST(SpecialFunctions, AgainstQuadratureOracle) {
    for (double s : {0.3, 1.0, 1.7, 2.5}) {
        for (double z : {0.1, 1.0, 4.0}) {
            const long double upper =
                oracle::integrate_to_inf([&](long double t) { return std::pow(t, s - 1) * std::exp(-t); }, z);
            EXPECT_NEAR(special::upper_gamma(s, z), double(upper), 1e-10 * double(upper)) << s << " " << z;
            EXPECT_NEAR(special::lower_gamma(s, z) + special::upper_gamma(s, z), std::tgamma(s), 1e-12 * std::tgamma(s));
        }
        EXPECT_NEAR(special::gamma_fn(s), std::tgamma(s), 1e-13 * std::tgamma(s));
    }
    EXPECT_NEAR(special::expint_e1(1.0), 0.21938393439552027, 1e-15);
}

// sum_{n >= from} (-z)^n / n!
long double exp_tail(long double z, int from) {
    long double term = 1, sum = 0;
    for (int n = 1; n < from; ++n) term *= -z / n;
    for (int n = from; n < from + 60; ++n) {
        term *= -z / n;
        sum += term;
    }
    return sum;
}

TEST(SpecialFunctions, SmallArgumentForms) {
    for (double z : {1e-12, 1e-6, 1e-3, 0.5, 3.0}) {
        const long double h2 = exp_tail(z, 2), h3 = -exp_tail(z, 3);
        EXPECT_NEAR(special::h2(z), double(h2), 1e-14 * double(h2));
        EXPECT_NEAR(special::one_minus_exp(z), -double(exp_tail(z, 1)), 1e-15 * z);
        EXPECT_NEAR(special::h3(z), double(h3), 1e-13 * double(h3));
    }
    const std::complex<double> z(0.3, 0.7);
    EXPECT_NEAR(std::abs(special::h2(z) - (std::exp(-z) - 1.0 + z)), 0.0, 1e-15);
}

TEST(LaplaceInversion, StehfestAndTalbot) {
    // 1/(u^2 + 1) <-> sin t
    auto F = [](double u) { return 1.0 / (u * u + 1.0); };
    auto Fc = [](std::complex<double> u) { return 1.0 / (u * u + 1.0); };
    for (double t : {0.2, 0.5, 1.0}) {
        EXPECT_NEAR(inversion::talbot(Fc, t, 32), std::sin(t), 1e-9);
        EXPECT_NEAR(inversion::stehfest(F, t, 16), std::sin(t), 2e-3);
    }
    // 1/(u+1) <-> e^{-t} is where Stehfest is at its best
    EXPECT_NEAR(inversion::stehfest([](double u) { return 1.0 / (u + 1.0); }, 1.0, 16), std::exp(-1.0), 1e-6);
}

TEST(LaplaceInversion, FallsBackToContour) {
    auto F = [](double u) { return 1.0 / (u * u + 1.0); };
    auto Fc = [](std::complex<double> u) { return 1.0 / (u * u + 1.0); };
    const auto r = inversion::invert(F, Fc, 6.0, {.stehfest_order = 16, .talbot_nodes = 48});
    EXPECT_EQ(r.method, inversion::Method::Talbot);
    EXPECT_NEAR(r.value, std::sin(6.0), 1e-8);
    EXPECT_THROW(inversion::invert(F, std::nullopt, 6.0), NumericError);
    EXPECT_THROW(inversion::stehfest(F, 1.0, 7), ValidationError);
}

TEST(Interpolation, MonotoneHermiteReproducesCubicAndKeepsOrder) {
    std::vector<double> x, y, d;
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.3 * i;
        x.push_back(t);
        y.push_back(t * t * t + t);
        d.push_back(3 * t * t + 1);
    }
    const interp::MonotoneHermite h(x, y, d);
    for (double t : {0.05, 1.234, 2.99}) {
        EXPECT_NEAR(h.value(t), t * t * t + t, 1e-12);
        EXPECT_NEAR(h.derivative(t), 3 * t * t + 1, 1e-10);
    }
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = h.value(3.0 * i / 1000);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Parallel, VisitsEveryIndexOnceAndPropagatesErrors) {
    std::vector<std::atomic<int>> hits(1000);
    parallel::for_each_index(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel::for_each_index(100,
                                          [](std::size_t i) {
                                              if (i == 42) throw NumericError("boom");
                                          }),
                 NumericError);
}

TEST(Oracle, TalbotSelfCheck) {
    const auto v = oracle::talbot([](std::complex<long double> u) { return 1.0L / (u + 1.0L); }, 1.0L);
    EXPECT_NEAR(double(v), std::exp(-1.0), 1e-12);
}
