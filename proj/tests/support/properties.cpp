#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cbi/limit_law.hpp"
#include "cbi/scale.hpp"
#include "cbi/simulate.hpp"
#include "instances.hpp"

namespace testing_support {

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

void fail(PropertyResult& r, const std::string& what) {
    if (r.ok) r.detail = what;
    r.ok = false;
}

cbi::ScaleOptions small_grid() {
    cbi::ScaleOptions o;
    o.nodes = 256;
    o.renewal_cells = 4096;
    return o;
}

}  // namespace

PropertyResult scale_monotone_log_concave(int count, std::uint64_t seed) {
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count && r.ok; ++i) {
        const int family = int(i % 5) - 1;
        const auto bran = random_subcritical(rng, family, i % 2 == 0);
        const auto sf = cbi::build_scale(bran, small_grid());
        const bool numeric = sf.is_numeric();
        const double tol = numeric ? 1e-4 : 1e-12;
        for (int j = 0; j < 30; ++j) {
            double a = std::exp(uniform(rng, std::log(1e-3), std::log(15.0)));
            double b = std::exp(uniform(rng, std::log(1e-3), std::log(15.0)));
            if (a > b) std::swap(a, b);
            const double wa = sf(a), wb = sf(b), wm = sf(0.5 * (a + b));
            std::ostringstream os;
            os.precision(10);
            if (!(wa > 0.0) || wb < wa * (1.0 - tol)) {
                os << "W not positive nondecreasing: W(" << a << ")=" << wa << " W(" << b << ")=" << wb << " for "
                   << describe({}, bran);
                fail(r, os.str());
                break;
            }
            if (std::log(wm) < 0.5 * (std::log(wa) + std::log(wb)) - tol) {
                os << "log W not midpoint concave on [" << a << ", " << b << "] for " << describe({}, bran);
                fail(r, os.str());
                break;
            }
        }
        ++r.instances;
    }
    return r;
}

PropertyResult mechanisms_concave(int count, std::uint64_t seed) {
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count && r.ok; ++i) {
        const auto imm = random_immigration(rng, i % 4);
        const auto bran = random_subcritical(rng, i % 4, i % 3 == 0);
        std::vector<double> u(12);
        for (auto& v : u) v = std::exp(uniform(rng, std::log(1e-3), std::log(50.0)));
        u.push_back(0.0);
        std::sort(u.begin(), u.end());
        double prev_f = INFINITY, prev_r = INFINITY;
        for (std::size_t j = 0; j + 1 < u.size(); ++j) {
            const double h = u[j + 1] - u[j];
            const double f0 = cbi::eval_F(imm, u[j]), f1 = cbi::eval_F(imm, u[j + 1]);
            const double sf = (f1 - f0) / h;
            const double sr = (cbi::eval_R(bran, u[j + 1]) - cbi::eval_R(bran, u[j])) / h;
            const double slack_f = 1e-9 * (1.0 + std::abs(sf)), slack_r = 1e-9 * (1.0 + std::abs(sr));
            if (f0 < 0.0 || sf < -slack_f) fail(r, "F negative or decreasing near u=" + std::to_string(u[j]) + " for " + describe(imm, bran));
            if (sf > prev_f + slack_f) fail(r, "F slope increases at u=" + std::to_string(u[j]) + " for " + describe(imm, bran));
            if (sr > prev_r + slack_r) fail(r, "R slope increases at u=" + std::to_string(u[j]) + " for " + describe(imm, bran));
            prev_f = sf;
            prev_r = sr;
        }
        if (cbi::eval_F(imm, 0.0) != 0.0 || cbi::eval_R(bran, 0.0) != 0.0) fail(r, "F(0) or R(0) nonzero");
        ++r.instances;
    }
    return r;
}

PropertyResult k_nonnegative(int count, std::uint64_t seed) {
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count && r.ok; ++i) {
        const auto imm = random_immigration(rng, i % 4);
        const auto bran = random_subcritical(rng, int(i % 5) - 1, i % 2 == 1);
        const auto sf = cbi::build_scale(bran, small_grid());
        const auto t = cbi::triplet(imm, bran, sf, 1e-8);
        for (int j = 0; j < 20; ++j) {
            const double x = 1e-3 * std::pow(1e4, j / 19.0);
            const double k = t.k(x);
            if (!(k >= 0.0)) {
                std::ostringstream os;
                os << "k(" << x << ") = " << k << " for " << describe(imm, bran);
                fail(r, os.str());
                break;
            }
        }
        ++r.instances;
    }
    return r;
}

PropertyResult simulation_seed_determinism(int count, std::uint64_t seed) {
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count && r.ok; ++i) {
        cbi::SimConfig c{random_immigration(rng, i % 4), random_subcritical(rng, int(i % 5) - 1, i % 2 == 0)};
        c.horizon = 1.0;
        c.dt = 0.01;
        c.paths = 16;
        c.seed = rng();
        c.x0 = uniform(rng, 0.0, 2.0);
        const auto a = cbi::simulate(c);
        c.parallel = false;
        const auto b = cbi::simulate(c);
        if (a.terminal != b.terminal) fail(r, "parallel and serial runs differ for seed " + std::to_string(c.seed));
        if (std::any_of(a.terminal.begin(), a.terminal.end(), [](double v) { return !(v >= 0.0); }))
            fail(r, "negative terminal value for seed " + std::to_string(c.seed));
        c.seed += 1;
        const auto d = cbi::simulate(c);
        if (d.terminal == b.terminal) fail(r, "different seeds gave identical paths");
        ++r.instances;
    }
    return r;
}

PropertyResult degeneracy_equivalence(int count, std::uint64_t seed) {
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count && r.ok; ++i) {
        cbi::ImmigrationMechanism imm;
        cbi::BranchingMechanism bran;
        switch (i % 4) {
            case 0:  // F = 0
                bran = random_subcritical(rng, int(i % 5) - 1, i % 8 == 0);
                break;
            case 1:  // F(u) = bu, R(u) = beta u
                imm = cbi::ImmigrationMechanism(uniform(rng, 0.1, 3.0));
                bran = cbi::BranchingMechanism(0.0, uniform(rng, -3.0, -0.2));
                break;
            case 2:  // drift immigration with a nonlinear R
                imm = cbi::ImmigrationMechanism(uniform(rng, 0.1, 3.0));
                bran = random_subcritical(rng, int(rng() % 4), i % 8 == 2);
                break;
            default:
                imm = random_immigration(rng, int(rng() % 4));
                bran = random_subcritical(rng, int(rng() % 5) - 1, i % 8 == 3);
        }
        const bool detected = cbi::is_degenerate(imm, bran);
        const bool point = cbi::support(imm, bran).kind == cbi::Support::Kind::Point;
        const auto sf = cbi::build_scale(bran, small_grid());
        const auto t = cbi::triplet(imm, bran, sf, 1e-8);
        bool k_zero = true;
        for (int j = 0; j < 25 && k_zero; ++j) k_zero = t.k(1e-3 * std::pow(1e4, j / 24.0)) == 0.0;
        const bool expected = i % 4 < 2;
        if (detected != point || point != k_zero || detected != expected) {
            std::ostringstream os;
            os << "detected=" << detected << " point=" << point << " k_zero=" << k_zero << " for "
               << describe(imm, bran);
            fail(r, os.str());
        }
        ++r.instances;
    }
    return r;
}

}  // namespace testing_support
