#include "instances.hpp"

#include <limits>
#include <sstream>
#include <variant>

namespace testing_support {

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

std::string measure_text(const cbi::LevyMeasure& m) {
    std::ostringstream os;
    os.precision(6);
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, cbi::FiniteAtoms>) {
                os << "atoms{";
                for (std::size_t i = 0; i < f.weights.size(); ++i) os << f.weights[i] << "@" << f.locations[i] << " ";
                os << "}";
            } else if constexpr (std::is_same_v<T, cbi::ExponentialDensity>) {
                os << "exp{c=" << f.c << ",rho=" << f.rho << "}";
            } else if constexpr (std::is_same_v<T, cbi::TemperedStable>) {
                os << "ts{c=" << f.c << ",a=" << f.a << ",rho=" << f.rho << "}";
            } else {
                os << "tab{" << f.x.size() << " nodes, last tail " << f.tail.back() << "}";
            }
        },
        m.family());
    return os.str();
}

}  // namespace

cbi::LevyMeasure random_measure(std::mt19937_64& rng, int family, bool finite_variation) {
    switch (family) {
        case 0: {
            const int n = 1 + int(rng() % 3);
            std::vector<double> w, x;
            for (int i = 0; i < n; ++i) {
                w.push_back(uniform(rng, 0.1, 1.5));
                x.push_back(uniform(rng, 0.05, 3.0));
            }
            return cbi::LevyMeasure::atoms(w, x);
        }
        case 1:
            return cbi::LevyMeasure::exponential(uniform(rng, 0.2, 2.0), uniform(rng, 0.5, 3.0));
        case 2: {
            const double a = finite_variation ? uniform(rng, 0.2, 0.8) : uniform(rng, 0.2, 1.8);
            return cbi::LevyMeasure::tempered_stable(uniform(rng, 0.1, 1.0), a, uniform(rng, 0.5, 3.0));
        }
        default: {
            const int n = 3 + int(rng() % 4);
            std::vector<double> x, t;
            double xi = uniform(rng, 0.05, 0.3), tail = uniform(rng, 0.5, 2.0);
            for (int i = 0; i < n; ++i) {
                x.push_back(xi);
                t.push_back(tail);
                xi += uniform(rng, 0.2, 1.0);
                tail *= uniform(rng, 0.3, 0.8);
            }
            t.back() = 0.0;
            return cbi::LevyMeasure::tabulated(x, t);
        }
    }
}

cbi::ImmigrationMechanism random_immigration(std::mt19937_64& rng, int family) {
    const double b = rng() % 3 == 0 ? 0.0 : uniform(rng, 0.1, 2.0);
    return cbi::ImmigrationMechanism(b, random_measure(rng, family, true));
}

cbi::BranchingMechanism random_subcritical(std::mt19937_64& rng, int family, bool diffusion) {
    const double alpha = diffusion ? uniform(rng, 0.1, 1.0) : 0.0;
    if (family < 0) return cbi::BranchingMechanism(alpha, uniform(rng, -3.0, -0.2));
    const cbi::LevyMeasure mu = random_measure(rng, family, false);
    // rho = beta + int_{xi > 1} xi mu(dxi); choose beta so that rho is in [-3, -0.2]
    const double big = mu.first_moment(1.0, std::numeric_limits<double>::infinity());
    return cbi::BranchingMechanism(alpha, uniform(rng, -3.0, -0.2) - big, mu);
}

std::string describe(const cbi::ImmigrationMechanism& imm, const cbi::BranchingMechanism& bran) {
    std::ostringstream os;
    os.precision(6);
    os << "b=" << imm.b << " m=" << (imm.m ? measure_text(*imm.m) : "none") << " alpha=" << bran.alpha
       << " beta=" << bran.beta << " mu=" << (bran.mu ? measure_text(*bran.mu) : "none");
    return os.str();
}

}  // namespace testing_support
