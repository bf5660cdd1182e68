#include "cbi/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cbi/errors.hpp"
#include "cbi/numerics/quadrature.hpp"

namespace cbi {

namespace {

using detail::require;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
    double psi, phi;
};

class Field {
public:
    Field(const ImmigrationMechanism& imm, const BranchingMechanism& bran) : imm_(imm), bran_(bran) {}
    State operator()(const State& y) const {
        const double p = std::max(y.psi, 0.0);
        return {eval_R(bran_, p), eval_F(imm_, p)};
    }

private:
    const ImmigrationMechanism& imm_;
    const BranchingMechanism& bran_;
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms) {
        out.psi += h * c * k->psi;
        out.phi += h * c * k->phi;
    }
    return out;
}

// int_{lo}^{hi} F(v) / (-R(v)) dv, i.e. the phi gained while psi flows from hi down to lo.
double phi_along_flow(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double lo, double hi) {
    if (is_zero(imm) || hi <= 0.0) return 0.0;
    auto g = [&](double v) { return v <= 0.0 ? 0.0 : -eval_F(imm, v) / eval_R(bran, v); };
    const quad::Options opts{.rel_tol = 1e-12, .abs_tol = 1e-300};
    if (lo <= 0.0) return quad::graded_to_zero(g, hi, opts).value;
    // log variable: the integrand is roughly constant in v for subcritical flows
    const double wlo = std::log(lo), whi = std::log(hi);
    return quad::gauss_kronrod([&](double w) { const double v = std::exp(w); return g(v) * v; }, wlo, whi, opts)
        .value;
}

}  // namespace

RiccatiSolution solve_riccati(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double t, double u,
                              const RiccatiOptions& opts) {
    require(t >= 0.0 && u >= 0.0, "riccati: t and u must be >= 0");
    require(opts.abs_tol > 0.0 && opts.rel_tol > 0.0, "riccati: tolerances must be positive");
    RiccatiSolution sol;
    sol.psi = u;
    if (t == 0.0 || u == 0.0) return sol;

    const double rho = is_zero(bran) ? 0.0 : R_slope_at_zero(bran);
    const bool infinite = std::isinf(t);
    if (infinite) {
        require(!is_zero(bran) && rho <= 0.0, "riccati: t = inf needs a subcritical or critical mechanism");
    }
    if (is_zero(bran)) {
        sol.phi = eval_F(imm, u) * t;
        return sol;
    }
    const bool linear_ok = rho < 0.0 && std::isfinite(rho);
    // For t = inf the remaining phi is added as an integral over psi once psi is small.
    const double switch_psi = linear_ok ? opts.linear_threshold : 1e-8 * std::max(1.0, u);

    const Field f(imm, bran);
    State y{u, 0.0};
    State k1 = f(y);
    double s = 0.0;
    double h;
    {
        const double d0 = std::abs(y.psi), d1 = std::abs(k1.psi);
        h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
        if (!infinite) h = std::min(h, t);
    }
    auto& diag = sol.diagnostics;

    for (;;) {
        if (!infinite && s >= t) break;
        if (y.psi < switch_psi && (linear_ok || infinite)) {
            diag.used_linear_tail = true;
            if (infinite) {
                y.phi += phi_along_flow(imm, bran, 0.0, y.psi);
                y.psi = 0.0;
            } else {
                const double remaining = t - s;
                const double psi_end = y.psi * std::exp(rho * remaining);
                const double lo = std::max(psi_end, y.psi * 1e-26);
                y.phi += phi_along_flow(imm, bran, lo, y.psi);
                y.psi = psi_end;
            }
            break;
        }
        if (diag.accepted_steps + diag.rejected_steps >= opts.max_steps) {
            throw NumericError("riccati: step budget exhausted at t = " + std::to_string(s));
        }
        if (!infinite) h = std::min(h, t - s);
        const double h_floor = 1e-14 * std::max(1.0, s);
        if (h < h_floor) {
            throw NumericError("riccati: step size underflow at t = " + std::to_string(s) +
                               " (stiff field or inconsistent tolerances)");
        }

        const State k2 = f(axpy(y, h, {{a21, &k1}}));
        const State k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = f(y5);
        const State err = axpy({0.0, 0.0}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

        const double sc_psi = opts.abs_tol + opts.rel_tol * std::max(std::abs(y.psi), std::abs(y5.psi));
        const double sc_phi = opts.abs_tol + opts.rel_tol * std::max(std::abs(y.phi), std::abs(y5.phi));
        const double e = std::max(std::abs(err.psi) / sc_psi, std::abs(err.phi) / sc_phi);

        if (e <= 1.0 && std::isfinite(e)) {
            s += h;
            y = y5;
            if (y.psi < 0.0) {
                if (y.psi < -opts.abs_tol) {
                    throw NumericError("riccati: psi went negative beyond tolerance at t = " + std::to_string(s));
                }
                y.psi = 0.0;
            }
            k1 = k7;
            ++diag.accepted_steps;
            diag.max_local_error = std::max(diag.max_local_error, e);
            const double grow = e == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(e, -0.2));
            h *= std::max(1.0, grow);
        } else {
            ++diag.rejected_steps;
            const double shrink = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.2;
            h *= shrink;
        }
    }
    sol.psi = y.psi;
    sol.phi = y.phi;
    return sol;
}

double solve_psi(const BranchingMechanism& bran, double t, double u, const RiccatiOptions& opts) {
    return solve_riccati(ImmigrationMechanism{}, bran, t, u, opts).psi;
}

double solve_phi(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double t, double u,
                 const RiccatiOptions& opts) {
    return solve_riccati(imm, bran, t, u, opts).phi;
}

double transient_laplace(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double x0, double t,
                         double u, const RiccatiOptions& opts) {
    require(x0 >= 0.0, "transient_laplace: x0 must be >= 0");
    const RiccatiSolution sol = solve_riccati(imm, bran, t, u, opts);
    return std::exp(-sol.phi - x0 * sol.psi);
}

}  // namespace cbi
