#pragma once

#include "cbi/mechanisms.hpp"

namespace cbi {

struct RiccatiOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Below this psi the flow is treated as linear, psi' = rho psi, and
    /// integrated in closed form (subcritical only).
    double linear_threshold = 1e-12;
    long max_steps = 2'000'000;
};

struct RiccatiDiagnostics {
    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_local_error = 0.0;  ///< largest accepted scaled error estimate
    bool used_linear_tail = false;
};

/// psi(t, u), phi(t, u) solving psi' = R(psi), phi' = F(psi(s)), psi(0) = u, phi(0) = 0.
struct RiccatiSolution {
    double psi = 0.0;
    double phi = 0.0;
    RiccatiDiagnostics diagnostics;
};

/// Dormand-Prince 5(4) on (psi, phi).  t may be +inf for subcritical or
/// critical mechanisms; then psi = 0 and phi is the limit of phi(t, u).
/// Throws NumericError on step-size underflow.
RiccatiSolution solve_riccati(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double t, double u,
                              const RiccatiOptions& opts = {});

double solve_psi(const BranchingMechanism& bran, double t, double u, const RiccatiOptions& opts = {});
double solve_phi(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double t, double u,
                 const RiccatiOptions& opts = {});

/// E_{x0}[e^{-u X_t}] = exp(-phi(t, u) - x0 psi(t, u)).
double transient_laplace(const ImmigrationMechanism& imm, const BranchingMechanism& bran, double x0, double t,
                         double u, const RiccatiOptions& opts = {});

}  // namespace cbi
