#pragma once

#include <cstdint>
#include <vector>

#include "cbi/mechanisms.hpp"

namespace cbi {

struct SimConfig {
    ImmigrationMechanism imm;
    BranchingMechanism bran;
    double x0 = 0.0;
    double horizon = 20.0;
    double dt = 1e-3;
    std::uint64_t paths = 10'000;
    std::uint64_t seed = 1;
    /// jumps of infinite-activity measures below this size are replaced by their mean
    double cutoff = 1e-3;
    /// u values at which SimResult::estimates is filled
    std::vector<double> u_values = {0.5, 1.0, 2.0};
    bool parallel = true;
};

struct LaplaceEstimate {
    double u = 0.0;
    double mean = 1.0;
    double se = 0.0;
};

struct SimResult {
    std::vector<double> terminal;
    std::vector<LaplaceEstimate> estimates;
    double mean = 0.0;
    double variance = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::uint64_t steps_per_path = 0;
};

/// Euler scheme with full truncation at 0 and compound-Poisson jumps above
/// the cutoff.  Rejects supercritical mechanisms.  Paths use independent
/// streams derived from (seed, path index), so results do not depend on
/// thread count.
SimResult simulate(const SimConfig& cfg);

/// Sample mean and standard error of e^{-u X_T}.
LaplaceEstimate empirical_laplace(const SimResult& result, double u);

/// 64-bit seed of the stream for one path.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

}  // namespace cbi
