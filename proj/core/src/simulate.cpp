#include "cbi/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cbi/errors.hpp"
#include "cbi/numerics/parallel.hpp"

namespace cbi {

namespace {

using detail::require;

// Jump part of one measure as simulated: jumps above `cutoff` at rate
// `rate`, the rest folded into the drift.
struct JumpPart {
    const LevyMeasure* measure = nullptr;
    double cutoff = 0.0;
    double rate = 0.0;
};

JumpPart make_jumps(const std::optional<LevyMeasure>& m, double cutoff) {
    JumpPart j;
    if (!m) return j;
    j.measure = &*m;
    j.cutoff = m->finite_activity() ? 0.0 : cutoff;
    j.rate = m->tail(j.cutoff);
    return j;
}

double draw_jumps(const JumpPart& j, double mean_count, std::mt19937_64& rng) {
    if (mean_count <= 0.0) return 0.0;
    const long n = std::poisson_distribution<long>(mean_count)(rng);
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += j.measure->sample_jump(rng, j.cutoff);
    return s;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
    // SplitMix64 finaliser over a Weyl sequence indexed by path
    std::uint64_t z = seed + (path + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SimResult simulate(const SimConfig& cfg) {
    require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "simulate: dt must be positive");
    require(cfg.horizon > 0.0 && cfg.dt <= cfg.horizon, "simulate: need 0 < dt <= horizon");
    require(cfg.paths >= 1, "simulate: paths must be >= 1");
    require(cfg.x0 >= 0.0, "simulate: x0 must be >= 0");
    require(cfg.cutoff > 0.0, "simulate: cutoff must be positive");
    const BranchingClass cls = classify(cfg.bran);
    require(cls.kind != BranchingClass::Kind::Supercritical,
            "simulate: supercritical mechanism has no stationary target");

    const JumpPart imm_jumps = make_jumps(cfg.imm.m, cfg.cutoff);
    const JumpPart bran_jumps = make_jumps(cfg.bran.mu, cfg.cutoff);

    // Immigration jumps below the cutoff contribute their mean.
    double b_eff = cfg.imm.b;
    if (imm_jumps.measure && imm_jumps.cutoff > 0.0) b_eff += imm_jumps.measure->first_moment(0.0, imm_jumps.cutoff);
    // R compensates branching jumps in (0, 1]; simulated jumps are those above
    // the cutoff, so the compensator is moved onto (cutoff, 1] (or the
    // uncompensated jumps in (1, cutoff] are added back as drift).
    double beta_eff = cfg.bran.beta;
    if (bran_jumps.measure) {
        const double d = bran_jumps.cutoff;
        if (d < 1.0)
            beta_eff -= bran_jumps.measure->first_moment(d, 1.0);
        else
            beta_eff += bran_jumps.measure->first_moment(1.0, d);
    }

    const auto steps = static_cast<std::uint64_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
    const double h = cfg.horizon / double(steps);
    const double diff = std::sqrt(2.0 * cfg.bran.alpha * h);
    const bool any_imm_jumps = imm_jumps.measure != nullptr;
    const bool any_bran_jumps = bran_jumps.measure != nullptr;

    SimResult res;
    res.steps_per_path = steps;
    res.terminal.assign(cfg.paths, 0.0);
    auto one_path = [&](std::size_t p) {
        std::mt19937_64 rng(path_seed(cfg.seed, p));
        std::normal_distribution<double> normal(0.0, 1.0);
        double x = cfg.x0;
        for (std::uint64_t s = 0; s < steps; ++s) {
            double next = x + (b_eff + beta_eff * x) * h;
            if (diff > 0.0 && x > 0.0) next += diff * std::sqrt(x) * normal(rng);
            if (any_imm_jumps) next += draw_jumps(imm_jumps, imm_jumps.rate * h, rng);
            if (any_bran_jumps) next += draw_jumps(bran_jumps, bran_jumps.rate * x * h, rng);
            x = std::max(0.0, next);
        }
        res.terminal[p] = x;
    };
    if (cfg.parallel)
        parallel::for_each_index(cfg.paths, one_path);
    else
        for (std::size_t p = 0; p < cfg.paths; ++p) one_path(p);

    const double n = double(cfg.paths);
    double sum = 0.0;
    for (double v : res.terminal) sum += v;
    res.mean = sum / n;
    double ss = 0.0;
    for (double v : res.terminal) ss += (v - res.mean) * (v - res.mean);
    res.variance = cfg.paths > 1 ? ss / (n - 1.0) : 0.0;
    const auto [lo, hi] = std::minmax_element(res.terminal.begin(), res.terminal.end());
    res.min = *lo;
    res.max = *hi;
    for (double u : cfg.u_values) res.estimates.push_back(empirical_laplace(res, u));
    return res;
}

LaplaceEstimate empirical_laplace(const SimResult& result, double u) {
    require(u >= 0.0, "empirical_laplace: u must be >= 0");
    require(!result.terminal.empty(), "empirical_laplace: no samples");
    LaplaceEstimate e{u, 1.0, 0.0};
    if (u == 0.0) return e;
    const double n = double(result.terminal.size());
    double sum = 0.0;
    for (double x : result.terminal) sum += std::exp(-u * x);
    e.mean = sum / n;
    if (result.terminal.size() > 1) {
        double ss = 0.0;
        for (double x : result.terminal) {
            const double d = std::exp(-u * x) - e.mean;
            ss += d * d;
        }
        e.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

}  // namespace cbi
