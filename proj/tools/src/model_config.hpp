#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbi/limit_law.hpp"
#include "cbi/mechanisms.hpp"
#include "cbi/simulate.hpp"

namespace cbi::cli {

/// Inclusive grid "a:b:n".  Geometric spacing when log_spaced is set.
struct Grid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 2;
    bool log_spaced = false;

    std::vector<double> points() const;
    std::string to_string() const;
    bool operator==(const Grid&) const = default;
};

/// "a:b:n" or "a:b:n:log".  Throws ValidationError.
Grid parse_grid(const std::string& text);

struct MeasureSpec {
    std::string family;  // atoms | exponential | tempered_stable | tabulated
    std::vector<double> weights, locations;
    double c = 1.0, rho = 1.0, a = 0.5;
    std::vector<double> x, tail;
    std::string extrapolation = "none";
    std::optional<double> exponent;

    LevyMeasure build() const;
    bool operator==(const MeasureSpec&) const = default;
};

struct NumericSection {
    double xmax = 20.0;
    std::size_t scale_nodes = 2048;
    int stehfest_order = 16;
    int talbot_nodes = 32;
    double quad_rel_tol = 1e-11;
    double riccati_rel_tol = 1e-10;
    double riccati_abs_tol = 1e-10;
    Grid x_grid{0.05, 5.0, 50, false};
    Grid u_grid{0.0, 10.0, 101, false};
    bool operator==(const NumericSection&) const = default;
};

struct SimulationSection {
    double x0 = 0.0;
    double horizon = 20.0;  // time units
    double dt = 1e-3;       // time units
    std::uint64_t paths = 10'000;
    std::uint64_t seed = 1;
    double cutoff = 1e-3;
    std::vector<double> u = {0.5, 1.0, 2.0};
    bool operator==(const SimulationSection&) const = default;
};

struct ModelConfig {
    double b = 0.0;
    std::optional<MeasureSpec> m;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<MeasureSpec> mu;
    NumericSection numeric;
    std::optional<SimulationSection> simulation;

    ImmigrationMechanism immigration() const;
    BranchingMechanism branching() const;
    LimitOptions limit_options() const;
    SimConfig sim_config() const;
    bool operator==(const ModelConfig&) const = default;
};

/// Unknown keys and malformed values raise ValidationError.
ModelConfig parse_config(const nlohmann::json& j);
ModelConfig parse_config_text(const std::string& text);
ModelConfig load_config(const std::string& path);
nlohmann::json to_json(const ModelConfig& cfg);

}  // namespace cbi::cli
