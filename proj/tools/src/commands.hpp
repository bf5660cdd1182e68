#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "model_config.hpp"

namespace cbi::cli {

struct Flags {
    std::string config;
    std::optional<std::string> out;  ///< directory for CSV files; stdout when absent
    std::optional<Grid> x_grid;
    std::optional<Grid> u_grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
};

enum ExitCode : int { kOk = 0, kValidation = 1, kNumeric = 2 };

/// Config with command-line overrides applied.
ModelConfig effective_config(const Flags& flags);

int cmd_classify(const ModelConfig& cfg, std::ostream& os);
int cmd_scale(const ModelConfig& cfg, const Flags& flags, std::ostream& os);
int cmd_limit(const ModelConfig& cfg, const Flags& flags, std::ostream& os);
int cmd_density(const ModelConfig& cfg, const Flags& flags, std::ostream& os);
int cmd_simulate(const ModelConfig& cfg, std::ostream& os);
int cmd_verify(const ModelConfig& cfg, std::ostream& os);

/// Loads the config, dispatches, and maps ValidationError / NumericError to
/// exit codes 1 / 2 with a one-line diagnostic on err.
int run(const std::string& command, const Flags& flags, std::ostream& os, std::ostream& err);

}  // namespace cbi::cli
