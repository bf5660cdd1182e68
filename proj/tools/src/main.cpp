#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cbi/errors.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace cbi::cli;
    CLI::App app{"Limit distributions of CBI processes"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    Flags flags;
    std::string x_grid, u_grid;
    std::uint64_t seed = 0, paths = 0;
    bool print_config = false;
    app.add_option("--config", flags.config, "model config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", flags.out, "directory for CSV output (default: stdout)");
    auto* xg = app.add_option("--x-grid", x_grid, "x grid a:b:n[:log]");
    auto* ug = app.add_option("--u-grid", u_grid, "u grid a:b:n[:log]");
    auto* so = app.add_option("--seed", seed, "simulation seed");
    auto* po = app.add_option("--paths", paths, "simulation paths")->check(CLI::PositiveNumber);
    app.add_flag("--print-config", print_config, "print the normalized config and exit");

    const char* commands[][2] = {
        {"classify", "branching class and existence of the limit"},
        {"scale", "CSV of W and W' on the x grid"},
        {"limit", "limit law report; k.csv and l.csv with --out"},
        {"density", "CSV of the density of the limit law"},
        {"simulate", "Monte Carlo summary"},
        {"verify", "cross-checks: excursion k, derivative and transform identities, Riccati, Monte Carlo"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

    CLI11_PARSE(app, argc, argv);

    if (flags.config.empty()) {
        std::cerr << "error: --config is required\n";
        return kValidation;
    }
    try {
        if (*xg) flags.x_grid = parse_grid(x_grid);
        if (*ug) flags.u_grid = parse_grid(u_grid);
    } catch (const cbi::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    if (*so) flags.seed = seed;
    if (*po) flags.paths = paths;

    if (print_config) {
        try {
            std::cout << to_json(effective_config(flags)).dump(2) << '\n';
            return kOk;
        } catch (const cbi::ValidationError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kValidation;
        }
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
        std::cerr << app.help();
        return kValidation;
    }
    return run(subs.front()->get_name(), flags, std::cout, std::cerr);
}
