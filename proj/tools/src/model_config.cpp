#include "model_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cbi/errors.hpp"

namespace cbi::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError("config: " + where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            fail(where, "unknown key '" + key + "'");
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "must be finite");
    return v;
}

std::uint64_t count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        fail(where, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

template <class T, class Fn>
void read(const json& j, const char* key, const std::string& where, T& out, Fn&& conv) {
    if (auto it = j.find(key); it != j.end()) out = conv(*it, where + "." + key);
}

std::optional<MeasureSpec> parse_measure(const json& j, const std::string& where) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        fail(where, "measure needs a string 'family'");
    MeasureSpec s;
    s.family = j["family"].get<std::string>();
    if (s.family == "atoms") {
        only_keys(j, where, {"family", "weights", "locations"});
        read(j, "weights", where, s.weights, numbers);
        read(j, "locations", where, s.locations, numbers);
    } else if (s.family == "exponential") {
        only_keys(j, where, {"family", "c", "rho"});
        read(j, "c", where, s.c, number);
        read(j, "rho", where, s.rho, number);
    } else if (s.family == "tempered_stable") {
        only_keys(j, where, {"family", "c", "a", "rho"});
        read(j, "c", where, s.c, number);
        read(j, "a", where, s.a, number);
        read(j, "rho", where, s.rho, number);
    } else if (s.family == "tabulated") {
        only_keys(j, where, {"family", "x", "tail", "extrapolation", "exponent"});
        read(j, "x", where, s.x, numbers);
        read(j, "tail", where, s.tail, numbers);
        if (auto it = j.find("extrapolation"); it != j.end()) {
            if (!it->is_string()) fail(where + ".extrapolation", "expected a string");
            s.extrapolation = it->get<std::string>();
            if (s.extrapolation != "none" && s.extrapolation != "power" && s.extrapolation != "log_power")
                fail(where + ".extrapolation", "expected none, power or log_power");
        }
        if (auto it = j.find("exponent"); it != j.end() && !it->is_null())
            s.exponent = number(*it, where + ".exponent");
    } else {
        fail(where, "unknown measure family '" + s.family + "'");
    }
    return s;
}

json measure_json(const MeasureSpec& s) {
    json j{{"family", s.family}};
    if (s.family == "atoms") {
        j["weights"] = s.weights;
        j["locations"] = s.locations;
    } else if (s.family == "exponential") {
        j["c"] = s.c;
        j["rho"] = s.rho;
    } else if (s.family == "tempered_stable") {
        j["c"] = s.c;
        j["a"] = s.a;
        j["rho"] = s.rho;
    } else {
        j["x"] = s.x;
        j["tail"] = s.tail;
        j["extrapolation"] = s.extrapolation;
        if (s.exponent) j["exponent"] = *s.exponent;
    }
    return j;
}

Grid grid_field(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a grid string a:b:n");
    return parse_grid(j.get<std::string>());
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> Grid::points() const {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : double(i) / double(n - 1);
        p[i] = log_spaced ? a * std::pow(b / a, t) : a + (b - a) * t;
    }
    if (n > 1) p.back() = b;
    return p;
}

std::string Grid::to_string() const {
    return fmt17(a) + ":" + fmt17(b) + ":" + std::to_string(n) + (log_spaced ? ":log" : "");
}

Grid parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3 && parts.size() != 4) throw ValidationError("grid '" + text + "': expected a:b:n");
    auto to_double = [&](const std::string& s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
            throw ValidationError("grid '" + text + "': bad number '" + s + "'");
        return v;
    };
    Grid g;
    g.a = to_double(parts[0]);
    g.b = to_double(parts[1]);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
    if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size() || n < 1)
        throw ValidationError("grid '" + text + "': n must be a positive integer");
    g.n = n;
    if (parts.size() == 4) {
        if (parts[3] != "log") throw ValidationError("grid '" + text + "': fourth field must be 'log'");
        g.log_spaced = true;
        if (!(g.a > 0.0 && g.b > 0.0)) throw ValidationError("grid '" + text + "': log grid needs a, b > 0");
    }
    if (g.b < g.a) throw ValidationError("grid '" + text + "': need a <= b");
    return g;
}

LevyMeasure MeasureSpec::build() const {
    if (family == "atoms") return LevyMeasure::atoms(weights, locations);
    if (family == "exponential") return LevyMeasure::exponential(c, rho);
    if (family == "tempered_stable") return LevyMeasure::tempered_stable(c, a, rho);
    if (family == "tabulated") {
        TailExtrapolation e = TailExtrapolation::None;
        if (extrapolation == "power") e = TailExtrapolation::Power;
        if (extrapolation == "log_power") e = TailExtrapolation::LogPower;
        return LevyMeasure::tabulated(x, tail, e, exponent);
    }
    throw ValidationError("unknown measure family '" + family + "'");
}

ImmigrationMechanism ModelConfig::immigration() const {
    return ImmigrationMechanism(b, m ? std::optional<LevyMeasure>(m->build()) : std::nullopt);
}

BranchingMechanism ModelConfig::branching() const {
    return BranchingMechanism(alpha, beta, mu ? std::optional<LevyMeasure>(mu->build()) : std::nullopt);
}

LimitOptions ModelConfig::limit_options() const {
    LimitOptions o;
    o.scale.xmax = numeric.xmax;
    o.scale.nodes = numeric.scale_nodes;
    o.scale.inversion.stehfest_order = numeric.stehfest_order;
    o.scale.inversion.talbot_nodes = numeric.talbot_nodes;
    o.density_inversion.stehfest_order = numeric.stehfest_order;
    o.density_inversion.talbot_nodes = numeric.talbot_nodes;
    o.quad_rel_tol = numeric.quad_rel_tol;
    return o;
}

SimConfig ModelConfig::sim_config() const {
    const SimulationSection s = simulation.value_or(SimulationSection{});
    SimConfig c{immigration(), branching()};
    c.x0 = s.x0;
    c.horizon = s.horizon;
    c.dt = s.dt;
    c.paths = s.paths;
    c.seed = s.seed;
    c.cutoff = s.cutoff;
    c.u_values = s.u;
    return c;
}

ModelConfig parse_config(const json& j) {
    only_keys(j, "root", {"immigration", "branching", "numeric", "simulation"});
    ModelConfig cfg;
    if (!j.contains("immigration") || !j.contains("branching"))
        fail("root", "sections 'immigration' and 'branching' are required");

    const json& im = j["immigration"];
    only_keys(im, "immigration", {"b", "m"});
    read(im, "b", "immigration", cfg.b, number);
    if (im.contains("m")) cfg.m = parse_measure(im["m"], "immigration.m");

    const json& br = j["branching"];
    only_keys(br, "branching", {"alpha", "beta", "mu"});
    read(br, "alpha", "branching", cfg.alpha, number);
    read(br, "beta", "branching", cfg.beta, number);
    if (br.contains("mu")) cfg.mu = parse_measure(br["mu"], "branching.mu");

    if (auto it = j.find("numeric"); it != j.end()) {
        const json& nu = *it;
        const std::string w = "numeric";
        only_keys(nu, w,
                  {"xmax", "scale_nodes", "stehfest_order", "talbot_nodes", "quad_rel_tol", "riccati_rel_tol",
                   "riccati_abs_tol", "x_grid", "u_grid"});
        auto& n = cfg.numeric;
        read(nu, "xmax", w, n.xmax, number);
        read(nu, "scale_nodes", w, n.scale_nodes, count);
        std::uint64_t order = std::uint64_t(n.stehfest_order), nodes = std::uint64_t(n.talbot_nodes);
        read(nu, "stehfest_order", w, order, count);
        read(nu, "talbot_nodes", w, nodes, count);
        n.stehfest_order = int(std::min<std::uint64_t>(order, 1000));
        n.talbot_nodes = int(std::min<std::uint64_t>(nodes, 100000));
        read(nu, "quad_rel_tol", w, n.quad_rel_tol, number);
        read(nu, "riccati_rel_tol", w, n.riccati_rel_tol, number);
        read(nu, "riccati_abs_tol", w, n.riccati_abs_tol, number);
        read(nu, "x_grid", w, n.x_grid, grid_field);
        read(nu, "u_grid", w, n.u_grid, grid_field);
        if (!(n.xmax > 0.0)) fail("numeric.xmax", "must be positive");
        if (n.stehfest_order < 2 || n.stehfest_order > 30 || n.stehfest_order % 2 != 0)
            fail("numeric.stehfest_order", "must be even, 2..30");
        if (n.talbot_nodes < 4) fail("numeric.talbot_nodes", "must be >= 4");
        if (n.scale_nodes < 4) fail("numeric.scale_nodes", "must be >= 4");
        for (double t : {n.quad_rel_tol, n.riccati_rel_tol, n.riccati_abs_tol})
            if (!(t > 0.0 && t < 1.0)) fail(w, "tolerances must lie in (0, 1)");
    }

    if (auto it = j.find("simulation"); it != j.end() && !it->is_null()) {
        const json& si = *it;
        const std::string w = "simulation";
        only_keys(si, w, {"x0", "horizon", "dt", "paths", "seed", "cutoff", "u"});
        SimulationSection s;
        read(si, "x0", w, s.x0, number);
        read(si, "horizon", w, s.horizon, number);
        read(si, "dt", w, s.dt, number);
        read(si, "paths", w, s.paths, count);
        read(si, "seed", w, s.seed, count);
        read(si, "cutoff", w, s.cutoff, number);
        read(si, "u", w, s.u, numbers);
        cfg.simulation = s;
    }
    // mechanisms validate themselves
    (void)cfg.immigration();
    (void)cfg.branching();
    return cfg;
}

ModelConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const ModelConfig& cfg) {
    json j;
    j["immigration"] = {{"b", cfg.b}, {"m", cfg.m ? measure_json(*cfg.m) : json(nullptr)}};
    j["branching"] = {{"alpha", cfg.alpha}, {"beta", cfg.beta}, {"mu", cfg.mu ? measure_json(*cfg.mu) : json(nullptr)}};
    const auto& n = cfg.numeric;
    j["numeric"] = {{"xmax", n.xmax},
                    {"scale_nodes", n.scale_nodes},
                    {"stehfest_order", n.stehfest_order},
                    {"talbot_nodes", n.talbot_nodes},
                    {"quad_rel_tol", n.quad_rel_tol},
                    {"riccati_rel_tol", n.riccati_rel_tol},
                    {"riccati_abs_tol", n.riccati_abs_tol},
                    {"x_grid", n.x_grid.to_string()},
                    {"u_grid", n.u_grid.to_string()}};
    if (cfg.simulation) {
        const auto& s = *cfg.simulation;
        j["simulation"] = {{"x0", s.x0},     {"horizon", s.horizon}, {"dt", s.dt}, {"paths", s.paths},
                           {"seed", s.seed}, {"cutoff", s.cutoff},   {"u", s.u}};
    }
    return j;
}

}  // namespace cbi::cli
