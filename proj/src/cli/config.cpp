#include "multierg/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "multierg/errors.hpp"

namespace multierg {

namespace {

using nlohmann::json;

const json& block(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const json& b = doc.at(key);
    if (!b.is_object()) throw ConfigError(std::string("block '") + key + "' must be an object");
    return b;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

RawSystem raw_system(const json& doc) {
    RawSystem raw;
    if (!doc.contains("q")) throw ConfigError("missing 'q'");
    if (!doc.contains("phi")) throw ConfigError("missing 'phi'");
    if (doc.contains("m")) raw.m = doc.at("m").get<int>();
    raw.q = doc.at("q").get<int>();
    raw.ell = get_or<int>(doc, "ell", 2);
    if (doc.contains("intervals")) raw.intervals = doc.at("intervals").get<std::vector<std::array<double, 2>>>();
    if (doc.contains("lambdas")) raw.lambdas = doc.at("lambdas").get<std::vector<double>>();
    raw.phi = doc.at("phi").get<std::vector<std::vector<double>>>();
    return raw;
}

OracleMode parse_mode(const std::string& s) {
    if (s == "dp") return OracleMode::Dp;
    if (s == "exhaustive") return OracleMode::Exhaustive;
    throw ConfigError("oracle.mode must be 'dp' or 'exhaustive'");
}

} // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc,
                   {"m", "q", "ell", "intervals", "lambdas", "phi", "solver", "spectrum", "montecarlo", "oracle", "grid",
                    "output"},
                   "config");
    RunConfig cfg;
    try {
        cfg.system = validate_spec(raw_system(doc));

        const json& solver = block(doc, "solver");
        reject_unknown(solver, {"tol", "max_iter"}, "solver");
        cfg.solver.tol = get_or(solver, "tol", cfg.solver.tol);
        cfg.solver.max_iter = get_or(solver, "max_iter", cfg.solver.max_iter);

        const json& spectrum = block(doc, "spectrum");
        reject_unknown(spectrum, {"alpha_min", "alpha_max", "steps"}, "spectrum");
        if (spectrum.contains("alpha_min")) cfg.spectrum.alpha_min = spectrum.at("alpha_min").get<double>();
        if (spectrum.contains("alpha_max")) cfg.spectrum.alpha_max = spectrum.at("alpha_max").get<double>();
        cfg.spectrum.steps = get_or(spectrum, "steps", cfg.spectrum.steps);

        const json& mc = block(doc, "montecarlo");
        reject_unknown(mc, {"n", "samples", "seed", "threads"}, "montecarlo");
        cfg.montecarlo.n = get_or<std::size_t>(mc, "n", cfg.montecarlo.n);
        cfg.montecarlo.samples = get_or<std::size_t>(mc, "samples", cfg.montecarlo.samples);
        cfg.montecarlo.seed = get_or<std::uint64_t>(mc, "seed", cfg.montecarlo.seed);
        cfg.montecarlo.threads = get_or<unsigned>(mc, "threads", cfg.montecarlo.threads);

        const json& oracle = block(doc, "oracle");
        reject_unknown(oracle, {"depth", "eps", "mode"}, "oracle");
        cfg.oracle.depth = get_or<std::size_t>(oracle, "depth", cfg.oracle.depth);
        cfg.oracle.eps = get_or(oracle, "eps", cfg.oracle.eps);
        if (oracle.contains("mode")) cfg.oracle.mode = parse_mode(oracle.at("mode").get<std::string>());

        const json& grid = block(doc, "grid");
        reject_unknown(grid, {"s_min", "s_max", "r_min", "r_max", "points"}, "grid");
        cfg.grid.s_min = get_or(grid, "s_min", cfg.grid.s_min);
        cfg.grid.s_max = get_or(grid, "s_max", cfg.grid.s_max);
        cfg.grid.r_min = get_or(grid, "r_min", cfg.grid.r_min);
        cfg.grid.r_max = get_or(grid, "r_max", cfg.grid.r_max);
        cfg.grid.points = get_or(grid, "points", cfg.grid.points);

        cfg.output = get_or<std::string>(doc, "output", cfg.output);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
    if (cfg.spectrum.steps < 1) throw ConfigError("spectrum.steps must be at least 1");
    const double amin = cfg.spectrum.alpha_min.value_or(cfg.system.phi_min());
    const double amax = cfg.spectrum.alpha_max.value_or(cfg.system.phi_max());
    if (!(amin <= amax)) throw ConfigError("spectrum.alpha_min must not exceed alpha_max");
    if (cfg.montecarlo.n < static_cast<std::size_t>(cfg.system.q)) throw ConfigError("montecarlo.n must be at least q");
    if (cfg.montecarlo.samples < 1) throw ConfigError("montecarlo.samples must be at least 1");
    if (cfg.montecarlo.threads < 1) throw ConfigError("montecarlo.threads must be at least 1");
    if (cfg.oracle.depth < static_cast<std::size_t>(cfg.system.q)) throw ConfigError("oracle.depth must be at least q");
    if (!(cfg.oracle.eps > 0.0)) throw ConfigError("oracle.eps must be positive");
    if (cfg.grid.points < 1 || !(cfg.grid.s_min <= cfg.grid.s_max) || !(cfg.grid.r_min <= cfg.grid.r_max)) {
        throw ConfigError("grid block is inconsistent");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json resolved_json(const RunConfig& cfg) {
    const SystemSpec& s = cfg.system;
    json doc;
    doc["m"] = s.m;
    doc["q"] = s.q;
    doc["ell"] = s.ell;
    json intervals = json::array();
    for (const auto& iv : s.intervals) intervals.push_back({iv.lo, iv.hi});
    doc["intervals"] = intervals;
    doc["lambdas"] = s.lambdas;
    json phi = json::array();
    for (int i = 0; i < s.m; ++i) {
        json row = json::array();
        for (int j = 0; j < s.m; ++j) row.push_back(s.phi_at(i, j));
        phi.push_back(row);
    }
    doc["phi"] = phi;
    doc["solver"] = {{"tol", cfg.solver.tol}, {"max_iter", cfg.solver.max_iter}};
    doc["spectrum"] = {{"alpha_min", cfg.spectrum.alpha_min.value_or(s.phi_min())},
                       {"alpha_max", cfg.spectrum.alpha_max.value_or(s.phi_max())},
                       {"steps", cfg.spectrum.steps}};
    doc["montecarlo"] = {{"n", cfg.montecarlo.n},
                         {"samples", cfg.montecarlo.samples},
                         {"seed", cfg.montecarlo.seed},
                         {"threads", cfg.montecarlo.threads}};
    doc["oracle"] = {{"depth", cfg.oracle.depth}, {"eps", cfg.oracle.eps}, {"mode", std::string(to_string(cfg.oracle.mode))}};
    doc["grid"] = {{"s_min", cfg.grid.s_min},
                   {"s_max", cfg.grid.s_max},
                   {"r_min", cfg.grid.r_min},
                   {"r_max", cfg.grid.r_max},
                   {"points", cfg.grid.points}};
    doc["output"] = cfg.output;
    return doc;
}

std::string config_hash(const RunConfig& cfg) {
    json doc = resolved_json(cfg);
    doc["montecarlo"].erase("threads");
    doc.erase("output");
    const std::string text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace multierg
