#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "multierg/oracle.hpp"
#include "multierg/system_model.hpp"

namespace multierg {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverBlock {
    double tol = 1e-13;
    int max_iter = 10000;
};

struct SpectrumBlock {
    std::optional<double> alpha_min; // defaults to min phi
    std::optional<double> alpha_max; // defaults to max phi
    int steps = 41;
};

struct MonteCarloBlock {
    std::size_t n = 100000;
    std::size_t samples = 200;
    std::uint64_t seed = 1;
    unsigned threads = 1; // not part of the experiment identity
};

struct OracleBlock {
    std::size_t depth = 14;
    double eps = 0.05;
    OracleMode mode = OracleMode::Dp;
};

struct GridBlock {
    double s_min = -3.0;
    double s_max = 3.0;
    double r_min = -3.0;
    double r_max = 3.0;
    int points = 9;
};

/// One experiment: the system (top-level m, q, ell, intervals, lambdas, phi)
/// plus solver / spectrum / montecarlo / oracle / grid blocks.
struct RunConfig {
    SystemSpec system;
    SolverBlock solver;
    SpectrumBlock spectrum;
    MonteCarloBlock montecarlo;
    OracleBlock oracle;
    GridBlock grid;
    std::string output = "out";
};

/// Validates every block before returning; SpecError for the system part,
/// ConfigError for everything else.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config including defaults, as recorded in run manifests.
nlohmann::json resolved_json(const RunConfig& cfg);

/// FNV-1a 64 over the compact dump of resolved_json without the thread count.
std::string config_hash(const RunConfig& cfg);

} // namespace multierg
