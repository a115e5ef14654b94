#ifndef METABAMDP_RUN_CONFIG_HPP
#define METABAMDP_RUN_CONFIG_HPP

#include "metabamdp/bandit.hpp"
#include "metabamdp/heuristic_fit.hpp"
#include "metabamdp/meta_solver.hpp"
#include "metabamdp/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbamdp {

/// Bad user input; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "lo:hi:count" with count >= 1 uniformly spaced exact values (lo only when
/// count == 1). Endpoints may be fractions or decimals.
std::vector<Rational> parse_cost_grid(const std::string& spec);
/// Comma-separated exact costs, e.g. "0,1/64,0.05".
std::vector<Rational> parse_cost_list(const std::string& spec);

enum class EnvKind { uniform_mixture, symmetric_grid, explicit_list };

struct EnvSpec {
    EnvKind kind = EnvKind::uniform_mixture;
    std::vector<Environment> environments; ///< explicit list, or the expanded symmetric grid

    std::string to_string() const;
};

/// "uniform", "symmetric" (p in 0:0.05:1 on every arm), "symmetric:<count>",
/// or explicit environments "0.5,0.5;0.2,0.8".
EnvSpec parse_env_spec(const std::string& spec, std::size_t arms);

struct RunConfig {
    std::size_t arms = 2;
    int horizon = 6;
    std::vector<Rational> costs{Rational(0)};
    std::string cost_spec = "0";
    std::string env_spec = "uniform";
    ApproxParams params;
    std::uint64_t episodes = 0;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::size_t workers = 1;
    std::string cache_dir = ".metabamdp-cache";
    bool fit = false;
    SignConvention sign = SignConvention::value_seeking;
    int max_horizon = 0; ///< 0 means the default for the arm count
    int sensitivity_grid = 21;

    int effective_max_horizon() const;
    /// Throws ConfigError.
    void validate() const;
    EnvSpec environments() const { return parse_env_spec(env_spec, arms); }
};

/// Overwrites fields present in a JSON object with kebab-case keys matching the
/// CLI flags ("arms", "horizon", "costs", "env", "k", "kc", "d", ...). Unknown
/// keys are rejected.
void apply_json_config(RunConfig& config, const std::string& json_text);

/// Snapshot of every resolved field, written next to the outputs.
std::string resolved_config_json(const RunConfig& config);

} // namespace mbamdp

#endif
