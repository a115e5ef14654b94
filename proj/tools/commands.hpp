#ifndef METABAMDP_TOOLS_COMMANDS_HPP
#define METABAMDP_TOOLS_COMMANDS_HPP

#include "metabamdp/meta_solver.hpp"
#include "metabamdp/policy_cache.hpp"
#include "metabamdp/run_config.hpp"

#include <atomic>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace mbamdp::cli {

enum ExitCode { kSuccess = 0, kValidationFailure = 1, kConfigError = 2, kResourceCap = 3, kInterrupted = 130 };

struct SolvedPolicy {
    Rational cost;
    MetaPolicy policy;
    MetaValueTable values;
};

struct SolveStats {
    std::size_t solved = 0;
    std::size_t cache_hits = 0;
    std::size_t corrupt = 0;
};

/// Loads or solves one policy per configured cost, in cost order.
std::vector<SolvedPolicy> obtain_policies(const RunConfig& config, SolveStats& stats, std::ostream& log);

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Set asynchronously (SIGINT); the sweep stops after the current batch.
std::atomic<bool>& interrupt_flag();

int cmd_sweep(const RunConfig& config, bool resume, std::ostream& out, std::ostream& log);
int cmd_sensitivity(const RunConfig& config, std::ostream& out, std::ostream& log);

struct FitRequest {
    std::string source = "policy"; ///< "policy" or "heuristic"
    double beta = 30.0;
    double omega = 3.0;
};
int cmd_fit(const RunConfig& config, const FitRequest& request, std::ostream& out, std::ostream& log);

struct ValidateRequest {
    std::string scope = "all"; ///< theorems | oracle | approx | all
    PruningFault fault = PruningFault::none;
    int oracle_horizon = 2;
    double oracle_budget_seconds = 120.0;
};
int cmd_validate(const RunConfig& config, const ValidateRequest& request, std::ostream& out, std::ostream& log);

/// Writes resolved_config.json into the output directory.
void write_config_snapshot(const RunConfig& config);

} // namespace mbamdp::cli

#endif
