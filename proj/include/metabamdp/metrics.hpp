#ifndef METABAMDP_METRICS_HPP
#define METABAMDP_METRICS_HPP

#include "metabamdp/bandit.hpp"
#include "metabamdp/meta_solver.hpp"
#include "metabamdp/policy_eval.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mbamdp {

struct TrajectoryStep {
    int t = 0;
    std::uint8_t arm = 0;
    std::uint8_t reward = 0;
    std::vector<Expansion> computations; ///< expansions made before this pull
};

struct Trajectory {
    std::size_t arms = 0;
    std::vector<TrajectoryStep> steps;

    int computation_count() const;
    /// Belief held before step `i` (all-zero for i == 0).
    Belief belief_before(std::size_t i) const;
};

/// Seeded generator derived from (master seed, task index) so results do not
/// depend on scheduling.
std::mt19937_64 make_generator(std::uint64_t master_seed, std::uint64_t task_index);

/// Runs one episode from the initial meta-state. Ties among terminal actions are
/// broken uniformly at random. Throws MissingPolicyState on an undefined state.
Trajectory simulate_episode(const MetaPolicy& policy, const Environment& env, std::mt19937_64& rng);
Trajectory simulate_episode(const MetaPolicy& policy, const Environment& env, std::uint64_t seed);
/// Same, reusing a walker cache across episodes.
Trajectory simulate_episode(PolicyWalker& walker, const Environment& env, std::mt19937_64& rng);

/// (V - V_g) / (V_star - V_g). Throws std::domain_error if V_star <= V_g.
double normalized_reward(double value, double greedy, double optimal);

/// Pulling `arm` at `b` is exploratory if its posterior mean is below the best,
/// or, on a tie of means, if it has strictly fewer pulls than a tied alternative.
bool exploratory_flag(const Belief& b, std::size_t arm);

/// Shannon entropy (bits) of the arm histogram of one episode.
double action_entropy(const Trajectory& trajectory);
double action_entropy(std::span<const int> histogram);
/// Average entropy across a batch.
double mean_action_entropy(std::span<const Trajectory> batch);

/// Per-cost result of the most-computed-environment scan.
struct MostComputed {
    std::optional<double> p; ///< nullopt when the policy never computes on the grid
    double expected_computations = 0.0;
};

/// For each policy, the symmetric environment p on `grid` with the most expected
/// expansions (exact forward DP). Ties go to the smallest p.
std::vector<MostComputed> most_computed_env(std::span<const MetaPolicy> policies, std::span<const double> grid);

std::vector<double> default_symmetric_grid(); // 0, 0.05, ..., 1

/// Integral over c of (dX/dc)^2 on a uniform grid: central differences inside,
/// one-sided at the ends, trapezoidal rule. Needs at least 3 points.
double sensitivity(std::span<const double> costs, std::span<const double> values);

struct MetricsRecord {
    std::size_t arms = 0;
    int horizon = 0;
    double cost = 0.0;
    std::vector<double> env_probs; ///< empty for the uniform mixture
    std::string env_kind;          ///< "explicit" or "uniform-mixture"
    std::optional<double> value;
    std::optional<double> greedy_value;
    std::optional<double> optimal_value;
    std::optional<double> normalized;
    std::optional<double> n_c_mean;
    std::optional<double> tau_c_mean_norm;
    std::optional<double> tau_explore_mean;
    std::optional<double> entropy_bits;
    std::optional<double> omega;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> episodes;
};

inline constexpr const char* kMetricsHeader =
    "N,T,c,env_p1,env_p2,env_kind,V,V_g,V_star,V_N,n_c_mean,tau_c_mean_norm,tau_explore_mean,H_pi_bits,omega,seed,episodes";

/// 17 significant digits; empty string for nullopt.
std::string format_field(const std::optional<double>& v);
std::string to_csv_row(const MetricsRecord& r);
void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> rows);

/// Fills the exact-DP observables of a record from policy and baseline statistics.
template <class Scalar>
void fill_observables(MetricsRecord& record, const PolicyStats<Scalar>& policy, const PolicyStats<Scalar>& greedy,
                      const PolicyStats<Scalar>& optimal);

} // namespace mbamdp

#endif
