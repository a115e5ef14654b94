#ifndef METABAMDP_POLICY_EVAL_HPP
#define METABAMDP_POLICY_EVAL_HPP

#include "metabamdp/bandit.hpp"
#include "metabamdp/meta_solver.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbamdp {

/// What a meta-policy does between two pulls, starting from an entry state.
struct StepResolution {
    std::vector<Expansion> expanded;
    std::uint32_t arms = 0; ///< argmax set the pull is drawn from (uniformly)
    MetaState final_state;

    int computations() const { return static_cast<int>(expanded.size()); }
};

/// Follows a MetaPolicy from entry states, caching per entry key.
class PolicyWalker {
public:
    explicit PolicyWalker(const MetaPolicy& policy) : policy_(&policy) {}

    const StepResolution& resolve(const MetaState& entry);
    MetaState successor(const StepResolution& step, std::size_t arm, bool won) const;

    std::size_t arms() const { return policy_->arms; }
    int horizon() const { return policy_->horizon; }

private:
    const MetaPolicy* policy_;
    std::unordered_map<std::string, std::unique_ptr<StepResolution>> cache_;
};

MetaState initial_meta_state(std::size_t arms, int horizon);

/// Expectations of the physical process induced by a policy. Scalar is double
/// for explicit environments and Rational for the exact uniform mixture.
template <class Scalar>
struct PolicyStats {
    Scalar reward{};               ///< expected external reward, costs excluded
    Scalar computations{};         ///< expected number of expansions
    Scalar computation_time_sum{}; ///< E[sum over expansions of the step t they precede]
    Scalar any_computation{};      ///< P(at least one expansion in the episode)
    Scalar exploratory{};          ///< expected number of exploratory pulls
    Scalar exploratory_time_sum{}; ///< E[sum of t over exploratory pulls]
    double entropy_bits = 0.0;     ///< E[entropy of the per-episode arm histogram]
    /// action_distribution[t][arm] = P(pull `arm` at step t).
    std::vector<std::vector<Scalar>> action_distribution;
};

/// nullopt probabilities mean the uniform mixture over environments, i.e. the
/// Bayes expectation with posterior-predictive transitions.
struct EnvModel {
    std::optional<Environment> env;

    static EnvModel uniform_mixture() { return {}; }
    static EnvModel of(Environment e) { return {std::move(e)}; }
    bool is_mixture() const { return !env.has_value(); }
};

enum class Baseline { greedy, bayes_optimal };

PolicyStats<double> policy_value_in_env(const MetaPolicy& policy, const Environment& env);
PolicyStats<Rational> policy_value_bayes(const MetaPolicy& policy);

/// Belief-only baselines: greedy on posterior means, or argmax of Q* (needs qstar).
/// Ties are averaged uniformly in both.
PolicyStats<double> baseline_value_in_env(Baseline which, std::size_t arms, int horizon,
                                          const Environment& env, const QStarTable* qstar = nullptr);
PolicyStats<Rational> baseline_value_bayes(Baseline which, std::size_t arms, int horizon,
                                           const QStarTable* qstar = nullptr);

/// Conditional action distribution at every history of positive probability.
/// History strings list "<arm><W|L>" per pull, e.g. "0W1L".
using Behavior = std::map<std::string, std::vector<Rational>>;
Behavior induced_behavior(const MetaPolicy& policy);

/// Every entry state reachable from the initial state under the policy, in
/// breadth-first order.
std::vector<MetaState> reachable_entry_states(const MetaPolicy& policy);

} // namespace mbamdp

#endif
