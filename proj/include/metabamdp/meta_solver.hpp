#ifndef METABAMDP_META_SOLVER_HPP
#define METABAMDP_META_SOLVER_HPP

#include "metabamdp/bandit.hpp"
#include "metabamdp/plan_graph.hpp"
#include "metabamdp/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbamdp {

/// Bounds on planning. All three apply together.
struct ApproxParams {
    int k = 2;   ///< max edges in any plan (two per expansion)
    int k_c = 1; ///< max expansions between consecutive pulls
    int d = 3;   ///< max depth, in pulls below the current root, of an expanded node

    void validate() const;
    std::string to_string() const; // "k=2,kc=1,d=3"
    friend bool operator==(const ApproxParams&, const ApproxParams&) = default;
};

/// Node of the meta-graph. Besides the plan (whose root is the physical belief)
/// it records how many expansions were made since the last pull and the argmax
/// arm set that held when that computation sequence started; both are needed to
/// enforce k_c and the minimal mind-changer structure.
struct MetaState {
    PlanningBelief plan;
    int computations = 0;
    std::uint32_t reference = 0;

    const Belief& belief() const { return plan.root(); }
    int t() const { return plan.root().elapsed(); }
};

/// State reached right after a pull (or at the start of the task).
MetaState entry_state(PlanningBelief plan, int horizon);

std::string meta_state_key(const MetaState& y);

struct MetaAction {
    enum class Kind { terminate, expand };
    Kind kind = Kind::terminate;
    Expansion target{};

    static MetaAction terminate() { return {}; }
    static MetaAction expand(const Expansion& e) { return {Kind::expand, e}; }
    bool is_terminate() const { return kind == Kind::terminate; }
    friend bool operator==(const MetaAction&, const MetaAction&) = default;
};

std::string to_string(const MetaAction& a);

/// Greedy-root-value dominance: mean_g * tau >= Q*(b, j) for every arm j outside
/// the posterior-mean argmax set.
bool is_m_belief(const Belief& b, const QStarTable& qstar);
std::vector<Belief> m_beliefs(const QStarTable& qstar);

/// True when no enlargement of the plan can change the argmax arm set at the
/// root: every arm outside the set has Q* strictly below the current maximum and,
/// if the set holds several arms, none of them can still rise above it.
bool is_termination_forced(const PlanningBelief& plan, const QStarTable& qstar);
inline bool is_termination_forced(const MetaState& y, const QStarTable& qstar)
{
    return is_termination_forced(y.plan, qstar);
}

/// Whether `e` may be added to `plan` after `computations` expansions this step.
bool within_bounds(const PlanningBelief& plan, const Expansion& e, int computations,
                   const ApproxParams& params);

struct ComputationalTrajectory {
    std::vector<Expansion> sequence;
    PlanningBelief plan;
};

/// Depth-first enumeration of the expansion sequences from `y` that first change
/// the root argmax set (relative to y.reference) at their last step, within the
/// bounds. Non-greedy root arms are never expanded at M-beliefs, and a path is
/// abandoned once termination is forced on it.
std::vector<ComputationalTrajectory> search_computational_trajectories(
    const MetaState& y, const QStarTable& qstar, const ApproxParams& params);

using NodeId = std::uint32_t;

struct TerminalBranch {
    std::uint8_t arm = 0;
    NodeId win = 0;
    NodeId loss = 0;
};

struct MetaNode {
    MetaState state;
    std::uint32_t actions = 0;
    bool may_terminate = false;
    std::vector<std::pair<Expansion, NodeId>> computations; // sorted by expansion
    std::vector<TerminalBranch> terminal;
};

/// Deliberately broken pruning, used as a negative control for the theorem walks.
enum class PruningFault {
    none,
    /// Accept any bounded expansion sequence and let every node terminate.
    keep_non_mind_changers,
};

struct BuildOptions {
    std::size_t node_cap = 5'000'000;
    bool allow_computation = true;
    PruningFault fault = PruningFault::none;
};

struct MetaGraph {
    std::size_t arms = 0;
    int horizon = 0;
    ApproxParams params;
    std::vector<MetaNode> nodes;
    std::unordered_map<std::string, NodeId> index;
    NodeId root = 0;

    std::optional<NodeId> find(const MetaState& y) const;
    std::size_t computational_edge_count() const;
    std::size_t terminal_edge_count() const;
};

MetaGraph build_pruned_meta_graph(std::size_t arms, int horizon, const QStarTable& qstar,
                                  const ApproxParams& params, const BuildOptions& options = {});

/// Deterministic policy over meta-state keys.
struct MetaPolicy {
    std::size_t arms = 0;
    int horizon = 0;
    Rational cost;
    ApproxParams params;
    std::unordered_map<std::string, MetaAction> actions;

    bool defines(const MetaState& y) const { return actions.count(meta_state_key(y)) != 0; }
    /// Throws MissingPolicyState.
    const MetaAction& at(const MetaState& y) const;
};

struct MetaValueTable {
    std::unordered_map<std::string, Rational> values;
    Rational root_value;
};

struct SolveOptions {
    /// Negative-control switch: break Terminate-versus-compute ties towards computing.
    bool prefer_computation_on_ties = false;
};

struct MetaSolution {
    MetaPolicy policy;
    MetaValueTable values;
    /// Per graph node: -1 for Terminate, else index into MetaNode::computations.
    std::vector<int> decisions;
};

/// Backward induction on the meta-graph with cost `cost` per expansion.
MetaSolution solve_meta(const MetaGraph& graph, const Rational& cost, const SolveOptions& options = {});

} // namespace mbamdp

#endif
