#ifndef METABAMDP_PLAN_GRAPH_HPP
#define METABAMDP_PLAN_GRAPH_HPP

#include "metabamdp/belief.hpp"
#include "metabamdp/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mbamdp {

/// One node-expansion computation: the action node for `arm` under belief `node`
/// together with its win and loss children.
struct Expansion {
    Belief node;
    std::uint8_t arm = 0;

    friend auto operator<=>(const Expansion&, const Expansion&) = default;
    friend bool operator==(const Expansion&, const Expansion&) = default;
};

std::string to_string(const Expansion& e);
/// Inverse of to_string: "a.b,a.b:arm".
Expansion parse_expansion(std::string_view text);

/// A rooted sub-DAG of the belief-action graph: the agent's planning state.
/// Nodes are identified by their belief, so different expansion orders that
/// reach the same count tuple share a node. Immutable value type.
class PlanningBelief {
public:
    PlanningBelief() = default;

    static PlanningBelief singleton(const Belief& root);

    const Belief& root() const { return root_; }
    /// Sorted ascending.
    std::span<const Expansion> expansions() const { return expansions_; }
    std::size_t expansion_count() const { return expansions_.size(); }
    /// Two edges per expansion, for any number of arms.
    std::size_t edge_count() const { return 2 * expansions_.size(); }

    bool is_expanded(const Belief& node, std::size_t arm) const;
    /// Root, or a win/loss child of some expanded pair.
    bool contains_node(const Belief& node) const;
    /// Root followed by expanded children, without duplicates.
    std::vector<Belief> nodes() const;

    friend bool operator==(const PlanningBelief&, const PlanningBelief&) = default;

private:
    friend PlanningBelief expand(const PlanningBelief&, const Belief&, std::size_t, int);
    friend PlanningBelief restrict_reachable(const PlanningBelief&, const Belief&);

    Belief root_;
    std::vector<Expansion> expansions_;
};

/// Adds (node, arm). Throws std::invalid_argument on a duplicate expansion, a
/// node outside the plan, or a node with no pulls left before `horizon`.
PlanningBelief expand(const PlanningBelief& plan, const Belief& node, std::size_t arm, int horizon);
inline PlanningBelief expand(const PlanningBelief& plan, const Expansion& e, int horizon)
{
    return expand(plan, e.node, e.arm, horizon);
}

/// The part of `plan` reachable from `new_root`, which must be the root itself or
/// a win/loss child of the root.
PlanningBelief restrict_reachable(const PlanningBelief& plan, const Belief& new_root);

/// Subjective values obtained by backward induction on the plan with
/// knowledge-gradient leaf values U(b) = max_i mean_i(b) * (T - t(b)).
struct SubjectiveValues {
    std::unordered_map<Belief, Rational, BeliefHash> node_values;
    std::vector<Rational> root_q;

    const Rational& root_value() const;
};

SubjectiveValues subjective_values(const PlanningBelief& plan, int horizon);

/// Root action values only; same arithmetic as subjective_values without the map.
std::vector<Rational> root_q_values(const PlanningBelief& plan, int horizon);

/// Knowledge-gradient leaf value of a belief.
Rational terminal_heuristic(const Belief& b, int horizon);

/// Bitmask of arms attaining the maximal root Q.
std::uint32_t argmax_arms(const std::vector<Rational>& q);

/// Lexicographically smallest arm among the maximisers of root Q.
std::size_t terminal_action(const PlanningBelief& plan, int horizon);
/// Full argmax set at the root.
std::uint32_t terminal_actions(const PlanningBelief& plan, int horizon);

/// Every legal (node, arm) expansion of the plan, sorted.
std::vector<Expansion> frontier(const PlanningBelief& plan, int horizon);

/// Order-independent canonical serialization: "root|node:arm;node:arm;...".
/// Equal strings iff equal (root, expansion set).
std::string canonical_key(const PlanningBelief& plan);

/// Checks the closure and horizon invariants. Returns an empty string when valid,
/// otherwise a description of the first violation.
std::string audit(const PlanningBelief& plan, int horizon);

} // namespace mbamdp

#endif
