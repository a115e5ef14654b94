#ifndef METABAMDP_ORACLE_HPP
#define METABAMDP_ORACLE_HPP

// Brute-force references for the pruned solver. Small instances only.

#include "metabamdp/meta_solver.hpp"
#include "metabamdp/plan_graph.hpp"
#include "metabamdp/rational.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mbamdp {

struct OracleLimits {
    int max_horizon = 2;            ///< raise to 3 explicitly
    std::size_t plan_cap = 2'000'000;
    std::size_t sequence_cap = 1'000'000;
    double time_budget_seconds = 600.0;
};

struct BruteForceSolution {
    Rational value;
    /// Decisions replayed over the solver's meta-state keys, so the result can
    /// be walked and evaluated like any MetaPolicy.
    MetaPolicy policy;
    std::size_t plans_visited = 0;
};

/// Backward induction over every planning belief reachable by expansions and
/// pulls, with no bounds and no theorem-based pruning. Terminate averages over
/// the root argmax set; ties go to Terminate, then the first expansion.
/// Throws std::invalid_argument above the horizon cap and ResourceError when the
/// plan cap or time budget is exceeded.
BruteForceSolution brute_force_meta_solve(std::size_t arms, int horizon, const Rational& cost,
                                          const OracleLimits& limits = {});

/// Every bounded expansion sequence from y whose last step (and no earlier one)
/// changes the root argmax set away from y.reference. Bounds are re-implemented
/// here rather than borrowed from the solver.
std::vector<std::vector<Expansion>> brute_force_minimal_mind_changers(const MetaState& y, int horizon,
                                                                      const ApproxParams& bounds,
                                                                      const OracleLimits& limits = {});

/// Plain tree recursion over the plan: no node merging, no memo.
Rational unmemoized_subjective_value(const PlanningBelief& plan, int horizon);
std::vector<Rational> unmemoized_root_q(const PlanningBelief& plan, int horizon);

} // namespace mbamdp

#endif
