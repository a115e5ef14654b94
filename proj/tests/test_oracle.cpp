#include <doctest.h>

#include "metabamdp/bandit.hpp"
#include "metabamdp/errors.hpp"
#include "metabamdp/meta_solver.hpp"
#include "metabamdp/oracle.hpp"
#include "metabamdp/policy_eval.hpp"

#include <algorithm>

using namespace mbamdp;

TEST_CASE("brute-force meta-solve small values")
{
    for (const Rational& c : {Rational(0), Rational(1, 4), Rational(10)}) {
        CHECK(brute_force_meta_solve(2, 1, c).value == Rational(1, 2));
    }
    const auto free = brute_force_meta_solve(2, 2, Rational(0));
    CHECK(free.value == Rational(13, 12));
    CHECK(free.plans_visited > 0);
    CHECK(brute_force_meta_solve(2, 2, Rational(10)).value == Rational(13, 12));
}

TEST_CASE("brute-force policy is walkable")
{
    const auto bf = brute_force_meta_solve(2, 2, Rational(1, 64));
    const auto stats = policy_value_bayes(bf.policy);
    CHECK(stats.reward - Rational(1, 64) * stats.computations == bf.value);
}

TEST_CASE("brute force agrees with the pruned solver")
{
    for (int horizon : {1, 2}) {
        const auto table = solve_bamdp_exact(2, horizon);
        const auto graph = build_pruned_meta_graph(2, horizon, table, ApproxParams{16, 3, 3});
        for (const Rational& c : {Rational(0), Rational(1, 64), Rational(1, 16), Rational(1, 4), Rational(1),
                                 Rational(10)}) {
            const auto pruned = solve_meta(graph, c);
            const auto bf = brute_force_meta_solve(2, horizon, c);
            CHECK(pruned.values.root_value == bf.value);
            CHECK(induced_behavior(pruned.policy) == induced_behavior(bf.policy));
        }
    }
}

TEST_CASE("oracle limits")
{
    CHECK_THROWS_AS(brute_force_meta_solve(2, 3, Rational(0)), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_meta_solve(3, 2, Rational(0)), std::invalid_argument);
    OracleLimits tight;
    tight.plan_cap = 5;
    CHECK_THROWS_AS(brute_force_meta_solve(2, 2, Rational(0), tight), ResourceError);
    OracleLimits quick;
    quick.max_horizon = 3;
    quick.time_budget_seconds = 0.05;
    CHECK_THROWS_AS(brute_force_meta_solve(2, 3, Rational(0), quick), ResourceError);
}

TEST_CASE("mind changers of a symmetric root are symmetric")
{
    const auto y = initial_meta_state(2, 4);
    const auto found = brute_force_minimal_mind_changers(y, 4, ApproxParams{8, 2, 3});
    CHECK_FALSE(found.empty());
    for (const auto& seq : found) {
        std::vector<Expansion> mirrored;
        for (const auto& e : seq) {
            const Belief m{{e.node.successes(1), e.node.failures(1)}, {e.node.successes(0), e.node.failures(0)}};
            mirrored.push_back({m, static_cast<std::uint8_t>(1 - e.arm)});
        }
        CHECK(std::find(found.begin(), found.end(), mirrored) != found.end());
    }
}

TEST_CASE("unmemoized values")
{
    CHECK(unmemoized_subjective_value(PlanningBelief::singleton(Belief::zero(2)), 10) == 5);
    const Belief zero = Belief::zero(2);
    const auto plan = expand(PlanningBelief::singleton(zero), zero, 0, 2);
    // pull arm 0, then the better posterior mean: 1/2 (1 + 2/3) + 1/2 (1/2)
    CHECK(unmemoized_root_q(plan, 2)[0] == Rational(13, 12));
    CHECK(unmemoized_root_q(plan, 2)[1] == 1);
}
