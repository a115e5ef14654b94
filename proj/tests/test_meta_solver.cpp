#include <doctest.h>

#include "metabamdp/bandit.hpp"
#include "metabamdp/errors.hpp"
#include "metabamdp/meta_solver.hpp"
#include "metabamdp/oracle.hpp"
#include "metabamdp/policy_eval.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>

using namespace mbamdp;
namespace ts = testing_support;

namespace {

Belief swapped(const Belief& b)
{
    return Belief{{b.successes(1), b.failures(1)}, {b.successes(0), b.failures(0)}};
}

std::set<std::vector<Expansion>> mirror(const std::vector<ComputationalTrajectory>& found)
{
    std::set<std::vector<Expansion>> out;
    for (const auto& t : found) {
        std::vector<Expansion> seq;
        for (const auto& e : t.sequence) seq.push_back({swapped(e.node), static_cast<std::uint8_t>(1 - e.arm)});
        out.insert(seq);
    }
    return out;
}

std::set<std::vector<Expansion>> as_set(const std::vector<ComputationalTrajectory>& found)
{
    std::set<std::vector<Expansion>> out;
    for (const auto& t : found) out.insert(t.sequence);
    return out;
}

} // namespace

TEST_CASE("ApproxParams validation")
{
    CHECK_NOTHROW(ApproxParams{}.validate());
    CHECK_THROWS_AS((ApproxParams{3, 1, 3}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ApproxParams{0, 1, 3}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ApproxParams{2, 0, 3}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ApproxParams{2, 1, 0}.validate()), std::invalid_argument);
    CHECK(ApproxParams{}.to_string() == "k=2,kc=1,d=3");
}

TEST_CASE("M-beliefs")
{
    const int horizon = 6;
    const auto table = solve_bamdp_exact(2, horizon);
    for (const auto& b : enumerate_beliefs(2, horizon - 1)) {
        if (b.elapsed() == horizon - 1) CHECK(is_m_belief(b, table));
        // exact definition, written out again
        const Rational g = b.mean(lowest_arm(b.greedy_arms())) * (horizon - b.elapsed());
        bool expect = true;
        for (std::size_t j = 0; j < 2; ++j) {
            if (!has_arm(b.greedy_arms(), j) && table.q(b, j) > g) expect = false;
        }
        CHECK(is_m_belief(b, table) == expect);
    }
    // symmetric root: both arms greedy, nothing to compare against
    CHECK(is_m_belief(Belief::zero(2), table));
    const Belief lead{{5, 0}, {0, 1}};
    for (int tau = 1; tau <= 3; ++tau) {
        const auto q = solve_bamdp_exact(2, lead.elapsed() + tau);
        CHECK(is_m_belief(lead, q));
    }
    const auto all = m_beliefs(table);
    CHECK(std::all_of(all.begin(), all.end(), [&](const Belief& b) { return is_m_belief(b, table); }));
}

TEST_CASE("forced termination")
{
    const int horizon = 6;
    const auto table = solve_bamdp_exact(2, horizon);
    for (const auto& b : enumerate_beliefs(2, horizon)) {
        if (b.elapsed() >= horizon - 1) CHECK(is_termination_forced(PlanningBelief::singleton(b), table));
    }
    std::mt19937_64 rng(41);
    for (int i = 0; i < 40; ++i) {
        const auto root = ts::random_belief(2, static_cast<int>(rng() % 4), rng);
        CHECK(is_termination_forced(ts::full_plan(root, horizon), table));
    }
    // at the empty belief both arms tie, and Q* cannot exceed the shared value
    const auto zero = PlanningBelief::singleton(Belief::zero(2));
    const auto q = table.q(Belief::zero(2));
    CHECK(is_termination_forced(zero, table) == (q[0] <= 3 && q[1] <= 3));
}

TEST_CASE("within_bounds")
{
    const Belief zero = Belief::zero(2);
    const auto single = PlanningBelief::singleton(zero);
    const ApproxParams p{4, 2, 1};
    CHECK(within_bounds(single, {zero, 0}, 0, p));
    CHECK_FALSE(within_bounds(single, {zero, 0}, 2, p));
    CHECK_FALSE(within_bounds(single, {zero.win(0), 0}, 0, p));
    const auto two = expand(expand(single, zero, 0, 4), zero, 1, 4);
    CHECK_FALSE(within_bounds(two, {zero.win(0), 0}, 0, ApproxParams{4, 2, 3}));
}

TEST_CASE("search at the last step returns nothing")
{
    const auto table = solve_bamdp_exact(2, 4);
    const Belief b{{1, 1}, {0, 1}};
    const auto y = entry_state(PlanningBelief::singleton(b), 4);
    CHECK(search_computational_trajectories(y, table, ApproxParams{16, 3, 3}).empty());
    CHECK(brute_force_minimal_mind_changers(y, 4, ApproxParams{16, 3, 3}).empty());
}

TEST_CASE("search output is symmetric at the empty belief")
{
    for (int horizon = 3; horizon <= 6; ++horizon) {
        const auto table = solve_bamdp_exact(2, horizon);
        const auto y = initial_meta_state(2, horizon);
        const auto found = search_computational_trajectories(y, table, ApproxParams{16, 3, 3});
        CHECK(as_set(found) == mirror(found));
    }
}

TEST_CASE("search matches the exhaustive enumeration")
{
    const int horizon = 3;
    const auto table = solve_bamdp_exact(2, horizon);
    const ApproxParams bounds{16, 3, 3};
    const auto y = initial_meta_state(2, horizon);
    const auto found = search_computational_trajectories(y, table, bounds);
    const auto brute = brute_force_minimal_mind_changers(y, horizon, bounds);
    CHECK(as_set(found) == std::set<std::vector<Expansion>>(brute.begin(), brute.end()));
    for (const auto& t : found) {
        auto plan = y.plan;
        for (const auto& e : t.sequence) plan = expand(plan, e, horizon);
        CHECK(plan == t.plan);
        CHECK(terminal_actions(plan, horizon) != y.reference);
    }
}

TEST_CASE("meta-graph structure")
{
    const auto t1 = solve_bamdp_exact(2, 1);
    const auto g1 = build_pruned_meta_graph(2, 1, t1, ApproxParams{});
    CHECK(g1.computational_edge_count() == 0);
    // root plus the terminal layer
    CHECK(g1.nodes.size() == 5);

    const auto t6 = solve_bamdp_exact(2, 6);
    const auto g6 = build_pruned_meta_graph(2, 6, t6, ApproxParams{});
    // regression baseline recorded on the first run
    CHECK(g6.nodes.size() == 138);
    CHECK(g6.find(initial_meta_state(2, 6)).has_value());
    CHECK_THROWS_AS(build_pruned_meta_graph(2, 6, t6, ApproxParams{}, BuildOptions{10}), ResourceError);
    CHECK_THROWS_AS(build_pruned_meta_graph(2, 5, t6, ApproxParams{}), std::invalid_argument);
}

TEST_CASE("solve_meta small cases")
{
    for (const Rational& c : {Rational(0), Rational(1, 10), Rational(10)}) {
        const auto t1 = solve_bamdp_exact(2, 1);
        const auto s1 = solve_meta(build_pruned_meta_graph(2, 1, t1, ApproxParams{}), c);
        CHECK(s1.values.root_value == Rational(1, 2));
        CHECK(s1.policy.at(initial_meta_state(2, 1)).is_terminate());
    }
    const auto t2 = solve_bamdp_exact(2, 2);
    const auto g2 = build_pruned_meta_graph(2, 2, t2, ApproxParams{});
    CHECK(solve_meta(g2, Rational(0)).values.root_value == Rational(13, 12));
    const auto costly = solve_meta(g2, Rational(10));
    CHECK(costly.values.root_value == Rational(13, 12));
    CHECK(policy_value_bayes(costly.policy).computations == 0);
    CHECK_THROWS_AS(solve_meta(g2, Rational(-1)), std::invalid_argument);
}

TEST_CASE("endpoints of the cost range")
{
    for (int horizon = 1; horizon <= 6; ++horizon) {
        const auto table = solve_bamdp_exact(2, horizon);
        const auto graph = build_pruned_meta_graph(2, horizon, table, ApproxParams{});
        const auto free = policy_value_bayes(solve_meta(graph, Rational(0)).policy);
        CHECK(free.reward == table.value(Belief::zero(2)));
        const auto dear = policy_value_bayes(solve_meta(graph, Rational(horizon)).policy);
        CHECK(dear.reward == greedy_value(2, horizon));
        CHECK(dear.computations == 0);
    }
}

TEST_CASE("meta-value decreases with cost and dominates the no-compute value")
{
    const int horizon = 5;
    const auto table = solve_bamdp_exact(2, horizon);
    const auto graph = build_pruned_meta_graph(2, horizon, table, ApproxParams{});
    Rational previous = solve_meta(graph, Rational(0)).values.root_value;
    for (int i = 1; i <= 12; ++i) {
        const Rational c = make_rational(i, 40);
        const Rational v = solve_meta(graph, c).values.root_value;
        CHECK(v <= previous);
        CHECK(v >= greedy_value(2, horizon));
        previous = v;
    }
}

TEST_CASE("policies reject unknown states")
{
    const auto table = solve_bamdp_exact(2, 3);
    const auto solution = solve_meta(build_pruned_meta_graph(2, 3, table, ApproxParams{}), Rational(0));
    MetaState odd = initial_meta_state(2, 3);
    odd.computations = 7;
    CHECK_FALSE(solution.policy.defines(odd));
    CHECK_THROWS_AS(solution.policy.at(odd), MissingPolicyState);
    CHECK(to_string(MetaAction::terminate()) == "terminate");
    CHECK(to_string(MetaAction::expand({Belief::zero(2), 1})) == "expand 0.0,0.0:1");
}
