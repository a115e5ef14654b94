#include <doctest.h>

#include "metabamdp/bandit.hpp"
#include "metabamdp/belief.hpp"
#include "metabamdp/errors.hpp"
#include "metabamdp/meta_solver.hpp"
#include "metabamdp/metrics.hpp"
#include "metabamdp/policy_eval.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace mbamdp;
namespace ts = testing_support;

TEST_CASE("posterior mean examples")
{
    CHECK(posterior_mean(0, 0) == Rational(1, 2));
    CHECK(posterior_mean(2, 1) == Rational(3, 5));
    CHECK(posterior_mean(3, 0) == Rational(4, 5));
    const Belief b{{2, 1}, {0, 3}};
    CHECK(b.mean(0) == Rational(3, 5));
    CHECK(b.mean(1) == Rational(1, 5));
    CHECK(b.elapsed() == 6);
    CHECK(b.greedy_arms() == 1u);
    CHECK(Belief::zero(3).greedy_arms() == 7u);
}

TEST_CASE("belief children and string round trip")
{
    const Belief b = Belief::zero(2).win(1).loss(0).win(1);
    CHECK(b.successes(1) == 2);
    CHECK(b.failures(0) == 1);
    CHECK(to_string(b) == "0.1,2.0");
    CHECK(parse_belief(to_string(b)) == b);
    CHECK_THROWS_AS(parse_belief("1.2,x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_belief(""), std::invalid_argument);
}

TEST_CASE("lattice size matches brute enumeration")
{
    CHECK(lattice_size(2, 2) == 15);
    CHECK(lattice_size(2, 1) == 5);
    CHECK(lattice_size(3, 1) == 7);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int t = 0; t <= 5; ++t) {
            CHECK(lattice_size(n, t) == ts::count_lattice(n, t));
            if (n >= 2 && t >= 1) CHECK(enumerate_beliefs(n, t).size() == ts::count_lattice(n, t));
        }
    }
}

TEST_CASE("enumerate_beliefs is ordered by elapsed time")
{
    const auto all = enumerate_beliefs(2, 4);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].elapsed() <= all[i].elapsed());
    CHECK(all.front() == Belief::zero(2));
    CHECK_THROWS_AS(enumerate_beliefs(2, 10, 100), ResourceError);
}

TEST_CASE("exact optimal values")
{
    CHECK(solve_bamdp_exact(2, 1).value(Belief::zero(2)) == Rational(1, 2));
    CHECK(solve_bamdp_exact(2, 2).value(Belief::zero(2)) == Rational(13, 12));
    CHECK(greedy_value(2, 1) == Rational(1, 2));
    CHECK(greedy_value(2, 2) == Rational(13, 12));
    const auto q6 = solve_bamdp_exact(2, 6);
    CHECK(q6.value(Belief::zero(2)) >= greedy_value(2, 6));
}

TEST_CASE("Q* table agrees with an independent recursion")
{
    for (std::size_t n : {2u, 3u}) {
        const int horizon = n == 2 ? 7 : 4;
        const auto table = solve_bamdp_exact(n, horizon);
        ts::OptimalRecursion oracle(horizon);
        for (const auto& b : enumerate_beliefs(n, horizon - 1)) {
            const auto c = ts::counts_of(b);
            for (std::size_t a = 0; a < n; ++a) REQUIRE(table.q(b, a) == oracle.q(c, a));
            REQUIRE(table.value(b) == oracle.value(c));
        }
    }
}

TEST_CASE("greedy value agrees with an independent recursion")
{
    for (int horizon = 1; horizon <= 8; ++horizon) {
        ts::GreedyRecursion oracle(horizon);
        CHECK(greedy_value(2, horizon) == oracle.value(ts::Counts(4, 0)));
    }
    ts::GreedyRecursion three(4);
    CHECK(greedy_value(3, 4) == three.value(ts::Counts(6, 0)));
}

TEST_CASE("Q* bounded by remaining pulls and symmetric in arms")
{
    const int horizon = 6;
    const auto table = solve_bamdp_exact(2, horizon);
    for (const auto& b : enumerate_beliefs(2, horizon - 1)) {
        const int tau = horizon - b.elapsed();
        for (std::size_t a = 0; a < 2; ++a) {
            CHECK(table.q(b, a) <= tau);
            CHECK(table.q(b, a) >= 0);
        }
        const Belief swapped{{b.successes(1), b.failures(1)}, {b.successes(0), b.failures(0)}};
        CHECK(table.q(b, 0) == table.q(swapped, 1));
        CHECK(table.value(b) == table.value(swapped));
        CHECK(table.value(b) >= b.mean(0) * tau);
    }
}

TEST_CASE("Bayes value is the average of environment values")
{
    // Integrate V(p1, p2) of the Bayes-optimal policy over a midpoint grid.
    const int horizon = 3;
    const auto table = solve_bamdp_exact(2, horizon);
    const int grid = 100;
    double total = 0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const Environment env{{(i + 0.5) / grid, (j + 0.5) / grid}};
            total += baseline_value_in_env(Baseline::bayes_optimal, 2, horizon, env, &table).reward;
        }
    }
    CHECK(std::abs(total / (grid * grid) - table.value(Belief::zero(2)).get_d()) < 1e-3);
}

TEST_CASE("greedy baseline in deterministic environments")
{
    CHECK(baseline_value_in_env(Baseline::greedy, 2, 4, Environment{{1.0, 1.0}}).reward == doctest::Approx(4.0));
    CHECK(baseline_value_in_env(Baseline::greedy, 2, 4, Environment{{0.0, 0.0}}).reward == doctest::Approx(0.0));
    const auto bayes = baseline_value_bayes(Baseline::greedy, 2, 6);
    CHECK(bayes.reward == greedy_value(2, 6));
    const auto table = solve_bamdp_exact(2, 6);
    CHECK(baseline_value_bayes(Baseline::bayes_optimal, 2, 6, &table).reward == table.value(Belief::zero(2)));
    CHECK_THROWS(baseline_value_bayes(Baseline::bayes_optimal, 2, 6, nullptr));
}

TEST_CASE("environment validation")
{
    const Environment above{{0.5, 1.5}};
    const Environment empty;
    const Environment edges{{0.0, 1.0}};
    CHECK_THROWS_AS(above.validate(), std::invalid_argument);
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    CHECK_NOTHROW(edges.validate());
}

TEST_CASE("T=6 backward induction is fast")
{
    const auto start = std::chrono::steady_clock::now();
    const auto table = solve_bamdp_exact(2, 6);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 1.0);
    CHECK(table.size() == lattice_size(2, 5));
}

TEST_CASE("meta-policy DP value matches Monte Carlo")
{
    const int horizon = 4;
    const auto table = solve_bamdp_exact(2, horizon);
    const auto graph = build_pruned_meta_graph(2, horizon, table, ApproxParams{});
    const auto solution = solve_meta(graph, Rational(0));
    const Environment env{{0.5, 0.5}};
    const double exact = policy_value_in_env(solution.policy, env).reward;
    PolicyWalker walker(solution.policy);
    auto rng = make_generator(7, 0);
    const int episodes = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < episodes; ++i) {
        const auto traj = simulate_episode(walker, env, rng);
        double r = 0;
        for (const auto& s : traj.steps) r += s.reward;
        sum += r;
        sq += r * r;
    }
    const double mean = sum / episodes;
    const double se = std::sqrt((sq / episodes - mean * mean) / episodes);
    CHECK(std::abs(mean - exact) < 3 * se);
}
