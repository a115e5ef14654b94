#ifndef METABAMDP_TESTS_SUPPORT_HPP
#define METABAMDP_TESTS_SUPPORT_HPP

// Test-only reference computations. They work on plain count vectors and never
// call into the solver code they are used to check.

#include "metabamdp/plan_graph.hpp"
#include "metabamdp/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <random>
#include <vector>

namespace testing_support {

using mbamdp::Rational;
using Counts = std::vector<int>; // s0, f0, s1, f1, ...

inline Rational mean_of(const Counts& c, std::size_t arm)
{
    return mbamdp::make_rational(c[2 * arm] + 1, c[2 * arm] + c[2 * arm + 1] + 2);
}

inline int elapsed_of(const Counts& c)
{
    int t = 0;
    for (int v : c) t += v;
    return t;
}

/// Optimal Bayes value by direct recursion over count vectors.
class OptimalRecursion {
public:
    explicit OptimalRecursion(int horizon) : horizon_(horizon) {}

    Rational q(const Counts& c, std::size_t arm)
    {
        const Rational p = mean_of(c, arm);
        Counts win = c;
        ++win[2 * arm];
        Counts loss = c;
        ++loss[2 * arm + 1];
        return p * (1 + value(win)) + (1 - p) * value(loss);
    }

    Rational value(const Counts& c)
    {
        if (elapsed_of(c) >= horizon_) return 0;
        if (auto it = memo_.find(c); it != memo_.end()) return it->second;
        Rational best = q(c, 0);
        for (std::size_t a = 1; a < c.size() / 2; ++a) {
            Rational v = q(c, a);
            if (v > best) best = v;
        }
        memo_.emplace(c, best);
        return best;
    }

private:
    int horizon_;
    std::map<Counts, Rational> memo_;
};

/// Greedy-on-posterior-mean value with uniform averaging over ties.
class GreedyRecursion {
public:
    explicit GreedyRecursion(int horizon) : horizon_(horizon) {}

    Rational value(const Counts& c)
    {
        if (elapsed_of(c) >= horizon_) return 0;
        if (auto it = memo_.find(c); it != memo_.end()) return it->second;
        const std::size_t arms = c.size() / 2;
        Rational best = mean_of(c, 0);
        for (std::size_t a = 1; a < arms; ++a) best = std::max(best, mean_of(c, a));
        Rational total = 0;
        int tied = 0;
        for (std::size_t a = 0; a < arms; ++a) {
            if (mean_of(c, a) != best) continue;
            ++tied;
            Counts win = c;
            ++win[2 * a];
            Counts loss = c;
            ++loss[2 * a + 1];
            total += best * (1 + value(win)) + (1 - best) * value(loss);
        }
        Rational v = total / tied;
        memo_.emplace(c, v);
        return v;
    }

private:
    int horizon_;
    std::map<Counts, Rational> memo_;
};

/// Number of count vectors of length 2N with sum <= T, by enumeration.
inline std::size_t count_lattice(std::size_t arms, int horizon)
{
    std::size_t total = 0;
    Counts c(2 * arms, 0);
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
        if (i == c.size()) {
            ++total;
            return;
        }
        for (int v = 0; v <= left; ++v) self(self, i + 1, left - v);
    };
    rec(rec, 0, horizon);
    return total;
}

inline Counts counts_of(const mbamdp::Belief& b)
{
    Counts c;
    for (std::size_t i = 0; i < b.arms(); ++i) {
        c.push_back(b.successes(i));
        c.push_back(b.failures(i));
    }
    return c;
}

/// A plan grown by `steps` random legal expansions.
inline mbamdp::PlanningBelief random_plan(const mbamdp::Belief& root, int horizon, int steps, std::mt19937_64& rng)
{
    auto plan = mbamdp::PlanningBelief::singleton(root);
    for (int i = 0; i < steps; ++i) {
        const auto options = mbamdp::frontier(plan, horizon);
        if (options.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        plan = mbamdp::expand(plan, options[pick(rng)], horizon);
    }
    return plan;
}

/// Every legal expansion applied until the frontier is empty.
inline mbamdp::PlanningBelief full_plan(const mbamdp::Belief& root, int horizon)
{
    auto plan = mbamdp::PlanningBelief::singleton(root);
    for (auto options = mbamdp::frontier(plan, horizon); !options.empty(); options = mbamdp::frontier(plan, horizon)) {
        for (const auto& e : options) plan = mbamdp::expand(plan, e, horizon);
    }
    return plan;
}

/// Random belief with `t` total observations on `arms` arms.
inline mbamdp::Belief random_belief(std::size_t arms, int t, std::mt19937_64& rng)
{
    mbamdp::Belief b(arms);
    std::uniform_int_distribution<std::size_t> arm(0, arms - 1);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < t; ++i) b = b.child(arm(rng), coin(rng));
    return b;
}

/// Edges of the part of `plan` reachable from `root`, counted by walking
/// expanded pairs from `root` without using restrict_reachable.
inline std::size_t reachable_edges(const mbamdp::PlanningBelief& plan, const mbamdp::Belief& root)
{
    std::vector<mbamdp::Belief> seen{root};
    std::vector<mbamdp::Belief> stack{root};
    std::size_t edges = 0;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (std::size_t a = 0; a < v.arms(); ++a) {
            if (!plan.is_expanded(v, a)) continue;
            edges += 2;
            for (const auto& child : {v.win(a), v.loss(a)}) {
                if (std::find(seen.begin(), seen.end(), child) == seen.end()) {
                    seen.push_back(child);
                    stack.push_back(child);
                }
            }
        }
    }
    return edges;
}

} // namespace testing_support

#endif
