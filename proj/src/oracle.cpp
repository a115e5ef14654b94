#include "metabamdp/oracle.hpp"

#include "metabamdp/errors.hpp"
#include "metabamdp/policy_eval.hpp"

#include <chrono>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace mbamdp {

namespace {

Rational mean_of(const Belief& b, std::size_t arm)
{
    return make_rational(b.successes(arm) + 1, b.pulls(arm) + 2);
}

bool listed(const PlanningBelief& plan, const Belief& node, std::size_t arm)
{
    for (const Expansion& e : plan.expansions()) {
        if (e.node == node && e.arm == arm) return true;
    }
    return false;
}

Rational tree_value(const PlanningBelief& plan, const Belief& node, int horizon);

Rational tree_q(const PlanningBelief& plan, const Belief& node, std::size_t arm, int horizon)
{
    const int remaining = horizon - node.elapsed();
    const Rational p = mean_of(node, arm);
    if (!listed(plan, node, arm)) return p * remaining;
    Rational win = tree_value(plan, node.win(arm), horizon);
    Rational loss = tree_value(plan, node.loss(arm), horizon);
    return p * (1 + win) + (1 - p) * loss;
}

Rational tree_value(const PlanningBelief& plan, const Belief& node, int horizon)
{
    if (node.elapsed() >= horizon) return Rational(0);
    Rational best = tree_q(plan, node, 0, horizon);
    for (std::size_t a = 1; a < node.arms(); ++a) {
        Rational q = tree_q(plan, node, a, horizon);
        if (q > best) best = q;
    }
    return best;
}

std::uint32_t best_arms(const std::vector<Rational>& q)
{
    std::uint32_t mask = 0;
    Rational best = q[0];
    for (const Rational& v : q) {
        if (v > best) best = v;
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == best) mask |= 1u << i;
    }
    return mask;
}

class BruteForce {
public:
    BruteForce(int horizon, Rational cost, const OracleLimits& limits)
        : horizon_(horizon), cost_(std::move(cost)), limits_(limits), start_(std::chrono::steady_clock::now())
    {
    }

    Rational value(const PlanningBelief& plan)
    {
        const std::string key = canonical_key(plan);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.value;
        if (plan.root().elapsed() >= horizon_) return Rational(0);
        check_budget();

        const Belief& root = plan.root();
        const std::uint32_t arms = best_arms(unmemoized_root_q(plan, horizon_));
        Rational terminate(0);
        int count = 0;
        for (std::size_t a = 0; a < root.arms(); ++a) {
            if (!(arms >> a & 1u)) continue;
            const Rational p = mean_of(root, a);
            terminate += p * (1 + value(restrict_reachable(plan, root.win(a)))) +
                         (1 - p) * value(restrict_reachable(plan, root.loss(a)));
            ++count;
        }
        Entry entry{terminate / count, MetaAction::terminate()};
        for (const Expansion& e : frontier(plan, horizon_)) {
            Rational v = value(expand(plan, e, horizon_)) - cost_;
            if (v > entry.value) entry = Entry{std::move(v), MetaAction::expand(e)};
        }
        const Rational result = entry.value;
        memo_.emplace(key, std::move(entry));
        return result;
    }

    const MetaAction& decision(const PlanningBelief& plan) const { return memo_.at(canonical_key(plan)).action; }
    std::size_t visited() const { return memo_.size(); }

private:
    struct Entry {
        Rational value;
        MetaAction action;
    };

    void check_budget() const
    {
        if (memo_.size() >= limits_.plan_cap) {
            throw ResourceError("brute-force meta-solve exceeded the plan cap of " + std::to_string(limits_.plan_cap));
        }
        if ((memo_.size() & 1023u) == 0) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            if (elapsed > limits_.time_budget_seconds) {
                throw ResourceError("brute-force meta-solve exceeded its time budget");
            }
        }
    }

    int horizon_;
    Rational cost_;
    OracleLimits limits_;
    std::chrono::steady_clock::time_point start_;
    std::unordered_map<std::string, Entry> memo_;
};

} // namespace

BruteForceSolution brute_force_meta_solve(std::size_t arms, int horizon, const Rational& cost,
                                          const OracleLimits& limits)
{
    if (arms != 2) throw std::invalid_argument("brute-force meta-solve supports N=2 only");
    if (horizon < 1 || horizon > limits.max_horizon) {
        throw std::invalid_argument("brute-force meta-solve horizon " + std::to_string(horizon) +
                                    " outside [1, " + std::to_string(limits.max_horizon) + "]");
    }
    if (cost < 0) throw std::invalid_argument("cost must be nonnegative");

    BruteForce solver(horizon, cost, limits);
    BruteForceSolution out;
    const PlanningBelief start = PlanningBelief::singleton(Belief::zero(arms));
    out.value = solver.value(start);
    out.plans_visited = solver.visited();

    // Replay the plan-level decisions over the walker's state keys.
    out.policy.arms = arms;
    out.policy.horizon = horizon;
    out.policy.cost = cost;
    std::deque<MetaState> queue{initial_meta_state(arms, horizon)};
    while (!queue.empty()) {
        MetaState y = std::move(queue.front());
        queue.pop_front();
        if (y.t() >= horizon) continue;
        const std::string key = meta_state_key(y);
        if (out.policy.actions.count(key)) continue;
        const MetaAction& action = solver.decision(y.plan);
        out.policy.actions.emplace(key, action);
        if (!action.is_terminate()) {
            queue.push_back(MetaState{expand(y.plan, action.target, horizon), y.computations + 1, y.reference});
            continue;
        }
        const std::uint32_t pulled = best_arms(unmemoized_root_q(y.plan, horizon));
        for (std::size_t a = 0; a < arms; ++a) {
            if (!(pulled >> a & 1u)) continue;
            for (bool won : {true, false}) {
                queue.push_back(entry_state(restrict_reachable(y.plan, y.belief().child(a, won)), horizon));
            }
        }
    }
    return out;
}

std::vector<std::vector<Expansion>> brute_force_minimal_mind_changers(const MetaState& y, int horizon,
                                                                      const ApproxParams& bounds,
                                                                      const OracleLimits& limits)
{
    std::vector<std::vector<Expansion>> out;
    if (y.t() >= horizon) return out;
    const Belief root = y.belief();
    std::size_t explored = 0;
    std::vector<Expansion> sequence;

    auto recurse = [&](auto&& self, const PlanningBelief& plan) -> void {
        for (const Expansion& e : frontier(plan, horizon)) {
            const int edges = 2 * static_cast<int>(plan.expansion_count() + 1);
            const int steps = y.computations + static_cast<int>(sequence.size()) + 1;
            const int depth = e.node.elapsed() - root.elapsed();
            if (edges > bounds.k || steps > bounds.k_c || depth >= bounds.d) continue;
            if (++explored > limits.sequence_cap) {
                throw ResourceError("minimal mind-changer enumeration exceeded the sequence cap");
            }
            PlanningBelief next = expand(plan, e, horizon);
            sequence.push_back(e);
            if (best_arms(unmemoized_root_q(next, horizon)) != y.reference) {
                out.push_back(sequence);
            } else {
                self(self, next);
            }
            sequence.pop_back();
        }
    };
    recurse(recurse, y.plan);
    return out;
}

Rational unmemoized_subjective_value(const PlanningBelief& plan, int horizon)
{
    return tree_value(plan, plan.root(), horizon);
}

std::vector<Rational> unmemoized_root_q(const PlanningBelief& plan, int horizon)
{
    const Belief& root = plan.root();
    std::vector<Rational> q(root.arms(), Rational(0));
    if (root.elapsed() >= horizon) return q;
    for (std::size_t a = 0; a < root.arms(); ++a) q[a] = tree_q(plan, root, a, horizon);
    return q;
}

} // namespace mbamdp
