#include "metabamdp/policy_eval.hpp"
#include "metabamdp/errors.hpp"
#include "metabamdp/metrics.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>

namespace mbamdp {

MetaState initial_meta_state(std::size_t arms, int horizon)
{
    return entry_state(PlanningBelief::singleton(Belief::zero(arms)), horizon);
}

const StepResolution& PolicyWalker::resolve(const MetaState& entry)
{
    auto key = meta_state_key(entry);
    if (auto it = cache_.find(key); it != cache_.end()) return *it->second;

    auto step = std::make_unique<StepResolution>();
    MetaState current = entry;
    for (;;) {
        const MetaAction& action = policy_->at(current);
        if (action.is_terminate()) break;
        current.plan = expand(current.plan, action.target, policy_->horizon);
        ++current.computations;
        step->expanded.push_back(action.target);
    }
    step->arms = terminal_actions(current.plan, policy_->horizon);
    step->final_state = std::move(current);
    return *cache_.emplace(std::move(key), std::move(step)).first->second;
}

MetaState PolicyWalker::successor(const StepResolution& step, std::size_t arm, bool won) const
{
    const Belief next = step.final_state.belief().child(arm, won);
    return entry_state(restrict_reachable(step.final_state.plan, next), policy_->horizon);
}

namespace {

double histogram_entropy(const Belief& b)
{
    double total = 0;
    for (std::size_t i = 0; i < b.arms(); ++i) total += b.pulls(i);
    if (total == 0) return 0.0;
    double h = 0;
    for (std::size_t i = 0; i < b.arms(); ++i) {
        if (b.pulls(i) == 0) continue;
        const double p = b.pulls(i) / total;
        h -= p * std::log2(p);
    }
    return h;
}

double as_double(double v) { return v; }
double as_double(const Rational& v) { return v.get_d(); }

template <class Scalar>
Scalar win_probability(const EnvModel& model, const Belief& b, std::size_t arm)
{
    if (model.is_mixture()) {
        if constexpr (std::is_same_v<Scalar, double>) {
            return b.mean(arm).get_d();
        } else {
            return b.mean(arm);
        }
    }
    return Scalar(model.env->probs[arm]);
}

/// One step of a behavior: the pull distribution and how many expansions preceded it.
template <class State>
struct Step {
    int computations = 0;
    std::uint32_t arms = 0;
    Belief belief;
    std::function<State(std::size_t, bool)> successor;
};

template <class Scalar, class State, class Resolve, class Key>
PolicyStats<Scalar> forward_dp(std::size_t arms, int horizon, const EnvModel& model, State start,
                               Resolve&& resolve, Key&& key_of)
{
    PolicyStats<Scalar> stats;
    stats.action_distribution.assign(static_cast<std::size_t>(horizon), std::vector<Scalar>(arms, Scalar(0)));

    struct Mass {
        State state;
        bool computed;
        Scalar weight;
    };
    std::unordered_map<std::string, Mass> layer;
    layer.emplace(key_of(start) + "|0", Mass{start, false, Scalar(1)});

    for (int t = 0; t < horizon; ++t) {
        std::unordered_map<std::string, Mass> next;
        for (auto& [unused, mass] : layer) {
            const Step<State> step = resolve(mass.state);
            const Scalar& w = mass.weight;
            bool computed = mass.computed;
            if (step.computations > 0) {
                stats.computations += w * Scalar(step.computations);
                stats.computation_time_sum += w * Scalar(step.computations * t);
                if (!computed) stats.any_computation += w;
                computed = true;
            }
            const int width = arm_count(step.arms);
            for (std::size_t a = 0; a < arms; ++a) {
                if (!has_arm(step.arms, a)) continue;
                const Scalar share = w / Scalar(width);
                const Scalar p = win_probability<Scalar>(model, step.belief, a);
                stats.action_distribution[static_cast<std::size_t>(t)][a] += share;
                stats.reward += share * p;
                if (exploratory_flag(step.belief, a)) {
                    stats.exploratory += share;
                    stats.exploratory_time_sum += share * Scalar(t);
                }
                for (bool won : {true, false}) {
                    const Scalar branch = share * (won ? p : Scalar(1) - p);
                    if (branch == Scalar(0)) continue;
                    State child = step.successor(a, won);
                    auto key = key_of(child) + (computed ? "|1" : "|0");
                    auto it = next.find(key);
                    if (it == next.end()) {
                        next.emplace(std::move(key), Mass{std::move(child), computed, branch});
                    } else {
                        it->second.weight += branch;
                    }
                }
            }
        }
        layer = std::move(next);
    }
    for (const auto& [unused, mass] : layer) {
        const Step<State> step = resolve(mass.state);
        stats.entropy_bits += as_double(mass.weight) * histogram_entropy(step.belief);
    }
    return stats;
}

template <class Scalar>
PolicyStats<Scalar> evaluate_policy(const MetaPolicy& policy, const EnvModel& model)
{
    PolicyWalker walker(policy);
    auto resolve = [&](const MetaState& y) {
        Step<MetaState> step;
        step.belief = y.belief();
        if (y.t() >= policy.horizon) return step;
        const StepResolution& r = walker.resolve(y);
        step.computations = r.computations();
        step.arms = r.arms;
        step.successor = [&walker, &r](std::size_t a, bool won) { return walker.successor(r, a, won); };
        return step;
    };
    return forward_dp<Scalar>(policy.arms, policy.horizon, model, initial_meta_state(policy.arms, policy.horizon),
                              resolve, [](const MetaState& y) { return meta_state_key(y); });
}

template <class Scalar>
PolicyStats<Scalar> evaluate_baseline(Baseline which, std::size_t arms, int horizon, const EnvModel& model,
                                      const QStarTable* qstar)
{
    check_problem_size(arms, horizon);
    if (which == Baseline::bayes_optimal) {
        if (qstar == nullptr || qstar->arms() != arms || qstar->horizon() != horizon) {
            throw std::invalid_argument("Bayes-optimal baseline needs a matching Q* table");
        }
    }
    auto resolve = [&](const Belief& b) {
        Step<Belief> step;
        step.belief = b;
        if (b.elapsed() >= horizon) return step;
        step.arms = which == Baseline::greedy ? b.greedy_arms() : qstar->optimal_arms(b);
        step.successor = [b](std::size_t a, bool won) { return b.child(a, won); };
        return step;
    };
    return forward_dp<Scalar>(arms, horizon, model, Belief::zero(arms), resolve,
                              [](const Belief& b) { return to_string(b); });
}

} // namespace

PolicyStats<double> policy_value_in_env(const MetaPolicy& policy, const Environment& env)
{
    env.validate();
    if (env.arms() != policy.arms) throw std::invalid_argument("environment arm count does not match the policy");
    return evaluate_policy<double>(policy, EnvModel::of(env));
}

PolicyStats<Rational> policy_value_bayes(const MetaPolicy& policy)
{
    return evaluate_policy<Rational>(policy, EnvModel::uniform_mixture());
}

PolicyStats<double> baseline_value_in_env(Baseline which, std::size_t arms, int horizon, const Environment& env,
                                          const QStarTable* qstar)
{
    env.validate();
    if (env.arms() != arms) throw std::invalid_argument("environment arm count does not match");
    return evaluate_baseline<double>(which, arms, horizon, EnvModel::of(env), qstar);
}

PolicyStats<Rational> baseline_value_bayes(Baseline which, std::size_t arms, int horizon, const QStarTable* qstar)
{
    return evaluate_baseline<Rational>(which, arms, horizon, EnvModel::uniform_mixture(), qstar);
}

Behavior induced_behavior(const MetaPolicy& policy)
{
    PolicyWalker walker(policy);
    Behavior behavior;
    std::function<void(const MetaState&, const std::string&)> visit = [&](const MetaState& y,
                                                                         const std::string& history) {
        if (y.t() >= policy.horizon) return;
        const StepResolution& r = walker.resolve(y);
        std::vector<Rational> dist(policy.arms, Rational(0));
        const int width = arm_count(r.arms);
        for (std::size_t a = 0; a < policy.arms; ++a) {
            if (has_arm(r.arms, a)) dist[a] = make_rational(1, width);
        }
        behavior.emplace(history, std::move(dist));
        for (std::size_t a = 0; a < policy.arms; ++a) {
            if (!has_arm(r.arms, a)) continue;
            for (bool won : {true, false}) {
                visit(walker.successor(r, a, won), history + std::to_string(a) + (won ? "W" : "L"));
            }
        }
    };
    visit(initial_meta_state(policy.arms, policy.horizon), "");
    return behavior;
}

std::vector<MetaState> reachable_entry_states(const MetaPolicy& policy)
{
    PolicyWalker walker(policy);
    std::vector<MetaState> out;
    std::unordered_map<std::string, bool> seen;
    std::deque<MetaState> queue{initial_meta_state(policy.arms, policy.horizon)};
    seen.emplace(meta_state_key(queue.front()), true);
    while (!queue.empty()) {
        MetaState y = std::move(queue.front());
        queue.pop_front();
        if (y.t() >= policy.horizon) continue;
        const StepResolution& r = walker.resolve(y);
        for (std::size_t a = 0; a < policy.arms; ++a) {
            if (!has_arm(r.arms, a)) continue;
            for (bool won : {true, false}) {
                MetaState child = walker.successor(r, a, won);
                if (seen.emplace(meta_state_key(child), true).second) queue.push_back(std::move(child));
            }
        }
        out.push_back(std::move(y));
    }
    return out;
}

} // namespace mbamdp
