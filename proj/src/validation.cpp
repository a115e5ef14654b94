#include "metabamdp/validation.hpp"

#include <algorithm>

namespace mbamdp {

bool ApproximationReport::behavior_agrees() const
{
    return std::all_of(pairs.begin(), pairs.end(), [](const PairAgreement& p) { return p.behavior; });
}

bool ApproximationReport::meta_values_agree() const
{
    return std::all_of(pairs.begin(), pairs.end(), [](const PairAgreement& p) { return p.meta_value; });
}

ApproximationReport validate_approximation(std::size_t arms, int horizon, const Rational& cost,
                                           const std::vector<ApproxParams>& settings, const QStarTable& qstar)
{
    ApproximationReport report;
    report.arms = arms;
    report.horizon = horizon;
    report.cost = cost;
    std::vector<Behavior> behaviors;
    for (const ApproxParams& params : settings) {
        const MetaGraph graph = build_pruned_meta_graph(arms, horizon, qstar, params);
        const MetaSolution solution = solve_meta(graph, cost);
        const PolicyStats<Rational> stats = policy_value_bayes(solution.policy);
        report.settings.push_back(
            {params, solution.values.root_value, stats.reward, stats.computations, graph.nodes.size()});
        behaviors.push_back(induced_behavior(solution.policy));
    }
    for (std::size_t i = 0; i < settings.size(); ++i) {
        for (std::size_t j = i + 1; j < settings.size(); ++j) {
            report.pairs.push_back({i, j, behaviors[i] == behaviors[j],
                                    report.settings[i].meta_value == report.settings[j].meta_value});
        }
    }
    return report;
}

std::vector<ApproxParams> param_grid(const std::vector<int>& k, const std::vector<int>& k_c, const std::vector<int>& d)
{
    std::vector<ApproxParams> out;
    for (int a : k) {
        for (int b : k_c) {
            for (int c : d) {
                ApproxParams p{a, b, c};
                p.validate();
                out.push_back(p);
            }
        }
    }
    return out;
}

std::string to_string(WalkCheck check)
{
    switch (check) {
    case WalkCheck::mind_changer: return "mind-changer";
    case WalkCheck::minimality: return "minimality";
    case WalkCheck::forced_termination: return "forced-termination";
    case WalkCheck::m_belief_restriction: return "m-belief-restriction";
    }
    return "unknown";
}

std::size_t WalkReport::count(WalkCheck check) const
{
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const WalkViolation& v) { return v.check == check; }));
}

WalkReport walk_theorems(const MetaPolicy& policy, const QStarTable& qstar)
{
    WalkReport report;
    const int horizon = policy.horizon;
    for (const MetaState& entry : reachable_entry_states(policy)) {
        if (entry.t() >= horizon) continue;
        ++report.entry_states;
        const std::string where = meta_state_key(entry);
        const std::uint32_t before = terminal_actions(entry.plan, horizon);
        const Belief& root = entry.belief();

        // Replay the policy by hand so every intermediate state is inspected.
        MetaState current = entry;
        std::vector<Expansion> sequence;
        for (;;) {
            const MetaAction& action = policy.at(current);
            if (is_termination_forced(current, qstar) && !action.is_terminate()) {
                report.violations.push_back({WalkCheck::forced_termination, meta_state_key(current),
                                             "policy computes: " + to_string(action)});
            }
            if (action.is_terminate()) break;
            if (!sequence.empty() && terminal_actions(current.plan, horizon) != before) {
                report.violations.push_back({WalkCheck::minimality, where,
                                             "argmax set already changed after " +
                                                 std::to_string(sequence.size()) + " expansions"});
            }
            sequence.push_back(action.target);
            current.plan = expand(current.plan, action.target, horizon);
            ++current.computations;
        }
        if (sequence.empty()) continue;
        ++report.computing_states;
        if (terminal_actions(current.plan, horizon) == before) {
            report.violations.push_back({WalkCheck::mind_changer, where,
                                         std::to_string(sequence.size()) + " expansions leave the argmax set unchanged"});
        }
        const Expansion& first = sequence.front();
        if (is_m_belief(root, qstar) && first.node == root && !has_arm(root.greedy_arms(), first.arm)) {
            report.violations.push_back({WalkCheck::m_belief_restriction, where, "starts with " + to_string(first)});
        }
    }
    return report;
}

} // namespace mbamdp
