#include "metabamdp/meta_solver.hpp"
#include "metabamdp/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mbamdp {

void ApproxParams::validate() const
{
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("k must be even and at least 2");
    if (k_c < 1) throw std::invalid_argument("k_c must be at least 1");
    if (d < 1) throw std::invalid_argument("d must be at least 1");
}

std::string ApproxParams::to_string() const
{
    return "k=" + std::to_string(k) + ",kc=" + std::to_string(k_c) + ",d=" + std::to_string(d);
}

MetaState entry_state(PlanningBelief plan, int horizon)
{
    MetaState y;
    y.reference = plan.root().elapsed() < horizon ? terminal_actions(plan, horizon) : 0u;
    y.plan = std::move(plan);
    return y;
}

std::string meta_state_key(const MetaState& y)
{
    return canonical_key(y.plan) + "#" + std::to_string(y.computations) + "#" + std::to_string(y.reference);
}

std::string to_string(const MetaAction& a)
{
    return a.is_terminate() ? std::string("terminate") : "expand " + to_string(a.target);
}

bool is_m_belief(const Belief& b, const QStarTable& qstar)
{
    const int remaining = qstar.horizon() - b.elapsed();
    if (remaining <= 0) return false;
    const std::uint32_t greedy = b.greedy_arms();
    const Rational greedy_q = b.mean(lowest_arm(greedy)) * remaining;
    const auto& qs = qstar.q(b);
    for (std::size_t j = 0; j < b.arms(); ++j) {
        if (!has_arm(greedy, j) && qs[j] > greedy_q) return false;
    }
    return true;
}

std::vector<Belief> m_beliefs(const QStarTable& qstar)
{
    std::vector<Belief> out;
    for (const Belief& b : enumerate_beliefs(qstar.arms(), qstar.horizon())) {
        if (b.elapsed() < qstar.horizon() && is_m_belief(b, qstar)) out.push_back(b);
    }
    return out;
}

namespace {

bool forced_given(const std::vector<Rational>& q, std::uint32_t actions, const std::vector<Rational>& qs)
{
    const Rational& best = q[lowest_arm(actions)];
    const bool several = arm_count(actions) > 1;
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (has_arm(actions, j)) {
            if (several && qs[j] > best) return false;
        } else if (qs[j] >= best) {
            return false;
        }
    }
    return true;
}

} // namespace

bool is_termination_forced(const PlanningBelief& plan, const QStarTable& qstar)
{
    if (plan.root().elapsed() >= qstar.horizon()) return true;
    const auto q = root_q_values(plan, qstar.horizon());
    return forced_given(q, argmax_arms(q), qstar.q(plan.root()));
}

bool within_bounds(const PlanningBelief& plan, const Expansion& e, int computations, const ApproxParams& params)
{
    if (static_cast<int>(plan.edge_count()) + 2 > params.k) return false;
    if (computations + 1 > params.k_c) return false;
    return e.node.elapsed() - plan.root().elapsed() < params.d;
}

namespace {

struct PlanStatus {
    std::uint32_t actions = 0;
    bool forced = false;
};

class TrajectorySearch {
public:
    TrajectorySearch(const MetaState& y, const QStarTable& qstar, const ApproxParams& params)
        : qstar_(qstar), params_(params), horizon_(qstar.horizon()), reference_(y.reference),
          start_computations_(y.computations)
    {
        const Belief& root = y.belief();
        if (is_m_belief(root, qstar)) blocked_root_arms_ = ~root.greedy_arms();
    }

    std::vector<ComputationalTrajectory> run(const PlanningBelief& start)
    {
        std::vector<Expansion> sequence;
        dfs(start, sequence);
        return std::move(found_);
    }

private:
    PlanStatus status(const PlanningBelief& plan)
    {
        auto key = canonical_key(plan);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const auto q = root_q_values(plan, horizon_);
        PlanStatus s;
        s.actions = argmax_arms(q);
        s.forced = forced_given(q, s.actions, qstar_.q(plan.root()));
        cache_.emplace(std::move(key), s);
        return s;
    }

    void dfs(const PlanningBelief& plan, std::vector<Expansion>& sequence)
    {
        const int used = start_computations_ + static_cast<int>(sequence.size());
        for (const Expansion& e : frontier(plan, horizon_)) {
            if (!within_bounds(plan, e, used, params_)) continue;
            if (e.node == plan.root() && has_arm(blocked_root_arms_, e.arm)) continue;
            PlanningBelief next = expand(plan, e, horizon_);
            sequence.push_back(e);
            const PlanStatus s = status(next);
            if (s.actions != reference_) {
                found_.push_back({sequence, next});
            } else if (!s.forced) {
                dfs(next, sequence);
            }
            sequence.pop_back();
        }
    }

    const QStarTable& qstar_;
    const ApproxParams& params_;
    int horizon_;
    std::uint32_t reference_;
    int start_computations_;
    std::uint32_t blocked_root_arms_ = 0;
    std::unordered_map<std::string, PlanStatus> cache_;
    std::vector<ComputationalTrajectory> found_;
};

// Every bounded sequence, with no mind-changer filtering. Only used by the
// negative-control fault.
void all_sequences(const PlanningBelief& plan, int used, const ApproxParams& params, int horizon,
                   std::vector<Expansion>& sequence, std::vector<ComputationalTrajectory>& out)
{
    for (const Expansion& e : frontier(plan, horizon)) {
        if (!within_bounds(plan, e, used, params)) continue;
        PlanningBelief next = expand(plan, e, horizon);
        sequence.push_back(e);
        out.push_back({sequence, next});
        all_sequences(next, used + 1, params, horizon, sequence, out);
        sequence.pop_back();
    }
}

} // namespace

std::vector<ComputationalTrajectory> search_computational_trajectories(const MetaState& y,
                                                                       const QStarTable& qstar,
                                                                       const ApproxParams& params)
{
    if (y.t() >= qstar.horizon() || is_termination_forced(y, qstar)) return {};
    return TrajectorySearch(y, qstar, params).run(y.plan);
}

std::optional<NodeId> MetaGraph::find(const MetaState& y) const
{
    auto it = index.find(meta_state_key(y));
    if (it == index.end()) return std::nullopt;
    return it->second;
}

std::size_t MetaGraph::computational_edge_count() const
{
    std::size_t total = 0;
    for (const auto& n : nodes) total += n.computations.size();
    return total;
}

std::size_t MetaGraph::terminal_edge_count() const
{
    std::size_t total = 0;
    for (const auto& n : nodes) total += 2 * n.terminal.size();
    return total;
}

namespace {

class GraphBuilder {
public:
    GraphBuilder(std::size_t arms, int horizon, const QStarTable& qstar, const ApproxParams& params,
                 const BuildOptions& options)
        : qstar_(qstar), options_(options)
    {
        graph_.arms = arms;
        graph_.horizon = horizon;
        graph_.params = params;
    }

    MetaGraph build()
    {
        const int horizon = graph_.horizon;
        graph_.root = intern(entry_state(PlanningBelief::singleton(Belief::zero(graph_.arms)), horizon));

        for (NodeId id = 0; id < graph_.nodes.size(); ++id) {
            if (graph_.nodes[id].state.t() >= horizon) continue;

            if (graph_.nodes[id].state.computations == 0 && options_.allow_computation) {
                add_computations(id);
            }
            if (graph_.nodes[id].may_terminate) add_terminal_branches(id);
        }
        return std::move(graph_);
    }

private:
    NodeId intern(MetaState state)
    {
        auto key = meta_state_key(state);
        if (auto it = graph_.index.find(key); it != graph_.index.end()) return it->second;
        if (graph_.nodes.size() >= options_.node_cap) {
            throw ResourceError("meta-graph exceeds node cap of " + std::to_string(options_.node_cap));
        }
        MetaNode node;
        const int horizon = graph_.horizon;
        if (state.t() < horizon) {
            node.actions = terminal_actions(state.plan, horizon);
            node.may_terminate = state.computations == 0 || node.actions != state.reference ||
                                 options_.fault == PruningFault::keep_non_mind_changers;
        }
        node.state = std::move(state);
        const auto id = static_cast<NodeId>(graph_.nodes.size());
        graph_.nodes.push_back(std::move(node));
        graph_.index.emplace(std::move(key), id);
        return id;
    }

    void add_edge(NodeId from, const Expansion& e, NodeId to)
    {
        auto& edges = graph_.nodes[from].computations;
        auto it = std::lower_bound(edges.begin(), edges.end(), e,
                                   [](const auto& edge, const Expansion& probe) { return edge.first < probe; });
        if (it != edges.end() && it->first == e) return;
        edges.insert(it, {e, to});
    }

    void add_computations(NodeId id)
    {
        const MetaState start = graph_.nodes[id].state;
        std::vector<ComputationalTrajectory> trajectories;
        if (options_.fault == PruningFault::keep_non_mind_changers) {
            std::vector<Expansion> sequence;
            all_sequences(start.plan, 0, graph_.params, graph_.horizon, sequence, trajectories);
        } else {
            trajectories = search_computational_trajectories(start, qstar_, graph_.params);
        }
        for (const auto& trajectory : trajectories) {
            NodeId previous = id;
            MetaState current = start;
            for (const Expansion& e : trajectory.sequence) {
                current.plan = expand(current.plan, e, graph_.horizon);
                ++current.computations;
                const NodeId next = intern(current);
                add_edge(previous, e, next);
                previous = next;
            }
        }
    }

    void add_terminal_branches(NodeId id)
    {
        const MetaState state = graph_.nodes[id].state;
        const std::uint32_t actions = graph_.nodes[id].actions;
        std::vector<TerminalBranch> branches;
        for (std::size_t a = 0; a < graph_.arms; ++a) {
            if (!has_arm(actions, a)) continue;
            const Belief& b = state.belief();
            TerminalBranch branch;
            branch.arm = static_cast<std::uint8_t>(a);
            branch.win = intern(entry_state(restrict_reachable(state.plan, b.win(a)), graph_.horizon));
            branch.loss = intern(entry_state(restrict_reachable(state.plan, b.loss(a)), graph_.horizon));
            branches.push_back(branch);
        }
        graph_.nodes[id].terminal = std::move(branches);
    }

    const QStarTable& qstar_;
    BuildOptions options_;
    MetaGraph graph_;
};

} // namespace

MetaGraph build_pruned_meta_graph(std::size_t arms, int horizon, const QStarTable& qstar,
                                  const ApproxParams& params, const BuildOptions& options)
{
    check_problem_size(arms, horizon);
    params.validate();
    if (qstar.arms() != arms || qstar.horizon() != horizon) {
        throw std::invalid_argument("Q* table does not match the requested problem size");
    }
    return GraphBuilder(arms, horizon, qstar, params, options).build();
}

const MetaAction& MetaPolicy::at(const MetaState& y) const
{
    auto key = meta_state_key(y);
    auto it = actions.find(key);
    if (it == actions.end()) throw MissingPolicyState("policy undefined at meta-state " + key);
    return it->second;
}

MetaSolution solve_meta(const MetaGraph& graph, const Rational& cost, const SolveOptions& options)
{
    if (cost < 0) throw std::invalid_argument("computation cost must be nonnegative");
    const std::size_t n = graph.nodes.size();

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        const auto& sa = graph.nodes[a].state;
        const auto& sb = graph.nodes[b].state;
        if (sa.t() != sb.t()) return sa.t() > sb.t();
        return sa.plan.expansion_count() > sb.plan.expansion_count();
    });

    std::vector<Rational> values(n);
    std::vector<int> decisions(n, -1);
    for (NodeId id : order) {
        const MetaNode& node = graph.nodes[id];
        if (node.state.t() >= graph.horizon) continue;

        bool have = false;
        Rational best;
        int choice = -1;
        if (node.may_terminate) {
            Rational total = 0;
            for (const auto& branch : node.terminal) {
                const Rational p = node.state.belief().mean(branch.arm);
                total += p * (1 + values[branch.win]) + (1 - p) * values[branch.loss];
            }
            best = total / static_cast<long>(node.terminal.size());
            have = true;
        }
        for (std::size_t i = 0; i < node.computations.size(); ++i) {
            const NodeId child = node.computations[i].second;
            const auto& child_state = graph.nodes[child].state;
            if (child_state.t() != node.state.t() ||
                child_state.plan.expansion_count() <= node.state.plan.expansion_count()) {
                throw std::logic_error("computational edge does not enlarge the plan: same-t cycle");
            }
            Rational candidate = values[child] - cost;
            const bool take = !have || candidate > best ||
                              (options.prefer_computation_on_ties && choice < 0 && candidate == best);
            if (take) {
                best = std::move(candidate);
                choice = static_cast<int>(i);
                have = true;
            }
        }
        if (!have) throw std::logic_error("meta-state without any available action: " + meta_state_key(node.state));
        values[id] = std::move(best);
        decisions[id] = choice;
    }

    MetaSolution solution;
    solution.policy.arms = graph.arms;
    solution.policy.horizon = graph.horizon;
    solution.policy.cost = cost;
    solution.policy.params = graph.params;
    solution.policy.actions.reserve(n);
    solution.values.values.reserve(n);
    for (const auto& [key, id] : graph.index) {
        const MetaNode& node = graph.nodes[id];
        solution.values.values.emplace(key, values[id]);
        if (node.state.t() >= graph.horizon) continue;
        const int choice = decisions[id];
        solution.policy.actions.emplace(
            key, choice < 0 ? MetaAction::terminate() : MetaAction::expand(node.computations[choice].first));
    }
    solution.values.root_value = values[graph.root];
    solution.decisions = std::move(decisions);
    return solution;
}

} // namespace mbamdp
