#include "metabamdp/plan_graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <stdexcept>

namespace mbamdp {

std::string to_string(const Expansion& e) { return to_string(e.node) + ":" + std::to_string(e.arm); }

Expansion parse_expansion(std::string_view text)
{
    const std::size_t colon = text.rfind(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("malformed expansion '" + std::string(text) + "'");
    const Belief node = parse_belief(text.substr(0, colon));
    unsigned arm = 0;
    const auto tail = text.substr(colon + 1);
    const auto r = std::from_chars(tail.data(), tail.data() + tail.size(), arm);
    if (r.ec != std::errc{} || r.ptr != tail.data() + tail.size() || arm >= node.arms()) {
        throw std::invalid_argument("malformed expansion '" + std::string(text) + "'");
    }
    return Expansion{node, static_cast<std::uint8_t>(arm)};
}

PlanningBelief PlanningBelief::singleton(const Belief& root)
{
    PlanningBelief plan;
    plan.root_ = root;
    return plan;
}

bool PlanningBelief::is_expanded(const Belief& node, std::size_t arm) const
{
    const Expansion probe{node, static_cast<std::uint8_t>(arm)};
    return std::binary_search(expansions_.begin(), expansions_.end(), probe);
}

bool PlanningBelief::contains_node(const Belief& node) const
{
    if (node == root_) return true;
    for (const auto& e : expansions_) {
        if (e.node.win(e.arm) == node || e.node.loss(e.arm) == node) return true;
    }
    return false;
}

std::vector<Belief> PlanningBelief::nodes() const
{
    std::vector<Belief> out{root_};
    for (const auto& e : expansions_) {
        for (const Belief& child : {e.node.win(e.arm), e.node.loss(e.arm)}) {
            if (std::find(out.begin(), out.end(), child) == out.end()) out.push_back(child);
        }
    }
    return out;
}

PlanningBelief expand(const PlanningBelief& plan, const Belief& node, std::size_t arm, int horizon)
{
    if (arm >= plan.root_.arms()) throw std::invalid_argument("arm index out of range");
    if (node.elapsed() >= horizon) {
        throw std::invalid_argument("cannot expand " + to_string(node) + ": no pulls remain");
    }
    if (plan.is_expanded(node, arm)) {
        throw std::invalid_argument("duplicate expansion " + to_string(Expansion{node, static_cast<std::uint8_t>(arm)}));
    }
    if (!plan.contains_node(node)) {
        throw std::invalid_argument("node " + to_string(node) + " is not reachable in the plan");
    }
    PlanningBelief next = plan;
    const Expansion e{node, static_cast<std::uint8_t>(arm)};
    next.expansions_.insert(std::lower_bound(next.expansions_.begin(), next.expansions_.end(), e), e);
    return next;
}

PlanningBelief restrict_reachable(const PlanningBelief& plan, const Belief& new_root)
{
    const Belief& root = plan.root();
    bool admissible = new_root == root;
    for (std::size_t i = 0; i < root.arms() && !admissible; ++i) {
        admissible = new_root == root.win(i) || new_root == root.loss(i);
    }
    if (!admissible) {
        throw std::invalid_argument(to_string(new_root) + " is neither the root nor a child of " + to_string(root));
    }

    PlanningBelief out = PlanningBelief::singleton(new_root);
    std::vector<Belief> seen{new_root};
    std::deque<Belief> queue{new_root};
    const auto expansions = plan.expansions();
    while (!queue.empty()) {
        const Belief v = queue.front();
        queue.pop_front();
        auto it = std::lower_bound(expansions.begin(), expansions.end(), Expansion{v, 0});
        for (; it != expansions.end() && it->node == v; ++it) {
            out.expansions_.push_back(*it);
            for (const Belief& child : {v.win(it->arm), v.loss(it->arm)}) {
                if (std::find(seen.begin(), seen.end(), child) == seen.end()) {
                    seen.push_back(child);
                    queue.push_back(child);
                }
            }
        }
    }
    std::sort(out.expansions_.begin(), out.expansions_.end());
    return out;
}

Rational terminal_heuristic(const Belief& b, int horizon)
{
    const int remaining = horizon - b.elapsed();
    if (remaining <= 0) return Rational(0);
    Rational best = b.mean(0);
    for (std::size_t i = 1; i < b.arms(); ++i) {
        Rational m = b.mean(i);
        if (m > best) best = std::move(m);
    }
    return best * remaining;
}

namespace {

struct Evaluator {
    std::span<const Expansion> expansions;
    int horizon;
    std::vector<std::pair<Belief, Rational>> memo;

    const Rational* lookup(const Belief& b) const
    {
        for (const auto& [key, value] : memo) {
            if (key == b) return &value;
        }
        return nullptr;
    }

    Rational q(const Belief& v, std::size_t arm, int remaining)
    {
        const Rational p = v.mean(arm);
        if (!std::binary_search(expansions.begin(), expansions.end(),
                                Expansion{v, static_cast<std::uint8_t>(arm)})) {
            return p * remaining;
        }
        const Rational win = value(v.win(arm));
        const Rational loss = value(v.loss(arm));
        return p * (1 + win) + (1 - p) * loss;
    }

    Rational value(const Belief& v)
    {
        if (const Rational* hit = lookup(v)) return *hit;
        const int remaining = horizon - v.elapsed();
        Rational best = 0;
        if (remaining > 0) {
            best = q(v, 0, remaining);
            for (std::size_t a = 1; a < v.arms(); ++a) {
                Rational candidate = q(v, a, remaining);
                if (candidate > best) best = std::move(candidate);
            }
        }
        memo.emplace_back(v, best);
        return best;
    }
};

} // namespace

std::vector<Rational> root_q_values(const PlanningBelief& plan, int horizon)
{
    Evaluator eval{plan.expansions(), horizon, {}};
    const Belief& root = plan.root();
    const int remaining = horizon - root.elapsed();
    std::vector<Rational> out(root.arms());
    if (remaining <= 0) return out;
    for (std::size_t a = 0; a < root.arms(); ++a) out[a] = eval.q(root, a, remaining);
    return out;
}

SubjectiveValues subjective_values(const PlanningBelief& plan, int horizon)
{
    Evaluator eval{plan.expansions(), horizon, {}};
    SubjectiveValues out;
    const Belief& root = plan.root();
    const int remaining = horizon - root.elapsed();
    out.root_q.assign(root.arms(), Rational(0));
    if (remaining > 0) {
        for (std::size_t a = 0; a < root.arms(); ++a) out.root_q[a] = eval.q(root, a, remaining);
    }
    eval.value(root);
    for (const Belief& node : plan.nodes()) eval.value(node);
    for (auto& [b, v] : eval.memo) out.node_values.emplace(b, std::move(v));
    return out;
}

const Rational& SubjectiveValues::root_value() const
{
    return *std::max_element(root_q.begin(), root_q.end());
}

std::uint32_t argmax_arms(const std::vector<Rational>& q)
{
    if (q.empty()) return 0;
    const Rational& best = *std::max_element(q.begin(), q.end());
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == best) mask |= 1u << i;
    }
    return mask;
}

std::uint32_t terminal_actions(const PlanningBelief& plan, int horizon)
{
    return argmax_arms(root_q_values(plan, horizon));
}

std::size_t terminal_action(const PlanningBelief& plan, int horizon)
{
    return lowest_arm(terminal_actions(plan, horizon));
}

std::vector<Expansion> frontier(const PlanningBelief& plan, int horizon)
{
    std::vector<Expansion> out;
    for (const Belief& node : plan.nodes()) {
        if (node.elapsed() >= horizon) continue;
        for (std::size_t a = 0; a < node.arms(); ++a) {
            if (!plan.is_expanded(node, a)) out.push_back(Expansion{node, static_cast<std::uint8_t>(a)});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string canonical_key(const PlanningBelief& plan)
{
    std::string key = to_string(plan.root());
    key += '|';
    bool first = true;
    for (const auto& e : plan.expansions()) {
        if (!first) key += ';';
        first = false;
        key += to_string(e);
    }
    return key;
}

std::string audit(const PlanningBelief& plan, int horizon)
{
    const auto expansions = plan.expansions();
    if (!std::is_sorted(expansions.begin(), expansions.end())) return "expansions not sorted";
    if (std::adjacent_find(expansions.begin(), expansions.end()) != expansions.end()) return "duplicate expansion";
    for (const auto& e : expansions) {
        if (e.node.elapsed() >= horizon) return "expansion at exhausted node " + to_string(e);
        if (e.arm >= plan.root().arms()) return "arm out of range in " + to_string(e);
        if (e.node.elapsed() < plan.root().elapsed()) return "expansion above the root " + to_string(e);
    }
    // Every expanded node must be reachable from the root through expanded edges.
    const PlanningBelief reachable = restrict_reachable(plan, plan.root());
    if (reachable.expansion_count() != plan.expansion_count()) return "expansion not reachable from the root";
    return {};
}

} // namespace mbamdp
