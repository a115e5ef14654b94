#include "metabamdp/bandit.hpp"
#include "metabamdp/errors.hpp"

#include <stdexcept>

namespace mbamdp {

void Environment::validate() const
{
    if (probs.size() < 2) throw std::invalid_argument("environment needs at least two arms");
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("reward probability outside [0,1]");
    }
}

void check_problem_size(std::size_t arms, int horizon)
{
    if (arms < 2) throw std::invalid_argument("need at least two arms, got " + std::to_string(arms));
    if (arms > kMaxArms) throw std::invalid_argument("at most " + std::to_string(kMaxArms) + " arms supported");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1, got " + std::to_string(horizon));
    if (horizon > kMaxCount) throw std::invalid_argument("horizon too large");
}

std::uint64_t lattice_size(std::size_t arms, int horizon)
{
    // C(T + 2N, 2N) computed incrementally; saturates instead of overflowing.
    const std::uint64_t k = 2 * arms;
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t factor = static_cast<std::uint64_t>(horizon) + i;
        if (result > UINT64_MAX / factor) return UINT64_MAX;
        result = result * factor / i;
    }
    return result;
}

namespace {

void enumerate_layer(std::size_t slot, int remaining, Belief& current, std::size_t arms,
                     std::vector<Belief>& out)
{
    if (slot == 2 * arms - 1) {
        // The final slot takes whatever is left so the layer sum is exact.
        Belief b = current;
        for (int i = 0; i < remaining; ++i) b = (slot % 2 == 0) ? b.win(slot / 2) : b.loss(slot / 2);
        out.push_back(b);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        Belief next = current;
        for (int i = 0; i < v; ++i) next = (slot % 2 == 0) ? next.win(slot / 2) : next.loss(slot / 2);
        enumerate_layer(slot + 1, remaining - v, next, arms, out);
    }
}

} // namespace

std::vector<Belief> enumerate_beliefs(std::size_t arms, int horizon, std::size_t cap)
{
    check_problem_size(arms, horizon);
    const std::uint64_t total = lattice_size(arms, horizon);
    if (total > cap) {
        throw ResourceError("belief lattice of " + std::to_string(total) + " entries exceeds cap " +
                            std::to_string(cap));
    }
    std::vector<Belief> out;
    out.reserve(static_cast<std::size_t>(total));
    for (int t = 0; t <= horizon; ++t) {
        Belief zero(arms);
        enumerate_layer(0, t, zero, arms, out);
    }
    return out;
}

const std::vector<Rational>& QStarTable::q(const Belief& b) const
{
    auto it = entries_.find(b);
    if (it == entries_.end()) throw std::out_of_range("no Q* entry for belief " + to_string(b));
    return it->second;
}

Rational QStarTable::value(const Belief& b) const
{
    if (b.elapsed() >= horizon_) return Rational(0);
    const auto& qs = q(b);
    Rational best = qs.front();
    for (const auto& v : qs) {
        if (v > best) best = v;
    }
    return best;
}

std::uint32_t QStarTable::optimal_arms(const Belief& b) const
{
    const auto& qs = q(b);
    const Rational best = value(b);
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (qs[i] == best) mask |= 1u << i;
    }
    return mask;
}

QStarTable solve_bamdp_exact(std::size_t arms, int horizon, std::size_t cap)
{
    const auto beliefs = enumerate_beliefs(arms, horizon, cap);
    QStarTable table;
    table.arms_ = arms;
    table.horizon_ = horizon;
    table.entries_.reserve(beliefs.size());

    // Beliefs are ordered by elapsed time, so a reverse sweep sees children first.
    for (auto it = beliefs.rbegin(); it != beliefs.rend(); ++it) {
        const Belief& b = *it;
        if (b.elapsed() >= horizon) continue;
        std::vector<Rational> qs(arms);
        for (std::size_t i = 0; i < arms; ++i) {
            const Rational p = b.mean(i);
            qs[i] = p * (1 + table.value(b.win(i))) + (1 - p) * table.value(b.loss(i));
        }
        table.entries_.emplace(b, std::move(qs));
    }
    return table;
}

Rational greedy_value(std::size_t arms, int horizon, std::size_t cap)
{
    const auto beliefs = enumerate_beliefs(arms, horizon, cap);
    std::unordered_map<Belief, Rational, BeliefHash> values;
    values.reserve(beliefs.size());
    for (auto it = beliefs.rbegin(); it != beliefs.rend(); ++it) {
        const Belief& b = *it;
        if (b.elapsed() >= horizon) {
            values.emplace(b, Rational(0));
            continue;
        }
        const std::uint32_t greedy = b.greedy_arms();
        Rational total = 0;
        for (std::size_t i = 0; i < arms; ++i) {
            if (!has_arm(greedy, i)) continue;
            const Rational p = b.mean(i);
            total += p * (1 + values.at(b.win(i))) + (1 - p) * values.at(b.loss(i));
        }
        total /= arm_count(greedy);
        values.emplace(b, std::move(total));
    }
    return values.at(Belief::zero(arms));
}

} // namespace mbamdp
