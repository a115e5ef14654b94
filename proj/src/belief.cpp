#include "metabamdp/belief.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>
#include <vector>

namespace mbamdp {

Belief::Belief(std::size_t arms)
    : arms_(static_cast<std::uint8_t>(arms))
{
    if (arms > kMaxArms) throw std::invalid_argument("too many arms: " + std::to_string(arms));
}

Belief::Belief(std::initializer_list<std::pair<int, int>> counts)
    : Belief(counts.size())
{
    std::size_t i = 0;
    for (auto [s, f] : counts) {
        if (s < 0 || f < 0 || s > kMaxCount || f > kMaxCount) {
            throw std::invalid_argument("belief counts out of range");
        }
        counts_[2 * i] = static_cast<std::uint8_t>(s);
        counts_[2 * i + 1] = static_cast<std::uint8_t>(f);
        ++i;
    }
}

int Belief::elapsed() const
{
    int total = 0;
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(arms_); ++i) total += counts_[i];
    return total;
}

Belief Belief::win(std::size_t arm) const
{
    Belief next = *this;
    if (next.counts_[2 * arm] == kMaxCount) throw std::overflow_error("belief count overflow");
    ++next.counts_[2 * arm];
    return next;
}

Belief Belief::loss(std::size_t arm) const
{
    Belief next = *this;
    if (next.counts_[2 * arm + 1] == kMaxCount) throw std::overflow_error("belief count overflow");
    ++next.counts_[2 * arm + 1];
    return next;
}

Rational Belief::mean(std::size_t arm) const { return posterior_mean(successes(arm), failures(arm)); }

std::uint32_t Belief::greedy_arms() const
{
    // (a+1)/(n+2) compared by cross-multiplication to stay in integers.
    std::uint32_t mask = 0;
    long best_num = -1;
    long best_den = 1;
    for (std::size_t i = 0; i < arms(); ++i) {
        const long num = successes(i) + 1;
        const long den = pulls(i) + 2;
        const long lhs = num * best_den;
        const long rhs = best_num * den;
        if (best_num < 0 || lhs > rhs) {
            mask = 1u << i;
            best_num = num;
            best_den = den;
        } else if (lhs == rhs) {
            mask |= 1u << i;
        }
    }
    return mask;
}

std::string to_string(const Belief& b)
{
    std::string out;
    for (std::size_t i = 0; i < b.arms(); ++i) {
        if (i) out += ',';
        out += std::to_string(b.successes(i));
        out += '.';
        out += std::to_string(b.failures(i));
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const Belief& b) { return os << '(' << to_string(b) << ')'; }

Rational posterior_mean(int successes, int failures)
{
    if (successes < 0 || failures < 0) throw std::invalid_argument("negative belief count");
    return make_rational(successes + 1, successes + failures + 2);
}

int arm_count(std::uint32_t mask) { return std::popcount(mask); }

std::size_t lowest_arm(std::uint32_t mask)
{
    if (mask == 0) throw std::invalid_argument("empty arm set");
    return static_cast<std::size_t>(std::countr_zero(mask));
}

} // namespace mbamdp

namespace mbamdp {

Belief parse_belief(std::string_view text)
{
    auto fail = [&] { return std::invalid_argument("malformed belief '" + std::string(text) + "'"); };
    std::vector<std::pair<int, int>> counts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, comma - pos);
        const std::size_t dot = item.find('.');
        if (dot == std::string_view::npos) throw fail();
        int s = 0;
        int f = 0;
        const auto r1 = std::from_chars(item.data(), item.data() + dot, s);
        const auto r2 = std::from_chars(item.data() + dot + 1, item.data() + item.size(), f);
        if (r1.ec != std::errc{} || r1.ptr != item.data() + dot || r2.ec != std::errc{} ||
            r2.ptr != item.data() + item.size() || s < 0 || f < 0 || s + f > kMaxCount) {
            throw fail();
        }
        counts.emplace_back(s, f);
        pos = comma + 1;
    }
    if (counts.empty() || counts.size() > kMaxArms) throw fail();
    Belief b(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (int n = 0; n < counts[i].first; ++n) b = b.win(i);
        for (int n = 0; n < counts[i].second; ++n) b = b.loss(i);
    }
    return b;
}

} // namespace mbamdp
