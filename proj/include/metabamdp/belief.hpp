#ifndef METABAMDP_BELIEF_HPP
#define METABAMDP_BELIEF_HPP

#include "metabamdp/rational.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace mbamdp {

inline constexpr std::size_t kMaxArms = 8;
inline constexpr int kMaxCount = 255;

/// Beta-Bernoulli information state: per-arm success and failure counts under a
/// uniform Beta(1,1) prior. Elapsed time is the total count and is never stored.
class Belief {
public:
    Belief() = default;
    explicit Belief(std::size_t arms);
    /// Pairs of (successes, failures), one per arm.
    Belief(std::initializer_list<std::pair<int, int>> counts);

    static Belief zero(std::size_t arms) { return Belief(arms); }

    std::size_t arms() const { return arms_; }
    int successes(std::size_t arm) const { return counts_[2 * arm]; }
    int failures(std::size_t arm) const { return counts_[2 * arm + 1]; }
    int pulls(std::size_t arm) const { return successes(arm) + failures(arm); }
    int elapsed() const;

    Belief win(std::size_t arm) const;
    Belief loss(std::size_t arm) const;
    Belief child(std::size_t arm, bool won) const { return won ? win(arm) : loss(arm); }

    /// Posterior mean of arm `arm`, (alpha+1)/(alpha+beta+2).
    Rational mean(std::size_t arm) const;

    /// Bitmask of arms attaining the largest posterior mean.
    std::uint32_t greedy_arms() const;

    const std::array<std::uint8_t, 2 * kMaxArms>& raw() const { return counts_; }

    friend auto operator<=>(const Belief&, const Belief&) = default;
    friend bool operator==(const Belief&, const Belief&) = default;

private:
    std::uint8_t arms_ = 0;
    std::array<std::uint8_t, 2 * kMaxArms> counts_{};
};

struct BeliefHash {
    std::size_t operator()(const Belief& b) const noexcept
    {
        std::uint64_t h = 1469598103934665603ull;
        h = (h ^ b.arms()) * 1099511628211ull;
        for (std::size_t i = 0; i < 2 * b.arms(); ++i) {
            h = (h ^ b.raw()[i]) * 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

/// "a1.b1,a2.b2,..." e.g. "0.0,2.3".
std::string to_string(const Belief& b);
std::ostream& operator<<(std::ostream& os, const Belief& b);
/// Inverse of to_string. Throws std::invalid_argument on malformed text.
Belief parse_belief(std::string_view text);

Rational posterior_mean(int successes, int failures);

/// Helpers for arm bitmasks.
inline bool has_arm(std::uint32_t mask, std::size_t arm) { return (mask >> arm) & 1u; }
int arm_count(std::uint32_t mask);
std::size_t lowest_arm(std::uint32_t mask);

} // namespace mbamdp

#endif
