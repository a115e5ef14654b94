#ifndef METABAMDP_BANDIT_HPP
#define METABAMDP_BANDIT_HPP

#include "metabamdp/belief.hpp"
#include "metabamdp/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbamdp {

inline constexpr std::size_t kDefaultLatticeCap = 5'000'000;

/// Stationary Bernoulli reward probabilities, one per arm.
struct Environment {
    std::vector<double> probs;

    void validate() const;
    std::size_t arms() const { return probs.size(); }
};

/// C(T + 2N, 2N), the number of beliefs reachable within the horizon.
std::uint64_t lattice_size(std::size_t arms, int horizon);

/// Every belief with total count at most `horizon`, ordered by elapsed time and
/// then lexicographically.
std::vector<Belief> enumerate_beliefs(std::size_t arms, int horizon,
                                      std::size_t cap = kDefaultLatticeCap);

/// Optimal BAMDP action values for all non-terminal beliefs. Immutable once built.
class QStarTable {
public:
    std::size_t arms() const { return arms_; }
    int horizon() const { return horizon_; }
    std::size_t size() const { return entries_.size(); }

    bool contains(const Belief& b) const { return entries_.count(b) != 0; }
    const std::vector<Rational>& q(const Belief& b) const;
    const Rational& q(const Belief& b, std::size_t arm) const { return q(b)[arm]; }
    /// V*(b); zero for beliefs at the horizon.
    Rational value(const Belief& b) const;

    /// Bitmask of arms maximising Q*(b, .).
    std::uint32_t optimal_arms(const Belief& b) const;

private:
    friend QStarTable solve_bamdp_exact(std::size_t, int, std::size_t);

    std::size_t arms_ = 0;
    int horizon_ = 0;
    std::unordered_map<Belief, std::vector<Rational>, BeliefHash> entries_;
};

QStarTable solve_bamdp_exact(std::size_t arms, int horizon,
                             std::size_t cap = kDefaultLatticeCap);

/// Bayes value from the all-zero belief of the policy that always pulls a
/// posterior-mean argmax, ties averaged uniformly.
Rational greedy_value(std::size_t arms, int horizon, std::size_t cap = kDefaultLatticeCap);

void check_problem_size(std::size_t arms, int horizon);

} // namespace mbamdp

#endif
