#ifndef METABAMDP_VALIDATION_HPP
#define METABAMDP_VALIDATION_HPP

#include "metabamdp/bandit.hpp"
#include "metabamdp/meta_solver.hpp"
#include "metabamdp/policy_eval.hpp"
#include "metabamdp/rational.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mbamdp {

struct SettingResult {
    ApproxParams params;
    Rational meta_value;
    Rational external_value;
    Rational expected_computations;
    std::size_t graph_nodes = 0;
};

struct PairAgreement {
    std::size_t first = 0;
    std::size_t second = 0;
    bool behavior = false; ///< identical conditional action distributions at every history
    bool meta_value = false;
};

struct ApproximationReport {
    std::size_t arms = 0;
    int horizon = 0;
    Rational cost;
    std::vector<SettingResult> settings;
    std::vector<PairAgreement> pairs;

    bool behavior_agrees() const;
    bool meta_values_agree() const;
};

/// Solves under every setting and compares the induced physical behavior and the
/// meta-values of all pairs.
ApproximationReport validate_approximation(std::size_t arms, int horizon, const Rational& cost,
                                           const std::vector<ApproxParams>& settings, const QStarTable& qstar);

/// The k x k_c x d product.
std::vector<ApproxParams> param_grid(const std::vector<int>& k, const std::vector<int>& k_c, const std::vector<int>& d);

enum class WalkCheck { mind_changer, minimality, forced_termination, m_belief_restriction };
std::string to_string(WalkCheck check);

struct WalkViolation {
    WalkCheck check;
    std::string state;
    std::string detail;
};

struct WalkReport {
    std::size_t entry_states = 0;
    std::size_t computing_states = 0;
    std::vector<WalkViolation> violations;

    bool passed() const { return violations.empty(); }
    std::size_t count(WalkCheck check) const;
};

/// Walks every entry state reachable under the policy and checks that computation
/// sequences change the root argmax set at their end and not before, that every
/// state with forced termination terminates, and that no sequence at an M-belief
/// starts on a non-greedy root arm.
WalkReport walk_theorems(const MetaPolicy& policy, const QStarTable& qstar);

} // namespace mbamdp

#endif
