#ifndef METABAMDP_HEURISTIC_FIT_HPP
#define METABAMDP_HEURISTIC_FIT_HPP

#include "metabamdp/bandit.hpp"
#include "metabamdp/metrics.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mbamdp {

/// Softmax policy with an uncertainty bonus:
///   pi(i | b) ∝ exp(s * (beta * mean_i + omega * std_i)).
/// s = +1 is the usual value-seeking softmax; s = -1 is the form with the
/// negated exponent.
struct HeuristicParams {
    double beta = 0.0;
    double omega = 0.0;
};

enum class SignConvention { value_seeking, negated_exponent };

inline double sign_of(SignConvention s) { return s == SignConvention::value_seeking ? 1.0 : -1.0; }
std::string to_string(SignConvention s);
SignConvention parse_sign_convention(const std::string& text); // "+1"/"plus" or "-1"/"minus"

inline constexpr double kBetaMin = 0.0;
inline constexpr double kBetaMax = 100.0;
inline constexpr double kOmegaMin = -10.0;
inline constexpr double kOmegaMax = 10.0;

/// Standard deviation of Beta(alpha + 1, beta + 1).
double posterior_std(int successes, int failures);

std::vector<double> heuristic_probabilities(const Belief& b, const HeuristicParams& params, SignConvention sign);

double heuristic_loglik(const Trajectory& trajectory, const HeuristicParams& params,
                        SignConvention sign = SignConvention::value_seeking);

Trajectory simulate_heuristic_episode(int horizon, const HeuristicParams& params, SignConvention sign,
                                      const Environment& env, std::mt19937_64& rng);

struct TrajectoryFit {
    double beta = 0.0;
    double omega = 0.0;
    double nll = 0.0;
    bool boundary_hit = false;
    bool degenerate = false; ///< omega has no effect on the likelihood
};

struct FitOptions {
    int grid = 100;
    double omega_tolerance = 1e-4;
    SignConvention sign = SignConvention::value_seeking;
    std::size_t workers = 1;
};

struct FitSummary {
    std::vector<TrajectoryFit> fits; ///< one per input trajectory
    double mean_omega = 0.0;         ///< over non-degenerate fits; NaN if none
    double sd_omega = 0.0;
    double mean_beta = 0.0;
    std::size_t used = 0;
    std::size_t degenerate = 0;
    double boundary_rate = 0.0;
    SignConvention sign = SignConvention::value_seeking;
};

/// Grid search over the (beta, omega) box followed by golden-section refinement.
TrajectoryFit fit_trajectory(const Trajectory& trajectory, const FitOptions& options = {});
/// Fits each trajectory; identical action/reward sequences are fitted once.
FitSummary fit_omega(std::span<const Trajectory> batch, const FitOptions& options = {});

/// One (beta, omega) for the whole batch: minimises the summed NLL. Coarse grid
/// of `grid` x `grid` cells, then the same refinement as fit_trajectory.
TrajectoryFit fit_pooled(std::span<const Trajectory> batch, const FitOptions& options = {}, int grid = 20);

/// JSON summary: mean, sd, boundary-hit rate and sign convention.
std::string fit_summary_json(const FitSummary& summary);

} // namespace mbamdp

#endif
