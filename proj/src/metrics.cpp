#include "metabamdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mbamdp {

int Trajectory::computation_count() const
{
    int total = 0;
    for (const auto& s : steps) total += static_cast<int>(s.computations.size());
    return total;
}

Belief Trajectory::belief_before(std::size_t i) const
{
    Belief b = Belief::zero(arms);
    for (std::size_t j = 0; j < i && j < steps.size(); ++j) b = b.child(steps[j].arm, steps[j].reward != 0);
    return b;
}

std::mt19937_64 make_generator(std::uint64_t master_seed, std::uint64_t task_index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(task_index), static_cast<std::uint32_t>(task_index >> 32)};
    return std::mt19937_64(seq);
}

Trajectory simulate_episode(PolicyWalker& walker, const Environment& env, std::mt19937_64& rng)
{
    env.validate();
    if (env.arms() != walker.arms()) throw std::invalid_argument("environment arm count does not match the policy");
    Trajectory trajectory;
    trajectory.arms = walker.arms();
    MetaState state = initial_meta_state(walker.arms(), walker.horizon());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < walker.horizon(); ++t) {
        const StepResolution& step = walker.resolve(state);
        std::size_t arm = lowest_arm(step.arms);
        const int width = arm_count(step.arms);
        if (width > 1) {
            int pick = std::uniform_int_distribution<int>(0, width - 1)(rng);
            for (std::size_t a = 0; a < walker.arms(); ++a) {
                if (has_arm(step.arms, a) && pick-- == 0) {
                    arm = a;
                    break;
                }
            }
        }
        const bool won = unit(rng) < env.probs[arm];
        trajectory.steps.push_back(TrajectoryStep{t, static_cast<std::uint8_t>(arm),
                                                  static_cast<std::uint8_t>(won ? 1 : 0), step.expanded});
        state = walker.successor(step, arm, won);
    }
    return trajectory;
}

Trajectory simulate_episode(const MetaPolicy& policy, const Environment& env, std::mt19937_64& rng)
{
    PolicyWalker walker(policy);
    return simulate_episode(walker, env, rng);
}

Trajectory simulate_episode(const MetaPolicy& policy, const Environment& env, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return simulate_episode(policy, env, rng);
}

double normalized_reward(double value, double greedy, double optimal)
{
    if (!(optimal > greedy)) throw std::domain_error("normalized reward undefined: V* does not exceed V^g");
    return (value - greedy) / (optimal - greedy);
}

bool exploratory_flag(const Belief& b, std::size_t arm)
{
    const std::uint32_t best = b.greedy_arms();
    if (!has_arm(best, arm)) return true;
    for (std::size_t j = 0; j < b.arms(); ++j) {
        if (j != arm && has_arm(best, j) && b.pulls(arm) < b.pulls(j)) return true;
    }
    return false;
}

double action_entropy(std::span<const int> histogram)
{
    double total = 0;
    for (int c : histogram) total += c;
    if (total <= 0) throw std::invalid_argument("entropy of an empty histogram");
    double h = 0;
    for (int c : histogram) {
        if (c == 0) continue;
        const double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

double action_entropy(const Trajectory& trajectory)
{
    std::vector<int> histogram(trajectory.arms, 0);
    for (const auto& s : trajectory.steps) ++histogram[s.arm];
    return action_entropy(histogram);
}

double mean_action_entropy(std::span<const Trajectory> batch)
{
    if (batch.empty()) throw std::invalid_argument("empty batch");
    double total = 0;
    for (const auto& t : batch) total += action_entropy(t);
    return total / static_cast<double>(batch.size());
}

std::vector<double> default_symmetric_grid()
{
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    return grid;
}

std::vector<MostComputed> most_computed_env(std::span<const MetaPolicy> policies, std::span<const double> grid)
{
    std::vector<MostComputed> out;
    for (const auto& policy : policies) {
        MostComputed best;
        for (double p : grid) {
            const double n = policy_value_in_env(policy, Environment{std::vector<double>(policy.arms, p)}).computations;
            if (n > best.expected_computations * (1 + 1e-12) + 1e-15) {
                best.expected_computations = n;
                best.p = p;
            }
        }
        out.push_back(best);
    }
    return out;
}

double sensitivity(std::span<const double> costs, std::span<const double> values)
{
    if (costs.size() != values.size()) throw std::invalid_argument("cost and value grids differ in length");
    const std::size_t n = costs.size();
    if (n < 3) throw std::invalid_argument("sensitivity needs at least 3 grid points");
    const double h = (costs[n - 1] - costs[0]) / static_cast<double>(n - 1);
    if (!(h > 0)) throw std::invalid_argument("cost grid must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((costs[i] - costs[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw std::invalid_argument("cost grid must be uniform");
        }
    }
    std::vector<double> slope(n);
    slope[0] = (values[1] - values[0]) / h;
    slope[n - 1] = (values[n - 1] - values[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (values[i + 1] - values[i - 1]) / (2 * h);
    double integral = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) integral += 0.5 * h * (slope[i] * slope[i] + slope[i + 1] * slope[i + 1]);
    return integral;
}

std::string format_field(const std::optional<double>& v)
{
    if (!v || !std::isfinite(*v)) return {};
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", *v);
    return buffer;
}

namespace {

std::string format_count(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }

} // namespace

std::string to_csv_row(const MetricsRecord& r)
{
    auto env_p = [&](std::size_t i) -> std::optional<double> {
        if (i < r.env_probs.size()) return r.env_probs[i];
        return std::nullopt;
    };
    std::string row;
    row += std::to_string(r.arms) + ',' + std::to_string(r.horizon) + ',' + format_field(r.cost) + ',';
    row += format_field(env_p(0)) + ',' + format_field(env_p(1)) + ',' + r.env_kind + ',';
    row += format_field(r.value) + ',' + format_field(r.greedy_value) + ',' + format_field(r.optimal_value) + ',';
    row += format_field(r.normalized) + ',' + format_field(r.n_c_mean) + ',' + format_field(r.tau_c_mean_norm) + ',';
    row += format_field(r.tau_explore_mean) + ',' + format_field(r.entropy_bits) + ',' + format_field(r.omega) + ',';
    row += format_count(r.seed) + ',' + format_count(r.episodes);
    return row;
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> rows)
{
    os << kMetricsHeader << '\n';
    for (const auto& r : rows) os << to_csv_row(r) << '\n';
}

template <class Scalar>
void fill_observables(MetricsRecord& record, const PolicyStats<Scalar>& policy, const PolicyStats<Scalar>& greedy,
                      const PolicyStats<Scalar>& optimal)
{
    auto d = [](const Scalar& v) {
        if constexpr (std::is_same_v<Scalar, double>) {
            return v;
        } else {
            return v.get_d();
        }
    };
    record.value = d(policy.reward);
    record.greedy_value = d(greedy.reward);
    record.optimal_value = d(optimal.reward);
    const Scalar gap = optimal.reward - greedy.reward;
    // Explicit environments use doubles; treat a gap at rounding level as zero.
    bool defined = gap > Scalar(0);
    if constexpr (std::is_same_v<Scalar, double>) defined = gap > 1e-12;
    record.normalized = defined ? std::optional<double>(d((policy.reward - greedy.reward) / gap)) : std::nullopt;
    record.n_c_mean = d(policy.computations);
    if (policy.computations > Scalar(0)) {
        record.tau_c_mean_norm = d(policy.computation_time_sum / policy.computations) / record.horizon;
    }
    if (policy.exploratory > Scalar(0)) {
        record.tau_explore_mean = d(policy.exploratory_time_sum / policy.exploratory);
    }
    record.entropy_bits = policy.entropy_bits;
}

template void fill_observables<double>(MetricsRecord&, const PolicyStats<double>&, const PolicyStats<double>&,
                                       const PolicyStats<double>&);
template void fill_observables<Rational>(MetricsRecord&, const PolicyStats<Rational>&, const PolicyStats<Rational>&,
                                         const PolicyStats<Rational>&);

} // namespace mbamdp
