#include "metabamdp/heuristic_fit.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace mbamdp {

std::string to_string(SignConvention s) { return s == SignConvention::value_seeking ? "+1" : "-1"; }

SignConvention parse_sign_convention(const std::string& text)
{
    if (text == "+1" || text == "1" || text == "plus") return SignConvention::value_seeking;
    if (text == "-1" || text == "minus") return SignConvention::negated_exponent;
    throw std::invalid_argument("unknown sign convention '" + text + "' (expected +1 or -1)");
}

double posterior_std(int successes, int failures)
{
    if (successes < 0 || failures < 0) throw std::invalid_argument("negative belief count");
    const double a = successes + 1.0;
    const double b = failures + 1.0;
    const double n = a + b;
    return std::sqrt(a * b / (n * n * (n + 1.0)));
}

std::vector<double> heuristic_probabilities(const Belief& b, const HeuristicParams& params, SignConvention sign)
{
    const double s = sign_of(sign);
    std::vector<double> logits(b.arms());
    for (std::size_t i = 0; i < b.arms(); ++i) {
        const double mean = (b.successes(i) + 1.0) / (b.pulls(i) + 2.0);
        logits[i] = s * (params.beta * mean + params.omega * posterior_std(b.successes(i), b.failures(i)));
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0;
    for (double& z : logits) {
        z = std::exp(z - top);
        total += z;
    }
    for (double& z : logits) z /= total;
    return logits;
}

namespace {

// Precomputed per-step features: the chosen arm's (mean, std) followed by the others.
struct Features {
    std::size_t arms = 0;
    std::vector<double> mean;  // steps x arms
    std::vector<double> sd;    // steps x arms
    std::vector<std::uint8_t> chosen;
    bool omega_matters = false;

    explicit Features(const Trajectory& trajectory) : arms(trajectory.arms)
    {
        Belief b = Belief::zero(trajectory.arms);
        for (const auto& step : trajectory.steps) {
            double first_sd = -1;
            for (std::size_t i = 0; i < arms; ++i) {
                mean.push_back((b.successes(i) + 1.0) / (b.pulls(i) + 2.0));
                const double s = posterior_std(b.successes(i), b.failures(i));
                sd.push_back(s);
                if (first_sd < 0) first_sd = s;
                if (s != first_sd) omega_matters = true;
            }
            chosen.push_back(step.arm);
            b = b.child(step.arm, step.reward != 0);
        }
    }

    double nll(double beta, double omega, double s) const
    {
        double total = 0;
        const std::size_t steps = chosen.size();
        if (arms == 2) {
            for (std::size_t t = 0; t < steps; ++t) {
                const std::size_t c = chosen[t];
                const std::size_t o = 1 - c;
                const double gap = s * (beta * (mean[2 * t + o] - mean[2 * t + c]) + omega * (sd[2 * t + o] - sd[2 * t + c]));
                // -log sigmoid(-gap), computed stably
                total += gap > 0 ? gap + std::log1p(std::exp(-gap)) : std::log1p(std::exp(gap));
            }
            return total;
        }
        for (std::size_t t = 0; t < steps; ++t) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < arms; ++i) {
                top = std::max(top, s * (beta * mean[arms * t + i] + omega * sd[arms * t + i]));
            }
            double sum = 0;
            for (std::size_t i = 0; i < arms; ++i) {
                sum += std::exp(s * (beta * mean[arms * t + i] + omega * sd[arms * t + i]) - top);
            }
            const std::size_t c = chosen[t];
            total -= s * (beta * mean[arms * t + c] + omega * sd[arms * t + c]) - top - std::log(sum);
        }
        return total;
    }
};

template <class F>
double golden_section(F&& f, double lo, double hi, double tolerance)
{
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tolerance) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

} // namespace

double heuristic_loglik(const Trajectory& trajectory, const HeuristicParams& params, SignConvention sign)
{
    return -Features(trajectory).nll(params.beta, params.omega, sign_of(sign));
}

Trajectory simulate_heuristic_episode(int horizon, const HeuristicParams& params, SignConvention sign,
                                      const Environment& env, std::mt19937_64& rng)
{
    env.validate();
    Trajectory trajectory;
    trajectory.arms = env.arms();
    Belief b = Belief::zero(env.arms());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < horizon; ++t) {
        const auto probs = heuristic_probabilities(b, params, sign);
        double u = unit(rng);
        std::size_t arm = probs.size() - 1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (u < probs[i]) {
                arm = i;
                break;
            }
            u -= probs[i];
        }
        const bool won = unit(rng) < env.probs[arm];
        trajectory.steps.push_back(TrajectoryStep{t, static_cast<std::uint8_t>(arm),
                                                  static_cast<std::uint8_t>(won ? 1 : 0), {}});
        b = b.child(arm, won);
    }
    return trajectory;
}

namespace {

template <class Objective>
TrajectoryFit minimise(Objective&& nll, int grid, double tolerance)
{
    if (grid < 2) throw std::invalid_argument("fit grid needs at least 2 points per axis");
    const double beta_step = (kBetaMax - kBetaMin) / grid;
    const double omega_step = (kOmegaMax - kOmegaMin) / grid;

    // Uniform-policy limit of the box, so the fit never does worse than it.
    double best_beta = 0.0;
    double best_omega = 0.0;
    double best = nll(0.0, 0.0);
    for (int i = 0; i < grid; ++i) {
        const double beta = kBetaMin + (i + 0.5) * beta_step;
        for (int j = 0; j < grid; ++j) {
            const double omega = kOmegaMin + (j + 0.5) * omega_step;
            const double v = nll(beta, omega);
            if (v < best) {
                best = v;
                best_beta = beta;
                best_omega = omega;
            }
        }
    }

    // Alternate golden-section line searches inside the neighbouring cells.
    for (int round = 0; round < 60; ++round) {
        const double previous_omega = best_omega;
        const double lo_w = std::max(kOmegaMin, best_omega - omega_step);
        const double hi_w = std::min(kOmegaMax, best_omega + omega_step);
        const double omega = golden_section([&](double w) { return nll(best_beta, w); }, lo_w, hi_w, tolerance / 4);
        if (const double v = nll(best_beta, omega); v < best) {
            best_omega = omega;
            best = v;
        }
        const double lo_b = std::max(kBetaMin, best_beta - beta_step);
        const double hi_b = std::min(kBetaMax, best_beta + beta_step);
        const double beta = golden_section([&](double x) { return nll(x, best_omega); }, lo_b, hi_b, tolerance / 4);
        if (const double v = nll(beta, best_omega); v < best) {
            best_beta = beta;
            best = v;
        }
        if (round > 0 && std::abs(best_omega - previous_omega) < tolerance) break;
    }

    TrajectoryFit fit;
    fit.beta = best_beta;
    fit.omega = best_omega;
    fit.nll = best;
    const double edge_beta = 0.5 * beta_step;
    const double edge_omega = 0.5 * omega_step;
    fit.boundary_hit = best_beta <= kBetaMin + edge_beta || best_beta >= kBetaMax - edge_beta ||
                       best_omega <= kOmegaMin + edge_omega || best_omega >= kOmegaMax - edge_omega;
    return fit;
}

std::string signature_of(const Trajectory& trajectory)
{
    std::string signature = std::to_string(trajectory.arms) + ":";
    for (const auto& step : trajectory.steps) {
        signature += static_cast<char>('a' + step.arm);
        signature += step.reward ? '1' : '0';
    }
    return signature;
}

} // namespace

TrajectoryFit fit_trajectory(const Trajectory& trajectory, const FitOptions& options)
{
    const Features features(trajectory);
    const double s = sign_of(options.sign);
    TrajectoryFit fit = minimise([&](double b, double w) { return features.nll(b, w, s); }, options.grid,
                                 options.omega_tolerance);
    fit.degenerate = !features.omega_matters;
    return fit;
}

TrajectoryFit fit_pooled(std::span<const Trajectory> batch, const FitOptions& options, int grid)
{
    if (batch.empty()) throw std::invalid_argument("fit_pooled needs at least one trajectory");
    std::map<std::string, std::size_t> index;
    std::vector<Features> features;
    std::vector<double> weight;
    bool informative = false;
    for (const auto& trajectory : batch) {
        auto [it, inserted] = index.emplace(signature_of(trajectory), features.size());
        if (inserted) {
            features.emplace_back(trajectory);
            weight.push_back(0.0);
            informative = informative || features.back().omega_matters;
        }
        weight[it->second] += 1.0;
    }
    const double s = sign_of(options.sign);
    TrajectoryFit fit = minimise(
        [&](double b, double w) {
            double total = 0;
            for (std::size_t i = 0; i < features.size(); ++i) total += weight[i] * features[i].nll(b, w, s);
            return total;
        },
        grid, options.omega_tolerance);
    fit.degenerate = !informative;
    return fit;
}

FitSummary fit_omega(std::span<const Trajectory> batch, const FitOptions& options)
{
    if (batch.empty()) throw std::invalid_argument("fit_omega needs at least one trajectory");

    // The likelihood only depends on the action/reward sequence.
    std::map<std::string, std::size_t> unique_index;
    std::vector<const Trajectory*> unique;
    std::vector<std::size_t> slot(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        auto [it, inserted] = unique_index.emplace(signature_of(batch[i]), unique.size());
        if (inserted) unique.push_back(&batch[i]);
        slot[i] = it->second;
    }

    std::vector<TrajectoryFit> unique_fits(unique.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, unique.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < unique.size(); ++i) unique_fits[i] = fit_trajectory(*unique[i], options);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < unique.size(); i += workers) unique_fits[i] = fit_trajectory(*unique[i], options);
            });
        }
        for (auto& th : pool) th.join();
    }

    FitSummary summary;
    summary.sign = options.sign;
    summary.fits.reserve(batch.size());
    double sum = 0;
    double sum_sq = 0;
    double beta_sum = 0;
    std::size_t boundary = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const TrajectoryFit& fit = unique_fits[slot[i]];
        summary.fits.push_back(fit);
        if (fit.degenerate) {
            ++summary.degenerate;
            continue;
        }
        ++summary.used;
        sum += fit.omega;
        sum_sq += fit.omega * fit.omega;
        beta_sum += fit.beta;
        if (fit.boundary_hit) ++boundary;
    }
    if (summary.used == 0) {
        summary.mean_omega = std::numeric_limits<double>::quiet_NaN();
        summary.sd_omega = std::numeric_limits<double>::quiet_NaN();
        summary.mean_beta = std::numeric_limits<double>::quiet_NaN();
        return summary;
    }
    const double n = static_cast<double>(summary.used);
    summary.mean_omega = sum / n;
    summary.mean_beta = beta_sum / n;
    summary.sd_omega = summary.used > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1))) : 0.0;
    summary.boundary_rate = boundary / n;
    return summary;
}

std::string fit_summary_json(const FitSummary& summary)
{
    nlohmann::json j;
    auto number = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    j["mean_omega"] = number(summary.mean_omega);
    j["sd_omega"] = number(summary.sd_omega);
    j["mean_beta"] = number(summary.mean_beta);
    j["fitted"] = summary.used;
    j["degenerate"] = summary.degenerate;
    j["boundary_hit_rate"] = summary.boundary_rate;
    j["sign_convention"] = to_string(summary.sign);
    return j.dump(2);
}

} // namespace mbamdp
