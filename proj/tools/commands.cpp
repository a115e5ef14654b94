#include "commands.hpp"

#include "metabamdp/errors.hpp"
#include "metabamdp/heuristic_fit.hpp"
#include "metabamdp/metrics.hpp"
#include "metabamdp/oracle.hpp"
#include "metabamdp/policy_eval.hpp"
#include "metabamdp/validation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace mbamdp::cli {

namespace fs = std::filesystem;

namespace {

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& body)
{
    if (n == 0) return;
    workers = std::max<std::size_t>(1, std::min(workers, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                next = n;
                return;
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

std::string fmt_double(double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

fs::path output_path(const RunConfig& config, const std::string& name)
{
    fs::create_directories(config.output_dir);
    return fs::path(config.output_dir) / name;
}

Environment sample_environment(std::size_t arms, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Environment env;
    for (std::size_t i = 0; i < arms; ++i) env.probs.push_back(unit(rng));
    return env;
}

struct EnvTask {
    std::optional<Environment> env; ///< nullopt: uniform mixture
};

std::vector<EnvTask> env_tasks(const RunConfig& config)
{
    const EnvSpec spec = config.environments();
    if (spec.kind == EnvKind::uniform_mixture) return {EnvTask{}};
    std::vector<EnvTask> out;
    for (const auto& env : spec.environments) out.push_back(EnvTask{env});
    return out;
}

MetricsRecord base_record(const RunConfig& config, const Rational& cost, const EnvTask& task)
{
    MetricsRecord r;
    r.arms = config.arms;
    r.horizon = config.horizon;
    r.cost = to_double(cost);
    if (task.env) {
        r.env_probs = task.env->probs;
        r.env_kind = "explicit";
    } else {
        r.env_kind = "uniform-mixture";
    }
    return r;
}

/// Episodes for one (policy, environment) task, each drawn with a generator
/// derived from (seed, task index).
std::vector<Trajectory> simulate_batch(const MetaPolicy& policy, const EnvTask& task, std::uint64_t episodes,
                                       std::uint64_t seed, std::uint64_t task_index)
{
    std::mt19937_64 rng = make_generator(seed, task_index);
    PolicyWalker walker(policy);
    std::vector<Trajectory> batch;
    batch.reserve(episodes);
    for (std::uint64_t e = 0; e < episodes; ++e) {
        const Environment env = task.env ? *task.env : sample_environment(policy.arms, rng);
        batch.push_back(simulate_episode(walker, env, rng));
    }
    return batch;
}

std::string config_fingerprint(const RunConfig& config)
{
    RunConfig c = config;
    c.workers = 1; // scheduling does not change the output
    return std::to_string(fnv1a64(resolved_config_json(c)));
}

} // namespace

std::atomic<bool>& interrupt_flag()
{
    static std::atomic<bool> flag{false};
    return flag;
}

void write_config_snapshot(const RunConfig& config)
{
    std::ofstream(output_path(config, "resolved_config.json")) << resolved_config_json(config) << '\n';
}

std::vector<SolvedPolicy> obtain_policies(const RunConfig& config, SolveStats& stats, std::ostream& log)
{
    const PolicyCache cache(PolicyCache::resolve_directory(config.cache_dir));
    std::vector<std::optional<SolvedPolicy>> slots(config.costs.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < config.costs.size(); ++i) {
        const CacheKey key{config.arms, config.horizon, config.costs[i], config.params};
        CacheLookup lookup = cache.load(key);
        if (lookup.status == CacheStatus::hit) {
            ++stats.cache_hits;
            slots[i] = SolvedPolicy{config.costs[i], std::move(lookup.solution->policy),
                                    std::move(lookup.solution->values)};
            continue;
        }
        if (lookup.status == CacheStatus::corrupt) {
            ++stats.corrupt;
            log << "warning: " << lookup.message << "; re-solving\n";
        }
        missing.push_back(i);
    }
    if (!missing.empty()) {
        const QStarTable qstar = solve_bamdp_exact(config.arms, config.horizon);
        MetaGraph graph;
        try {
            graph = build_pruned_meta_graph(config.arms, config.horizon, qstar, config.params);
        } catch (const ResourceError& e) {
            throw ResourceError(std::string(e.what()) + " (N=" + std::to_string(config.arms) +
                                ", T=" + std::to_string(config.horizon) + ", " + config.params.to_string() + ")");
        }
        parallel_for(missing.size(), config.workers, [&](std::size_t m) {
            const std::size_t i = missing[m];
            MetaSolution solution = solve_meta(graph, config.costs[i]);
            cache.store(CacheKey{config.arms, config.horizon, config.costs[i], config.params}, solution.policy,
                        solution.values);
            slots[i] = SolvedPolicy{config.costs[i], std::move(solution.policy), std::move(solution.values)};
        });
        stats.solved += missing.size();
    }
    std::vector<SolvedPolicy> out;
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& log)
{
    SolveStats stats;
    const auto policies = obtain_policies(config, stats, log);
    write_config_snapshot(config);
    for (const auto& p : policies) {
        out << "c=" << to_string(p.cost) << " meta_value=" << to_string(p.values.root_value) << " ("
            << fmt_double(to_double(p.values.root_value)) << ") states=" << p.policy.actions.size() << '\n';
    }
    out << "policies=" << policies.size() << " solved=" << stats.solved << " cache_hits=" << stats.cache_hits
        << " corrupt=" << stats.corrupt << '\n';
    return kSuccess;
}

int cmd_sweep(const RunConfig& config, bool resume, std::ostream& out, std::ostream& log)
{
    SolveStats stats;
    const auto policies = obtain_policies(config, stats, log);
    const auto envs = env_tasks(config);
    const QStarTable qstar = solve_bamdp_exact(config.arms, config.horizon);
    write_config_snapshot(config);

    // Baselines do not depend on the cost.
    std::vector<std::pair<PolicyStats<double>, PolicyStats<double>>> env_baselines(envs.size());
    std::optional<std::pair<PolicyStats<Rational>, PolicyStats<Rational>>> bayes_baselines;
    parallel_for(envs.size(), config.workers, [&](std::size_t j) {
        if (!envs[j].env) return;
        env_baselines[j] = {
            baseline_value_in_env(Baseline::greedy, config.arms, config.horizon, *envs[j].env),
            baseline_value_in_env(Baseline::bayes_optimal, config.arms, config.horizon, *envs[j].env, &qstar)};
    });
    if (std::any_of(envs.begin(), envs.end(), [](const EnvTask& t) { return !t.env; })) {
        bayes_baselines.emplace(baseline_value_bayes(Baseline::greedy, config.arms, config.horizon),
                                baseline_value_bayes(Baseline::bayes_optimal, config.arms, config.horizon, &qstar));
    }

    const fs::path csv_path = output_path(config, "metrics.csv");
    const fs::path marker_path = output_path(config, "metrics.csv.incomplete");
    const std::string fingerprint = config_fingerprint(config);
    const std::size_t total = policies.size() * envs.size();

    std::size_t start = 0;
    if (resume && fs::exists(marker_path)) {
        std::ifstream marker(marker_path);
        std::string saved;
        marker >> start >> saved;
        if (saved != fingerprint) throw ConfigError("resume marker belongs to a different configuration");
        std::ifstream existing(csv_path);
        std::vector<std::string> lines;
        for (std::string line; std::getline(existing, line);) lines.push_back(line);
        if (lines.empty() || lines.size() < start + 1) throw ConfigError("metrics.csv is shorter than its resume marker");
        lines.resize(start + 1);
        std::ofstream rewrite(csv_path, std::ios::trunc);
        for (const auto& line : lines) rewrite << line << '\n';
        log << "resuming at row " << start << " of " << total << '\n';
    } else {
        std::ofstream(csv_path, std::ios::trunc) << kMetricsHeader << '\n';
    }
    auto write_marker = [&](std::size_t next) { std::ofstream(marker_path, std::ios::trunc) << next << ' ' << fingerprint << '\n'; };
    write_marker(start);

    std::ofstream csv(csv_path, std::ios::app);
    const std::size_t batch = std::max<std::size_t>(1, config.workers);
    for (std::size_t first = start; first < total; first += batch) {
        if (interrupt_flag().load()) {
            log << "interrupted after " << first << " of " << total << " rows; rerun with --resume\n";
            return kInterrupted;
        }
        const std::size_t count = std::min(batch, total - first);
        std::vector<MetricsRecord> rows(count);
        parallel_for(count, config.workers, [&](std::size_t offset) {
            const std::size_t task = first + offset;
            const SolvedPolicy& solved = policies[task / envs.size()];
            const std::size_t j = task % envs.size();
            MetricsRecord r = base_record(config, solved.cost, envs[j]);
            if (envs[j].env) {
                fill_observables(r, policy_value_in_env(solved.policy, *envs[j].env), env_baselines[j].first,
                                 env_baselines[j].second);
            } else {
                fill_observables(r, policy_value_bayes(solved.policy), bayes_baselines->first, bayes_baselines->second);
            }
            if (config.episodes > 0) {
                r.seed = config.seed;
                r.episodes = config.episodes;
                if (config.fit) {
                    const auto trajectories = simulate_batch(solved.policy, envs[j], config.episodes, config.seed, task);
                    FitOptions options;
                    options.sign = config.sign;
                    const FitSummary summary = fit_omega(trajectories, options);
                    if (summary.used > 0) r.omega = summary.mean_omega;
                }
            }
            rows[offset] = std::move(r);
        });
        for (const auto& r : rows) csv << to_csv_row(r) << '\n';
        csv.flush();
        write_marker(first + count);
    }
    csv.close();
    fs::remove(marker_path);
    out << "wrote " << total << " rows to " << csv_path.string() << " (solved=" << stats.solved
        << " cache_hits=" << stats.cache_hits << ")\n";
    return kSuccess;
}

int cmd_sensitivity(const RunConfig& config, std::ostream& out, std::ostream& log)
{
    if (config.arms != 2) throw ConfigError("sensitivity maps are defined over (p1, p2); use --arms 2");
    if (config.costs.size() < 3) throw ConfigError("sensitivity needs a cost grid of at least 3 points");
    std::vector<double> costs;
    for (const auto& c : config.costs) costs.push_back(to_double(c));
    try {
        sensitivity(costs, std::vector<double>(costs.size(), 0.0));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    SolveStats stats;
    const auto solved = obtain_policies(config, stats, log);
    write_config_snapshot(config);
    const int g = config.sensitivity_grid;
    struct Cell {
        double p1 = 0;
        double p2 = 0;
        std::optional<double> chi_tau;
        double chi_v = 0;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(g) * g);
    parallel_for(cells.size(), config.workers, [&](std::size_t idx) {
        Cell& cell = cells[idx];
        cell.p1 = static_cast<double>(idx / g) / (g - 1);
        cell.p2 = static_cast<double>(idx % g) / (g - 1);
        const Environment env{{cell.p1, cell.p2}};
        std::vector<double> reward;
        std::vector<double> tau;
        bool tau_defined = true;
        for (const auto& s : solved) {
            const auto stats_env = policy_value_in_env(s.policy, env);
            reward.push_back(stats_env.reward);
            if (stats_env.exploratory > 0) {
                tau.push_back(stats_env.exploratory_time_sum / stats_env.exploratory);
            } else {
                tau_defined = false;
            }
        }
        cell.chi_v = sensitivity(costs, reward);
        if (tau_defined) cell.chi_tau = sensitivity(costs, tau);
    });

    std::ofstream csv(output_path(config, "sensitivity.csv"), std::ios::trunc);
    csv << "p1,p2,chi_tau,chi_V\n";
    for (const auto& cell : cells) {
        csv << fmt_double(cell.p1) << ',' << fmt_double(cell.p2) << ',' << format_field(cell.chi_tau) << ','
            << fmt_double(cell.chi_v) << '\n';
    }

    std::vector<MetaPolicy> policies;
    for (const auto& s : solved) policies.push_back(s.policy);
    const auto grid = default_symmetric_grid();
    const auto peaks = most_computed_env(policies, grid);
    std::ofstream peak_csv(output_path(config, "most_computed.csv"), std::ios::trunc);
    peak_csv << "c,p_star,expected_computations\n";
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        peak_csv << fmt_double(costs[i]) << ',' << format_field(peaks[i].p) << ','
                 << fmt_double(peaks[i].expected_computations) << '\n';
    }
    out << "wrote " << cells.size() << " sensitivity cells and " << peaks.size() << " most-computed rows to "
        << config.output_dir << '\n';
    return kSuccess;
}

int cmd_fit(const RunConfig& config, const FitRequest& request, std::ostream& out, std::ostream& log)
{
    if (config.episodes == 0) throw ConfigError("fit needs --episodes > 0");
    if (request.source != "policy" && request.source != "heuristic") {
        throw ConfigError("fit source must be 'policy' or 'heuristic'");
    }
    const auto envs = env_tasks(config);
    std::vector<SolvedPolicy> solved;
    if (request.source == "policy") {
        SolveStats stats;
        solved = obtain_policies(config, stats, log);
    }
    write_config_snapshot(config);

    const std::size_t groups = request.source == "policy" ? solved.size() : 1;
    const std::size_t total = groups * envs.size();
    struct Result {
        MetricsRecord base;
        FitSummary summary;
        TrajectoryFit pooled;
    };
    std::vector<Result> results(total);
    FitOptions options;
    options.sign = config.sign;
    options.workers = config.workers;
    for (std::size_t task = 0; task < total; ++task) {
        const EnvTask& env = envs[task % envs.size()];
        std::vector<Trajectory> batch;
        Result& result = results[task];
        if (request.source == "policy") {
            const SolvedPolicy& s = solved[task / envs.size()];
            result.base = base_record(config, s.cost, env);
            batch = simulate_batch(s.policy, env, config.episodes, config.seed, task);
        } else {
            result.base = base_record(config, Rational(0), env);
            std::mt19937_64 rng = make_generator(config.seed, task);
            const HeuristicParams params{request.beta, request.omega};
            for (std::uint64_t e = 0; e < config.episodes; ++e) {
                const Environment sampled = env.env ? *env.env : sample_environment(config.arms, rng);
                batch.push_back(simulate_heuristic_episode(config.horizon, params, config.sign, sampled, rng));
            }
        }
        result.summary = fit_omega(batch, options);
        result.pooled = fit_pooled(batch, options);
    }

    std::ofstream csv(output_path(config, "fits.csv"), std::ios::trunc);
    csv << kMetricsHeader << '\n';
    nlohmann::json summaries = nlohmann::json::array();
    for (const auto& result : results) {
        for (const auto& fit : result.summary.fits) {
            MetricsRecord r = result.base;
            if (!fit.degenerate) r.omega = fit.omega;
            r.seed = config.seed;
            r.episodes = config.episodes;
            csv << to_csv_row(r) << '\n';
        }
        nlohmann::json entry = nlohmann::json::parse(fit_summary_json(result.summary));
        entry["c"] = result.base.cost;
        entry["env_kind"] = result.base.env_kind;
        entry["env"] = result.base.env_probs;
        entry["source"] = request.source;
        entry["pooled_beta"] = result.pooled.beta;
        entry["pooled_omega"] = result.pooled.omega;
        entry["episodes"] = config.episodes;
        entry["seed"] = config.seed;
        summaries.push_back(std::move(entry));
        out << "c=" << fmt_double(result.base.cost) << " env=" << result.base.env_kind;
        for (double p : result.base.env_probs) out << ' ' << fmt_double(p);
        out << " mean_omega=" << fmt_double(result.summary.mean_omega) << " fitted=" << result.summary.used
            << " degenerate=" << result.summary.degenerate << " pooled_omega=" << fmt_double(result.pooled.omega)
            << '\n';
    }
    std::ofstream(output_path(config, "fit_summary.json"), std::ios::trunc) << summaries.dump(2) << '\n';
    return kSuccess;
}

namespace {

struct Tally {
    std::ostream& out;
    bool ok = true;
    bool capped = false;

    void line(bool pass, const std::string& text)
    {
        out << (pass ? "PASS " : "FAIL ") << text << '\n';
        ok = ok && pass;
    }

    void cap(const std::string& text)
    {
        out << "CAP  " << text << '\n';
        capped = true;
    }
};

void validate_theorems(const RunConfig& config, const ValidateRequest& request, Tally& tally)
{
    BuildOptions build;
    build.fault = request.fault;
    SolveOptions solve;
    solve.prefer_computation_on_ties = request.fault != PruningFault::none;
    for (int horizon = 1; horizon <= config.horizon; ++horizon) {
        const QStarTable qstar = solve_bamdp_exact(config.arms, horizon);
        const MetaGraph graph = build_pruned_meta_graph(config.arms, horizon, qstar, config.params, build);
        const Rational optimal = qstar.value(Belief::zero(config.arms));
        const Rational greedy = greedy_value(config.arms, horizon);
        std::optional<Rational> previous;
        bool monotone = true;
        for (const Rational& cost : config.costs) {
            const MetaSolution solution = solve_meta(graph, cost, solve);
            const WalkReport walk = walk_theorems(solution.policy, qstar);
            std::ostringstream text;
            text << "theorem walks T=" << horizon << " c=" << to_string(cost) << " entry_states=" << walk.entry_states
                 << " computing=" << walk.computing_states;
            for (WalkCheck check : {WalkCheck::mind_changer, WalkCheck::minimality, WalkCheck::forced_termination,
                                    WalkCheck::m_belief_restriction}) {
                text << ' ' << to_string(check) << '=' << walk.count(check);
            }
            if (!walk.passed()) {
                const auto& v = walk.violations.front();
                text << " first: " << to_string(v.check) << " at " << v.state << " (" << v.detail << ")";
            }
            tally.line(walk.passed(), text.str());

            const Rational external = policy_value_bayes(solution.policy).reward;
            tally.line(greedy <= external && external <= optimal,
                       "sandwich T=" + std::to_string(horizon) + " c=" + to_string(cost) + " V=" + to_string(external) +
                           " in [" + to_string(greedy) + ", " + to_string(optimal) + "]");
            if (previous && cost >= config.costs[0] && solution.values.root_value > *previous) monotone = false;
            previous = solution.values.root_value;
        }
        if (std::is_sorted(config.costs.begin(), config.costs.end())) {
            tally.line(monotone, "meta-value nonincreasing in c, T=" + std::to_string(horizon));
        }
    }
}

void validate_oracle(const RunConfig& config, const ValidateRequest& request, Tally& tally)
{
    if (config.arms != 2) throw ConfigError("the oracle suite is defined for N=2");
    OracleLimits limits;
    limits.max_horizon = request.oracle_horizon;
    limits.time_budget_seconds = request.oracle_budget_seconds;
    const std::vector<Rational> costs{Rational(0),    Rational(1, 64), Rational(1, 16),
                                      Rational(1, 4), Rational(1),     Rational(10)};
    for (int horizon = 1; horizon <= request.oracle_horizon; ++horizon) {
        const QStarTable qstar = solve_bamdp_exact(2, horizon);
        const MetaGraph graph = build_pruned_meta_graph(2, horizon, qstar, config.params);
        const Rational optimal = qstar.value(Belief::zero(2));
        const Rational greedy = greedy_value(2, horizon);
        for (const Rational& cost : costs) {
            BruteForceSolution brute;
            try {
                brute = brute_force_meta_solve(2, horizon, cost, limits);
            } catch (const ResourceError& e) {
                tally.cap("oracle T=" + std::to_string(horizon) + " c=" + to_string(cost) + ": " + e.what());
                continue;
            }
            const MetaSolution solution = solve_meta(graph, cost);
            const bool same_value = brute.value == solution.values.root_value;
            const bool same_behavior = induced_behavior(brute.policy) == induced_behavior(solution.policy);
            tally.line(same_value && same_behavior,
                       "oracle T=" + std::to_string(horizon) + " c=" + to_string(cost) + " brute=" +
                           to_string(brute.value) + " pruned=" + to_string(solution.values.root_value) +
                           " behavior=" + (same_behavior ? "same" : "different"));
            if (cost == 0) tally.line(brute.value == optimal, "oracle sanity T=" + std::to_string(horizon) + " c=0 equals V*");
            if (cost >= horizon) {
                tally.line(brute.value == greedy, "oracle sanity T=" + std::to_string(horizon) + " c>=T equals V^g");
            }
        }
    }

    // Pruned search against exhaustive enumeration at every non-forced state.
    const int horizon = 3;
    const ApproxParams bounds{16, 3, 3};
    const QStarTable qstar = solve_bamdp_exact(2, horizon);
    const MetaGraph graph = build_pruned_meta_graph(2, horizon, qstar, bounds);
    std::size_t compared = 0;
    std::size_t mismatched = 0;
    for (const MetaNode& node : graph.nodes) {
        if (node.state.t() >= horizon || is_termination_forced(node.state, qstar)) continue;
        if (node.state.computations >= bounds.k_c) continue;
        auto pruned = search_computational_trajectories(node.state, qstar, bounds);
        std::vector<std::vector<Expansion>> found;
        for (auto& tr : pruned) found.push_back(std::move(tr.sequence));
        auto brute = brute_force_minimal_mind_changers(node.state, horizon, bounds);
        std::sort(found.begin(), found.end());
        std::sort(brute.begin(), brute.end());
        ++compared;
        if (found != brute) ++mismatched;
    }
    tally.line(mismatched == 0, "minimal mind-changers T=3 " + bounds.to_string() + " states=" +
                                    std::to_string(compared) + " mismatched=" + std::to_string(mismatched));
}

void validate_approx(const RunConfig& config, Tally& tally)
{
    const auto settings = param_grid({2, 4, 8, 16}, {1, 2, 3}, {1, 2, 3});
    const QStarTable qstar = solve_bamdp_exact(config.arms, config.horizon);
    for (const Rational& cost : config.costs) {
        const ApproximationReport report = validate_approximation(config.arms, config.horizon, cost, settings, qstar);
        tally.out << "approx T=" << config.horizon << " c=" << to_string(cost) << '\n';
        for (const auto& s : report.settings) {
            tally.out << "  " << s.params.to_string() << " V=" << fmt_double(to_double(s.external_value))
                      << " meta=" << fmt_double(to_double(s.meta_value))
                      << " n_c=" << fmt_double(to_double(s.expected_computations)) << " nodes=" << s.graph_nodes
                      << '\n';
        }
        for (const auto& pair : report.pairs) {
            if (!pair.behavior) {
                tally.out << "  behavior differs: " << report.settings[pair.first].params.to_string() << " vs "
                          << report.settings[pair.second].params.to_string() << '\n';
            }
        }
        tally.line(report.behavior_agrees(), "approx behavior identical across " + std::to_string(settings.size()) +
                                                 " settings, c=" + to_string(cost));
        tally.out << "  meta-values " << (report.meta_values_agree() ? "agree" : "differ") << '\n';
    }
}

} // namespace

int cmd_validate(const RunConfig& config, const ValidateRequest& request, std::ostream& out, std::ostream&)
{
    const std::string& scope = request.scope;
    if (scope != "theorems" && scope != "oracle" && scope != "approx" && scope != "all") {
        throw ConfigError("scope must be one of theorems, oracle, approx, all");
    }
    if (request.oracle_horizon < 1 || request.oracle_horizon > 3) throw ConfigError("oracle horizon must be 1..3");
    Tally tally{out};
    if (scope == "theorems" || scope == "all") validate_theorems(config, request, tally);
    if (scope == "oracle" || scope == "all") validate_oracle(config, request, tally);
    if (scope == "approx" || scope == "all") validate_approx(config, tally);
    out << (!tally.ok ? "validation FAILED" : tally.capped ? "validation incomplete: resource cap hit" : "validation passed") << '\n';
    if (!tally.ok) return kValidationFailure;
    return tally.capped ? kResourceCap : kSuccess;
}

} // namespace mbamdp::cli
