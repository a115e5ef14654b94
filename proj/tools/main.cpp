#include "commands.hpp"

#include "metabamdp/errors.hpp"
#include "metabamdp/run_config.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mbamdp;

namespace {

// Raw flag values; only the ones the user actually passed override the config.
struct Flags {
    std::string config_file;
    std::size_t arms = 2;
    int horizon = 6;
    std::string costs;
    std::string cost_grid;
    std::string env;
    int k = 2;
    int kc = 1;
    int d = 3;
    std::uint64_t episodes = 0;
    std::uint64_t seed = 1;
    std::string out;
    std::size_t workers = 1;
    std::string cache_dir;
    bool fit = false;
    std::string sign;
    int max_horizon = 0;
    int sensitivity_grid = 21;
};

struct Options {
    CLI::Option* arms;
    CLI::Option* horizon;
    CLI::Option* costs;
    CLI::Option* cost_grid;
    CLI::Option* env;
    CLI::Option* k;
    CLI::Option* kc;
    CLI::Option* d;
    CLI::Option* episodes;
    CLI::Option* seed;
    CLI::Option* out;
    CLI::Option* workers;
    CLI::Option* cache_dir;
    CLI::Option* fit;
    CLI::Option* sign;
    CLI::Option* max_horizon;
    CLI::Option* sensitivity_grid;
};

Options add_run_options(CLI::App& app, Flags& f)
{
    Options o;
    app.add_option("--config", f.config_file, "JSON config file; flags given on the command line take precedence");
    o.arms = app.add_option("--arms", f.arms, "number of arms N");
    o.horizon = app.add_option("--horizon", f.horizon, "horizon T");
    o.costs = app.add_option("--costs", f.costs, "comma-separated costs, e.g. 0,1/64,0.05");
    o.cost_grid = app.add_option("--cost-grid", f.cost_grid, "uniform cost grid lo:hi:count");
    o.env = app.add_option("--env", f.env, "uniform | symmetric[:count] | p1,p2;p1,p2;...");
    o.k = app.add_option("--k", f.k, "max plan edges");
    o.kc = app.add_option("--kc", f.kc, "max expansions between pulls");
    o.d = app.add_option("--d", f.d, "max expansion depth below the current belief");
    o.episodes = app.add_option("--episodes", f.episodes, "Monte Carlo episodes per task (0 = exact DP only)");
    o.seed = app.add_option("--seed", f.seed, "master seed");
    o.out = app.add_option("--out", f.out, "output directory");
    o.workers = app.add_option("--workers", f.workers, "worker threads");
    o.cache_dir = app.add_option("--cache-dir", f.cache_dir, "policy cache directory (env METABAMDP_CACHE_DIR wins)");
    o.fit = app.add_flag("--fit", f.fit, "fit the uncertainty-bonus heuristic to simulated episodes");
    o.sign = app.add_option("--sign", f.sign, "heuristic logit sign: +1 (default) or -1");
    o.max_horizon = app.add_option("--max-horizon", f.max_horizon, "override the horizon cap");
    o.sensitivity_grid = app.add_option("--sensitivity-grid", f.sensitivity_grid, "points per axis of the (p1,p2) grid");
    app.get_option("--costs")->excludes("--cost-grid");
    return o;
}

RunConfig resolve(const Flags& f, const Options& o, const std::vector<Rational>* default_costs)
{
    RunConfig config;
    if (default_costs) config.costs = *default_costs;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw ConfigError("cannot read config file " + f.config_file);
        std::stringstream text;
        text << in.rdbuf();
        apply_json_config(config, text.str());
    }
    if (o.arms->count()) config.arms = f.arms;
    if (o.horizon->count()) config.horizon = f.horizon;
    if (o.costs->count()) {
        config.cost_spec = f.costs;
        config.costs = parse_cost_list(f.costs);
    }
    if (o.cost_grid->count()) {
        config.cost_spec = f.cost_grid;
        config.costs = parse_cost_grid(f.cost_grid);
    }
    if (o.env->count()) config.env_spec = f.env;
    if (o.k->count()) config.params.k = f.k;
    if (o.kc->count()) config.params.k_c = f.kc;
    if (o.d->count()) config.params.d = f.d;
    if (o.episodes->count()) config.episodes = f.episodes;
    if (o.seed->count()) config.seed = f.seed;
    if (o.out->count()) config.output_dir = f.out;
    if (o.workers->count()) config.workers = f.workers;
    if (o.cache_dir->count()) config.cache_dir = f.cache_dir;
    if (o.fit->count()) config.fit = f.fit;
    if (o.sign->count()) {
        try {
            config.sign = parse_sign_convention(f.sign);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (o.max_horizon->count()) config.max_horizon = f.max_horizon;
    if (o.sensitivity_grid->count()) config.sensitivity_grid = f.sensitivity_grid;
    config.validate();
    return config;
}

extern "C" void on_interrupt(int) { cli::interrupt_flag().store(true); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Meta-level bandit planning: solve, sweep, fit and validate meta-optimal policies"};
    app.require_subcommand(1);

    Flags solve_flags, sweep_flags, sens_flags, fit_flags, validate_flags;
    auto* solve = app.add_subcommand("solve", "solve and cache meta-policies for each cost");
    const Options solve_opts = add_run_options(*solve, solve_flags);

    auto* sweep = app.add_subcommand("sweep", "write metrics.csv with one row per (cost, environment)");
    const Options sweep_opts = add_run_options(*sweep, sweep_flags);
    bool resume = false;
    sweep->add_flag("--resume", resume, "continue an interrupted sweep");

    auto* sens = app.add_subcommand("sensitivity", "sensitivity maps over the (p1, p2) grid");
    const Options sens_opts = add_run_options(*sens, sens_flags);

    auto* fit = app.add_subcommand("fit", "fit the uncertainty-bonus heuristic to simulated episodes");
    const Options fit_opts = add_run_options(*fit, fit_flags);
    cli::FitRequest fit_request;
    fit->add_option("--source", fit_request.source, "policy (meta-optimal episodes) or heuristic");
    fit->add_option("--beta", fit_request.beta, "generating beta for --source heuristic");
    fit->add_option("--omega", fit_request.omega, "generating omega for --source heuristic");

    auto* validate = app.add_subcommand("validate", "run invariant and oracle suites");
    const Options validate_opts = add_run_options(*validate, validate_flags);
    cli::ValidateRequest validate_request;
    std::string fault = "none";
    validate->add_option("--scope", validate_request.scope, "theorems | oracle | approx | all");
    validate->add_option("--fault", fault, "none | keep-non-mind-changers (negative control)");
    validate->add_option("--oracle-horizon", validate_request.oracle_horizon, "largest T for the brute-force meta-solve");
    validate->add_option("--oracle-budget", validate_request.oracle_budget_seconds, "seconds per brute-force solve");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kSuccess : cli::kConfigError;
    }

    std::signal(SIGINT, on_interrupt);
    try {
        if (solve->parsed()) return cli::cmd_solve(resolve(solve_flags, solve_opts, nullptr), std::cout, std::cerr);
        if (sweep->parsed()) {
            return cli::cmd_sweep(resolve(sweep_flags, sweep_opts, nullptr), resume, std::cout, std::cerr);
        }
        if (sens->parsed()) return cli::cmd_sensitivity(resolve(sens_flags, sens_opts, nullptr), std::cout, std::cerr);
        if (fit->parsed()) return cli::cmd_fit(resolve(fit_flags, fit_opts, nullptr), fit_request, std::cout, std::cerr);
        if (validate->parsed()) {
            if (fault == "keep-non-mind-changers") {
                validate_request.fault = PruningFault::keep_non_mind_changers;
            } else if (fault != "none") {
                throw ConfigError("unknown fault '" + fault + "'");
            }
            const std::vector<Rational> defaults{Rational(0), Rational(1, 100), Rational(1, 20), Rational(1, 10),
                                                 Rational(10)};
            return cli::cmd_validate(resolve(validate_flags, validate_opts, &defaults), validate_request, std::cout,
                                     std::cerr);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const ResourceError& e) {
        std::cerr << "resource cap: " << e.what() << '\n';
        return cli::kResourceCap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kValidationFailure;
    }
    return cli::kSuccess;
}
