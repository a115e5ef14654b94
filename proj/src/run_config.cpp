#include "metabamdp/run_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace mbamdp {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

Rational rational_field(const std::string& text, const std::string& what)
{
    try {
        return parse_rational(trim(text));
    } catch (const std::exception&) {
        throw ConfigError("invalid " + what + " '" + text + "'");
    }
}

double probability(const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    const double p = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("invalid reward probability '" + text + "'");
    }
    return p;
}

} // namespace

std::vector<Rational> parse_cost_grid(const std::string& spec)
{
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("cost grid must be lo:hi:count, got '" + spec + "'");
    const Rational lo = rational_field(parts[0], "cost grid bound");
    const Rational hi = rational_field(parts[1], "cost grid bound");
    char* end = nullptr;
    const long count = std::strtol(parts[2].c_str(), &end, 10);
    if (parts[2].empty() || *end != '\0' || count < 1) throw ConfigError("cost grid count must be >= 1");
    if (lo < 0 || hi < lo) throw ConfigError("cost grid needs 0 <= lo <= hi");
    std::vector<Rational> out;
    if (count == 1) return {lo};
    for (long i = 0; i < count; ++i) {
        Rational c = lo + (hi - lo) * make_rational(i, count - 1);
        c.canonicalize();
        out.push_back(c);
    }
    return out;
}

std::vector<Rational> parse_cost_list(const std::string& spec)
{
    std::vector<Rational> out;
    for (const auto& item : split(spec, ',')) {
        Rational c = rational_field(item, "cost");
        if (c < 0) throw ConfigError("costs must be nonnegative");
        out.push_back(c);
    }
    if (out.empty()) throw ConfigError("empty cost list");
    return out;
}

std::string EnvSpec::to_string() const
{
    switch (kind) {
    case EnvKind::uniform_mixture: return "uniform-mixture";
    case EnvKind::symmetric_grid: return "symmetric-grid";
    case EnvKind::explicit_list: return "explicit";
    }
    return "";
}

EnvSpec parse_env_spec(const std::string& spec, std::size_t arms)
{
    EnvSpec out;
    const std::string s = trim(spec);
    if (s == "uniform" || s == "uniform-mixture") return out;
    if (s.rfind("symmetric", 0) == 0) {
        int count = 21;
        if (s.size() > 9) {
            if (s[9] != ':') throw ConfigError("expected symmetric or symmetric:<count>");
            count = std::atoi(s.c_str() + 10);
            if (count < 2) throw ConfigError("symmetric grid needs at least 2 points");
        }
        out.kind = EnvKind::symmetric_grid;
        for (int i = 0; i < count; ++i) {
            out.environments.push_back(Environment{std::vector<double>(arms, static_cast<double>(i) / (count - 1))});
        }
        return out;
    }
    out.kind = EnvKind::explicit_list;
    for (const auto& env_text : split(s, ';')) {
        Environment env;
        for (const auto& p : split(env_text, ',')) env.probs.push_back(probability(p));
        if (env.arms() != arms) {
            throw ConfigError("environment '" + env_text + "' has " + std::to_string(env.arms()) + " arms, expected " +
                              std::to_string(arms));
        }
        out.environments.push_back(std::move(env));
    }
    if (out.environments.empty()) throw ConfigError("empty environment list");
    return out;
}

int RunConfig::effective_max_horizon() const
{
    if (max_horizon > 0) return max_horizon;
    return arms <= 2 ? 12 : 9;
}

void RunConfig::validate() const
{
    if (arms < 2 || arms > 4) throw ConfigError("arms must be between 2 and 4");
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (horizon > effective_max_horizon()) {
        throw ConfigError("horizon " + std::to_string(horizon) + " exceeds the maximum " +
                          std::to_string(effective_max_horizon()) + " (raise --max-horizon to override)");
    }
    if (costs.empty()) throw ConfigError("no costs given");
    for (const auto& c : costs) {
        if (c < 0) throw ConfigError("costs must be nonnegative");
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (sensitivity_grid < 2) throw ConfigError("sensitivity grid needs at least 2 points per axis");
    environments();
}

void apply_json_config(RunConfig& config, const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "arms") config.arms = value.get<std::size_t>();
            else if (key == "horizon") config.horizon = value.get<int>();
            else if (key == "costs") {
                config.cost_spec = value.is_array() ? std::string() : value.get<std::string>();
                if (value.is_array()) {
                    for (const auto& item : value) {
                        if (!config.cost_spec.empty()) config.cost_spec += ',';
                        config.cost_spec += item.is_string() ? item.get<std::string>() : item.dump();
                    }
                }
                config.costs = parse_cost_list(config.cost_spec);
            } else if (key == "cost-grid") {
                config.cost_spec = value.get<std::string>();
                config.costs = parse_cost_grid(config.cost_spec);
            } else if (key == "env") config.env_spec = value.get<std::string>();
            else if (key == "k") config.params.k = value.get<int>();
            else if (key == "kc") config.params.k_c = value.get<int>();
            else if (key == "d") config.params.d = value.get<int>();
            else if (key == "episodes") config.episodes = value.get<std::uint64_t>();
            else if (key == "seed") config.seed = value.get<std::uint64_t>();
            else if (key == "out") config.output_dir = value.get<std::string>();
            else if (key == "workers") config.workers = value.get<std::size_t>();
            else if (key == "cache-dir") config.cache_dir = value.get<std::string>();
            else if (key == "fit") config.fit = value.get<bool>();
            else if (key == "sign") config.sign = parse_sign_convention(value.get<std::string>());
            else if (key == "max-horizon") config.max_horizon = value.get<int>();
            else if (key == "sensitivity-grid") config.sensitivity_grid = value.get<int>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string resolved_config_json(const RunConfig& config)
{
    json j;
    j["arms"] = config.arms;
    j["horizon"] = config.horizon;
    json costs = json::array();
    for (const auto& c : config.costs) costs.push_back(to_string(c));
    j["costs"] = std::move(costs);
    j["env"] = config.env_spec;
    j["k"] = config.params.k;
    j["kc"] = config.params.k_c;
    j["d"] = config.params.d;
    j["episodes"] = config.episodes;
    j["seed"] = config.seed;
    j["out"] = config.output_dir;
    j["workers"] = config.workers;
    j["cache-dir"] = config.cache_dir;
    j["fit"] = config.fit;
    j["sign"] = to_string(config.sign);
    j["max-horizon"] = config.effective_max_horizon();
    j["sensitivity-grid"] = config.sensitivity_grid;
    return j.dump(2);
}

} // namespace mbamdp
