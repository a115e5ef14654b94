#include "metabamdp/policy_cache.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mbamdp {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : bytes) h = (h ^ ch) * 1099511628211ull;
    return h;
}

namespace {

std::string hex(std::uint64_t v)
{
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(v));
    return buffer;
}

std::string encode(const MetaAction& a) { return a.is_terminate() ? "T" : "E " + to_string(a.target); }

MetaAction decode(const std::string& text)
{
    if (text == "T") return MetaAction::terminate();
    if (text.size() > 2 && text.compare(0, 2, "E ") == 0) return MetaAction::expand(parse_expansion(text.substr(2)));
    throw std::invalid_argument("bad action '" + text + "'");
}

} // namespace

std::string CacheKey::descriptor() const
{
    return "N=" + std::to_string(arms) + ";T=" + std::to_string(horizon) + ";c=" + to_string(cost) + ";" +
           params.to_string() + ";v=" + kCodeVersion;
}

std::string CacheKey::file_name() const { return hex(fnv1a64(descriptor())) + ".json"; }

PolicyCache::PolicyCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::filesystem::path PolicyCache::resolve_directory(const std::filesystem::path& fallback)
{
    if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') return env;
    return fallback;
}

std::filesystem::path PolicyCache::path_of(const CacheKey& key) const { return directory_ / key.file_name(); }

CacheLookup PolicyCache::load(const CacheKey& key) const
{
    CacheLookup out;
    const auto path = path_of(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;

    out.status = CacheStatus::corrupt;
    try {
        const json doc = json::parse(in);
        const json& payload = doc.at("payload");
        if (doc.at("checksum").get<std::string>() != hex(fnv1a64(payload.dump()))) {
            out.message = "checksum mismatch in " + path.string();
            return out;
        }
        if (payload.at("key").get<std::string>() != key.descriptor()) {
            out.message = "key mismatch in " + path.string();
            return out;
        }
        CachedSolution solution;
        MetaPolicy& policy = solution.policy;
        policy.arms = payload.at("arms").get<std::size_t>();
        policy.horizon = payload.at("horizon").get<int>();
        policy.cost = parse_rational(payload.at("cost").get<std::string>());
        policy.params = ApproxParams{payload.at("k").get<int>(), payload.at("k_c").get<int>(), payload.at("d").get<int>()};
        for (const auto& [state, action] : payload.at("actions").items()) {
            policy.actions.emplace(state, decode(action.get<std::string>()));
        }
        solution.values.root_value = parse_rational(payload.at("root_value").get<std::string>());
        for (const auto& [state, value] : payload.at("values").items()) {
            solution.values.values.emplace(state, parse_rational(value.get<std::string>()));
        }
        out.status = CacheStatus::hit;
        out.solution = std::move(solution);
    } catch (const std::exception& e) {
        out.message = "unreadable cache entry " + path.string() + ": " + e.what();
    }
    return out;
}

void PolicyCache::store(const CacheKey& key, const MetaPolicy& policy, const MetaValueTable& values) const
{
    json payload;
    payload["format"] = "metabamdp-policy";
    payload["key"] = key.descriptor();
    payload["arms"] = policy.arms;
    payload["horizon"] = policy.horizon;
    payload["cost"] = to_string(policy.cost);
    payload["k"] = policy.params.k;
    payload["k_c"] = policy.params.k_c;
    payload["d"] = policy.params.d;
    payload["root_value"] = to_string(values.root_value);
    json actions = json::object();
    for (const auto& [state, action] : policy.actions) actions[state] = encode(action);
    payload["actions"] = std::move(actions);
    json table = json::object();
    for (const auto& [state, value] : values.values) table[state] = to_string(value);
    payload["values"] = std::move(table);

    json doc;
    doc["checksum"] = hex(fnv1a64(payload.dump()));
    doc["payload"] = std::move(payload);

    std::filesystem::create_directories(directory_);
    static std::atomic<std::uint64_t> counter{0};
    const auto final_path = path_of(key);
    auto temp = final_path;
    temp += ".tmp." + hex(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." + std::to_string(counter++);
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + temp.string());
        out << doc.dump();
        if (!out.flush()) throw std::runtime_error("cannot write " + temp.string());
    }
    std::filesystem::rename(temp, final_path);
}

} // namespace mbamdp
