#ifndef METABAMDP_POLICY_CACHE_HPP
#define METABAMDP_POLICY_CACHE_HPP

#include "metabamdp/meta_solver.hpp"
#include "metabamdp/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace mbamdp {

/// Bumped whenever solver output for a given key could change.
inline constexpr const char* kCodeVersion = "metabamdp-1";
inline constexpr const char* kCacheDirEnv = "METABAMDP_CACHE_DIR";

struct CacheKey {
    std::size_t arms = 0;
    int horizon = 0;
    Rational cost;
    ApproxParams params;

    /// "N=2;T=6;c=1/20;k=2,kc=1,d=3;v=metabamdp-1"
    std::string descriptor() const;
    /// Content-addressed: FNV-1a of the descriptor, in hex, plus ".json".
    std::string file_name() const;
};

std::uint64_t fnv1a64(std::string_view bytes);

struct CachedSolution {
    MetaPolicy policy;
    MetaValueTable values;
};

enum class CacheStatus { hit, miss, corrupt };

struct CacheLookup {
    CacheStatus status = CacheStatus::miss;
    std::optional<CachedSolution> solution;
    std::string message; ///< reason for a corrupt entry
};

class PolicyCache {
public:
    explicit PolicyCache(std::filesystem::path directory);

    /// $METABAMDP_CACHE_DIR when set, otherwise `fallback`.
    static std::filesystem::path resolve_directory(const std::filesystem::path& fallback);

    const std::filesystem::path& directory() const { return directory_; }
    std::filesystem::path path_of(const CacheKey& key) const;

    /// A file that fails to parse, whose checksum does not match, or whose key
    /// differs from the request is reported as corrupt.
    CacheLookup load(const CacheKey& key) const;
    /// Writes to a temporary file and renames it into place.
    void store(const CacheKey& key, const MetaPolicy& policy, const MetaValueTable& values) const;

private:
    std::filesystem::path directory_;
};

} // namespace mbamdp

#endif
