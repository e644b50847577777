#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "polyheat/kernels.hpp"

namespace polyheat {

    /// 64-bit FNV-1a; used for cache checksums and config hashes.
    std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
    std::string hex64(std::uint64_t v);

    /// Text serialisation (format v1): header lines, then one `%.17g` row
    /// per radius (r, value, slope). The checksum covers the rows.
    std::string serialize_profile(const RadialKernelProfile &profile);
    RadialKernelProfile parse_profile(const std::string &text);

    std::filesystem::path profile_cache_path(const std::filesystem::path &dir, const KernelSpec &spec, double r_max,
                                             int resolution);

    /// Loads a matching profile if present; throws CacheCorrupt on a bad file.
    std::optional<RadialKernelProfile> load_cached_profile(const std::filesystem::path &dir, const KernelSpec &spec,
                                                           double r_max, int resolution);
    /// Writes through a temporary file and an atomic rename.
    void store_profile(const std::filesystem::path &dir, const RadialKernelProfile &profile);

    struct CachedProfile {
        RadialKernelProfile profile;
        bool hit = false;
    };
    /// Empty `dir` disables the cache.
    CachedProfile get_or_build_profile(const std::filesystem::path &dir, const KernelSpec &spec, double r_max,
                                       int resolution);

}  // namespace polyheat
