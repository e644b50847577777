#include "polyheat/profile_cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "polyheat/errors.hpp"

namespace polyheat {

    namespace {

        constexpr const char *kMagic = "polyheat-profile v1";

        std::string fmt17(double v) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string kind_name(KernelKind k) { return k == KernelKind::Polyharmonic ? "polyharmonic" : "stable"; }

    }  // namespace

    std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
        std::uint64_t h = seed;
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    std::string hex64(std::uint64_t v) {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }

    std::string serialize_profile(const RadialKernelProfile &p) {
        std::string rows;
        for (std::size_t k = 0; k < p.radii().size(); ++k)
            rows += fmt17(p.radii()[k]) + " " + fmt17(p.values()[k]) + " " + fmt17(p.slopes()[k]) + "\n";
        const auto &s = p.spec();
        const auto &q = p.quad_meta();
        std::ostringstream os;
        os << kMagic << "\n";
        os << "kind " << kind_name(s.kind) << "\n";
        os << "N " << s.N << "\n";
        os << "order " << (s.kind == KernelKind::Polyharmonic ? fmt17(s.m) : fmt17(s.theta)) << "\n";
        os << "r_max " << fmt17(p.r_max()) << "\n";
        os << "resolution " << p.resolution() << "\n";
        os << "tail " << fmt17(p.tail().amplitude) << " " << fmt17(p.tail().rate) << " " << fmt17(p.tail().exponent)
           << "\n";
        os << "quad " << fmt17(q.truncation) << " " << fmt17(q.abs_tolerance) << " " << fmt17(q.max_error_estimate)
           << " " << q.max_panels << " " << fmt17(q.nodes_per_octave) << "\n";
        os << "rows " << p.radii().size() << "\n";
        os << "checksum " << hex64(fnv1a(rows)) << "\n";
        os << rows;
        return os.str();
    }

    RadialKernelProfile parse_profile(const std::string &text) {
        std::istringstream is(text);
        std::string line;
        auto corrupt = [](const std::string &why) { fail(ErrorCode::CacheCorrupt, "profile cache: " + why); };
        if (!std::getline(is, line) || line != kMagic) corrupt("bad magic line");
        auto field = [&](const std::string &key) {
            if (!std::getline(is, line)) corrupt("truncated header");
            std::istringstream ls(line);
            std::string k;
            ls >> k;
            if (k != key) corrupt("expected header key '" + key + "'");
            std::string rest;
            std::getline(ls, rest);
            return rest;
        };
        KernelSpec spec;
        const auto kind = field("kind");
        if (kind == " polyharmonic")
            spec.kind = KernelKind::Polyharmonic;
        else if (kind == " stable")
            spec.kind = KernelKind::Stable;
        else
            corrupt("unknown kind");
        spec.N = std::stoi(field("N"));
        const double order = std::stod(field("order"));
        if (spec.kind == KernelKind::Polyharmonic)
            spec.m = static_cast<int>(order);
        else
            spec.theta = order;
        const double r_max = std::stod(field("r_max"));
        const int resolution = std::stoi(field("resolution"));
        TailModel tail;
        std::istringstream(field("tail")) >> tail.amplitude >> tail.rate >> tail.exponent;
        QuadratureMeta q;
        std::istringstream(field("quad")) >> q.truncation >> q.abs_tolerance >> q.max_error_estimate >> q.max_panels >>
            q.nodes_per_octave;
        const auto nrows = std::stoul(field("rows"));
        const auto checksum = field("checksum");
        std::string rows((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        if (" " + hex64(fnv1a(rows)) != checksum) corrupt("checksum mismatch");
        std::vector<double> r(nrows), v(nrows), d(nrows);
        std::istringstream rs(rows);
        for (std::size_t k = 0; k < nrows; ++k)
            if (!(rs >> r[k] >> v[k] >> d[k])) corrupt("short row block");
        return RadialKernelProfile(spec, r_max, resolution, std::move(r), std::move(v), std::move(d), tail, q);
    }

    std::filesystem::path profile_cache_path(const std::filesystem::path &dir, const KernelSpec &spec, double r_max,
                                             int resolution) {
        const std::string key = spec.label() + "|" + fmt17(r_max) + "|" + std::to_string(resolution);
        return dir / (spec.label() + "_" + hex64(fnv1a(key)) + ".profile");
    }

    std::optional<RadialKernelProfile> load_cached_profile(const std::filesystem::path &dir, const KernelSpec &spec,
                                                           double r_max, int resolution) {
        const auto path = profile_cache_path(dir, spec, r_max, resolution);
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto prof = parse_profile(text);
        const auto &s = prof.spec();
        if (s.kind != spec.kind || s.N != spec.N || prof.resolution() != resolution || prof.r_max() != r_max ||
            (spec.kind == KernelKind::Polyharmonic ? s.m != spec.m : s.theta != spec.theta))
            fail(ErrorCode::CacheCorrupt, "profile cache: header does not match file name key " + path.string());
        return prof;
    }

    void store_profile(const std::filesystem::path &dir, const RadialKernelProfile &profile) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) fail(ErrorCode::IoError, "cannot create cache directory " + dir.string() + ": " + ec.message());
        const auto path = profile_cache_path(dir, profile.spec(), profile.r_max(), profile.resolution());
        auto tmp = path;
        tmp += ".tmp." + std::to_string(::getpid());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
            out << serialize_profile(profile);
            if (!out) fail(ErrorCode::IoError, "short write to " + tmp.string());
        }
        std::filesystem::rename(tmp, path, ec);
        if (ec) fail(ErrorCode::IoError, "cannot rename into " + path.string() + ": " + ec.message());
    }

    CachedProfile get_or_build_profile(const std::filesystem::path &dir, const KernelSpec &spec, double r_max,
                                       int resolution) {
        if (!dir.empty()) {
            if (auto p = load_cached_profile(dir, spec, r_max, resolution)) return {std::move(*p), true};
        }
        auto prof = build_profile(spec, r_max, resolution);
        if (!dir.empty()) store_profile(dir, prof);
        return {std::move(prof), false};
    }

}  // namespace polyheat
