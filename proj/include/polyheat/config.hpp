#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyheat/criteria.hpp"
#include "polyheat/initial_data.hpp"
#include "polyheat/params.hpp"
#include "polyheat/solver.hpp"

namespace polyheat {

    /// Initial data as written in a config: space-separated key=value tokens.
    ///   kind=zero
    ///   kind=dirac mass=1 at=0,0,0
    ///   kind=atoms atoms=x,y,z:mass;x,y,z:mass
    ///   kind=power c=1 a=0.5 cutoff=1
    ///   kind=logpower c=1 a=1 b=1.25 cutoff=0.5
    ///   kind=mollified mass=0.05 eps=0.0625     (D G_theta(., eps) sampled on the solver grid)
    struct DataSpec {
        std::string kind = "zero";
        double mass = 1.0;
        std::array<double, 3> at{0.0, 0.0, 0.0};
        std::vector<Atom> atoms;
        double c = 1.0, a = 0.0, b = 0.0, cutoff = 1.0;
        double eps = 0.0625;

        static DataSpec parse(const std::string &text);
        [[nodiscard]] std::string normalized() const;
        /// Validated against N; mollified data needs the solver grid and gtheta,
        /// so build() rejects it (see make_solver_data).
        [[nodiscard]] InitialData build(int N) const;
    };

    struct RunConfig {
        ProblemParams params;
        DataSpec data;
        PicardConfig picard;  // T, L, n, n_t, tol, weight mode and the rest of the solver knobs
        ClassifyConfig classify;
        // delta-sweep: eps = 2^{-1}, ..., 2^{-sweep_eps_count}
        double sweep_D = 0.05;
        int sweep_eps_count = 6;
        // diagnose: R = 2^{-1}, ..., 2^{-diag_R_count}
        int diag_R_count = 6;
        std::array<double, 3> diag_x0{0.0, 0.0, 0.0};
        std::string cache_dir;
        std::string output_dir = ".";

        /// Applies one key=value pair; throws InvalidConfig for unknown keys or bad values.
        void set(const std::string &key, const std::string &value);
        /// Every key in a fixed order, values in shortest round-trip form.
        [[nodiscard]] std::string normalized() const;
        /// FNV-1a of the normalized text without cache_dir and output_dir, which do not affect results.
        [[nodiscard]] std::string hash() const;
        /// Cross-module validation; throws InvalidConfig / InvalidArgument.
        void validate() const;

        [[nodiscard]] static std::vector<std::string> keys();
    };

    /// Parses `key = value` lines; '#' starts a comment. Validates the result.
    RunConfig parse_config(const std::string &text);
    RunConfig load_config(const std::string &path);

    /// Initial data for the solver; mollified data is built on the solver grid.
    /// `gtheta_hit`, when given, receives whether the G_theta profile came from the cache.
    InitialData make_solver_data(const RunConfig &cfg, std::optional<bool> *gtheta_hit = nullptr);
    /// cfg.picard with d0 and d* estimated where the config leaves them unset.
    /// `cache_hits`, when given, receives the number of majorant profiles found in the cache.
    PicardConfig make_solver_config(const RunConfig &cfg, int *cache_hits = nullptr);

    /// Shortest decimal text that reads back to the same double.
    std::string format_double(double v);
    double parse_double(const std::string &key, const std::string &text);

}  // namespace polyheat
