#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "polyheat/estimate.hpp"
#include "polyheat/initial_data.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/params.hpp"

namespace polyheat {

    /// K(x, t) = G_theta(x, t^{theta/2m}) together with the G_m profile it majorises.
    struct MajorantSpec {
        ProblemParams params;
        RadialKernelProfile gm;
        RadialKernelProfile gtheta;

        void validate() const;
        /// theta / 2m, in (0, 1).
        [[nodiscard]] double time_exponent() const { return params.theta / (2.0 * params.m); }
    };

    /// Radii of the profiles used by make_majorant_spec. G_m decays like
    /// exp(-c r^{2m/(2m-1)}); 20 (m - 1) keeps |mass - 1| below 1e-5 up to m = 5.
    inline constexpr double majorant_gm_radius(int m) { return 20.0 * (m <= 2 ? 1 : m - 1); }
    inline constexpr double kMajorantGthetaRadius = 400.0;

    /// G_m and G_theta profiles for `params`, loaded from or stored to `cache_dir`
    /// (empty disables the cache). `hits` counts profiles found in the cache.
    MajorantSpec make_majorant_spec(const ProblemParams &params, const std::filesystem::path &cache_dir = {},
                                    int *hits = nullptr);

    double eval_K(const MajorantSpec &spec, std::span<const double> x, double t);
    double eval_K_radial(const MajorantSpec &spec, double r, double t);

    /// omega_{t,s} = (t-s)^a + s^a.
    double omega_ts(double t, double s, double a);
    /// t^a <= omega_{t,s} <= 2 t^a, evaluated in floating point without slack.
    bool omega_sandwich_holds(double t, double s, double a);

    /// sup_x |d^alpha G_m(x,1)| / K(x,1) over |alpha| = j, per grid level.
    /// `tail_radius` is where the G_m tail envelope over the K tail drops
    /// below 1e-3 of the estimate.
    ConstantEstimate estimate_d_j(const MajorantSpec &spec, int j, const std::vector<GridLevel> &grids);

    /// max over the sampled t of ||S_K(t) mu||_inf t^{N/2m} / sup_x mu(B(x, t^{1/2m})).
    /// The history records the running maximum after each sampled time.
    ConstantEstimate smoothing_bound_check(const MajorantSpec &spec, const InitialData &mu,
                                           const std::vector<double> &times, double L, int n);

    struct DStarSample {
        double t = 0.0;
        double s = 0.0;
        double x = 0.0;
    };

    struct DStarReport {
        ConstantEstimate estimate;
        /// max |grid convolution - G_theta(x, omega_{t,s})| on the finest grid.
        double max_mismatch = 0.0;
        /// max of the exact reduction G_theta(x, omega) / K(x, t) over the samples.
        double exact_ratio_max = 0.0;
        long sandwich_checked = 0;
        bool sandwich_ok = true;
    };

    /// t log-spaced in [t_min, t_max] (n_t values), s/t in {0.1, 0.5, 0.9},
    /// n_x points |x| in [0, x_max] along e_1.
    std::vector<DStarSample> d_star_samples(double t_min, double t_max, double x_max, int n_t = 10, int n_x = 50);

    /// Sample window and grid ladder for the d_* convolutions in dimension N.
    /// The ratio only depends on x / t^{1/2m}, so larger N probes later times
    /// where the kernels are wide enough for the coarser grids.
    struct DStarPlan {
        double t_min = 0.1;
        double t_max = 10.0;
        double x_max = 50.0;
        std::vector<GridLevel> grids;
        [[nodiscard]] std::vector<DStarSample> samples() const { return d_star_samples(t_min, t_max, x_max); }
    };
    DStarPlan default_d_star_plan(int N);

    /// Maximum over samples of [K(., t-s) * K(., s)](x) / K(x, t) with the
    /// convolution on the grid; cross-checked against G_theta(x, omega_{t,s}).
    /// Throws BoxTooSmall / SemigroupMismatch (tolerance `mismatch_tol`).
    DStarReport estimate_d_star(const MajorantSpec &spec, const std::vector<DStarSample> &samples,
                                const std::vector<GridLevel> &grids, double mismatch_tol = 1e-5);

    /// max over samples of G_theta(x, omega_{t,s}) / K(x, t), the value the grid
    /// convolution reproduces; no grids involved.
    double d_star_reduction(const MajorantSpec &spec, const std::vector<DStarSample> &samples);

    /// d_0 and d_* on their default refinement ladders.
    struct MajorantConstants {
        ConstantEstimate d0;
        DStarReport dstar;
    };
    MajorantConstants estimate_majorant_constants(const MajorantSpec &spec);

}  // namespace polyheat
