#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyheat/errors.hpp"
#include "polyheat/grid.hpp"
#include "polyheat/initial_data.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/params.hpp"

namespace polyheat {

    /// Weight U, Psi and V = Psi(U) of the contraction norm.
    ///   LINEAR: U = 2 d0 S_K(t) mu,                Psi(s) = s
    ///   ALPHA:  U = (2 d0)^alpha S_K(t) |mu|^alpha, Psi(s) = s^{1/alpha}
    ///   ORLICZ: U = S_K(t) Phi_L(|mu|),            Psi = Phi_L^{-1}, Phi_L(s) = s [log(L + s)]^beta
    enum class WeightMode { Linear, Alpha, Orlicz };

    std::string_view to_string(WeightMode w);
    WeightMode weight_mode_from_string(std::string_view s);

    struct PicardConfig {
        double T = 1.0;
        double L = 16.0;
        int n = 1024;
        int n_t = 64;
        double tol = 1e-8;
        int max_iter = 200;
        WeightMode weight_mode = WeightMode::Linear;
        double alpha = 0.0;  // 0 selects (1 + p) / 2
        double beta = 1.0;
        double L_orlicz = 2.718281828459045;
        /// Contraction parameters; unset selects delta = 1/2, M = 1 (LINEAR, ALPHA)
        /// or delta = d0, M = 2 d0 (ORLICZ).
        std::optional<double> delta, M;
        /// Majorant constants; <= 0 means "estimate them" (see majorant_constants_for).
        double d0 = 0.0;
        double dstar = 0.0;
        /// Iterate even when the contraction test fails.
        bool force = false;
        /// Also solve with 2 n_t steps and report the extrapolation 2 u_fine - u_coarse.
        bool richardson = false;
        /// Number of stored snapshots, evenly spread over the time nodes (the final time is always kept).
        int snapshots = 8;
        std::uint64_t seed = 1;
        int residual_samples = 8;
        /// Directory for kernel profiles used by the majorant constants; empty disables caching.
        std::string cache_dir;

        /// Throws InvalidConfig for out-of-range fields.
        void validate(const ProblemParams &params) const;
        [[nodiscard]] double alpha_for(const ProblemParams &params) const;
    };

    struct ContractionReport {
        double D_star = 0.0;
        /// delta + d0 d* D* M^p <= M
        bool holds_invariance = false;
        /// nu = 2p d0 d* D* M^{p-1} < 1
        bool holds_contraction = false;
        double nu = 0.0;
        double delta = 0.0;
        double M = 0.0;
        /// Time nodes of the D_* quadrature and the running value of the inner integral.
        std::vector<double> times;
        std::vector<double> inner_integral;
    };

    struct Snapshot {
        double t = 0.0;
        GridField u;
    };

    struct SolveReport {
        bool converged = false;
        int iterations = 0;
        /// |||u_k - u_{k-1}||| and the sup-norm increment per iteration.
        std::vector<double> norm_history;
        std::vector<double> sup_history;
        /// |||u_k||| per iteration.
        std::vector<double> iterate_norms;
        /// max ratio of successive weighted increments (k >= 2)
        double contraction_estimate = 0.0;
        ContractionReport contraction;
        double d0_used = 0.0;
        double dstar_used = 0.0;
        double u0_norm = 0.0;  // |||u_0|||
        /// Grid points excluded from the weighted norm because V underflowed.
        long excluded_points = 0;
        std::vector<Snapshot> snapshots;
        /// sup defect of the discrete Duhamel equation at the sampled (x, t).
        double residual = 0.0;
        /// Same samples, defect against the trapezoidal time rule; O(dt).
        double quadrature_residual = 0.0;
        /// sup |u_fine - u_coarse| over snapshots when Richardson is on.
        std::optional<double> richardson_error;
        int n_t_used = 0;
    };

    /// Thrown by picard_solve on numerical failure; carries the partial report.
    class SolveFailure : public std::runtime_error {
    public:
        SolveFailure(ErrorCode code, const std::string &what, SolveReport partial)
            : std::runtime_error(what), code_(code), report_(std::move(partial)) {}
        [[nodiscard]] ErrorCode code() const noexcept { return code_; }
        [[nodiscard]] const SolveReport &report() const noexcept { return report_; }

    private:
        ErrorCode code_;
        SolveReport report_;
    };

    /// d_0 and d_* for `params` (profiles through cfg.cache_dir). d_* is the
    /// sup of the exact semigroup reduction G_theta(x, omega_{t,s}) / K(x, t).
    struct MajorantValues {
        double d0 = 0.0;
        double dstar = 0.0;
    };
    MajorantValues majorant_constants_for(const ProblemParams &params, const std::string &cache_dir = {});

    /// D_* on a log-graded time grid for the weight of cfg.weight_mode built from mu,
    /// and the invariance and contraction inequalities.
    ContractionReport check_contraction(const InitialData &mu, const ProblemParams &params, const PicardConfig &cfg,
                                        double d0, double dstar);

    /// Picard iteration for u = S_m(t) mu + int_0^t S_m(t-s) |u(s)|^p ds on the
    /// periodic box [-L, L)^N, with the left-endpoint Duhamel rule on n_t steps.
    SolveReport picard_solve(const InitialData &mu, const ProblemParams &params, const PicardConfig &cfg);

    /// u_T(x, t) = T^{1/(p-1)} u(T^{1/2m} x, T t). Without `target` the nodes map
    /// exactly onto the box of half-width L T^{-1/2m}; with a target box the values
    /// are interpolated (Catmull-Rom) and OutOfBox is thrown if it is not covered.
    GridField rescale_field(const GridField &u, double T, const ProblemParams &params,
                            std::optional<GridLevel> target = std::nullopt);

    struct SweepRow {
        double eps = 0.0;
        double D_star = 0.0;
        double nu = 0.0;
        bool converged = false;
        double sup_half = 0.0;  // ||u(T/2)||_inf
        std::string failure;    // error category when the solve failed
    };

    /// D G_theta(., eps) on the grid of cfg (mass-D bump of width eps^{1/theta}).
    InitialData mollified_dirac(const ProblemParams &params, double D, double eps, double L, int n,
                                const RadialKernelProfile &gtheta);

    /// check_contraction + picard_solve (forced) for each eps.
    std::vector<SweepRow> delta_sweep(const ProblemParams &params, double D, const std::vector<double> &eps_list,
                                      const PicardConfig &cfg);

    /// Largest D on a geometric ladder for which picard_solve converges on the
    /// mollified Dirac family at T = 1, for (N, m, p, theta) = (1, 2, 3, 1).
    double calibrate_gamma2_mass(const PicardConfig &cfg, double eps = 1.0 / 64.0);

}  // namespace polyheat
