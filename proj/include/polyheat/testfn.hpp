#pragma once

#include <array>
#include <vector>

#include "polyheat/estimate.hpp"
#include "polyheat/initial_data.hpp"
#include "polyheat/params.hpp"
#include "polyheat/solver.hpp"

namespace polyheat {

    /// eta(s) = f(2 - s) / (f(2 - s) + f(s - 1)), f(s) = exp(-1/s) for s > 0 and 0 otherwise.
    /// 1 on [0, 1], 0 on [2, inf), smooth and nonincreasing.
    double eta(double s);
    /// 0 on [0, 1), eta on [1, inf).
    double eta_star(double s);
    /// log eta(s), finite on [0, 2) even where eta underflows.
    double log_eta(double s);

    /// Central finite-difference weights (Fornberg) for the k-th derivative at 0
    /// on the nodes offsets[i] * h, h = 1.
    std::vector<double> fd_weights(int k, const std::vector<double> &offsets);

    /// k-th derivative of eta by a sixth-order central stencil on [1.5, 2), reflected
    /// through eta(3 - s) = 1 - eta(s) below 1.5; exactly 0 outside (1, 2). The step
    /// eps^{1/(k+6)} shrinks like (2 - s)^2 so the relative error stays uniform.
    double eta_derivative(int k, double s);

    struct CutoffSpec {
        std::array<double, 3> x0{0.0, 0.0, 0.0};
        double R = 1.0;
        ProblemParams params;

        void validate() const;
        /// 3 (|x - x0|^{2m} + t) / R
        [[nodiscard]] double argument(std::span<const double> x, double t) const;
        [[nodiscard]] double psi(std::span<const double> x, double t) const { return eta(argument(x, t)); }
        [[nodiscard]] double psi_star(std::span<const double> x, double t) const { return eta_star(argument(x, t)); }
        /// Radius of the support of psi_R in x at t = 0.
        [[nodiscard]] double support_radius() const;
    };

    /// For k = 1..k_max: sup over s in [1, 2] of |eta^(k)(s)| / eta_star(s)^{1/p},
    /// on uniform grids of the listed sizes. Throws EstimateDiverging if the last
    /// two sizes differ by more than 1e-3 relative.
    std::vector<ConstantEstimate> derivative_bound_check(double p, int k_max, const std::vector<int> &grid_sizes = {});

    struct DiagnosticRow {
        double R = 0.0;
        double m_R = 0.0;
        double lhs = 0.0;
        double rhs = 0.0;
        double ratio = 0.0;  // +inf when rhs = 0 < lhs
    };

    struct DiagnosticTable {
        std::vector<DiagnosticRow> rows;
        /// Least-squares slope of log(ratio) against log(R) over finite positive ratios.
        double slope = 0.0;
        /// An infinite ratio, or a ratio growing at least like R^{-1/2} as R -> 0.
        bool diverging = false;
    };

    /// Weighted-integral test on solver snapshots (linear in time between them):
    ///   LHS_R = m_R + int_0^R int |u|^p psi_R,  m_R = mu(B(x0, (R/3)^{1/2m}))
    ///   RHS_R = R^{(N(p-1)/2m - 1)/p} (int_0^R int |u|^p psi_R^*)^{1/p}
    DiagnosticTable nonexistence_diagnostic(const std::vector<Snapshot> &u, const InitialData &mu,
                                            const ProblemParams &params, std::array<double, 3> x0,
                                            const std::vector<double> &R_list);

}  // namespace polyheat
