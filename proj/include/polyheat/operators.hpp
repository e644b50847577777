#pragma once

#include <vector>

#include "polyheat/grid.hpp"
#include "polyheat/initial_data.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/params.hpp"

namespace polyheat {

    /// Fourier multipliers of S_m(t) (symbol e^{-t|xi|^{2m}}) and S_K(t)
    /// (symbol e^{-t^{theta/2m}|xi|^theta}) on one periodic grid.
    class Propagator {
    public:
        Propagator(int N, double L, int n, int m, double theta);

        [[nodiscard]] const SpectralGrid &grid() const { return grid_; }
        [[nodiscard]] int m() const { return m_; }
        [[nodiscard]] double theta() const { return theta_; }

        /// S_m(dt) f; dt = 0 returns f unchanged.
        [[nodiscard]] GridField apply_Sm(const GridField &f, double dt) const;
        /// In-place variant on raw values of matching size.
        void apply_Sm_inplace(std::vector<double> &values, double dt) const;
        /// S_K(t) f for a sampled field.
        [[nodiscard]] GridField apply_SK(const GridField &f, double t) const;

    private:
        void apply_symbol(std::vector<double> &values, double tau, double q) const;

        SpectralGrid grid_;
        int m_;
        double theta_;
        std::vector<double> abs_xi_;
        mutable std::vector<std::complex<double>> work_;
    };

    GridField apply_Sm(const GridField &f, int m, double dt);
    GridField apply_SK(const GridField &f, const ProblemParams &params, double t);

    /// S_K(t) mu on the nodes of a (N, L, n) grid. Atoms are summed directly
    /// against the (non-periodic) kernel; densities go through the spectral path.
    GridField apply_SK_measure(const InitialData &mu, const RadialKernelProfile &gtheta, const ProblemParams &params,
                               double t, double L, int n);

    /// sup_x S_K(t) mu. Radial monotone data: value at the origin by radial
    /// quadrature; atoms: kernel sums at the atoms and on the grid.
    double sup_SK_measure(const InitialData &mu, const RadialKernelProfile &gtheta, const ProblemParams &params,
                          double t, double L, int n);

}  // namespace polyheat
