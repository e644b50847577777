#pragma once

#include <span>
#include <string>
#include <vector>

#include "polyheat/estimate.hpp"
#include "polyheat/grid.hpp"

namespace polyheat {

    enum class KernelKind { Polyharmonic, Stable };

    /// Which fundamental solution a profile represents: G_m for
    /// u_t + (-Delta)^m u = 0, or the symmetric theta-stable density G_theta.
    struct KernelSpec {
        KernelKind kind = KernelKind::Polyharmonic;
        int N = 1;
        int m = 2;
        double theta = 1.0;

        static KernelSpec polyharmonic(int N, int m) { return {KernelKind::Polyharmonic, N, m, 1.0}; }
        static KernelSpec stable(int N, double theta) { return {KernelKind::Stable, N, 1, theta}; }

        /// Power q of the Fourier symbol e^{-t |xi|^q}: 2m or theta.
        [[nodiscard]] double symbol_power() const;
        /// Stretched-exponential exponent 2m/(2m-1) or power-law exponent N + theta.
        [[nodiscard]] double tail_exponent() const;
        [[nodiscard]] std::string label() const;
        void validate() const;
    };

    /// Beyond r_max: amplitude * exp(-rate * r^exponent) for polyharmonic
    /// profiles (an envelope, values there are below quadrature noise) and
    /// amplitude * r^{-exponent} for stable profiles.
    struct TailModel {
        double amplitude = 0.0;
        double rate = 0.0;
        double exponent = 0.0;
    };

    struct QuadratureMeta {
        double truncation = 0.0;          // upper limit P of the rho-integral
        double abs_tolerance = 0.0;       // declared tolerance on each radial value
        double max_error_estimate = 0.0;  // worst Gauss-Kronrod estimate over nodes
        long max_panels = 0;
        double nodes_per_octave = 0.0;
    };

    /// Tabulated radial section r -> G(r e_1, 1) with nodal slopes, a monotone
    /// cubic Hermite interpolant and a tail model. Immutable once built.
    class RadialKernelProfile {
    public:
        RadialKernelProfile(KernelSpec spec, double r_max, int resolution, std::vector<double> radii,
                            std::vector<double> values, std::vector<double> slopes, TailModel tail,
                            QuadratureMeta quad);

        [[nodiscard]] const KernelSpec &spec() const { return spec_; }
        [[nodiscard]] double r_max() const { return r_max_; }
        [[nodiscard]] int resolution() const { return resolution_; }
        [[nodiscard]] const std::vector<double> &radii() const { return radii_; }
        [[nodiscard]] const std::vector<double> &values() const { return values_; }
        [[nodiscard]] const std::vector<double> &slopes() const { return slopes_; }
        [[nodiscard]] const TailModel &tail() const { return tail_; }
        [[nodiscard]] const QuadratureMeta &quad_meta() const { return quad_; }

        /// G(r, 1): interpolated inside [0, r_max], tail model beyond.
        [[nodiscard]] double at_radius(double r) const;
        [[nodiscard]] double tail_value(double r) const;
        /// Mass of G(., 1) outside the ball of radius r >= r_max, from the tail model.
        [[nodiscard]] double tail_mass_beyond(double r) const;

        /// Reconstructed integral of G(x, 1) over R^N (radial Hermite rule + tail).
        [[nodiscard]] double mass() const;
        /// Smallest nodal value; values within the worst quadrature error of 0 count as 0.
        [[nodiscard]] double min_value() const;
        [[nodiscard]] double value0() const { return values_.front(); }

    private:
        KernelSpec spec_;
        double r_max_;
        int resolution_;
        std::vector<double> radii_, values_, slopes_;
        std::vector<double> left_slope_, right_slope_;  // limited slopes per interval
        TailModel tail_;
        QuadratureMeta quad_;
    };

    /// Smallest accepted resolution and the default (16 nodes per octave on [1e-3, r_max]).
    inline constexpr int kMinProfileResolution = 64;
    inline constexpr double kProfileInnerRadius = 1e-3;
    int default_resolution(double r_max);

    /// Build a profile by radial (Hankel-type) quadrature of the Fourier
    /// integral. `resolution` is the number of geometric nodes on [1e-3, r_max].
    RadialKernelProfile build_profile(const KernelSpec &spec, double r_max, int resolution);

    /// Single radial value G(r, 1) and dG/dr(r, 1) by direct quadrature.
    struct RadialSample {
        double value = 0.0;
        double slope = 0.0;
        double error_estimate = 0.0;
        long panels = 0;
    };
    RadialSample radial_quadrature(const KernelSpec &spec, double r);

    /// Self-similar evaluation: t^{-N/q} G(t^{-1/q} |x|, 1), q = 2m or theta.
    double eval_kernel(const RadialKernelProfile &profile, std::span<const double> x, double t);
    double eval_kernel_radial(const RadialKernelProfile &profile, double r, double t);

    /// Sample G(., t) on every node of a grid.
    GridField sample_kernel(const RadialKernelProfile &profile, double t, int N, double L, int n);

    /// sup over the inner window |x|_inf <= L/2 of
    /// |(G(., t-s) * G(., s))(x) - G(x, t)| with the convolution done on the
    /// grid by zero-padded FFT. Stable profiles only.
    double semigroup_residual(const RadialKernelProfile &profile, double t, double s, double L, int n);

    /// Upper bound for the truncation error the residual above can contain.
    double semigroup_truncation_estimate(const RadialKernelProfile &profile, double t, double s, double L);

    /// d^alpha G_m(x, 1) on a periodic grid, from the multiplier (i xi)^alpha e^{-|xi|^{2m}}.
    GridField spectral_kernel_derivative(const KernelSpec &spec, std::span<const int> alpha, double L, int n);

    /// All multi-indices of length N and order j.
    std::vector<std::vector<int>> multi_indices(int N, int j);

    struct GridLevel {
        double L = 0.0;
        int n = 0;
    };
    /// Grids of fixed spacing 1/16 and doubling width, sized for dimension N.
    std::vector<GridLevel> default_envelope_grids(int N);

    /// Smallest C with |d^alpha G_m(x,1)| <= C exp(-|x|^{2m/(2m-1)} / C) on the
    /// grid, maximised over |alpha| = j. Points whose value is below the FFT
    /// round-off floor are excluded. Throws EstimateDiverging when the estimate
    /// keeps growing over three successive enlargements.
    ConstantEstimate derivative_envelope_check(const RadialKernelProfile &profile, int j,
                                               const std::vector<GridLevel> &grids);

}  // namespace polyheat
