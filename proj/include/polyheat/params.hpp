#pragma once

#include <numbers>

namespace polyheat {

    /// Dimension, order, nonlinearity exponent and stable index of the problem
    ///   u_t + (-Delta)^m u = |u|^p  in R^N.
    /// m = 1 is accepted so the classical heat kernel can serve as an oracle.
    struct ProblemParams {
        int N = 1;
        int m = 2;
        double p = 2.0;
        double theta = 1.0;

        /// Throws InvalidArgument when a field is outside its legal range.
        void validate() const;

        /// Critical exponent 1 + 2m/N.
        [[nodiscard]] double p_m() const { return 1.0 + 2.0 * m / N; }

        [[nodiscard]] double scaling_exponent_space() const { return 1.0 / (2.0 * m); }
        [[nodiscard]] double scaling_exponent_amplitude() const { return 1.0 / (p - 1.0); }

        /// theta / 2m, the time exponent used by the majorizing kernel.
        [[nodiscard]] double majorant_time_exponent() const { return theta / (2.0 * m); }
    };

    enum class Regime { Subcritical, Critical, Supercritical };

    /// Compares p with p_m using a relative tolerance of 1e-12.
    Regime regime_of(const ProblemParams &params);

    const char *to_string(Regime r);

    /// Volume of the unit ball in R^N.
    double unit_ball_volume(int N);

    /// Surface area of the unit sphere S^{N-1}.
    double unit_sphere_area(int N);

}  // namespace polyheat
