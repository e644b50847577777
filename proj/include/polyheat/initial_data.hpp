#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polyheat/grid.hpp"

namespace polyheat {

    enum class DataKind { Dirac, Power, LogPower, Grid, Atoms };

    struct Atom {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        double mass = 0.0;
    };

    /// Nonnegative initial measure: atoms, a radial (log-)power density cut
    /// off at |x| = cutoff, or a density sampled on a grid. The zero measure
    /// is an ATOMS value with no atoms.
    ///
    /// POWER:    c |x|^{-a}                          for |x| <= cutoff
    /// LOGPOWER: c |x|^{-a} [log(e + 1/|x|)]^{-b}    for |x| <= cutoff
    struct InitialData {
        DataKind kind = DataKind::Atoms;
        int N = 1;
        std::vector<Atom> atoms;
        double c = 0.0, a = 0.0, b = 0.0, cutoff = 0.0;
        std::optional<GridField> grid;

        static InitialData zero(int N);
        static InitialData dirac(int N, double mass, std::array<double, 3> at = {0.0, 0.0, 0.0});
        static InitialData atom_list(int N, std::vector<Atom> atoms);
        static InitialData power(int N, double c, double a, double cutoff);
        static InitialData logpower(int N, double c, double a, double b, double cutoff);
        static InitialData from_grid(GridField density);

        void validate() const;
        [[nodiscard]] bool is_zero() const;
        [[nodiscard]] bool is_atomic() const { return kind == DataKind::Dirac || kind == DataKind::Atoms; }
        [[nodiscard]] bool is_radial() const { return kind == DataKind::Power || kind == DataKind::LogPower; }
        /// POWER/LOGPOWER profiles that are not locally integrable at the origin.
        [[nodiscard]] bool non_sigma_finite() const;
        /// Radial density value; 0 beyond the cutoff, +inf at r = 0 when a > 0.
        [[nodiscard]] double radial_density(double r) const;
        /// True if the radial density is nonincreasing in r.
        [[nodiscard]] bool radially_monotone() const;
        [[nodiscard]] double total_mass() const;
        /// Radial density |mu|^alpha as a radial profile of the same family.
        [[nodiscard]] InitialData radial_power(double alpha) const;
        [[nodiscard]] std::string describe() const;
    };

    /// mu(B(0, r)) for radial data (closed form for POWER, quadrature for LOGPOWER).
    double radial_mass_within(const InitialData &mu, double r);
    /// Integral of g(density(|y|)) over B(0, r) for radial data. `log_g` maps
    /// log(density) to log(g(density)), so densities beyond double range stay finite.
    /// Returns +inf when g(density) is not integrable at the origin.
    double radial_transformed_mass_within(const InitialData &mu, double r,
                                          const std::function<double(double)> &log_g);

    /// mu(B(center, sigma)) for any data kind. Grid data uses the nodes inside the ball.
    double ball_mass(const InitialData &mu, std::array<double, 3> center, double sigma);

    /// sup over centres of mu(B(x, sigma)).
    double ball_mass_sup(const InitialData &mu, double sigma);

    /// sup_x of the ball sum of a grid density, sum over nodes within sigma of x times cell volume.
    double grid_ball_mass_sup(const GridField &density, double sigma);

    /// Samples the density on the grid. The node at the origin of a singular
    /// radial profile carries the average over the ball of equal volume.
    GridField sample_density(const InitialData &mu, double L, int n);

}  // namespace polyheat
