#pragma once

#include <string>
#include <vector>

namespace polyheat {

    struct RefinementEntry {
        long grid_size = 0;
        double estimate = 0.0;
    };

    /// Numerical estimate of an existential constant, with the grid-refinement
    /// record that justifies it. `value` always equals the last history entry.
    struct ConstantEstimate {
        std::string name;
        double value = 0.0;
        std::vector<RefinementEntry> refinement_history;
        bool saturated = false;
        /// Radius beyond which the analytic tail comparison rules out the sup.
        double tail_radius = 0.0;

        /// Appends an entry, updates value, and recomputes `saturated`
        /// (last two entries within `rel_tol`).
        void push(long grid_size, double estimate, double rel_tol = 0.02);
    };

    /// Relative spread |a - b| / max(|a|, |b|); zero when both vanish.
    double relative_gap(double a, double b);

}  // namespace polyheat
