#include "polyheat/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace polyheat {

    double relative_gap(double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
    }

    void ConstantEstimate::push(long grid_size, double estimate, double rel_tol) {
        refinement_history.push_back({grid_size, estimate});
        value = estimate;
        const auto k = refinement_history.size();
        saturated = k >= 2 && relative_gap(refinement_history[k - 1].estimate, refinement_history[k - 2].estimate) <= rel_tol;
    }

}  // namespace polyheat
