#include "doctest.h"

#include <cmath>
#include <numbers>

#include "polyheat/errors.hpp"
#include "polyheat/majorant.hpp"

using namespace polyheat;

namespace {
    constexpr double kPi = std::numbers::pi;

    const MajorantSpec &spec_122() {
        static const MajorantSpec s = make_majorant_spec(ProblemParams{1, 2, 3.0, 1.0});
        return s;
    }
}  // namespace

TEST_CASE("K is the time-changed Cauchy kernel") {
    const auto &spec = spec_122();
    CHECK(eval_K_radial(spec, 0.0, 1.0) == doctest::Approx(spec.gtheta.value0()).epsilon(1e-14));
    for (double x : {0.0, 0.3, 2.0, 7.5, 40.0}) {
        CHECK(eval_K_radial(spec, x, 16.0) == doctest::Approx(eval_kernel_radial(spec.gtheta, x, 2.0)).epsilon(1e-14));
        for (double t : {0.01, 1.0, 30.0}) {
            const double exact = std::pow(t, 0.25) / (kPi * (std::sqrt(t) + x * x));
            CHECK(std::abs(eval_K_radial(spec, x, t) - exact) < 1e-6 * exact + 1e-12);
        }
    }
    CHECK_THROWS_AS(eval_K_radial(spec, 0.0, 0.0), Error);
}

TEST_CASE("omega sandwich") {
    CHECK(omega_ts(1.0, 0.5, 0.25) == doctest::Approx(2.0 * std::pow(0.5, 0.25)));
    for (double a : {0.1, 0.25, 0.5, 0.9})
        for (double f : {1e-9, 0.1, 0.5, 0.9, 1.0 - 1e-9}) CHECK(omega_sandwich_holds(3.0, 3.0 * f, a));
}

TEST_CASE("d0 against the heat-kernel oracle") {
    // m = 1, theta = 1, N = 1: d0 = sup_r (4 pi)^{-1/2} e^{-r^2/4} pi (1 + r^2).
    const auto spec = make_majorant_spec(ProblemParams{1, 1, 2.0, 1.0});
    double oracle = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double r = 20.0 * i / 200000.0;
        oracle = std::max(oracle, std::exp(-r * r / 4.0) * kPi * (1.0 + r * r) / std::sqrt(4.0 * kPi));
    }
    const auto d0 = estimate_d_j(spec, 0, default_envelope_grids(1));
    CHECK(d0.saturated);
    CHECK(d0.value == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("d0 for the biharmonic kernel saturates above the origin ratio") {
    const auto &spec = spec_122();
    const auto d0 = estimate_d_j(spec, 0, default_envelope_grids(1));
    CHECK(d0.saturated);
    CHECK(d0.value >= std::abs(spec.gm.value0()) / spec.gtheta.value0());
    CHECK(d0.value == d0.refinement_history.back().estimate);
    CHECK(d0.tail_radius > 0.0);
}

TEST_CASE("smoothing constant on analytic data") {
    const auto &spec = spec_122();
    const std::vector<double> times{1e-3, 1e-2, 0.1, 1.0};
    const auto dirac = smoothing_bound_check(spec, InitialData::dirac(1, 1.0), times, 16.0, 1024);
    CHECK(dirac.value == doctest::Approx(spec.gtheta.value0()).epsilon(1e-8));
    // Density 1 on [-R, R]: ||S_K mu|| is the Cauchy mass (2/pi) atan(R / t^{1/4}) and the
    // ball mass is 2 t^{1/4}, so the ratio is atan(R / t^{1/4}) / pi, largest at the first time.
    const double R = 1e3;
    const auto flat = smoothing_bound_check(spec, InitialData::power(1, 1.0, 0.0, R), times, 16.0, 1024);
    CHECK(flat.value == doctest::Approx(std::atan(R / std::pow(1e-3, 0.25)) / kPi).epsilon(1e-6));
    CHECK_THROWS_AS(smoothing_bound_check(spec, InitialData::zero(1), times, 16.0, 1024), Error);
}

TEST_CASE("d_star: grid convolution matches the semigroup reduction") {
    const auto &spec = spec_122();
    const auto plan = default_d_star_plan(1);
    const auto rep = estimate_d_star(spec, plan.samples(), plan.grids);
    CHECK(rep.estimate.saturated);
    CHECK(rep.max_mismatch < 1e-5);
    CHECK(rep.sandwich_ok);
    CHECK(rep.sandwich_checked == 1500);
    CHECK(rep.estimate.value == doctest::Approx(rep.exact_ratio_max).epsilon(1e-4));
    CHECK(d_star_reduction(spec, plan.samples()) == doctest::Approx(rep.exact_ratio_max).epsilon(1e-14));
    // omega in [t^a, 2 t^a] keeps the reduction between 1/2 and 2.
    CHECK(rep.exact_ratio_max >= 1.0);
    CHECK(rep.exact_ratio_max <= 2.0);
}
