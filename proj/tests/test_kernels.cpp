#include "doctest.h"

#include <cmath>
#include <numbers>

#include "polyheat/errors.hpp"
#include "polyheat/kernels.hpp"

using namespace polyheat;

namespace {
    constexpr double kPi = std::numbers::pi;
    double gauss_1d(double r) { return std::exp(-r * r / 4.0) / std::sqrt(4.0 * kPi); }
    double cauchy(int N, double r) {
        return std::tgamma(0.5 * (N + 1)) / std::pow(kPi, 0.5 * (N + 1)) * std::pow(1.0 + r * r, -0.5 * (N + 1));
    }
}  // namespace

TEST_CASE("heat kernel matches the Gaussian in every dimension") {
    for (int N = 1; N <= 3; ++N) {
        const auto prof = build_profile(KernelSpec::polyharmonic(N, 1), 20.0, 300);
        const double peak = std::pow(4.0 * kPi, -0.5 * N);
        double node_err = 0.0, interp_err = 0.0;
        for (std::size_t k = 0; k < prof.radii().size(); ++k) {
            const double r = prof.radii()[k];
            node_err = std::max(node_err, std::abs(prof.values()[k] - peak * std::exp(-r * r / 4.0)));
        }
        for (double r = 0.0; r <= 20.0; r += 0.137)
            interp_err = std::max(interp_err, std::abs(prof.at_radius(r) - peak * std::exp(-r * r / 4.0)));
        CHECK(node_err / peak < 1e-8);
        CHECK(interp_err / peak < 1e-6);
        CHECK(prof.mass() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("Cauchy kernel at theta = 1") {
    for (int N = 1; N <= 3; ++N) {
        const auto prof = build_profile(KernelSpec::stable(N, 1.0), 100.0, default_resolution(100.0));
        for (double r : {0.0, 0.5, 1.0, 3.0, 10.0, 50.0})
            CHECK(prof.at_radius(r) == doctest::Approx(cauchy(N, r)).epsilon(1e-7));
        CHECK(prof.tail_value(400.0) == doctest::Approx(cauchy(N, 400.0)).epsilon(1e-3));
        CHECK(prof.mass() == doctest::Approx(1.0).epsilon(1e-4));
    }
    const auto p1 = build_profile(KernelSpec::stable(1, 1.0), 100.0, default_resolution(100.0));
    const double x[1] = {1.0};
    CHECK(eval_kernel(p1, x, 1.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-7));
}

TEST_CASE("biharmonic kernel changes sign and keeps unit mass") {
    const auto prof = build_profile(KernelSpec::polyharmonic(1, 2), 20.0, default_resolution(20.0));
    CHECK(prof.value0() > 0.0);
    CHECK(prof.min_value() < -1e-10);
    CHECK(prof.mass() == doctest::Approx(1.0).epsilon(1e-4));
    // G_2(0,1) = Gamma(1/4) / (4 pi)
    CHECK(prof.value0() == doctest::Approx(std::tgamma(0.25) / (4.0 * kPi)).epsilon(1e-10));
}

TEST_CASE("self-similar evaluation is exact for power-of-two scalings") {
    const auto prof = build_profile(KernelSpec::polyharmonic(1, 2), 20.0, default_resolution(20.0));
    for (double x0 : {0.0, 0.3, 1.7, 6.0}) {
        const double x[1] = {x0};
        const double y[1] = {0.5 * x0};
        CHECK(eval_kernel(prof, x, 16.0) == 0.5 * eval_kernel(prof, y, 1.0));
    }
    const double x[1] = {1.0};
    CHECK_THROWS_AS(eval_kernel(prof, x, 0.0), Error);
}

TEST_CASE("stable semigroup residual") {
    const auto prof = build_profile(KernelSpec::stable(1, 1.0), 400.0, default_resolution(400.0));
    CHECK(semigroup_residual(prof, 2.0, 1.0, 200.0, 1 << 14) < 1e-5);
    CHECK_THROWS_AS(semigroup_residual(prof, 2.0, 1.0, 5.0, 1 << 8), Error);
    const double near = semigroup_residual(prof, 1.0, 1.0 - 1e-12, 200.0, 1 << 12);
    CHECK(near < 1e-6);
}

TEST_CASE("radial quadrature validates its input") {
    CHECK_THROWS_AS(radial_quadrature(KernelSpec::polyharmonic(4, 1), 1.0), Error);
    CHECK_THROWS_AS(build_profile(KernelSpec::stable(1, 2.5), 10.0, 100), Error);
    CHECK_THROWS_AS(build_profile(KernelSpec::stable(1, 1.0), 10.0, 10), Error);
}

TEST_CASE("heat kernel envelope constant is close to the analytic optimum") {
    const auto prof = build_profile(KernelSpec::polyharmonic(1, 1), 20.0, 300);
    const auto est = derivative_envelope_check(prof, 0, default_envelope_grids(1));
    // sup_r (4 pi)^{-1/2} e^{-r^2/4} / (C e^{-r^2/C}) <= 1 holds for C ~ 3.7..4
    CHECK(est.value > 3.3);
    CHECK(est.value < 4.4);
    CHECK(est.saturated);
}

TEST_CASE("multi-indices enumerate all orders") {
    CHECK(multi_indices(1, 2).size() == 1);
    CHECK(multi_indices(2, 2).size() == 3);
    CHECK(multi_indices(3, 2).size() == 6);
    CHECK(multi_indices(3, 0).size() == 1);
}
