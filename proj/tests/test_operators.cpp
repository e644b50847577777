#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polyheat/operators.hpp"

using namespace polyheat;

namespace {
    constexpr double kPi = std::numbers::pi;

    GridField cos_mode(int N, double L, int n, int j) {
        GridField f(N, L, n);
        f.fill([&](std::span<const double> x) {
            double v = 1.0;
            for (int d = 0; d < N; ++d) v *= std::cos(kPi * j * x[d] / L);
            return v;
        });
        return f;
    }

    double max_diff(const GridField &a, const GridField &b) {
        double m = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
        return m;
    }
}  // namespace

TEST_CASE("S_m on constants, zero time and Fourier modes") {
    for (int N = 1; N <= 2; ++N) {
        Propagator prop(N, 4.0, 32, 2, 1.0);
        GridField c(N, 4.0, 32);
        std::fill(c.values.begin(), c.values.end(), 3.5);
        CHECK(max_diff(prop.apply_Sm(c, 0.7), c) < 1e-13);

        const auto f = cos_mode(N, 4.0, 32, 3);
        CHECK(max_diff(prop.apply_Sm(f, 0.0), f) == 0.0);

        // cos(k.x) with |k|^2 = N k1^2 decays by exp(-dt |k|^{2m}).
        const double k2 = N * std::pow(kPi * 3 / 4.0, 2);
        const double dt = 0.01;
        auto expect = f;
        for (double &v : expect.values) v *= std::exp(-dt * k2 * k2);
        CHECK(max_diff(prop.apply_Sm(f, dt), expect) < 1e-13);

        const double tK = 0.3;  // S_K symbol exp(-t^{theta/2m} |k|^theta), theta = 1, m = 2
        auto expect_K = f;
        for (double &v : expect_K.values) v *= std::exp(-std::pow(tK, 0.25) * std::sqrt(k2));
        CHECK(max_diff(prop.apply_SK(f, tK), expect_K) < 1e-13);
    }
}

TEST_CASE("S_m composes as a semigroup") {
    Propagator prop(1, 8.0, 256, 2, 1.0);
    GridField f(1, 8.0, 256);
    f.fill([](std::span<const double> x) { return std::exp(-x[0] * x[0]); });
    const auto once = prop.apply_Sm(f, 0.5);
    const auto twice = prop.apply_Sm(prop.apply_Sm(f, 0.2), 0.3);
    CHECK(max_diff(once, twice) < 1e-14);
}

TEST_CASE("biharmonic flow loses positivity, heat flow keeps it") {
    GridField f(1, 16.0, 1024);
    f.fill([](std::span<const double> x) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; });
    const auto bi = Propagator(1, 16.0, 1024, 2, 1.0).apply_Sm(f, 1.0);
    const auto heat = Propagator(1, 16.0, 1024, 1, 1.0).apply_Sm(f, 1.0);
    CHECK(*std::min_element(bi.values.begin(), bi.values.end()) < -1e-3);
    CHECK(*std::min_element(heat.values.begin(), heat.values.end()) > -1e-12);
}

TEST_CASE("S_K of a Dirac mass is the majorizing kernel") {
    const ProblemParams params{1, 2, 3.0, 1.0};
    const auto gt = build_profile(KernelSpec::stable(1, 1.0), 400.0, default_resolution(400.0));
    const auto mu = InitialData::dirac(1, 2.0);
    const double t = 0.5;
    const auto u = apply_SK_measure(mu, gt, params, t, 8.0, 64);
    const double w = std::pow(t, 0.25);  // Cauchy kernel at time t^{1/4}
    for (std::size_t k = 0; k < u.size(); k += 7) {
        const double x = u.point(k)[0];
        CHECK(u.values[k] == doctest::Approx(2.0 * w / (kPi * (x * x + w * w))).epsilon(1e-7));
    }
    CHECK(sup_SK_measure(mu, gt, params, t, 8.0, 64) == doctest::Approx(2.0 / (kPi * w)).epsilon(1e-7));
}
