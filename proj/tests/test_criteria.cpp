#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "polyheat/criteria.hpp"
#include "polyheat/errors.hpp"

using namespace polyheat;

namespace {
    constexpr double kPi = std::numbers::pi;
    constexpr double kE = std::numbers::e;

    ErrorCode code_of(const std::function<void()> &f) {
        try {
            f();
        } catch (const Error &e) {
            return e.code();
        }
        FAIL("expected an Error");
        return ErrorCode::IoError;
    }

    // c|x|^{-N} L^{-b}, L = log(e + 1/|x|), integrated in L: with r = 1/(e^L - e),
    // dr/r = -dL e^L/(e^L - e), so mu(B(0,sigma)) = c S_N [L0^{1-b}/(b-1) + int L^{-b} e/(e^L - e) dL].
    double logpower_mass_oracle(double c, double b, int N, double sigma) {
        const double L0 = std::log(kE + 1.0 / sigma);
        const int n = 200000;
        const double h = 60.0 / n;
        double s = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double L = L0 + k * h;
            s += (k == 0 || k == n ? 0.5 : 1.0) * std::pow(L, -b) * kE * std::exp(-L) / (1.0 - kE * std::exp(-L));
        }
        return c * unit_sphere_area(N) * (std::pow(L0, 1.0 - b) / (b - 1.0) + s * h);
    }
}  // namespace

TEST_CASE("ball masses against closed forms") {
    CHECK(ball_mass_sup(InitialData::dirac(2, 3.0), 0.01) == doctest::Approx(3.0));
    CHECK(ball_mass_sup(InitialData::dirac(2, 3.0), 10.0) == doctest::Approx(3.0));
    CHECK(std::abs(ball_mass_sup(InitialData::power(2, 1.0, 1.0, 1.0), 0.5) - kPi) < 1e-8);
    for (int N = 1; N <= 3; ++N)
        CHECK(ball_mass_sup(InitialData::power(N, 1.0, 0.0, 1e3), 0.25) ==
              doctest::Approx(unit_ball_volume(N) * std::pow(0.25, N)).epsilon(1e-10));

    const auto atoms = InitialData::atom_list(1, {{{0.0, 0, 0}, 1.0}, {{1.0, 0, 0}, 1.0}, {{3.0, 0, 0}, 2.5}});
    CHECK(ball_mass_sup(atoms, 0.4) == doctest::Approx(2.5));
    CHECK(ball_mass_sup(atoms, 0.5) == doctest::Approx(2.5));
    CHECK(ball_mass_sup(atoms, 1.0) == doctest::Approx(3.5));
    CHECK(ball_mass_sup(atoms, 1.5) == doctest::Approx(4.5));

    const auto lp = InitialData::logpower(3, 2.0, 3.0, 2.5, 1.0);
    for (double s : {0.5, 1e-3, 1e-8})
        CHECK(ball_mass_sup(lp, s) == doctest::Approx(logpower_mass_oracle(2.0, 2.5, 3, s)).epsilon(1e-7));

    CHECK(code_of([] { (void)ball_mass_sup(InitialData::power(2, 1.0, 2.0, 1.0), 0.5); }) ==
          ErrorCode::NonSigmaFinite);
}

TEST_CASE("ball masses are monotone and doubling") {
    const std::vector<InitialData> fixtures = {
        InitialData::atom_list(2, {{{0.0, 0.0, 0}, 1.0}, {{0.3, 0.1, 0}, 2.0}, {{-1.0, 0.5, 0}, 0.5}}),
        InitialData::power(2, 1.5, 1.2, 2.0),
        InitialData::power(3, 1.0, 2.5, 1.0),
    };
    for (const auto &mu : fixtures) {
        double prev = 0.0, worst = 0.0;
        for (double s = 1e-6; s < 4.0; s *= 1.7) {
            const double v = ball_mass_sup(mu, s);
            CHECK(v >= prev * (1.0 - 1e-12));
            worst = std::max(worst, ball_mass_sup(mu, 2.0 * s) / v);
            prev = v;
        }
        // Power fixtures: 2^{N-a} below the cutoff; atoms: total over the heaviest atom.
        CHECK(worst <= 8.0);
    }
}

TEST_CASE("Dirac classification follows the p_m dichotomy") {
    for (int N = 1; N <= 3; ++N)
        for (int m : {2, 3}) {
            ProblemParams base{N, m, 2.0, 1.0};
            const double pm = base.p_m();
            for (double f : {0.6, 0.9, 1.0, 1.1, 1.5}) {
                ProblemParams pr{N, m, 1.0 + (pm - 1.0) * f, 1.0};
                const auto rep = classify(InitialData::dirac(N, 1.0), pr, {});
                if (f < 1.0) {
                    CHECK(rep.summary_line() == "EXISTS_BY thm1.3");
                    REQUIRE(rep.suggested_T.has_value());
                } else {
                    CHECK(rep.summary_line() == "NONEXISTENCE_BY cor1.2");
                }
                for (const auto &c : rep.checks) CHECK(!c.id.empty());
            }
        }
}

TEST_CASE("necessary scan") {
    ProblemParams sub{1, 2, 3.0, 1.0}, crit{1, 2, 5.0, 1.0}, sup{1, 2, 7.0, 1.0};
    const auto d = InitialData::dirac(1, 0.7);
    const auto sig = dyadic_sigmas(16);
    CHECK(necessary_exponent_scan(d, sub, sig).verdict == ScanVerdict::Inconclusive);
    CHECK(necessary_exponent_scan(d, crit, sig).verdict == ScanVerdict::NonexistenceIndicated);
    CHECK(necessary_exponent_scan(d, sup, sig).verdict == ScanVerdict::NonexistenceIndicated);
    // q for a Dirac is D sigma^{-lambda} exactly.
    const auto s = necessary_exponent_scan(d, sup, sig);
    const double lambda = 1.0 - 4.0 / 6.0;
    CHECK(s.q.back() == doctest::Approx(0.7 * std::pow(sig.back(), -lambda)));
    CHECK(s.power_slope == doctest::Approx(lambda));

    CHECK(code_of([&] { (void)necessary_exponent_scan(d, sub, {1.0, 0.5, 0.25}); }) == ErrorCode::InsufficientSigmas);
    CHECK(necessary_exponent_scan(InitialData::zero(1), sup, sig).verdict == ScanVerdict::Inconclusive);

    // Critical log-power profile: q(sigma) tends to c S_N 2m/N.
    for (int N : {1, 2, 3}) {
        const int m = 2;
        ProblemParams pc{N, m, 1.0 + 2.0 * m / N, 1.0};
        const double b = N / (2.0 * m) + 1.0;
        const double limit_per_c = unit_sphere_area(N) * 2.0 * m / N;
        const auto big = InitialData::logpower(N, 40.0 / limit_per_c, N, b, 1.0);
        const auto scan = necessary_exponent_scan(big, pc, dyadic_sigmas(24));
        CHECK(scan.verdict == ScanVerdict::NonexistenceIndicated);
        const double s_last = scan.sigmas.back();
        const double oracle = logpower_mass_oracle(big.c, b, N, s_last) * std::pow(std::log(kE + 1.0 / s_last), N / (2.0 * m));
        CHECK(scan.q.back() == doctest::Approx(oracle).epsilon(1e-6));
        const auto small = InitialData::logpower(N, 0.5 / limit_per_c, N, b, 1.0);
        CHECK(necessary_exponent_scan(small, pc, dyadic_sigmas(24)).verdict == ScanVerdict::Inconclusive);
    }

    // Supercritical power data above the critical exponent diverges.
    ProblemParams p3{3, 2, 3.0, 1.0};
    CHECK(necessary_exponent_scan(InitialData::power(3, 1.0, 2.5, 1.0), p3, dyadic_sigmas(24)).verdict ==
          ScanVerdict::NonexistenceIndicated);
    CHECK(necessary_exponent_scan(InitialData::power(3, 1.0, 1.0, 1.0), p3, dyadic_sigmas(24)).verdict ==
          ScanVerdict::Inconclusive);
}

TEST_CASE("Dirac threshold below double range still classifies as existence") {
    // p just below p_m = 7: T* = (1/gamma2)^{1/kappa} with kappa ~ -1.7e-3 underflows.
    const ProblemParams pr{1, 3, 1.0 + 0.99 * 6.0, 1.0};
    const auto mu = InitialData::dirac(1, 1.0);
    const double log_T = dirac_log_threshold(mu, pr, default_gamma2());
    CHECK(log_T < std::log(std::numeric_limits<double>::min()));
    CHECK(!subcritical_sufficiency(mu, pr, default_gamma2()).has_value());
    const auto rep = classify(mu, pr, {});
    CHECK(rep.summary_line() == "EXISTS_BY thm1.3");
    CHECK(!rep.suggested_T.has_value());
}

TEST_CASE("subcritical sufficiency") {
    ProblemParams pr{1, 2, 3.0, 1.0};
    const double kappa = 1.0 / 4.0 - 1.0 / 2.0;
    CHECK(*subcritical_sufficiency(InitialData::dirac(1, 2.0), pr, 0.5) ==
          doctest::Approx(std::pow(4.0, 1.0 / kappa)));
    const TimeGrid grid;
    CHECK(*subcritical_sufficiency(InitialData::zero(1), pr, 0.5) == doctest::Approx(grid.T_max));
    CHECK(code_of([&] { (void)subcritical_sufficiency(InitialData::dirac(1, 1.0), ProblemParams{1, 2, 5.0, 1.0}, 1.0); }) ==
          ErrorCode::WrongRegime);

    // Constant density c on [-R, R]: mass 2c sigma up to R, then 2cR.
    // The condition holds for T <= min((gamma2/2c)^{p-1}, (2cR/gamma2)^{1/kappa}).
    const double R = 1.0, g2 = 1.0;
    for (double c : {0.05, 0.2}) {
        const auto mu = InitialData::power(1, c, 0.0, R);
        const double T1 = std::pow(g2 / (2.0 * c), 2.0);
        const double T2 = std::pow(2.0 * c * R / g2, 1.0 / kappa);
        const double oracle = T1 <= R * R * R * R ? T1 : std::max(T2, R * R * R * R);
        const auto T = subcritical_sufficiency(mu, pr, g2);
        REQUIRE(T.has_value());
        CHECK(*T == doctest::Approx(std::min(oracle, grid.T_max)).epsilon(1e-8));
    }
    // Too heavy for the smallest horizon on the grid.
    CHECK(!subcritical_sufficiency(InitialData::power(1, 1e6, 0.0, 1.0), pr, g2).has_value());
}

TEST_CASE("scaling covariance of the subcritical condition") {
    ProblemParams pr{2, 2, 1.6, 1.0};
    const std::vector<InitialData> fixtures = {
        InitialData::dirac(2, 1.3),
        InitialData::atom_list(2, {{{0.0, 0.0, 0}, 1.0}, {{0.3, 0.1, 0}, 2.0}}),
        InitialData::power(2, 0.7, 1.1, 1.5),
    };
    for (const auto &mu : fixtures)
        for (double T : {1e-3, 0.2, 5.0}) {
            const auto a = subcritical_sides(mu, pr, 0.8, T);
            const auto b = subcritical_sides(rescale_data(mu, pr, T), pr, 0.8, 1.0);
            CHECK(a.mass / a.bound == doctest::Approx(b.mass / b.bound).epsilon(1e-9));
        }
    CHECK(code_of([&] { (void)rescale_data(InitialData::logpower(2, 1, 1, 1, 1), pr, 2.0); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("supercritical profile domination") {
    ProblemParams pr{2, 2, 4.0, 1.0};
    const double a = 4.0 / 3.0;
    CHECK(supercritical_profile_check(InitialData::zero(2), pr, 1.0).verdict == Verdict::Satisfied);
    CHECK(supercritical_profile_check(InitialData::power(2, 0.5, a, 10.0), pr, 1.0).verdict == Verdict::Satisfied);
    CHECK(supercritical_profile_check(InitialData::power(2, 2.0, a, 10.0), pr, 1.0).verdict == Verdict::Inconclusive);
    CHECK(code_of([&] { (void)supercritical_profile_check(InitialData::dirac(2, 1.0), pr, 1.0); }) ==
          ErrorCode::PointwiseUnavailable);
    CHECK(code_of([&] { (void)supercritical_profile_check(InitialData::zero(2), ProblemParams{2, 2, 1.5, 1.0}, 1.0); }) ==
          ErrorCode::WrongRegime);

    ProblemParams pc{2, 2, 3.0, 1.0};
    const auto crit = InitialData::logpower(2, 0.5, 2.0, 2.0, 0.5);
    CHECK(supercritical_profile_check(crit, pc, 1.0).verdict == Verdict::Satisfied);
}

TEST_CASE("L^alpha condition") {
    ProblemParams pr{2, 2, 3.0, 1.0};
    CHECK(code_of([&] { (void)lalpha_condition(InitialData::zero(2), pr, 3.5, 1.0); }) == ErrorCode::AlphaOutOfRange);
    CHECK(*lalpha_condition(InitialData::zero(2), pr, 2.0, 1.0) == doctest::Approx(TimeGrid{}.T_max));

    // Constant c: c sigma^{2m/(p-1)} <= gamma up to sigma = T^{1/2m} gives T = (gamma/c)^{p-1}.
    for (double c : {2.0, 10.0})
        CHECK(*lalpha_condition(InitialData::power(2, c, 0.0, 100.0), pr, 2.0, 1.0) ==
              doctest::Approx(std::pow(1.0 / c, 2.0)).epsilon(1e-8));

    // c|x|^{-a} with a alpha < N: F(sigma) = c (N/(N - a alpha))^{1/alpha} sigma^{2m/(p-1) - a}.
    const double a = 0.5, alpha = 2.0, e = 2.0;
    for (double c : {0.5, 3.0}) {
        const double k = c * std::pow(2.0 / (2.0 - a * alpha), 1.0 / alpha);
        const double sigma = std::pow(1.0 / k, 1.0 / (e - a));
        CHECK(*lalpha_condition(InitialData::power(2, c, a, 100.0), pr, alpha, 1.0) ==
              doctest::Approx(std::pow(sigma, 4.0)).epsilon(1e-8));
    }
    // a alpha >= N: |mu|^alpha is not locally integrable.
    CHECK(!lalpha_condition(InitialData::power(2, 1.0, 1.0, 1.0), pr, 2.5, 1.0).has_value());
}

TEST_CASE("Orlicz function and condition") {
    for (double beta : {0.5, 1.0, 2.0})
        for (double s = 1e-6; s <= 1e6 * 1.0001; s *= 10.0)
            CHECK(std::abs(orlicz_phi_inverse(orlicz_phi(s, beta), beta) - s) <= 1e-10 * std::max(1.0, s));
    CHECK(orlicz_phi_inverse(0.0, 1.0) == 0.0);

    ProblemParams pc{2, 2, 3.0, 1.0};
    OrliczOptions opt;
    opt.beta = 0.25;
    CHECK(*orlicz_condition(InitialData::zero(2), pc, opt) == doctest::Approx(TimeGrid{}.T_max));
    CHECK(code_of([&] { (void)orlicz_condition(InitialData::zero(2), ProblemParams{2, 2, 4.0, 1.0}, opt); }) ==
          ErrorCode::WrongRegime);
    // Critical profile c|x|^{-N}[log(e+1/|x|)]^{-N/2m-1}; Phi of it stays integrable
    // only for beta < N/2m.
    const auto small = InitialData::logpower(2, 1e-3, 2.0, 1.5, 0.5);
    const auto T = orlicz_condition(small, pc, opt);
    REQUIRE(T.has_value());
    // Heavier data can only shrink the admissible horizon.
    const auto T_big = orlicz_condition(InitialData::logpower(2, 1e-1, 2.0, 1.5, 0.5), pc, opt);
    CHECK((!T_big || *T_big <= *T));
    opt.beta = 1.0;
    CHECK(!orlicz_condition(small, pc, opt).has_value());
}

TEST_CASE("classify is deterministic and handles zero data") {
    for (double p : {1.5, 3.0, 5.0}) {
        ProblemParams pr{2, 2, p, 1.0};
        const auto rep = classify(InitialData::zero(2), pr, {});
        CHECK(rep.summary == SummaryKind::Exists);
    }
    ProblemParams pr{2, 2, 3.0, 1.0};
    const auto mu = InitialData::logpower(2, 1e-3, 2.0, 2.0, 0.5);
    const auto a = classify(mu, pr, {}), b = classify(mu, pr, {});
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t k = 0; k < a.checks.size(); ++k) {
        CHECK(a.checks[k].id == b.checks[k].id);
        CHECK(a.checks[k].quantity == b.checks[k].quantity);
        CHECK(a.checks[k].verdict == b.checks[k].verdict);
    }
    CHECK(a.summary_line() == b.summary_line());
}
