// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "polyheat/criteria.hpp"
#include "polyheat/errors.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/majorant.hpp"
#include "polyheat/profile_cache.hpp"
#include "polyheat/solver.hpp"
#include "polyheat/testfn.hpp"

using namespace polyheat;

namespace {

    constexpr double kPi = std::numbers::pi;

    struct Outcome {
        bool pass = false;
        std::string detail;
    };

    std::string cache_dir() {
        if (const char *env = std::getenv("POLYHEAT_CACHE")) return env;
        return "acceptance_cache";
    }

    double seconds_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }

    // 1. Gaussian (m = 1) and Cauchy (theta = 1) closed forms, relative to the peak, on r in [0, 20].
    Outcome kernel_oracles() {
        double worst = 0.0, slowest = 0.0;
        for (int N = 1; N <= 3; ++N)
            for (int which = 0; which < 2; ++which) {
                const auto t0 = std::chrono::steady_clock::now();
                const auto spec = which == 0 ? KernelSpec::polyharmonic(N, 1) : KernelSpec::stable(N, 1.0);
                const auto prof = build_profile(spec, 20.0, default_resolution(20.0));
                slowest = std::max(slowest, seconds_since(t0));
                auto exact = [&](double r) {
                    if (which == 0) return std::pow(4.0 * kPi, -0.5 * N) * std::exp(-r * r / 4.0);
                    return std::tgamma(0.5 * (N + 1)) / std::pow(kPi, 0.5 * (N + 1)) * std::pow(1.0 + r * r, -0.5 * (N + 1));
                };
                const double peak = exact(0.0);
                for (std::size_t k = 0; k < prof.radii().size(); ++k)
                    worst = std::max(worst, std::abs(prof.values()[k] - exact(prof.radii()[k])) / peak);
            }
        return {worst < 1e-8 && slowest < 10.0, "max rel err " + num(worst) + ", slowest build " + num(slowest) + " s"};
    }

    // 2. Unit mass of every profile the library uses; G_m(0,1) > 0; G_2 changes sign in N = 1.
    Outcome mass_positivity() {
        double worst = 0.0, min_g2 = 0.0, min_value0 = 1.0;
        int count = 0;
        for (int N = 1; N <= 3; ++N) {
            for (int m = 1; m <= 3; ++m) {
                const auto p = get_or_build_profile(cache_dir(), KernelSpec::polyharmonic(N, m), majorant_gm_radius(m),
                                                    default_resolution(majorant_gm_radius(m)))
                                   .profile;
                worst = std::max(worst, std::abs(p.mass() - 1.0));
                min_value0 = std::min(min_value0, p.value0());
                if (N == 1 && m == 2) min_g2 = p.min_value();
                ++count;
            }
            const auto g = get_or_build_profile(cache_dir(), KernelSpec::stable(N, 1.0), kMajorantGthetaRadius,
                                                default_resolution(kMajorantGthetaRadius))
                               .profile;
            worst = std::max(worst, std::abs(g.mass() - 1.0));
            ++count;
        }
        return {worst <= 1e-4 && min_value0 > 0.0 && min_g2 < -1e-10,
                std::to_string(count) + " profiles, max |mass-1| " + num(worst) + ", min G_m(0,1) " + num(min_value0) +
                    ", min G_2 " + num(min_g2)};
    }

    // 3. theta = 1, N = 1, t = 2, s = 1, n = 2^14; then n doubled at fixed spacing (box doubled).
    Outcome stable_semigroup() {
        const int res = 4 * default_resolution(kMajorantGthetaRadius);
        const auto p = get_or_build_profile(cache_dir(), KernelSpec::stable(1, 1.0), kMajorantGthetaRadius, res).profile;
        const double r14 = semigroup_residual(p, 2.0, 1.0, 200.0, 1 << 14);
        const double r15 = semigroup_residual(p, 2.0, 1.0, 400.0, 1 << 15);
        const double fixed_box = semigroup_residual(p, 2.0, 1.0, 200.0, 1 << 15);
        return {r14 < 1e-5 && r15 <= 0.5 * r14,
                "n=2^14 (L=200) " + num(r14) + ", n=2^15 (L=400) " + num(r15) + ", n=2^15 (L=200) " + num(fixed_box)};
    }

    // 4. d0, d'', d_* saturate; omega sandwich on 10x3x50 samples; grid convolution vs reduction.
    Outcome majorant_suite() {
        const ProblemParams params{1, 2, 3.0, 1.0};
        const auto spec = make_majorant_spec(params, cache_dir());
        const auto d0 = estimate_d_j(spec, 0, default_envelope_grids(1));
        std::vector<double> times;
        for (int k = 12; k >= 0; --k) times.push_back(std::pow(10.0, -0.5 * k));
        const auto d2 = smoothing_bound_check(spec, InitialData::power(1, 1.0, 0.0, 1.0), times, 16.0, 1024);
        const auto plan = default_d_star_plan(1);
        const auto ds = estimate_d_star(spec, plan.samples(), plan.grids);
        const bool ok = d0.saturated && d2.saturated && ds.estimate.saturated && ds.sandwich_ok &&
                        ds.sandwich_checked == 1500 && ds.max_mismatch < 1e-5;
        return {ok, "d0 " + num(d0.value) + ", d'' " + num(d2.value) + ", d* " + num(ds.estimate.value) +
                        ", sandwich " + std::to_string(ds.sandwich_checked) + (ds.sandwich_ok ? " ok" : " violated") +
                        ", mismatch " + num(ds.max_mismatch)};
    }

    // 5. Small constant data: successive increment ratios <= 1.1 nu, iterates inside the M-ball.
    Outcome picard_contraction() {
        const ProblemParams params{1, 2, 2.0, 1.0};
        PicardConfig cfg;
        cfg.T = 1.0;
        cfg.L = 8.0;
        cfg.n = 64;
        cfg.n_t = 64;
        cfg.tol = 1e-13;
        cfg.cache_dir = cache_dir();
        const auto rep = picard_solve(InitialData::power(1, 1e-3, 0.0, 1e3), params, cfg);
        const double nu = rep.contraction.nu;
        double worst_ratio = 0.0, worst_norm = 0.0;
        for (std::size_t k = 1; k < rep.norm_history.size(); ++k)
            if (rep.norm_history[k - 1] > 0.0)
                worst_ratio = std::max(worst_ratio, rep.norm_history[k] / rep.norm_history[k - 1]);
        for (double v : rep.iterate_norms) worst_norm = std::max(worst_norm, v);
        const bool ok = rep.contraction.holds_invariance && rep.contraction.holds_contraction && rep.converged &&
                        worst_ratio <= 1.1 * nu && worst_norm <= rep.contraction.M;
        return {ok, "nu " + num(nu) + ", max ratio " + num(worst_ratio) + ", max |||u||| " + num(worst_norm) + " <= M " +
                        num(rep.contraction.M) + ", iterations " + std::to_string(rep.iterations)};
    }

    // 6. Homogeneous data against v(t) = c (1 - (p-1) c^{p-1} t)^{-1/(p-1)} for t <= T_blowup / 2.
    Outcome ode_oracle() {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (const double p : {2.0, 3.0}) {
            const double c = 1.0;
            const double blowup = 1.0 / ((p - 1.0) * std::pow(c, p - 1.0));
            const ProblemParams params{1, 2, p, 1.0};
            PicardConfig cfg;
            cfg.T = 0.5 * blowup;
            cfg.L = 8.0;
            cfg.n = 1 << 10;
            cfg.n_t = 256;
            cfg.tol = 1e-12;
            cfg.force = true;
            cfg.richardson = true;
            cfg.snapshots = 16;
            cfg.cache_dir = cache_dir();
            const auto rep = picard_solve(InitialData::power(1, c, 0.0, 1e3), params, cfg);
            if (!rep.converged) return {false, "p = " + num(p) + " did not converge"};
            for (const auto &s : rep.snapshots) {
                const double v = c * std::pow(1.0 - (p - 1.0) * std::pow(c, p - 1.0) * s.t, -1.0 / (p - 1.0));
                for (double u : s.u.values) worst = std::max(worst, std::abs(u - v));
            }
        }
        const double secs = seconds_since(t0);
        return {worst <= 1e-4 && secs < 60.0, "max |u - v| " + num(worst) + " (p = 2, 3), " + num(secs) + " s"};
    }

    // 7. D_* along mollified Dirac data, eps = 2^-1 .. 2^-6.
    Outcome dichotomy_trend() {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> eps;
        for (int k = 1; k <= 6; ++k) eps.push_back(std::ldexp(1.0, -k));
        PicardConfig cfg;
        cfg.T = 4.0;
        cfg.L = 64.0;
        cfg.n = 1 << 15;
        cfg.n_t = 32;
        cfg.max_iter = 60;
        cfg.residual_samples = 0;
        cfg.cache_dir = cache_dir();
        const auto sub = delta_sweep(ProblemParams{1, 2, 3.0, 1.0}, 0.05, eps, cfg);
        const auto sup = delta_sweep(ProblemParams{1, 2, 6.0, 1.0}, 0.05, eps, cfg);
        const double last_change = std::abs(sub[5].D_star / sub[4].D_star - 1.0);
        double min_growth = std::numeric_limits<double>::infinity();
        for (int k = 3; k < 6; ++k) min_growth = std::min(min_growth, sup[k].D_star / sup[k - 1].D_star);
        const double secs = seconds_since(t0);
        return {last_change < 0.05 && min_growth >= 2.0 && secs < 600.0,
                "p=3 last change " + num(100.0 * last_change) + "%, p=6 min growth per halving " + num(min_growth) +
                    ", " + num(secs) + " s"};
    }

    // 8. Dirac verdicts on an 11-point p grid around p_m for (N, m) in {1,2,3} x {2,3}.
    Outcome classifier_logic() {
        const std::vector<double> fractions{0.25, 0.5, 0.75, 0.9, 0.99, 1.0, 1.01, 1.1, 1.5, 2.0, 3.0};
        int agree = 0, total = 0;
        for (int N = 1; N <= 3; ++N)
            for (int m = 2; m <= 3; ++m) {
                const double pm = 1.0 + 2.0 * m / N;
                for (double f : fractions) {
                    const ProblemParams params{N, m, 1.0 + f * (pm - 1.0), 1.0};
                    const auto rep = classify(InitialData::dirac(N, 1.0), params, ClassifyConfig{});
                    const SummaryKind want = params.p < pm && f < 1.0 ? SummaryKind::Exists : SummaryKind::Nonexistence;
                    agree += rep.summary == want;
                    ++total;
                }
            }
        return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " verdicts match sign(p - p_m)"};
    }

    // 9. Solve-then-rescale vs rescale-then-solve; the subcritical check under mu -> mu_T.
    Outcome scaling_covariance() {
        const ProblemParams params{1, 2, 2.5, 1.0};
        const double T = 16.0;
        GridField g(1, 8.0, 256);
        g.fill([](std::span<const double> x) { return 0.05 * std::exp(-x[0] * x[0]); });
        const auto mu = InitialData::from_grid(g);
        PicardConfig cfg;
        cfg.T = 1.0;
        cfg.L = 8.0;
        cfg.n = 256;
        cfg.n_t = 64;
        cfg.tol = 1e-12;
        cfg.force = true;
        cfg.cache_dir = cache_dir();
        const auto direct = picard_solve(mu, params, cfg);
        PicardConfig cfg_T = cfg;
        cfg_T.T = cfg.T / T;
        cfg_T.L = cfg.L / std::pow(T, 0.25);
        const auto scaled = picard_solve(rescale_data(mu, params, T), params, cfg_T);
        double err = 0.0;
        for (std::size_t j = 0; j < direct.snapshots.size(); ++j) {
            const auto lhs = rescale_field(direct.snapshots[j].u, T, params);
            const auto &rhs = scaled.snapshots[j].u;
            for (std::size_t k = 0; k < lhs.size(); ++k) err = std::max(err, std::abs(lhs.values[k] - rhs.values[k]));
        }
        // Subcritical condition: mass / bound at horizon S for mu_T equals the value at T S for mu.
        double identity = 0.0;
        const ProblemParams pr{2, 2, 1.6, 1.0};
        const std::vector<InitialData> fixtures{InitialData::dirac(2, 1.3),
                                                InitialData::atom_list(2, {{{0.0, 0.0, 0}, 1.0}, {{0.3, 0.1, 0}, 2.0}}),
                                                InitialData::power(2, 0.7, 1.1, 1.5)};
        for (const auto &f : fixtures)
            for (double S : {1e-3, 0.2, 5.0}) {
                const auto a = subcritical_sides(f, pr, 0.8, S);
                const auto b = subcritical_sides(rescale_data(f, pr, S), pr, 0.8, 1.0);
                identity = std::max(identity, std::abs(a.mass / a.bound - b.mass / b.bound) / (a.mass / a.bound));
            }
        return {err <= 1e-3 && identity <= 1e-12,
                "sup |solve/rescale diff| " + num(err) + ", subcritical identity rel gap " + num(identity)};
    }

    // 10. eta values, monotonicity, derivative-bound saturation for k <= 4, p = 2.
    Outcome cutoff_machinery() {
        bool ok = eta(0.5) == 1.0 && eta(3.0) == 0.0 && std::abs(eta(1.5) - 0.5) < 1e-15;
        double prev = 1.0;
        for (int i = 0; i <= 10000; ++i) {
            const double v = eta(3.0 * i / 10000.0);
            ok = ok && v <= prev;
            prev = v;
        }
        std::string consts;
        try {
            for (const auto &e : derivative_bound_check(2.0, 4)) {
                ok = ok && e.saturated;
                consts += (consts.empty() ? "" : ", ") + num(e.value);
            }
        } catch (const Error &e) {
            return {false, e.what()};
        }
        return {ok, "eta(0.5)=1, eta(3)=0, eta(1.5)=1/2, monotone on 10^4 points, C_k = " + consts};
    }

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"kernel oracles", kernel_oracles},
        {"mass and positivity", mass_positivity},
        {"stable semigroup", stable_semigroup},
        {"majorant constants", majorant_suite},
        {"Picard contraction", picard_contraction},
        {"ODE oracle", ode_oracle},
        {"dichotomy trend", dichotomy_trend},
        {"classifier logic", classifier_logic},
        {"scaling covariance", scaling_covariance},
        {"cutoff machinery", cutoff_machinery},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += !out.pass;
        std::printf("%s criterion %zu (%s): %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
