#include "polyheat/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "polyheat/errors.hpp"
#include "polyheat/operators.hpp"
#include "polyheat/profile_cache.hpp"

namespace polyheat {

    void MajorantSpec::validate() const {
        params.validate();
        require(gm.spec().kind == KernelKind::Polyharmonic && gtheta.spec().kind == KernelKind::Stable,
                ErrorCode::InvalidArgument, "majorant needs a polyharmonic and a stable profile");
        require(gm.spec().N == params.N && gtheta.spec().N == params.N, ErrorCode::InvalidArgument,
                "profiles and parameters must share N");
        require(gm.spec().m == params.m && gtheta.spec().theta == params.theta, ErrorCode::InvalidArgument,
                "profiles must match m and theta of the parameters");
        const double a = time_exponent();
        require(a > 0.0 && a < 1.0, ErrorCode::InvalidArgument, "theta/2m must lie in (0,1)");
    }

    double eval_K_radial(const MajorantSpec &spec, double r, double t) {
        require(t > 0.0, ErrorCode::NonPositiveTime, "K(x,t) needs t > 0");
        return eval_kernel_radial(spec.gtheta, r, std::pow(t, spec.time_exponent()));
    }

    double eval_K(const MajorantSpec &spec, std::span<const double> x, double t) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        return eval_K_radial(spec, std::sqrt(r2), t);
    }

    MajorantSpec make_majorant_spec(const ProblemParams &params, const std::filesystem::path &cache_dir, int *hits) {
        params.validate();
        auto gm = get_or_build_profile(cache_dir, KernelSpec::polyharmonic(params.N, params.m),
                                       majorant_gm_radius(params.m), default_resolution(majorant_gm_radius(params.m)));
        auto gt = get_or_build_profile(cache_dir, KernelSpec::stable(params.N, params.theta), kMajorantGthetaRadius,
                                       default_resolution(kMajorantGthetaRadius));
        if (hits) *hits = static_cast<int>(gm.hit) + static_cast<int>(gt.hit);
        MajorantSpec spec{params, std::move(gm.profile), std::move(gt.profile)};
        spec.validate();
        return spec;
    }

    MajorantConstants estimate_majorant_constants(const MajorantSpec &spec) {
        const auto plan = default_d_star_plan(spec.params.N);
        return {estimate_d_j(spec, 0, default_envelope_grids(spec.params.N)),
                estimate_d_star(spec, plan.samples(), plan.grids)};
    }

    double omega_ts(double t, double s, double a) { return std::pow(t - s, a) + std::pow(s, a); }

    bool omega_sandwich_holds(double t, double s, double a) {
        const double w = omega_ts(t, s, a);
        const double ta = std::pow(t, a);
        return ta <= w && w <= 2.0 * ta;
    }

    ConstantEstimate estimate_d_j(const MajorantSpec &spec, int j, const std::vector<GridLevel> &grids) {
        spec.validate();
        require(j >= 0 && j <= 2, ErrorCode::InvalidArgument, "derivative order must be 0, 1 or 2");
        require(!grids.empty(), ErrorCode::InvalidArgument, "need at least one grid level");
        const int N = spec.params.N;
        ConstantEstimate est;
        est.name = "d_" + std::to_string(j);
        int growth_streak = 0;
        for (const auto &lvl : grids) {
            double best = 0.0;
            for (const auto &alpha : multi_indices(N, j)) {
                const auto field = spectral_kernel_derivative(spec.gm.spec(), alpha, lvl.L, lvl.n);
                const double floor = 1e-13 * field.sup_norm();
                for (std::size_t k = 0; k < field.size(); ++k) {
                    const double f = std::abs(field.values[k]);
                    if (f <= floor) continue;
                    const auto x = field.point(k);
                    best = std::max(best, f / eval_K(spec, std::span<const double>(x.data(), N), 1.0));
                }
            }
            const double prev = est.refinement_history.empty() ? 0.0 : est.value;
            est.push(static_cast<long>(std::pow(lvl.n, N)), best);
            growth_streak = (prev > 0.0 && best > prev * 1.02) ? growth_streak + 1 : 0;
            if (growth_streak >= 3) fail(ErrorCode::EstimateDiverging, est.name + " keeps growing with the grid");
        }
        // Beyond this radius the stretched-exponential tail of G_m cannot host
        // the sup against the power-law tail of K (derivatives share the rate).
        const auto &tail = spec.gm.tail();
        double r = spec.gm.r_max();
        if (tail.amplitude > 0.0 && tail.rate > 0.0) {
            r = 1.0;
            for (; r < 1e6; r *= 1.05) {
                const double ratio = tail.amplitude * std::exp(-tail.rate * std::pow(r, tail.exponent)) /
                                     eval_K_radial(spec, r, 1.0);
                if (ratio < 1e-3 * est.value && r >= 1.0) break;
            }
        }
        est.tail_radius = r;
        return est;
    }

    ConstantEstimate smoothing_bound_check(const MajorantSpec &spec, const InitialData &mu,
                                           const std::vector<double> &times, double L, int n) {
        spec.validate();
        require(!times.empty(), ErrorCode::InvalidArgument, "need at least one sample time");
        const int N = spec.params.N;
        const int m = spec.params.m;
        ConstantEstimate est;
        est.name = "d_pp";
        double running = 0.0;
        bool any = false;
        long count = 0;
        for (double t : times) {
            require(t > 0.0, ErrorCode::NonPositiveTime, "sample times must be > 0");
            const double mass = ball_mass_sup(mu, std::pow(t, 1.0 / (2.0 * m)));
            ++count;
            if (mass > 0.0) {
                any = true;
                const double sup = sup_SK_measure(mu, spec.gtheta, spec.params, t, L, n);
                running = std::max(running, sup * std::pow(t, N / (2.0 * m)) / mass);
            }
            if (any) est.push(count, running);
        }
        if (!any) fail(ErrorCode::DegenerateMeasure, "all sampled ball masses vanish");
        return est;
    }

    std::vector<DStarSample> d_star_samples(double t_min, double t_max, double x_max, int n_t, int n_x) {
        require(t_min > 0.0 && t_max >= t_min && n_t >= 1 && n_x >= 1, ErrorCode::InvalidArgument, "bad d_* window");
        std::vector<DStarSample> out;
        for (int i = 0; i < n_t; ++i) {
            const double t = n_t == 1 ? t_min : t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n_t - 1));
            for (double frac : {0.1, 0.5, 0.9})
                for (int k = 0; k < n_x; ++k)
                    out.push_back({t, frac * t, n_x == 1 ? 0.0 : x_max * k / (n_x - 1)});
        }
        return out;
    }

    double d_star_reduction(const MajorantSpec &spec, const std::vector<DStarSample> &samples) {
        spec.validate();
        const double a = spec.time_exponent();
        double best = 0.0;
        for (const auto &smp : samples) {
            require(smp.s > 0.0 && smp.s < smp.t, ErrorCode::InvalidArgument, "d_* samples need 0 < s < t");
            const double w = omega_ts(smp.t, smp.s, a);
            best = std::max(best, eval_kernel_radial(spec.gtheta, smp.x, w) / eval_K_radial(spec, smp.x, smp.t));
        }
        return best;
    }

    DStarPlan default_d_star_plan(int N) {
        switch (N) {
            case 1: return {0.1, 10.0, 50.0, {{200.0, 1 << 13}, {400.0, 1 << 14}}};
            case 2: return {10.0, 1000.0, 50.0, {{100.0, 512}, {100.0, 1024}}};
            default: return {160.0, 1600.0, 20.0, {{40.0, 64}, {40.0, 128}}};
        }
    }

    DStarReport estimate_d_star(const MajorantSpec &spec, const std::vector<DStarSample> &samples,
                                const std::vector<GridLevel> &grids, double mismatch_tol) {
        spec.validate();
        require(!samples.empty() && !grids.empty(), ErrorCode::InvalidArgument, "need samples and grid levels");
        const int N = spec.params.N;
        const double a = spec.time_exponent();
        DStarReport rep;
        rep.estimate.name = "d_star";

        std::map<std::pair<double, double>, std::vector<double>> by_pair;
        for (const auto &smp : samples) {
            require(smp.s > 0.0 && smp.s < smp.t, ErrorCode::InvalidArgument, "d_* samples need 0 < s < t");
            ++rep.sandwich_checked;
            rep.sandwich_ok = rep.sandwich_ok && omega_sandwich_holds(smp.t, smp.s, a);
            by_pair[{smp.t, smp.s}].push_back(std::abs(smp.x));
        }

        for (std::size_t level = 0; level < grids.size(); ++level) {
            const auto &lvl = grids[level];
            const bool finest = level + 1 == grids.size();
            double best = 0.0;
            for (const auto &[ts, xs] : by_pair) {
                const auto [t, s] = ts;
                const double tau1 = std::pow(t - s, a), tau2 = std::pow(s, a);
                const double w = tau1 + tau2;
                const double trunc = semigroup_truncation_estimate(spec.gtheta, w, tau2, lvl.L);
                require(trunc <= 1e-6, ErrorCode::BoxTooSmall,
                        "d_* grid box too small: truncation estimate " + std::to_string(trunc));
                const auto f1 = sample_kernel(spec.gtheta, tau1, N, lvl.L, lvl.n);
                const auto f2 = sample_kernel(spec.gtheta, tau2, N, lvl.L, lvl.n);
                const auto conv = linear_convolution_centered(f1, f2);
                const double dx = f1.dx();
                for (double x : xs) {
                    require(x <= 0.5 * lvl.L, ErrorCode::BoxTooSmall, "d_* sample lies outside the inner window");
                    std::array<int, 3> idx{lvl.n / 2, lvl.n / 2, lvl.n / 2};
                    idx[0] = lvl.n / 2 + static_cast<int>(std::lround(x / dx));
                    for (int d = N; d < 3; ++d) idx[d] = 0;
                    const double xn = f1.coordinate(idx[0]);
                    const double c = conv[f1.flat_index(idx)];
                    const double k = eval_K_radial(spec, xn, t);
                    const double exact = eval_kernel_radial(spec.gtheta, xn, w);
                    best = std::max(best, c / k);
                    if (finest) {
                        rep.max_mismatch = std::max(rep.max_mismatch, std::abs(c - exact));
                        rep.exact_ratio_max = std::max(rep.exact_ratio_max, exact / k);
                    }
                }
            }
            rep.estimate.push(static_cast<long>(std::pow(lvl.n, N)), best);
        }
        if (rep.max_mismatch > mismatch_tol)
            fail(ErrorCode::SemigroupMismatch, "grid convolution differs from the omega reduction by " +
                                                   std::to_string(rep.max_mismatch));
        return rep;
    }

}  // namespace polyheat
