#include "polyheat/solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "polyheat/errors.hpp"
#include "polyheat/majorant.hpp"
#include "polyheat/operators.hpp"
#include "polyheat/profile_cache.hpp"

namespace polyheat {

    namespace {

        constexpr double kVFloor = 1e-300;

        // Psi and the two pointwise factors of D_*: a(U) = U / Psi(U), b(U) = Psi(U)^p / U.
        struct Weight {
            WeightMode mode = WeightMode::Linear;
            double p = 2.0, alpha = 2.0, beta = 1.0, Lo = std::numbers::e, d0 = 1.0;

            [[nodiscard]] double phiL(double s) const { return s * std::pow(std::log(Lo + s), beta); }

            [[nodiscard]] double phiL_inverse(double y) const {
                if (y <= 0.0) return 0.0;
                // Phi_L(s) >= s log(L)^beta >= s, and log(L + s) <= log(L + y) on [0, y].
                const double lo = y / std::pow(std::log(Lo + y), beta), hi = y / std::pow(std::log(Lo), beta);
                if (!(hi > lo)) return lo;
                std::uintmax_t iters = 200;
                auto tol = boost::math::tools::eps_tolerance<double>(50);
                const auto r =
                    boost::math::tools::toms748_solve([&](double s) { return phiL(s) - y; }, lo, hi, tol, iters);
                return 0.5 * (r.first + r.second);
            }

            // Density -> source of U.
            [[nodiscard]] double source(double mu) const {
                const double a = std::abs(mu);
                switch (mode) {
                    case WeightMode::Linear: return 2.0 * d0 * a;
                    case WeightMode::Alpha: return std::pow(2.0 * d0, alpha) * std::pow(a, alpha);
                    default: return phiL(a);
                }
            }

            [[nodiscard]] double psi(double U) const {
                U = std::max(U, 0.0);
                switch (mode) {
                    case WeightMode::Linear: return U;
                    case WeightMode::Alpha: return std::pow(U, 1.0 / alpha);
                    default: return phiL_inverse(U);
                }
            }

            [[nodiscard]] double a_factor(double U) const {
                U = std::max(U, 0.0);
                switch (mode) {
                    case WeightMode::Linear: return 1.0;
                    case WeightMode::Alpha: return std::pow(U, 1.0 - 1.0 / alpha);
                    default: return std::pow(std::log(Lo + phiL_inverse(U)), beta);
                }
            }

            [[nodiscard]] double b_factor(double U) const {
                U = std::max(U, 0.0);
                switch (mode) {
                    case WeightMode::Linear: return std::pow(U, p - 1.0);
                    case WeightMode::Alpha: return std::pow(U, p / alpha - 1.0);
                    default: {
                        const double s = phiL_inverse(U);
                        return std::pow(s, p - 1.0) / std::pow(std::log(Lo + s), beta);
                    }
                }
            }
        };

        Weight make_weight(const ProblemParams &params, const PicardConfig &cfg, double d0) {
            return {cfg.weight_mode, params.p, cfg.alpha_for(params), cfg.beta, cfg.L_orlicz, d0};
        }

        std::pair<double, double> default_delta_M(const PicardConfig &cfg, double d0) {
            if (cfg.weight_mode == WeightMode::Orlicz) return {cfg.delta.value_or(d0), cfg.M.value_or(2.0 * d0)};
            return {cfg.delta.value_or(0.5), cfg.M.value_or(1.0)};
        }

        // Data whose S_K sup is taken from the measure directly: atoms and singular radial profiles.
        bool use_measure_sup(const InitialData &mu, WeightMode mode) {
            if (mode == WeightMode::Orlicz) return false;
            if (mu.is_atomic()) return true;
            return mu.is_radial() && mu.radially_monotone() && (mu.a > 0.0 || mu.kind == DataKind::LogPower);
        }

        // Integral of a piecewise power law through (s0, b0), (s1, b1).
        double power_segment(double s0, double b0, double s1, double b1) {
            if (b0 <= 0.0 || b1 <= 0.0) return 0.5 * (b0 + b1) * (s1 - s0);
            const double k = std::log(b1 / b0) / std::log(s1 / s0);  // b ~ s^k
            if (std::abs(k + 1.0) < 1e-12) return b0 * s0 * std::log(s1 / s0);
            return b0 * s0 * (std::pow(s1 / s0, k + 1.0) - 1.0) / (k + 1.0);
        }

        void check_finite(const std::vector<double> &v, SolveReport &rep, const char *what) {
            for (double x : v)
                if (!std::isfinite(x)) throw SolveFailure(ErrorCode::NaNDetected, std::string("non-finite ") + what, rep);
        }

        struct RunResult {
            std::vector<std::vector<double>> u;  // per time node
            SolveReport rep;
            double dt = 0.0;
        };

        std::vector<int> snapshot_indices(int n_t, int count) {
            std::vector<int> idx;
            for (int k = 0; k <= count; ++k) {
                const int i = static_cast<int>(std::lround(static_cast<double>(k) * n_t / count));
                if (idx.empty() || idx.back() != i) idx.push_back(i);
            }
            return idx;
        }

    }  // namespace

    std::string_view to_string(WeightMode w) {
        switch (w) {
            case WeightMode::Linear: return "linear";
            case WeightMode::Alpha: return "alpha";
            default: return "orlicz";
        }
    }

    WeightMode weight_mode_from_string(std::string_view s) {
        std::string t;
        for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (t.starts_with("u_")) t = t.substr(2);
        if (t == "linear") return WeightMode::Linear;
        if (t == "alpha") return WeightMode::Alpha;
        if (t == "orlicz") return WeightMode::Orlicz;
        fail(ErrorCode::InvalidConfig, "unknown weight mode '" + std::string(s) + "'");
    }

    double PicardConfig::alpha_for(const ProblemParams &params) const {
        return alpha > 0.0 ? alpha : 0.5 * (1.0 + params.p);
    }

    void PicardConfig::validate(const ProblemParams &params) const {
        params.validate();
        auto need = [](bool ok, const std::string &msg) { require(ok, ErrorCode::InvalidConfig, msg); };
        need(T > 0.0 && std::isfinite(T), "T must be > 0");
        need(L > 0.0 && std::isfinite(L), "L must be > 0");
        need(n >= 16 && is_power_of_two(n), "n must be a power of two >= 16");
        need(n_t >= 1, "n_t must be >= 1");
        need(tol > 0.0, "tol must be > 0");
        need(max_iter >= 1, "max_iter must be >= 1");
        need(snapshots >= 1, "snapshots must be >= 1");
        need(residual_samples >= 0, "residual_samples must be >= 0");
        const double a = alpha_for(params);
        need(weight_mode != WeightMode::Alpha || (a > 1.0 && a < params.p), "alpha must satisfy 1 < alpha < p");
        need(beta > 0.0, "beta must be > 0");
        need(L_orlicz >= std::numbers::e * (1.0 - 1e-15), "L_orlicz must be >= e");
        if (delta) need(*delta > 0.0, "delta must be > 0");
        if (M) need(*M > 0.0, "M must be > 0");
        if (delta && M) need(*delta <= *M, "delta must not exceed M");
        need(d0 >= 0.0 && dstar >= 0.0, "d0 and dstar must be >= 0");
    }

    MajorantValues majorant_constants_for(const ProblemParams &params, const std::string &cache_dir) {
        const auto spec = make_majorant_spec(params, cache_dir);
        const auto plan = default_d_star_plan(params.N);
        return {estimate_d_j(spec, 0, default_envelope_grids(params.N)).value, d_star_reduction(spec, plan.samples())};
    }

    ContractionReport check_contraction(const InitialData &mu, const ProblemParams &params, const PicardConfig &cfg,
                                        double d0, double dstar) {
        cfg.validate(params);
        mu.validate();
        require(d0 > 0.0 && dstar > 0.0, ErrorCode::InvalidArgument, "d0 and d* must be > 0");
        const auto w = make_weight(params, cfg, d0);
        ContractionReport rep;
        std::tie(rep.delta, rep.M) = default_delta_M(cfg, d0);
        auto finish = [&] {
            const double p = params.p;
            rep.holds_invariance = rep.delta + d0 * dstar * rep.D_star * std::pow(rep.M, p) <= rep.M;
            rep.nu = 2.0 * p * d0 * dstar * rep.D_star * std::pow(rep.M, p - 1.0);
            rep.holds_contraction = rep.nu < 1.0;
            return rep;
        };
        if (mu.is_zero()) return finish();

        // Log-graded times down to 1e-12 T; the first interval is closed by a power law.
        const int per_decade = 8, decades = 12;
        for (int k = 0; k <= per_decade * decades; ++k)
            rep.times.push_back(cfg.T * std::pow(10.0, -decades + static_cast<double>(k) / per_decade));

        std::vector<double> A(rep.times.size()), B(rep.times.size());
        if (use_measure_sup(mu, cfg.weight_mode)) {
            require(!(mu.is_atomic() && cfg.weight_mode != WeightMode::Linear), ErrorCode::PointwiseUnavailable,
                    "atomic data only admits the linear weight");
            const auto gt = get_or_build_profile(cfg.cache_dir, KernelSpec::stable(params.N, params.theta),
                                                 kMajorantGthetaRadius, default_resolution(kMajorantGthetaRadius));
            const auto src = cfg.weight_mode == WeightMode::Alpha ? mu.radial_power(w.alpha) : mu;
            const double scale = cfg.weight_mode == WeightMode::Alpha ? std::pow(2.0 * d0, w.alpha) : 2.0 * d0;
            for (std::size_t k = 0; k < rep.times.size(); ++k) {
                const double U = scale * sup_SK_measure(src, gt.profile, params, rep.times[k], cfg.L, cfg.n);
                require(U > 0.0, ErrorCode::WeightDegenerate, "U vanishes identically");
                A[k] = w.a_factor(U);
                B[k] = w.b_factor(U);
            }
        } else {
            require(!mu.is_atomic(), ErrorCode::PointwiseUnavailable, "atomic data only admits the linear weight");
            auto source = sample_density(mu, cfg.L, cfg.n);
            for (double &v : source.values) v = w.source(v);
            Propagator prop(params.N, cfg.L, cfg.n, params.m, params.theta);
            for (std::size_t k = 0; k < rep.times.size(); ++k) {
                const auto U = prop.apply_SK(source, rep.times[k]);
                double a = 0.0, b = 0.0, umax = 0.0;
                for (double v : U.values) {
                    umax = std::max(umax, v);
                    a = std::max(a, w.a_factor(v));
                    b = std::max(b, w.b_factor(v));
                }
                require(umax > 0.0, ErrorCode::WeightDegenerate, "U vanishes identically");
                A[k] = a;
                B[k] = b;
            }
        }

        double inner = 0.0;
        {
            const double s0 = rep.times[0], s1 = rep.times[1];
            if (B[0] > 0.0 && B[1] > 0.0) {
                const double k = std::log(B[1] / B[0]) / std::log(s1 / s0);
                inner = k <= -1.0 ? std::numeric_limits<double>::infinity() : B[0] * s0 / (k + 1.0);
            }
        }
        for (std::size_t k = 0; k < rep.times.size(); ++k) {
            if (k > 0) inner += power_segment(rep.times[k - 1], B[k - 1], rep.times[k], B[k]);
            rep.inner_integral.push_back(inner);
            rep.D_star = std::max(rep.D_star, A[k] * inner);
        }
        return finish();
    }

    namespace {

        RunResult run_picard(const InitialData &mu, const ProblemParams &params, const PicardConfig &cfg, int n_t,
                             const Weight &w, SolveReport base) {
            RunResult out;
            out.rep = std::move(base);
            out.rep.n_t_used = n_t;
            const double dt = cfg.T / n_t;
            out.dt = dt;
            const double p = params.p;
            Propagator prop(params.N, cfg.L, cfg.n, params.m, params.theta);
            const auto f0 = sample_density(mu, cfg.L, cfg.n);
            const std::size_t size = f0.size();

            // u0 and V at every time node.
            std::vector<std::vector<double>> u0(n_t + 1), V(n_t + 1);
            u0[0] = f0.values;
            for (int i = 1; i <= n_t; ++i) {
                u0[i] = u0[i - 1];
                prop.apply_Sm_inplace(u0[i], dt);
            }
            {
                GridField source = f0;
                for (double &v : source.values) v = w.source(v);
                for (int i = 1; i <= n_t; ++i) {
                    auto U = prop.apply_SK(source, i * dt);
                    V[i].resize(size);
                    for (std::size_t k = 0; k < size; ++k) V[i][k] = w.psi(U.values[k]);
                }
            }
            long excluded = 0;
            for (int i = 1; i <= n_t; ++i)
                for (double v : V[i]) excluded += v < kVFloor;
            out.rep.excluded_points = excluded;

            auto weighted = [&](const std::vector<std::vector<double>> &a, const std::vector<std::vector<double>> *b) {
                double best = 0.0, sup = 0.0;
                for (int i = 1; i <= n_t; ++i)
                    for (std::size_t k = 0; k < size; ++k) {
                        const double d = std::abs(a[i][k] - (b ? (*b)[i][k] : 0.0));
                        sup = std::max(sup, d);
                        if (V[i][k] >= kVFloor) best = std::max(best, d / V[i][k]);
                    }
                return std::pair{best, sup};
            };
            out.rep.u0_norm = weighted(u0, nullptr).first;

            // F(u) with the left-endpoint rule: W_i = S_m(dt)(W_{i-1} + dt |u_{i-1}|^p).
            auto apply_F = [&](const std::vector<std::vector<double>> &u) {
                std::vector<std::vector<double>> next(n_t + 1);
                next[0] = u0[0];
                std::vector<double> W(size, 0.0);
                for (int i = 1; i <= n_t; ++i) {
                    for (std::size_t k = 0; k < size; ++k) W[k] += dt * std::pow(std::abs(u[i - 1][k]), p);
                    prop.apply_Sm_inplace(W, dt);
                    next[i].resize(size);
                    for (std::size_t k = 0; k < size; ++k) next[i][k] = u0[i][k] + W[k];
                }
                return next;
            };

            auto &rep = out.rep;
            auto u = u0;
            int streak = 0;
            for (int it = 1; it <= cfg.max_iter; ++it) {
                auto next = apply_F(u);
                for (int i = 1; i <= n_t; ++i) check_finite(next[i], rep, "iterate");
                const auto [inc, sup] = weighted(next, &u);
                rep.norm_history.push_back(inc);
                rep.sup_history.push_back(sup);
                rep.iterate_norms.push_back(weighted(next, nullptr).first);
                rep.iterations = it;
                if (!std::isfinite(inc)) throw SolveFailure(ErrorCode::NaNDetected, "non-finite increment", rep);
                const std::size_t h = rep.norm_history.size();
                if (h >= 2 && rep.norm_history[h - 2] > 0.0)
                    rep.contraction_estimate = std::max(rep.contraction_estimate, inc / rep.norm_history[h - 2]);
                streak = (h >= 2 && inc > rep.norm_history[h - 2]) ? streak + 1 : 0;
                u = std::move(next);
                if (inc <= cfg.tol && sup <= cfg.tol) {
                    rep.converged = true;
                    break;
                }
                if (streak >= 5)
                    throw SolveFailure(ErrorCode::IterationDiverged, "Picard increments grew 5 times in a row", rep);
            }

            // Defects at seeded samples: discrete equation and trapezoidal rule.
            if (cfg.residual_samples > 0) {
                std::mt19937_64 rng(cfg.seed);
                std::uniform_int_distribution<int> pick_t(1, n_t);
                std::uniform_int_distribution<std::size_t> pick_x(0, size - 1);
                std::vector<std::pair<int, std::size_t>> samples;
                for (int k = 0; k < cfg.residual_samples; ++k) samples.emplace_back(pick_t(rng), pick_x(rng));
                const auto Fu = apply_F(u);
                std::vector<double> Z(size);  // S_m(t_i) |u_0|^p
                std::vector<double> W(size, 0.0);
                for (std::size_t k = 0; k < size; ++k) Z[k] = std::pow(std::abs(u[0][k]), p);
                for (int i = 1; i <= n_t; ++i) {
                    for (std::size_t k = 0; k < size; ++k) W[k] += dt * std::pow(std::abs(u[i - 1][k]), p);
                    prop.apply_Sm_inplace(W, dt);
                    prop.apply_Sm_inplace(Z, dt);
                    for (const auto &[ti, xk] : samples) {
                        if (ti != i) continue;
                        rep.residual = std::max(rep.residual, std::abs(Fu[i][xk] - u[i][xk]));
                        const double trap = W[xk] - 0.5 * dt * Z[xk] + 0.5 * dt * std::pow(std::abs(u[i][xk]), p);
                        rep.quadrature_residual = std::max(rep.quadrature_residual, std::abs(u[i][xk] - u0[i][xk] - trap));
                    }
                }
            }
            out.u = std::move(u);
            return out;
        }

        GridField field_of(const std::vector<double> &v, const PicardConfig &cfg, int N, double t) {
            GridField g(N, cfg.L, cfg.n);
            g.values = v;
            g.time = t;
            return g;
        }

    }  // namespace

    SolveReport picard_solve(const InitialData &mu, const ProblemParams &params, const PicardConfig &cfg) {
        cfg.validate(params);
        mu.validate();
        require(mu.N == params.N, ErrorCode::InvalidArgument, "data and parameters must share N");
        require(!mu.is_atomic() || mu.is_zero(), ErrorCode::PointwiseUnavailable,
                "the grid solver needs a density; mollify atomic data first");
        require(!mu.non_sigma_finite(), ErrorCode::NonSigmaFinite, "profile is not locally integrable at 0");

        SolveReport base;
        double d0 = cfg.d0, dstar = cfg.dstar;
        if (d0 <= 0.0 || dstar <= 0.0) {
            const auto mc = majorant_constants_for(params, cfg.cache_dir);
            if (d0 <= 0.0) d0 = mc.d0;
            if (dstar <= 0.0) dstar = mc.dstar;
        }
        base.d0_used = d0;
        base.dstar_used = dstar;
        const auto w = make_weight(params, cfg, d0);
        if (!mu.is_zero()) {
            base.contraction = check_contraction(mu, params, cfg, d0, dstar);
            if (!base.contraction.holds_contraction && !cfg.force)
                throw SolveFailure(ErrorCode::NoContraction,
                                   "contraction condition fails: nu = " + std::to_string(base.contraction.nu), base);
        } else {
            base.contraction.holds_invariance = base.contraction.holds_contraction = true;
            std::tie(base.contraction.delta, base.contraction.M) = default_delta_M(cfg, d0);
        }

        const auto coarse = run_picard(mu, params, cfg, cfg.n_t, w, base);
        const auto idx = snapshot_indices(cfg.n_t, cfg.snapshots);
        if (!cfg.richardson) {
            SolveReport rep = coarse.rep;
            for (int i : idx) rep.snapshots.push_back({i * coarse.dt, field_of(coarse.u[i], cfg, params.N, i * coarse.dt)});
            return rep;
        }
        const auto fine = run_picard(mu, params, cfg, 2 * cfg.n_t, w, base);
        SolveReport rep = fine.rep;
        rep.converged = coarse.rep.converged && fine.rep.converged;
        double err = 0.0;
        for (int i : idx) {
            const auto &c = coarse.u[i];
            const auto &f = fine.u[2 * i];
            std::vector<double> ex(c.size());
            for (std::size_t k = 0; k < c.size(); ++k) {
                ex[k] = 2.0 * f[k] - c[k];
                err = std::max(err, std::abs(f[k] - c[k]));
            }
            rep.snapshots.push_back({i * coarse.dt, field_of(ex, cfg, params.N, i * coarse.dt)});
        }
        rep.richardson_error = err;
        return rep;
    }

    namespace {

        double catmull_rom(double p0, double p1, double p2, double p3, double t) {
            return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
        }

    }  // namespace

    GridField rescale_field(const GridField &u, double T, const ProblemParams &params, std::optional<GridLevel> target) {
        require(T > 0.0, ErrorCode::InvalidArgument, "rescaling needs T > 0");
        u.validate();
        const double amp = std::pow(T, 1.0 / (params.p - 1.0));
        const double stretch = std::pow(T, 1.0 / (2.0 * params.m));  // x' -> T^{1/2m} x'
        const int N = u.N;
        if (!target) {
            GridField out(N, u.L / stretch, u.n);
            out.values = u.values;
            for (double &v : out.values) v *= amp;
            if (u.time) out.time = *u.time / T;
            return out;
        }
        require(target->L > 0.0 && target->n >= 16 && is_power_of_two(target->n), ErrorCode::InvalidArgument,
                "bad target box");
        GridField out(N, target->L, target->n);
        const double dx = u.dx();
        for (std::size_t k = 0; k < out.size(); ++k) {
            const auto x = out.point(k);
            std::array<int, 3> base{0, 0, 0};
            std::array<double, 3> frac{0.0, 0.0, 0.0};
            for (int d = 0; d < N; ++d) {
                const double y = stretch * x[d];
                require(y >= -u.L && y <= u.L, ErrorCode::OutOfBox, "rescaled point leaves the source box");
                const double s = (y + u.L) / dx;
                base[d] = static_cast<int>(std::floor(s));
                frac[d] = s - base[d];
            }
            // Tensor-product Catmull-Rom with periodic wrap.
            auto at = [&](const std::array<int, 3> &idx) {
                std::array<int, 3> w{0, 0, 0};
                for (int d = 0; d < N; ++d) w[d] = ((idx[d] % u.n) + u.n) % u.n;
                return u.values[u.flat_index(w)];
            };
            std::function<double(int, std::array<int, 3>)> interp = [&](int d, std::array<int, 3> idx) -> double {
                if (d == N) return at(idx);
                double v[4];
                for (int o = -1; o <= 2; ++o) {
                    idx[d] = base[d] + o;
                    v[o + 1] = interp(d + 1, idx);
                }
                return catmull_rom(v[0], v[1], v[2], v[3], frac[d]);
            };
            out.values[k] = amp * interp(0, {0, 0, 0});
        }
        if (u.time) out.time = *u.time / T;
        return out;
    }

    InitialData mollified_dirac(const ProblemParams &params, double D, double eps, double L, int n,
                                const RadialKernelProfile &gtheta) {
        require(D >= 0.0 && eps > 0.0, ErrorCode::InvalidArgument, "mollified Dirac needs D >= 0 and eps > 0");
        GridField g(params.N, L, n);
        if (D > 0.0)
            for (std::size_t k = 0; k < g.size(); ++k) {
                const auto x = g.point(k);
                g.values[k] = D * eval_kernel(gtheta, std::span<const double>(x.data(), params.N), eps);
            }
        return InitialData::from_grid(std::move(g));
    }

    std::vector<SweepRow> delta_sweep(const ProblemParams &params, double D, const std::vector<double> &eps_list,
                                      const PicardConfig &cfg) {
        cfg.validate(params);
        require(D >= 0.0, ErrorCode::InvalidArgument, "D must be >= 0");
        require(!eps_list.empty(), ErrorCode::InvalidArgument, "need at least one eps");
        for (std::size_t k = 0; k < eps_list.size(); ++k)
            require(eps_list[k] > 0.0 && (k == 0 || eps_list[k] < eps_list[k - 1]), ErrorCode::InvalidArgument,
                    "eps list must decrease");
        const auto gt = get_or_build_profile(cfg.cache_dir, KernelSpec::stable(params.N, params.theta),
                                             kMajorantGthetaRadius, default_resolution(kMajorantGthetaRadius));
        PicardConfig run = cfg;
        run.force = true;
        if (run.d0 <= 0.0 || run.dstar <= 0.0) {
            const auto mc = majorant_constants_for(params, cfg.cache_dir);
            if (run.d0 <= 0.0) run.d0 = mc.d0;
            if (run.dstar <= 0.0) run.dstar = mc.dstar;
        }
        std::vector<SweepRow> rows;
        for (double eps : eps_list) {
            SweepRow row;
            row.eps = eps;
            const auto mu = mollified_dirac(params, D, eps, cfg.L, cfg.n, gt.profile);
            SolveReport rep;
            try {
                rep = picard_solve(mu, params, run);
                row.converged = rep.converged;
            } catch (const SolveFailure &f) {
                rep = f.report();
                row.failure = std::string(to_string(f.code()));
            }
            row.D_star = rep.contraction.D_star;
            row.nu = rep.contraction.nu;
            double best_gap = std::numeric_limits<double>::infinity();
            for (const auto &snap : rep.snapshots)
                if (std::abs(snap.t - 0.5 * cfg.T) < best_gap) {
                    best_gap = std::abs(snap.t - 0.5 * cfg.T);
                    row.sup_half = snap.u.sup_norm();
                }
            rows.push_back(row);
        }
        return rows;
    }

    double calibrate_gamma2_mass(const PicardConfig &cfg, double eps) {
        const ProblemParams params{1, 2, 3.0, 1.0};
        PicardConfig run = cfg;
        run.T = 1.0;
        run.force = true;
        run.richardson = false;
        run.residual_samples = 0;
        if (run.d0 <= 0.0 || run.dstar <= 0.0) {
            const auto mc = majorant_constants_for(params, cfg.cache_dir);
            run.d0 = mc.d0;
            run.dstar = mc.dstar;
        }
        const auto gt = get_or_build_profile(cfg.cache_dir, KernelSpec::stable(1, 1.0), kMajorantGthetaRadius,
                                             default_resolution(kMajorantGthetaRadius));
        double last_ok = 0.0;
        for (double D = 0.01; D < 1e4; D *= std::sqrt(2.0)) {
            bool ok = false;
            try {
                ok = picard_solve(mollified_dirac(params, D, eps, run.L, run.n, gt.profile), params, run).converged;
            } catch (const SolveFailure &) {
                ok = false;
            }
            if (!ok) break;
            last_ok = D;
        }
        return last_ok;
    }

}  // namespace polyheat
