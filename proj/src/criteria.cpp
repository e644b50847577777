#include "polyheat/criteria.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polyheat/errors.hpp"

namespace polyheat {

    namespace {

        constexpr double kE = std::numbers::e;

        double log_e_plus(double log_s) {
            if (log_s > 30.0) return log_s + std::log1p(kE * std::exp(-log_s));
            return std::log(kE + std::exp(log_s));
        }

        // Least-squares slope of y against x.
        double ls_slope(const std::vector<double> &x, const std::vector<double> &y) {
            const double n = static_cast<double>(x.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                sx += x[i];
                sy += y[i];
                sxx += x[i] * x[i];
                sxy += x[i] * y[i];
            }
            const double den = n * sxx - sx * sx;
            return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
        }

        bool has_pointwise_density(const InitialData &mu) { return !mu.is_atomic() || mu.is_zero(); }

        // Average of g(|mu|) over the worst ball of radius sigma, in log form for radial data.
        double worst_ball_average(const InitialData &mu, double sigma,
                                  const std::function<double(double)> &log_g,
                                  const std::function<double(double)> &g) {
            const int N = mu.N;
            const double vol = unit_ball_volume(N) * std::pow(sigma, N);
            if (mu.is_zero()) return 0.0;
            if (mu.kind == DataKind::Grid) {
                auto f = *mu.grid;
                for (double &v : f.values) v = g(std::abs(v));
                return grid_ball_mass_sup(f, sigma) / vol;
            }
            require(mu.is_radial(), ErrorCode::PointwiseUnavailable, "ball averages of |mu| need a density");
            require(mu.radially_monotone(), ErrorCode::PointwiseUnavailable,
                    "ball averages of transformed data need monotone radial or grid data");
            return radial_transformed_mass_within(mu, sigma, log_g) / vol;
        }

        double grid_sigma_floor(const InitialData &mu) { return mu.kind == DataKind::Grid ? mu.grid->dx() : 0.0; }

    }  // namespace

    std::string_view to_string(Verdict v) {
        switch (v) {
            case Verdict::Satisfied: return "SATISFIED";
            case Verdict::Violated: return "VIOLATED";
            default: return "INCONCLUSIVE";
        }
    }

    std::string_view to_string(ScanVerdict v) {
        return v == ScanVerdict::NonexistenceIndicated ? "NONEXISTENCE_INDICATED" : "INCONCLUSIVE";
    }

    std::string ClassificationReport::summary_line() const {
        switch (summary) {
            case SummaryKind::Exists: return "EXISTS_BY " + summary_id;
            case SummaryKind::Nonexistence: return "NONEXISTENCE_BY " + summary_id;
            default: return "UNDECIDED";
        }
    }

    std::vector<double> TimeGrid::values() const {
        require(T_min > 0.0 && T_max >= T_min && per_decade >= 1, ErrorCode::InvalidArgument, "bad time grid");
        const int count = static_cast<int>(std::ceil(std::log10(T_max / T_min) * per_decade)) + 1;
        std::vector<double> out;
        for (int k = 0; k < count; ++k)
            out.push_back(count == 1 ? T_min : T_min * std::pow(T_max / T_min, static_cast<double>(k) / (count - 1)));
        return out;
    }

    std::vector<double> dyadic_sigmas(int count) {
        std::vector<double> out;
        for (int k = 0; k < count; ++k) out.push_back(std::ldexp(1.0, -k));
        return out;
    }

    ExponentScan necessary_exponent_scan(const InitialData &mu, const ProblemParams &params,
                                         const std::vector<double> &sigmas, const ScanOptions &opt) {
        params.validate();
        require(sigmas.size() >= 4, ErrorCode::InsufficientSigmas, "the exponent scan needs at least 4 scales");
        for (std::size_t k = 0; k < sigmas.size(); ++k) {
            require(sigmas[k] > 0.0, ErrorCode::InvalidArgument, "scales must be > 0");
            require(k == 0 || sigmas[k] < sigmas[k - 1], ErrorCode::InvalidArgument, "scales must decrease");
        }
        const int N = params.N, m = params.m;
        const bool critical = regime_of(params) == Regime::Critical;
        const double lambda = N - 2.0 * m / (params.p - 1.0);
        ExponentScan scan;
        scan.sigmas = sigmas;
        for (double s : sigmas) {
            const double mass = ball_mass_sup(mu, s);
            const double w = critical ? std::pow(std::log(kE + 1.0 / s), N / (2.0 * m)) : std::pow(s, -lambda);
            scan.q.push_back(mass * w);
        }
        const double qmax = *std::max_element(scan.q.begin(), scan.q.end());
        if (qmax <= 0.0) {
            scan.reason = "q vanishes on every scale";
            return scan;
        }

        // Trend over the finer half of the scales.
        const std::size_t from = sigmas.size() / 2;
        std::vector<double> lx, llx, lq;
        scan.monotone_growth = true;
        for (std::size_t k = from; k < sigmas.size(); ++k) {
            if (scan.q[k] <= 0.0) {
                scan.monotone_growth = false;
                continue;
            }
            lx.push_back(std::log(1.0 / sigmas[k]));
            llx.push_back(std::log(std::log(kE + 1.0 / sigmas[k])));
            lq.push_back(std::log(scan.q[k]));
            if (k > from && scan.q[k] < scan.q[k - 1] * (1.0 - 1e-12)) scan.monotone_growth = false;
        }
        if (lq.size() >= 2) {
            scan.power_slope = ls_slope(lx, lq);
            scan.loglog_slope = ls_slope(llx, lq);
        }

        if (mu.is_atomic()) {
            // Once sigma is below half the smallest atom spacing, q is the heaviest
            // atom times an explicit power (or log power) of sigma.
            if (critical || lambda > 0.0) {
                scan.verdict = ScanVerdict::NonexistenceIndicated;
                scan.reason = critical ? "atom: q grows like [log(e+1/sigma)]^{N/2m}" : "atom: q grows like sigma^{-lambda}";
            } else {
                scan.reason = "atom: q decays like sigma^{-lambda}, lambda <= 0";
            }
            return scan;
        }
        if (scan.monotone_growth &&
            (scan.power_slope >= opt.slope_threshold || scan.loglog_slope >= opt.slope_threshold)) {
            scan.verdict = ScanVerdict::NonexistenceIndicated;
            scan.reason = "q grows steadily as sigma -> 0";
        } else if (qmax > opt.gamma_nec) {
            scan.verdict = ScanVerdict::NonexistenceIndicated;
            scan.reason = "q exceeds gamma_nec";
        } else {
            scan.reason = "q stays bounded";
        }
        return scan;
    }

    double dirac_log_threshold(const InitialData &mu, const ProblemParams &params, double gamma2) {
        const double kappa = params.N / (2.0 * params.m) - 1.0 / (params.p - 1.0);
        return std::log(mu.atoms.front().mass / gamma2) / kappa;
    }

    SubcriticalSides subcritical_sides(const InitialData &mu, const ProblemParams &params, double gamma2, double T) {
        const double kappa = params.N / (2.0 * params.m) - 1.0 / (params.p - 1.0);
        return {ball_mass_sup(mu, std::pow(T, 1.0 / (2.0 * params.m))), gamma2 * std::pow(T, kappa)};
    }

    std::optional<double> subcritical_sufficiency(const InitialData &mu, const ProblemParams &params, double gamma2,
                                                  const TimeGrid &grid) {
        params.validate();
        require(regime_of(params) == Regime::Subcritical, ErrorCode::WrongRegime,
                "the subcritical condition needs 1 < p < p_m");
        require(gamma2 > 0.0, ErrorCode::InvalidArgument, "gamma2 must be > 0");
        const auto Ts = grid.values();
        if (mu.is_zero()) return Ts.back();
        const double kappa = params.N / (2.0 * params.m) - 1.0 / (params.p - 1.0);
        if (mu.kind == DataKind::Dirac) {
            const double T = std::exp(dirac_log_threshold(mu, params, gamma2));
            if (T < std::numeric_limits<double>::min()) return std::nullopt;
            return T;
        }

        auto ok = [&](double T) {
            const auto s = subcritical_sides(mu, params, gamma2, T);
            return s.mass <= s.bound;
        };
        std::optional<std::size_t> best;
        for (std::size_t k = 0; k < Ts.size(); ++k)
            if (ok(Ts[k])) best = k;
        if (!best) return std::nullopt;
        if (*best + 1 == Ts.size()) return Ts.back();
        double lo = std::log(Ts[*best]), hi = std::log(Ts[*best + 1]);
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(std::exp(mid)) ? lo : hi) = mid;
        }
        return std::exp(lo);
    }

    double supercritical_profile(const ProblemParams &params, double r) {
        const int N = params.N, m = params.m;
        if (regime_of(params) == Regime::Critical)
            return std::pow(r, -N) * std::pow(std::log(kE + 1.0 / r), -N / (2.0 * m) - 1.0);
        return std::pow(r, -2.0 * m / (params.p - 1.0));
    }

    ProfileCheck supercritical_profile_check(const InitialData &mu, const ProblemParams &params, double gamma3) {
        params.validate();
        require(regime_of(params) != Regime::Subcritical, ErrorCode::WrongRegime,
                "the profile condition needs p >= p_m");
        require(gamma3 > 0.0, ErrorCode::InvalidArgument, "gamma3 must be > 0");
        ProfileCheck out;
        if (mu.is_zero()) {
            out.verdict = Verdict::Satisfied;
            return out;
        }
        require(!mu.is_atomic(), ErrorCode::PointwiseUnavailable, "atomic data has no pointwise values");
        auto ratio = [&](double r, double v) {
            const double bound = gamma3 * (r == 0.0 ? std::numeric_limits<double>::infinity()
                                                    : supercritical_profile(params, r)) +
                                 gamma3;
            return v / bound;
        };
        if (mu.kind == DataKind::Grid) {
            const auto &g = *mu.grid;
            for (std::size_t k = 0; k < g.size(); ++k) {
                const auto x = g.point(k);
                double r2 = 0.0;
                for (int d = 0; d < g.N; ++d) r2 += x[d] * x[d];
                out.worst_ratio = std::max(out.worst_ratio, ratio(std::sqrt(r2), g.values[k]));
            }
        } else {
            const int samples = 4000;
            for (int k = 0; k <= samples; ++k) {
                const double r = mu.cutoff * std::pow(10.0, -14.0 * (1.0 - static_cast<double>(k) / samples));
                out.worst_ratio = std::max(out.worst_ratio, ratio(r, mu.radial_density(r)));
            }
        }
        out.verdict = out.worst_ratio <= 1.0 ? Verdict::Satisfied : Verdict::Inconclusive;
        return out;
    }

    std::optional<double> lalpha_condition(const InitialData &mu, const ProblemParams &params, double alpha,
                                           double gamma, const TimeGrid &grid) {
        params.validate();
        require(alpha > 1.0 && alpha < params.p, ErrorCode::AlphaOutOfRange, "the L^alpha condition needs 1 < alpha < p");
        require(gamma > 0.0, ErrorCode::InvalidArgument, "gamma must be > 0");
        const auto Ts = grid.values();
        if (mu.is_zero()) return Ts.back();
        require(has_pointwise_density(mu), ErrorCode::PointwiseUnavailable, "|mu|^alpha needs a density");
        const int m = params.m;
        const double e = 2.0 * m / (params.p - 1.0);
        const auto powered = mu.radial_power(alpha);
        if (powered.non_sigma_finite()) return std::nullopt;

        auto F = [&](double sigma) {
            const double avg = ball_mass_sup(powered, sigma) / (unit_ball_volume(mu.N) * std::pow(sigma, mu.N));
            return std::pow(avg, 1.0 / alpha) * std::pow(sigma, e);
        };
        const double s_hi = std::pow(Ts.back(), 1.0 / (2.0 * m));
        const double s_lo = std::max(1e-10, grid_sigma_floor(mu));
        if (s_lo >= s_hi) return std::nullopt;
        const int count = static_cast<int>(std::ceil(8.0 * std::log10(s_hi / s_lo))) + 1;
        double good = -1.0, bad = -1.0;
        for (int k = 0; k < count; ++k) {
            const double s = s_lo * std::pow(s_hi / s_lo, static_cast<double>(k) / std::max(1, count - 1));
            if (F(s) <= gamma) {
                good = s;
            } else {
                bad = s;
                break;
            }
        }
        if (good < 0.0) return std::nullopt;
        if (bad > 0.0) {
            double lo = std::log(good), hi = std::log(bad);
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (lo + hi);
                (F(std::exp(mid)) <= gamma ? lo : hi) = mid;
            }
            good = std::exp(lo);
        }
        return std::min(Ts.back(), std::pow(good, 2.0 * m));
    }

    double orlicz_phi(double s, double beta) { return s * std::pow(std::log(kE + s), beta); }

    double orlicz_phi_inverse(double y, double beta) {
        require(y >= 0.0, ErrorCode::InvalidArgument, "Phi^{-1} needs y >= 0");
        if (y == 0.0 || std::isinf(y)) return y;
        // Phi(s) >= s and log(e+s) <= log(e+y) on [0, y] bracket the root.
        double lo = y / std::pow(std::log(kE + y), beta), hi = y;
        if (lo == hi) return lo;
        std::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(52);
        const auto r = boost::math::tools::toms748_solve([&](double s) { return orlicz_phi(s, beta) - y; }, lo, hi,
                                                         tol, iters);
        return 0.5 * (r.first + r.second);
    }

    double orlicz_rho(double s, int N, int m) {
        return std::pow(s, -N) * std::pow(std::log(kE + 1.0 / s), -N / (2.0 * m));
    }

    std::optional<double> orlicz_condition(const InitialData &mu, const ProblemParams &params,
                                           const OrliczOptions &opt, const TimeGrid &grid) {
        params.validate();
        require(regime_of(params) == Regime::Critical, ErrorCode::WrongRegime, "the Orlicz condition needs p = p_m");
        require(opt.beta > 0.0 && opt.gamma > 0.0, ErrorCode::InvalidArgument, "beta and gamma must be > 0");
        const auto Ts = grid.values();
        if (mu.is_zero()) return Ts.back();
        require(has_pointwise_density(mu), ErrorCode::PointwiseUnavailable, "the Orlicz condition needs a density");
        const int N = params.N, m = params.m;
        const double w = opt.window_exponent.value_or(1.0 / (2.0 * m));
        const double s_floor = std::max(opt.sigma_min, grid_sigma_floor(mu));

        auto admissible = [&](double T) {
            const double logk = std::log(T) / (params.p - 1.0);
            auto log_g = [&](double lf) {
                const double ls = logk + lf;
                return ls + opt.beta * std::log(log_e_plus(ls));
            };
            auto g = [&](double v) { return orlicz_phi(std::exp(logk) * v, opt.beta); };
            const double s_hi = std::pow(T, w);
            if (s_hi <= s_floor) return false;
            const int count =
                static_cast<int>(std::ceil(opt.sigmas_per_decade * std::log10(s_hi / s_floor))) + 1;
            for (int k = 0; k < count; ++k) {
                const double s = s_floor * std::pow(s_hi / s_floor, static_cast<double>(k) / std::max(1, count - 1));
                const double lhs = orlicz_phi_inverse(worst_ball_average(mu, s, log_g, g), opt.beta);
                if (!(lhs <= opt.gamma * orlicz_rho(s * std::pow(T, -1.0 / (2.0 * m)), N, m))) return false;
            }
            return true;
        };
        for (auto it = Ts.rbegin(); it != Ts.rend(); ++it)
            if (admissible(*it)) return *it;
        return std::nullopt;
    }

    double default_gamma2() {
        // Calibrated once on mollified Dirac data (N=1, m=2, p=3, theta=1):
        // largest mass with observed Picard convergence on [0,1), divided by 4.
        // calibrate_gamma2_mass(PicardConfig{}) = 0.64.
        return 0.16;
    }

    ClassificationReport classify(const InitialData &mu, const ProblemParams &params, const ClassifyConfig &cfg) {
        params.validate();
        mu.validate();
        require(mu.N == params.N, ErrorCode::InvalidArgument, "data and parameters must share N");
        ClassificationReport rep;
        rep.p_vs_pm = regime_of(params);

        const char *scan_id = mu.is_atomic() ? "cor1.2" : (mu.is_radial() ? "cor1.1" : "thm1.2");
        const auto scan = necessary_exponent_scan(mu, params, dyadic_sigmas(cfg.sigma_count), cfg.scan);
        {
            CriterionCheck c;
            c.id = scan_id;
            c.verdict = scan.verdict == ScanVerdict::NonexistenceIndicated ? Verdict::Violated : Verdict::Inconclusive;
            c.quantity = scan.q.back();
            c.threshold = cfg.scan.gamma_nec;
            c.gamma = cfg.scan.gamma_nec;
            c.note = scan.reason;
            rep.checks.push_back(c);
        }

        if (rep.p_vs_pm == Regime::Subcritical) {
            const double g2 = cfg.gamma2 > 0.0 ? cfg.gamma2 : default_gamma2();
            CriterionCheck c;
            c.id = "thm1.3";
            c.gamma = g2;
            if (const auto T = subcritical_sufficiency(mu, params, g2, cfg.times)) {
                const auto sides = subcritical_sides(mu, params, g2, *T);
                c.verdict = Verdict::Satisfied;
                c.quantity = sides.mass;
                c.threshold = sides.bound;
                c.note = "T=" + std::to_string(*T);
                rep.suggested_T = T;
            } else if (mu.kind == DataKind::Dirac) {
                // The condition holds for all T <= T*, which is positive but below double range.
                c.verdict = Verdict::Satisfied;
                c.quantity = mu.atoms.front().mass;
                c.threshold = c.quantity;
                c.note = "log10 T=" + std::to_string(dirac_log_threshold(mu, params, g2) / std::log(10.0));
            } else {
                const auto sides = subcritical_sides(mu, params, g2, cfg.times.T_min);
                c.quantity = sides.mass;
                c.threshold = sides.bound;
                c.note = "no admissible T on the search grid";
            }
            rep.checks.push_back(c);
        } else if (has_pointwise_density(mu)) {
            const auto prof = supercritical_profile_check(mu, params, cfg.gamma3);
            CriterionCheck c;
            c.id = "thm1.4";
            c.verdict = prof.verdict;
            c.quantity = prof.worst_ratio;
            c.threshold = 1.0;
            c.gamma = cfg.gamma3;
            rep.checks.push_back(c);
        }

        if (has_pointwise_density(mu) && !mu.is_zero()) {
            const double alpha = cfg.alpha > 0.0 ? cfg.alpha : 0.5 * (1.0 + params.p);
            CriterionCheck c;
            c.id = "thm5.2";
            c.gamma = cfg.gamma_lalpha;
            c.threshold = cfg.gamma_lalpha;
            if (const auto T = lalpha_condition(mu, params, alpha, cfg.gamma_lalpha, cfg.times)) {
                c.verdict = Verdict::Satisfied;
                c.quantity = *T;
                c.note = "alpha=" + std::to_string(alpha) + " T=" + std::to_string(*T);
            } else {
                c.note = "alpha=" + std::to_string(alpha) + " no admissible T";
            }
            rep.checks.push_back(c);

            if (rep.p_vs_pm == Regime::Critical && (mu.kind == DataKind::Grid || mu.radially_monotone())) {
                CriterionCheck o;
                o.id = "thm5.3";
                o.gamma = cfg.orlicz.gamma;
                o.threshold = cfg.orlicz.gamma;
                if (const auto T = orlicz_condition(mu, params, cfg.orlicz, cfg.times)) {
                    o.verdict = Verdict::Satisfied;
                    o.quantity = *T;
                    o.note = "T=" + std::to_string(*T);
                } else {
                    o.note = "no admissible T";
                }
                rep.checks.push_back(o);
            }
        }

        if (scan.verdict == ScanVerdict::NonexistenceIndicated) {
            rep.summary = SummaryKind::Nonexistence;
            rep.summary_id = scan_id;
        } else {
            for (const auto &c : rep.checks)
                if (c.id != scan_id && c.verdict == Verdict::Satisfied) {
                    rep.summary = SummaryKind::Exists;
                    rep.summary_id = c.id;
                    break;
                }
        }
        return rep;
    }

    InitialData rescale_data(const InitialData &mu, const ProblemParams &params, double T) {
        require(T > 0.0, ErrorCode::InvalidArgument, "rescaling needs T > 0");
        const int N = mu.N, m = params.m;
        const double amp = std::pow(T, 1.0 / (params.p - 1.0));
        const double len = std::pow(T, -1.0 / (2.0 * m));  // x -> T^{-1/2m} x
        switch (mu.kind) {
            case DataKind::Dirac:
            case DataKind::Atoms: {
                auto atoms = mu.atoms;
                for (auto &at : atoms) {
                    at.mass *= amp * std::pow(T, -N / (2.0 * m));
                    for (int d = 0; d < N; ++d) at.x[d] *= len;
                }
                if (mu.kind == DataKind::Dirac) return InitialData::dirac(N, atoms[0].mass, atoms[0].x);
                return InitialData::atom_list(N, std::move(atoms));
            }
            case DataKind::Power:
                return InitialData::power(N, mu.c * amp * std::pow(T, -mu.a / (2.0 * m)), mu.a, mu.cutoff * len);
            case DataKind::Grid: {
                GridField g(N, mu.grid->L * len, mu.grid->n);
                g.values = mu.grid->values;
                for (double &v : g.values) v *= amp;
                return InitialData::from_grid(std::move(g));
            }
            default:
                fail(ErrorCode::InvalidArgument, "log-power data is not closed under the similarity map");
        }
    }

}  // namespace polyheat
