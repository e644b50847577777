#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polyheat/config.hpp"
#include "polyheat/criteria.hpp"
#include "polyheat/errors.hpp"
#include "polyheat/majorant.hpp"
#include "polyheat/profile_cache.hpp"
#include "polyheat/solver.hpp"
#include "polyheat/testfn.hpp"

namespace fs = std::filesystem;
using namespace polyheat;

namespace {

    constexpr int kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitNoContraction = 4;

    int exit_code_for(ErrorCode code) {
        switch (code) {
            case ErrorCode::InvalidArgument:
            case ErrorCode::InvalidConfig:
            case ErrorCode::UnsupportedDimension:
            case ErrorCode::NonPositiveTime:
            case ErrorCode::NonSigmaFinite:
            case ErrorCode::WrongRegime:
            case ErrorCode::PointwiseUnavailable:
            case ErrorCode::AlphaOutOfRange:
            case ErrorCode::SupportMismatch:
            case ErrorCode::OutOfBox:
            case ErrorCode::IoError: return kExitConfig;
            case ErrorCode::NoContraction: return kExitNoContraction;
            default: return kExitNumeric;
        }
    }

    std::string fmt(double v) { return format_double(v); }

    /// CSV with a config-hash comment row followed by the column header.
    class Csv {
    public:
        Csv(const fs::path &path, const std::string &hash, const std::vector<std::string> &columns) : out_(path) {
            require(static_cast<bool>(out_), ErrorCode::IoError, "cannot write " + path.string());
            out_ << "# config_hash=" << hash << "\n";
            row(columns);
        }
        void row(const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
            out_ << "\n";
        }

    private:
        std::ofstream out_;
    };

    /// Options shared by the config-driven subcommands.
    struct CommonArgs {
        std::string config_path;
        std::vector<std::string> sets;
        std::string out;
        std::map<std::string, std::string> flags;  // config key -> value from dedicated flags
    };

    void add_common(CLI::App *app, CommonArgs &args, bool solver_flags) {
        app->add_option("--config", args.config_path, "key = value config file");
        app->add_option("--set", args.sets, "override, key=value (repeatable)");
        app->add_option("--out", args.out, "output directory (config key output_dir)");
        const std::vector<std::pair<std::string, std::string>> basic = {
            {"--N", "N"}, {"--m", "m"}, {"--p", "p"}, {"--theta", "theta"}, {"--data", "data"}, {"--seed", "seed"}};
        const std::vector<std::pair<std::string, std::string>> solver = {{"--T", "T"},     {"--L", "L"},
                                                                         {"--n", "n"},     {"--nt", "nt"},
                                                                         {"--tol", "tol"}, {"--weight-mode", "weight_mode"}};
        auto bind = [&](const std::string &flag, const std::string &key) {
            app->add_option_function<std::string>(flag, [&args, key](const std::string &v) { args.flags[key] = v; },
                                                  "config key " + key);
        };
        for (const auto &[flag, key] : basic) bind(flag, key);
        if (solver_flags)
            for (const auto &[flag, key] : solver) bind(flag, key);
        app->add_flag_function(
            "--force", [&args](std::int64_t) { args.flags["force"] = "true"; }, "iterate even without contraction");
    }

    RunConfig resolve(const CommonArgs &args) {
        RunConfig cfg;
        if (!args.config_path.empty()) cfg = load_config(args.config_path);
        for (const auto &kv : args.sets) {
            const auto eq = kv.find('=');
            require(eq != std::string::npos, ErrorCode::InvalidConfig, "--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto &[k, v] : args.flags) cfg.set(k, v);
        if (!args.out.empty()) cfg.set("output_dir", args.out);
        if (const char *env = std::getenv("POLYHEAT_CACHE")) cfg.set("cache_dir", env);
        cfg.validate();
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        require(!ec, ErrorCode::IoError, "cannot create output directory " + cfg.output_dir);
        return cfg;
    }

    void log_cache(bool hit) { std::cerr << "cache: " << (hit ? "hit" : "miss") << "\n"; }

    RadialKernelProfile gtheta_profile(const RunConfig &cfg) {
        const auto got = get_or_build_profile(cfg.cache_dir, KernelSpec::stable(cfg.params.N, cfg.params.theta),
                                              kMajorantGthetaRadius, default_resolution(kMajorantGthetaRadius));
        if (!cfg.cache_dir.empty()) log_cache(got.hit);
        return got.profile;
    }

    InitialData solver_data(const RunConfig &cfg) {
        std::optional<bool> hit;
        auto mu = make_solver_data(cfg, &hit);
        if (hit && !cfg.cache_dir.empty()) log_cache(*hit);
        return mu;
    }

    PicardConfig with_constants(const RunConfig &cfg) {
        int hits = -1;
        auto pc = make_solver_config(cfg, &hits);
        if (hits >= 0 && !cfg.cache_dir.empty()) log_cache(hits == 2);
        return pc;
    }

    // ---- kernel -------------------------------------------------------------

    struct KernelArgs {
        std::string kind = "polyharmonic";
        int N = 1, m = 2;
        double theta = 1.0, r_max = 20.0;
        int resolution = 0;
        std::string out = ".";
        std::string cache;
    };

    int cmd_kernel(const KernelArgs &a) {
        require(a.kind == "polyharmonic" || a.kind == "stable", ErrorCode::InvalidConfig,
                "--kind must be polyharmonic or stable");
        const KernelSpec spec = a.kind == "polyharmonic" ? KernelSpec::polyharmonic(a.N, a.m) : KernelSpec::stable(a.N, a.theta);
        spec.validate();
        require(a.r_max > 0.0, ErrorCode::InvalidConfig, "--r-max must be > 0");
        const int res = a.resolution > 0 ? a.resolution : default_resolution(a.r_max);
        std::string cache = a.cache;
        if (const char *env = std::getenv("POLYHEAT_CACHE")) cache = env;
        const auto got = get_or_build_profile(cache, spec, a.r_max, res);
        if (!cache.empty()) log_cache(got.hit);
        const auto &prof = got.profile;

        fs::create_directories(a.out);
        const std::string ident = spec.label() + " r_max=" + fmt(a.r_max) + " resolution=" + std::to_string(res);
        const std::string hash = hex64(fnv1a(ident));
        const fs::path base = fs::path(a.out) / ("kernel_" + spec.label());
        Csv csv(base.string() + ".csv", hash, {"r", "value"});
        for (std::size_t i = 0; i < prof.radii().size(); ++i) csv.row({fmt(prof.radii()[i]), fmt(prof.values()[i])});
        std::ofstream side(base.string() + ".properties");
        require(static_cast<bool>(side), ErrorCode::IoError, "cannot write properties sidecar");
        side << "# config_hash=" << hash << "\n"
             << "kernel = " << spec.label() << "\n"
             << "r_max = " << fmt(a.r_max) << "\n"
             << "resolution = " << res << "\n"
             << "mass = " << fmt(prof.mass()) << "\n"
             << "min_value = " << fmt(prof.min_value()) << "\n"
             << "value0 = " << fmt(prof.value0()) << "\n";
        std::cout << "mass " << fmt(prof.mass()) << " min_value " << fmt(prof.min_value()) << " value0 "
                  << fmt(prof.value0()) << "\n";
        return kExitOk;
    }

    // ---- verify-majorant ----------------------------------------------------

    int cmd_verify_majorant(const CommonArgs &args) {
        const auto cfg = resolve(args);
        int hits = 0;
        const auto spec = make_majorant_spec(cfg.params, cfg.cache_dir, &hits);
        if (!cfg.cache_dir.empty()) log_cache(hits == 2);

        const auto d0 = estimate_d_j(spec, 0, default_envelope_grids(cfg.params.N));
        // d'' on the configured data; zero or grid-only data falls back to the indicator of B(0, 1).
        const bool own = cfg.data.kind != "zero" && cfg.data.kind != "mollified";
        const auto mu = own ? cfg.data.build(cfg.params.N) : InitialData::power(cfg.params.N, 1.0, 0.0, 1.0);
        std::vector<double> times;
        for (int k = 12; k >= 0; --k) times.push_back(std::pow(10.0, -0.5 * k));
        const auto d2 = smoothing_bound_check(spec, mu, times, cfg.picard.L, cfg.picard.n);
        const auto plan = default_d_star_plan(cfg.params.N);
        const auto ds = estimate_d_star(spec, plan.samples(), plan.grids);

        Csv csv(fs::path(cfg.output_dir) / "majorant.csv", cfg.hash(),
                {"constant_name", "estimate", "grid_size", "saturated"});
        auto emit = [&](const std::string &name, const ConstantEstimate &e) {
            for (const auto &h : e.refinement_history)
                csv.row({name, fmt(h.estimate), std::to_string(h.grid_size), e.saturated ? "true" : "false"});
            std::cout << name << " " << fmt(e.value) << " saturated=" << (e.saturated ? "true" : "false") << "\n";
        };
        emit("d0", d0);
        emit("d_smoothing", d2);
        emit("d_star", ds.estimate);
        std::cout << "d0_tail_radius " << fmt(d0.tail_radius) << "\n"
                  << "d_star_exact_ratio " << fmt(ds.exact_ratio_max) << "\n"
                  << "d_star_mismatch " << fmt(ds.max_mismatch) << "\n"
                  << "omega_sandwich " << (ds.sandwich_ok ? "ok" : "violated") << " (" << ds.sandwich_checked
                  << " samples)\n";
        return kExitOk;
    }

    // ---- classify -----------------------------------------------------------

    int cmd_classify(const CommonArgs &args) {
        const auto cfg = resolve(args);
        const auto mu = cfg.data.build(cfg.params.N);
        const auto rep = classify(mu, cfg.params, cfg.classify);
        Csv csv(fs::path(cfg.output_dir) / "classify.csv", cfg.hash(),
                {"criterion", "verdict", "quantity", "threshold", "gamma", "note"});
        for (const auto &c : rep.checks) {
            std::string note = c.note;
            for (char &ch : note)
                if (ch == ',') ch = ';';
            csv.row({c.id, std::string(to_string(c.verdict)), fmt(c.quantity), fmt(c.threshold), fmt(c.gamma), note});
        }
        std::cout << "regime " << to_string(rep.p_vs_pm) << "\n";
        if (rep.suggested_T) std::cout << "suggested_T " << fmt(*rep.suggested_T) << "\n";
        std::cout << rep.summary_line() << "\n";
        return kExitOk;
    }

    // ---- solve --------------------------------------------------------------

    void write_solve_outputs(const RunConfig &cfg, const SolveReport &rep) {
        const fs::path dir = cfg.output_dir;
        {
            Csv csv(dir / "solve_history.csv", cfg.hash(), {"iteration", "weighted_increment", "sup_increment", "iterate_norm"});
            for (std::size_t k = 0; k < rep.norm_history.size(); ++k)
                csv.row({std::to_string(k + 1), fmt(rep.norm_history[k]), fmt(rep.sup_history[k]),
                         fmt(k < rep.iterate_norms.size() ? rep.iterate_norms[k] : 0.0)});
        }
        {
            Csv csv(dir / "solve_summary.csv", cfg.hash(), {"key", "value"});
            const auto &c = rep.contraction;
            const std::vector<std::pair<std::string, std::string>> rows = {
                {"converged", rep.converged ? "true" : "false"},
                {"iterations", std::to_string(rep.iterations)},
                {"contraction_estimate", fmt(rep.contraction_estimate)},
                {"D_star", fmt(c.D_star)},
                {"nu", fmt(c.nu)},
                {"delta", fmt(c.delta)},
                {"M", fmt(c.M)},
                {"holds_invariance", c.holds_invariance ? "true" : "false"},
                {"holds_contraction", c.holds_contraction ? "true" : "false"},
                {"d0_used", fmt(rep.d0_used)},
                {"dstar_used", fmt(rep.dstar_used)},
                {"u0_norm", fmt(rep.u0_norm)},
                {"excluded_points", std::to_string(rep.excluded_points)},
                {"residual", fmt(rep.residual)},
                {"quadrature_residual", fmt(rep.quadrature_residual)},
                {"richardson_error", rep.richardson_error ? fmt(*rep.richardson_error) : "none"},
                {"n_t_used", std::to_string(rep.n_t_used)},
            };
            for (const auto &[k, v] : rows) csv.row({k, v});
        }
        if (!rep.snapshots.empty()) {
            const int N = cfg.params.N;
            std::vector<std::string> cols{"t"};
            for (int d = 1; d <= N; ++d) cols.push_back("x" + std::to_string(d));
            cols.emplace_back("u");
            Csv csv(dir / "solve_snapshots.csv", cfg.hash(), cols);
            for (const auto &s : rep.snapshots)
                for (std::size_t k = 0; k < s.u.size(); ++k) {
                    const auto x = s.u.point(k);
                    std::vector<std::string> row{fmt(s.t)};
                    for (int d = 0; d < N; ++d) row.push_back(fmt(x[d]));
                    row.push_back(fmt(s.u.values[k]));
                    csv.row(row);
                }
        }
    }

    int cmd_solve(const CommonArgs &args) {
        const auto cfg = resolve(args);
        const auto mu = solver_data(cfg);
        const auto pc = with_constants(cfg);
        try {
            const auto rep = picard_solve(mu, cfg.params, pc);
            write_solve_outputs(cfg, rep);
            std::cout << "converged " << (rep.converged ? "true" : "false") << " iterations " << rep.iterations
                      << " nu " << fmt(rep.contraction.nu) << "\n";
            return rep.converged ? kExitOk : kExitNumeric;
        } catch (const SolveFailure &f) {
            write_solve_outputs(cfg, f.report());
            std::cerr << "error: " << to_string(f.code()) << ": " << f.what() << "\n";
            return exit_code_for(f.code());
        }
    }

    // ---- delta-sweep --------------------------------------------------------

    int cmd_delta_sweep(const CommonArgs &args) {
        const auto cfg = resolve(args);
        std::vector<double> eps;
        for (int k = 1; k <= cfg.sweep_eps_count; ++k) eps.push_back(std::ldexp(1.0, -k));
        (void)gtheta_profile(cfg);
        const auto rows = delta_sweep(cfg.params, cfg.sweep_D, eps, with_constants(cfg));
        Csv csv(fs::path(cfg.output_dir) / "delta_sweep.csv", cfg.hash(),
                {"eps", "D_star", "nu", "converged", "sup_half", "failure"});
        for (const auto &r : rows)
            csv.row({fmt(r.eps), fmt(r.D_star), fmt(r.nu), r.converged ? "true" : "false", fmt(r.sup_half),
                     r.failure.empty() ? "none" : r.failure});
        for (std::size_t k = 1; k < rows.size(); ++k)
            std::cout << "eps " << fmt(rows[k].eps) << " D_star_ratio " << fmt(rows[k].D_star / rows[k - 1].D_star) << "\n";
        return kExitOk;
    }

    // ---- diagnose -----------------------------------------------------------

    std::vector<Snapshot> read_snapshots(const std::string &path, const RunConfig &cfg) {
        std::ifstream in(path);
        require(static_cast<bool>(in), ErrorCode::IoError, "cannot read snapshots '" + path + "'");
        const int N = cfg.params.N;
        std::vector<Snapshot> out;
        std::string line;
        bool header = false;
        std::size_t k = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!header) {
                header = true;
                continue;
            }
            std::istringstream row(line);
            std::string cell;
            std::vector<double> vals;
            while (std::getline(row, cell, ',')) vals.push_back(parse_double("snapshot", cell));
            require(static_cast<int>(vals.size()) == N + 2, ErrorCode::IoError, "snapshot row has the wrong width");
            if (out.empty() || vals[0] != out.back().t) {
                require(out.empty() || k == out.back().u.size(), ErrorCode::IoError, "incomplete snapshot block");
                GridField g(N, cfg.picard.L, cfg.picard.n);
                g.time = vals[0];
                out.push_back({vals[0], std::move(g)});
                k = 0;
            }
            auto &g = out.back().u;
            require(k < g.size(), ErrorCode::IoError, "snapshot block larger than the configured grid");
            const auto x = g.point(k);
            for (int d = 0; d < N; ++d)
                require(std::abs(x[d] - vals[1 + d]) <= 1e-9 * (1.0 + std::abs(x[d])), ErrorCode::IoError,
                        "snapshot coordinates do not match the configured grid");
            g.values[k++] = vals[N + 1];
        }
        require(!out.empty() && k == out.back().u.size(), ErrorCode::IoError, "incomplete snapshot file");
        return out;
    }

    int cmd_diagnose(const CommonArgs &args, const std::string &snapshots_path) {
        const auto cfg = resolve(args);
        const std::string path =
            snapshots_path.empty() ? (fs::path(cfg.output_dir) / "solve_snapshots.csv").string() : snapshots_path;
        const auto snaps = read_snapshots(path, cfg);
        const auto mu = solver_data(cfg);
        std::vector<double> Rs;
        for (int k = 1; k <= cfg.diag_R_count; ++k) Rs.push_back(std::ldexp(1.0, -k));
        const auto tab = nonexistence_diagnostic(snaps, mu, cfg.params, cfg.diag_x0, Rs);
        Csv csv(fs::path(cfg.output_dir) / "diagnose.csv", cfg.hash(), {"R", "m_R", "LHS", "RHS", "ratio"});
        for (const auto &r : tab.rows) csv.row({fmt(r.R), fmt(r.m_R), fmt(r.lhs), fmt(r.rhs), fmt(r.ratio)});
        std::cout << "slope " << fmt(tab.slope) << " diverging " << (tab.diverging ? "true" : "false") << "\n";
        return kExitOk;
    }

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"polyheat: polyharmonic heat kernels, majorant constants and Picard solves"};
    app.require_subcommand(1);

    KernelArgs kargs;
    auto *kernel = app.add_subcommand("kernel", "build or load a radial kernel profile");
    kernel->add_option("--kind", kargs.kind, "polyharmonic or stable");
    kernel->add_option("--N", kargs.N);
    kernel->add_option("--m", kargs.m);
    kernel->add_option("--theta", kargs.theta);
    kernel->add_option("--r-max", kargs.r_max);
    kernel->add_option("--resolution", kargs.resolution, "geometric radial nodes (0 = default)");
    kernel->add_option("--out", kargs.out);
    kernel->add_option("--cache", kargs.cache, "profile cache directory");

    CommonArgs majorant_args, classify_args, solve_args, sweep_args, diag_args;
    auto *majorant = app.add_subcommand("verify-majorant", "estimate d0, d'' and d_*");
    add_common(majorant, majorant_args, true);
    auto *cls = app.add_subcommand("classify", "check the data against the existence thresholds");
    add_common(cls, classify_args, false);
    auto *solve = app.add_subcommand("solve", "Picard iteration for the mild solution");
    add_common(solve, solve_args, true);
    auto *sweep = app.add_subcommand("delta-sweep", "D_* along mollified Dirac data");
    add_common(sweep, sweep_args, true);
    auto *diag = app.add_subcommand("diagnose", "weighted-integral test on solver snapshots");
    add_common(diag, diag_args, true);
    std::string snapshots_path;
    diag->add_option("--snapshots", snapshots_path, "snapshot CSV (default <out>/solve_snapshots.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: InvalidConfig: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (*kernel) return cmd_kernel(kargs);
        if (*majorant) return cmd_verify_majorant(majorant_args);
        if (*cls) return cmd_classify(classify_args);
        if (*solve) return cmd_solve(solve_args);
        if (*sweep) return cmd_delta_sweep(sweep_args);
        if (*diag) return cmd_diagnose(diag_args, snapshots_path);
    } catch (const Error &e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
