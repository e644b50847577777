#include "polyheat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "polyheat/errors.hpp"
#include "polyheat/majorant.hpp"
#include "polyheat/profile_cache.hpp"

namespace polyheat {

    namespace {

        std::string trim(const std::string &s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split(const std::string &s, char sep) {
            std::vector<std::string> out;
            std::string cur;
            std::istringstream in(s);
            while (std::getline(in, cur, sep)) out.push_back(cur);
            return out;
        }

        int parse_int(const std::string &key, const std::string &text) {
            int v = 0;
            const auto t = trim(text);
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            require(ec == std::errc() && ptr == t.data() + t.size() && !t.empty(), ErrorCode::InvalidConfig,
                    key + ": expected an integer, got '" + text + "'");
            return v;
        }

        bool parse_bool(const std::string &key, const std::string &text) {
            const auto t = trim(text);
            if (t == "true" || t == "1" || t == "yes") return true;
            if (t == "false" || t == "0" || t == "no") return false;
            fail(ErrorCode::InvalidConfig, key + ": expected true/false, got '" + text + "'");
        }

        std::array<double, 3> parse_point(const std::string &key, const std::string &text) {
            const auto parts = split(trim(text), ',');
            require(!parts.empty() && parts.size() <= 3, ErrorCode::InvalidConfig, key + ": expected x[,y[,z]]");
            std::array<double, 3> p{0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < parts.size(); ++i) p[i] = parse_double(key, parts[i]);
            return p;
        }

        std::string format_point(const std::array<double, 3> &p) {
            return format_double(p[0]) + "," + format_double(p[1]) + "," + format_double(p[2]);
        }

        std::string format_optional(const std::optional<double> &v) { return v ? format_double(*v) : "auto"; }

        std::optional<double> parse_optional(const std::string &key, const std::string &text) {
            if (trim(text) == "auto") return std::nullopt;
            return parse_double(key, text);
        }

        struct Field {
            const char *name;
            std::function<void(RunConfig &, const std::string &)> set;
            std::function<std::string(const RunConfig &)> get;
        };

#define PH_DOUBLE(NAME, MEMBER)                                                                      \
    Field {                                                                                          \
        NAME, [](RunConfig &c, const std::string &v) { c.MEMBER = parse_double(NAME, v); },         \
            [](const RunConfig &c) { return format_double(c.MEMBER); }                               \
    }
#define PH_INT(NAME, MEMBER)                                                                         \
    Field {                                                                                          \
        NAME, [](RunConfig &c, const std::string &v) { c.MEMBER = parse_int(NAME, v); },            \
            [](const RunConfig &c) { return std::to_string(c.MEMBER); }                              \
    }
#define PH_BOOL(NAME, MEMBER)                                                                        \
    Field {                                                                                          \
        NAME, [](RunConfig &c, const std::string &v) { c.MEMBER = parse_bool(NAME, v); },           \
            [](const RunConfig &c) { return std::string(c.MEMBER ? "true" : "false"); }              \
    }
#define PH_OPTIONAL(NAME, MEMBER)                                                                    \
    Field {                                                                                          \
        NAME, [](RunConfig &c, const std::string &v) { c.MEMBER = parse_optional(NAME, v); },       \
            [](const RunConfig &c) { return format_optional(c.MEMBER); }                             \
    }

        const std::vector<Field> &fields() {
            static const std::vector<Field> table = {
                PH_INT("N", params.N),
                PH_INT("m", params.m),
                PH_DOUBLE("p", params.p),
                PH_DOUBLE("theta", params.theta),
                Field{"data", [](RunConfig &c, const std::string &v) { c.data = DataSpec::parse(v); },
                      [](const RunConfig &c) { return c.data.normalized(); }},
                PH_DOUBLE("T", picard.T),
                PH_DOUBLE("L", picard.L),
                PH_INT("n", picard.n),
                PH_INT("nt", picard.n_t),
                PH_DOUBLE("tol", picard.tol),
                PH_INT("max_iter", picard.max_iter),
                Field{"weight_mode",
                      [](RunConfig &c, const std::string &v) { c.picard.weight_mode = weight_mode_from_string(trim(v)); },
                      [](const RunConfig &c) { return std::string(to_string(c.picard.weight_mode)); }},
                PH_DOUBLE("weight_alpha", picard.alpha),
                PH_DOUBLE("weight_beta", picard.beta),
                PH_DOUBLE("L_orlicz", picard.L_orlicz),
                PH_OPTIONAL("delta", picard.delta),
                PH_OPTIONAL("M", picard.M),
                PH_DOUBLE("d0", picard.d0),
                PH_DOUBLE("dstar", picard.dstar),
                PH_BOOL("force", picard.force),
                PH_BOOL("richardson", picard.richardson),
                PH_INT("snapshots", picard.snapshots),
                Field{"seed",
                      [](RunConfig &c, const std::string &v) {
                          const auto t = trim(v);
                          std::uint64_t s = 0;
                          const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
                          require(ec == std::errc() && ptr == t.data() + t.size() && !t.empty(),
                                  ErrorCode::InvalidConfig, "seed: expected an unsigned integer");
                          c.picard.seed = s;
                      },
                      [](const RunConfig &c) { return std::to_string(c.picard.seed); }},
                PH_INT("residual_samples", picard.residual_samples),
                PH_DOUBLE("gamma2", classify.gamma2),
                PH_DOUBLE("gamma3", classify.gamma3),
                PH_DOUBLE("gamma_lalpha", classify.gamma_lalpha),
                PH_DOUBLE("classify_alpha", classify.alpha),
                PH_DOUBLE("gamma_orlicz", classify.orlicz.gamma),
                PH_DOUBLE("orlicz_beta", classify.orlicz.beta),
                PH_OPTIONAL("orlicz_window_exponent", classify.orlicz.window_exponent),
                PH_DOUBLE("gamma_nec", classify.scan.gamma_nec),
                PH_DOUBLE("scan_slope_threshold", classify.scan.slope_threshold),
                PH_INT("sigma_count", classify.sigma_count),
                PH_DOUBLE("T_min", classify.times.T_min),
                PH_DOUBLE("T_max", classify.times.T_max),
                PH_DOUBLE("sweep_D", sweep_D),
                PH_INT("sweep_eps_count", sweep_eps_count),
                PH_INT("diag_R_count", diag_R_count),
                Field{"diag_x0", [](RunConfig &c, const std::string &v) { c.diag_x0 = parse_point("diag_x0", v); },
                      [](const RunConfig &c) { return format_point(c.diag_x0); }},
                Field{"cache_dir", [](RunConfig &c, const std::string &v) { c.cache_dir = c.picard.cache_dir = trim(v); },
                      [](const RunConfig &c) { return c.cache_dir; }},
                Field{"output_dir", [](RunConfig &c, const std::string &v) { c.output_dir = trim(v); },
                      [](const RunConfig &c) { return c.output_dir; }},
            };
            return table;
        }

#undef PH_DOUBLE
#undef PH_INT
#undef PH_BOOL
#undef PH_OPTIONAL

    }  // namespace

    std::string format_double(double v) {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    }

    double parse_double(const std::string &key, const std::string &text) {
        const auto t = trim(text);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        require(ec == std::errc() && ptr == t.data() + t.size() && !t.empty() && std::isfinite(v),
                ErrorCode::InvalidConfig, key + ": expected a finite number, got '" + text + "'");
        return v;
    }

    DataSpec DataSpec::parse(const std::string &text) {
        DataSpec d;
        bool have_kind = false;
        std::istringstream in(text);
        std::string tok;
        while (in >> tok) {
            const auto eq = tok.find('=');
            require(eq != std::string::npos, ErrorCode::InvalidConfig, "data: token '" + tok + "' is not key=value");
            const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "kind") {
                require(val == "zero" || val == "dirac" || val == "atoms" || val == "power" || val == "logpower" ||
                            val == "mollified",
                        ErrorCode::InvalidConfig, "data: unknown kind '" + val + "'");
                d.kind = val;
                have_kind = true;
            } else if (key == "mass") {
                d.mass = parse_double("data.mass", val);
            } else if (key == "at") {
                d.at = parse_point("data.at", val);
            } else if (key == "atoms") {
                d.atoms.clear();
                for (const auto &item : split(val, ';')) {
                    const auto colon = item.find(':');
                    require(colon != std::string::npos, ErrorCode::InvalidConfig, "data.atoms: expected x,y,z:mass");
                    d.atoms.push_back({parse_point("data.atoms", item.substr(0, colon)),
                                       parse_double("data.atoms", item.substr(colon + 1))});
                }
            } else if (key == "c") {
                d.c = parse_double("data.c", val);
            } else if (key == "a") {
                d.a = parse_double("data.a", val);
            } else if (key == "b") {
                d.b = parse_double("data.b", val);
            } else if (key == "cutoff") {
                d.cutoff = parse_double("data.cutoff", val);
            } else if (key == "eps") {
                d.eps = parse_double("data.eps", val);
            } else {
                fail(ErrorCode::InvalidConfig, "data: unknown key '" + key + "'");
            }
        }
        require(have_kind || trim(text).empty(), ErrorCode::InvalidConfig, "data: missing kind=");
        return d;
    }

    std::string DataSpec::normalized() const {
        std::string s = "kind=" + kind;
        if (kind == "dirac") s += " mass=" + format_double(mass) + " at=" + format_point(at);
        if (kind == "atoms") {
            s += " atoms=";
            for (std::size_t i = 0; i < atoms.size(); ++i)
                s += (i ? ";" : "") + format_point(atoms[i].x) + ":" + format_double(atoms[i].mass);
        }
        if (kind == "power" || kind == "logpower") s += " c=" + format_double(c) + " a=" + format_double(a);
        if (kind == "logpower") s += " b=" + format_double(b);
        if (kind == "power" || kind == "logpower") s += " cutoff=" + format_double(cutoff);
        if (kind == "mollified") s += " mass=" + format_double(mass) + " eps=" + format_double(eps);
        return s;
    }

    InitialData DataSpec::build(int N) const {
        InitialData mu;
        if (kind == "zero") mu = InitialData::zero(N);
        else if (kind == "dirac") mu = InitialData::dirac(N, mass, at);
        else if (kind == "atoms") mu = InitialData::atom_list(N, atoms);
        else if (kind == "power") mu = InitialData::power(N, c, a, cutoff);
        else if (kind == "logpower") mu = InitialData::logpower(N, c, a, b, cutoff);
        else fail(ErrorCode::PointwiseUnavailable, "mollified data exists only on a solver grid");
        mu.validate();
        return mu;
    }

    void RunConfig::set(const std::string &key, const std::string &value) {
        const auto k = trim(key);
        for (const auto &f : fields())
            if (k == f.name) {
                f.set(*this, value);
                return;
            }
        fail(ErrorCode::InvalidConfig, "unknown config key '" + k + "'");
    }

    std::vector<std::string> RunConfig::keys() {
        std::vector<std::string> out;
        for (const auto &f : fields()) out.emplace_back(f.name);
        return out;
    }

    std::string RunConfig::normalized() const {
        std::string s;
        for (const auto &f : fields()) s += std::string(f.name) + " = " + f.get(*this) + "\n";
        return s;
    }

    std::string RunConfig::hash() const {
        std::string s;
        for (const auto &f : fields()) {
            const std::string name = f.name;
            if (name == "cache_dir" || name == "output_dir") continue;
            s += name + " = " + f.get(*this) + "\n";
        }
        return hex64(fnv1a(s));
    }

    void RunConfig::validate() const {
        params.validate();
        picard.validate(params);
        if (data.kind == "mollified")
            require(data.mass >= 0.0 && data.eps > 0.0, ErrorCode::InvalidConfig, "mollified data needs mass >= 0, eps > 0");
        else
            (void)data.build(params.N);
        for (int d = params.N; d < 3; ++d) {
            require(data.at[d] == 0.0, ErrorCode::InvalidConfig, "data.at coordinates beyond N must be 0");
            for (const auto &atom : data.atoms)
                require(atom.x[d] == 0.0, ErrorCode::InvalidConfig, "atom coordinates beyond N must be 0");
        }
        auto need = [](bool ok, const std::string &msg) { require(ok, ErrorCode::InvalidConfig, msg); };
        need(classify.gamma2 >= 0.0, "gamma2 must be >= 0 (0 = calibrated default)");
        need(classify.gamma3 > 0.0 && classify.gamma_lalpha > 0.0 && classify.orlicz.gamma > 0.0,
             "gamma3, gamma_lalpha and gamma_orlicz must be > 0");
        need(classify.alpha == 0.0 || (classify.alpha > 1.0 && classify.alpha < params.p),
             "classify_alpha must be 0 (auto) or in (1, p)");
        need(classify.orlicz.beta > 0.0, "orlicz_beta must be > 0");
        if (classify.orlicz.window_exponent)
            need(*classify.orlicz.window_exponent > 0.0, "orlicz_window_exponent must be > 0");
        need(classify.scan.gamma_nec > 0.0, "gamma_nec must be > 0");
        need(classify.sigma_count >= 4, "sigma_count must be >= 4");
        need(classify.times.T_min > 0.0 && classify.times.T_max > classify.times.T_min, "need 0 < T_min < T_max");
        need(sweep_D >= 0.0, "sweep_D must be >= 0");
        need(sweep_eps_count >= 1 && sweep_eps_count <= 30, "sweep_eps_count must be in 1..30");
        need(diag_R_count >= 1 && diag_R_count <= 30, "diag_R_count must be in 1..30");
        need(!output_dir.empty(), "output_dir must not be empty");
        need(cache_dir == picard.cache_dir, "cache_dir mismatch");
    }

    RunConfig parse_config(const std::string &text) {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            require(eq != std::string::npos, ErrorCode::InvalidConfig,
                    "line " + std::to_string(lineno) + ": expected key = value");
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        }
        cfg.validate();
        return cfg;
    }

    RunConfig load_config(const std::string &path) {
        std::ifstream in(path);
        require(static_cast<bool>(in), ErrorCode::IoError, "cannot read config '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    InitialData make_solver_data(const RunConfig &cfg, std::optional<bool> *gtheta_hit) {
        if (cfg.data.kind != "mollified") return cfg.data.build(cfg.params.N);
        const auto got = get_or_build_profile(cfg.cache_dir, KernelSpec::stable(cfg.params.N, cfg.params.theta),
                                              kMajorantGthetaRadius, default_resolution(kMajorantGthetaRadius));
        if (gtheta_hit) *gtheta_hit = got.hit;
        return mollified_dirac(cfg.params, cfg.data.mass, cfg.data.eps, cfg.picard.L, cfg.picard.n, got.profile);
    }

    PicardConfig make_solver_config(const RunConfig &cfg, int *cache_hits) {
        PicardConfig pc = cfg.picard;
        if (pc.d0 > 0.0 && pc.dstar > 0.0) return pc;
        const auto spec = make_majorant_spec(cfg.params, cfg.cache_dir, cache_hits);
        if (pc.d0 <= 0.0) pc.d0 = estimate_d_j(spec, 0, default_envelope_grids(cfg.params.N)).value;
        if (pc.dstar <= 0.0) pc.dstar = d_star_reduction(spec, default_d_star_plan(cfg.params.N).samples());
        return pc;
    }

}  // namespace polyheat
