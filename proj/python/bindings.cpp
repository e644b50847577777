#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>

#include "polyheat/config.hpp"
#include "polyheat/criteria.hpp"
#include "polyheat/errors.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/majorant.hpp"
#include "polyheat/profile_cache.hpp"
#include "polyheat/solver.hpp"
#include "polyheat/testfn.hpp"

namespace py = pybind11;
using namespace polyheat;

namespace {

    py::array_t<double> to_array(const std::vector<double> &v) { return py::array_t<double>(v.size(), v.data()); }

    // Snapshot values reshaped to (n,) * N.
    py::array_t<double> field_array(const GridField &g) {
        std::vector<py::ssize_t> shape(g.N, g.n);
        py::array_t<double> out(shape);
        std::copy(g.values.begin(), g.values.end(), out.mutable_data());
        return out;
    }

    RunConfig config_from(const py::dict &settings) {
        RunConfig cfg;
        for (const auto &[k, v] : settings) {
            const auto key = py::str(k).cast<std::string>();
            std::string value;
            if (py::isinstance<py::bool_>(v)) value = v.cast<bool>() ? "true" : "false";
            else if (py::isinstance<py::float_>(v)) value = format_double(v.cast<double>());
            else value = py::str(v).cast<std::string>();
            cfg.set(key, value);
        }
        cfg.validate();
        return cfg;
    }

    py::dict constant_dict(const ConstantEstimate &e) {
        py::dict d;
        d["name"] = e.name;
        d["value"] = e.value;
        d["saturated"] = e.saturated;
        py::list hist;
        for (const auto &h : e.refinement_history) hist.append(py::make_tuple(h.grid_size, h.estimate));
        d["history"] = hist;
        return d;
    }

    py::dict report_dict(const SolveReport &r) {
        py::dict d;
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["norm_history"] = r.norm_history;
        d["sup_history"] = r.sup_history;
        d["iterate_norms"] = r.iterate_norms;
        d["nu"] = r.contraction.nu;
        d["D_star"] = r.contraction.D_star;
        d["delta"] = r.contraction.delta;
        d["M"] = r.contraction.M;
        d["holds_invariance"] = r.contraction.holds_invariance;
        d["holds_contraction"] = r.contraction.holds_contraction;
        d["d0"] = r.d0_used;
        d["dstar"] = r.dstar_used;
        d["residual"] = r.residual;
        d["quadrature_residual"] = r.quadrature_residual;
        d["richardson_error"] = r.richardson_error;
        d["excluded_points"] = r.excluded_points;
        py::list snaps;
        for (const auto &s : r.snapshots) {
            py::dict sd;
            sd["t"] = s.t;
            sd["L"] = s.u.L;
            sd["u"] = field_array(s.u);
            snaps.append(sd);
        }
        d["snapshots"] = snaps;
        return d;
    }

}  // namespace

PYBIND11_MODULE(_polyheat, mod) {
    mod.doc() = "Polyharmonic heat equation with power nonlinearity: kernels, criteria, Picard solver";

    // Instances carry .code (the error category) and, for solver failures, .report.
    static py::handle error_type = py::exception<Error>(mod, "PolyheatError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const SolveFailure &e) {
            py::object exc = error_type(std::string(to_string(e.code())) + ": " + e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            exc.attr("report") = report_dict(e.report());
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        } catch (const Error &e) {
            py::object exc = error_type(std::string(to_string(e.code())) + ": " + e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<RadialKernelProfile>(mod, "Profile")
        .def_property_readonly("label", [](const RadialKernelProfile &p) { return p.spec().label(); })
        .def_property_readonly("r_max", &RadialKernelProfile::r_max)
        .def_property_readonly("radii", [](const RadialKernelProfile &p) { return to_array(p.radii()); })
        .def_property_readonly("values", [](const RadialKernelProfile &p) { return to_array(p.values()); })
        .def("mass", &RadialKernelProfile::mass)
        .def("min_value", &RadialKernelProfile::min_value)
        .def("value0", &RadialKernelProfile::value0)
        .def("at_radius", &RadialKernelProfile::at_radius, py::arg("r"))
        .def("__call__", [](const RadialKernelProfile &p, double r, double t) { return eval_kernel_radial(p, r, t); },
             py::arg("r"), py::arg("t"), "G(r, t) by similarity scaling");

    mod.def(
        "kernel_profile",
        [](const std::string &kind, int N, int m, double theta, double r_max, int resolution,
           const std::string &cache_dir) {
            require(kind == "stable" || kind == "polyharmonic", ErrorCode::InvalidArgument,
                    "kind must be 'polyharmonic' or 'stable'");
            const auto spec = kind == "stable" ? KernelSpec::stable(N, theta) : KernelSpec::polyharmonic(N, m);
            const int res = resolution > 0 ? resolution : default_resolution(r_max);
            if (cache_dir.empty()) return build_profile(spec, r_max, res);
            return get_or_build_profile(cache_dir, spec, r_max, res).profile;
        },
        py::arg("kind") = "polyharmonic", py::arg("N") = 1, py::arg("m") = 2, py::arg("theta") = 1.0,
        py::arg("r_max") = 20.0, py::arg("resolution") = 0, py::arg("cache_dir") = "",
        "Radial profile of G_m (kind='polyharmonic') or G_theta (kind='stable') at t = 1.");

    mod.def("semigroup_residual", &semigroup_residual, py::arg("profile"), py::arg("t"), py::arg("s"),
            py::arg("L"), py::arg("n"), "sup |G(t) - G(t-s) * G(s)| on a periodic grid");

    mod.def(
        "majorant_constants",
        [](int N, int m, double p, double theta, const std::string &cache_dir) {
            const auto v = majorant_constants_for(ProblemParams{N, m, p, theta}, cache_dir);
            return py::make_tuple(v.d0, v.dstar);
        },
        py::arg("N"), py::arg("m"), py::arg("p"), py::arg("theta") = 1.0, py::arg("cache_dir") = "",
        "(d0, d*) for the majorizing kernel");

    mod.def("config_keys", &RunConfig::keys);
    mod.def(
        "config_hash", [](const py::dict &settings) { return config_from(settings).hash(); }, py::arg("settings"));
    mod.def(
        "normalized_config", [](const py::dict &settings) { return config_from(settings).normalized(); },
        py::arg("settings"));

    mod.def(
        "classify",
        [](const py::dict &settings) {
            const auto cfg = config_from(settings);
            const auto rep = classify(make_solver_data(cfg), cfg.params, cfg.classify);
            py::dict d;
            d["summary"] = rep.summary_line();
            d["regime"] = to_string(rep.p_vs_pm);
            d["suggested_T"] = rep.suggested_T;
            py::list checks;
            for (const auto &c : rep.checks) {
                py::dict cd;
                cd["id"] = c.id;
                cd["verdict"] = std::string(to_string(c.verdict));
                cd["quantity"] = c.quantity;
                cd["threshold"] = c.threshold;
                cd["gamma"] = c.gamma;
                cd["note"] = c.note;
                checks.append(cd);
            }
            d["checks"] = checks;
            return d;
        },
        py::arg("settings"), "Run the existence/nonexistence criteria for the configured data.");

    mod.def(
        "solve",
        [](const py::dict &settings) {
            const auto cfg = config_from(settings);
            const auto mu = make_solver_data(cfg);
            const auto pc = make_solver_config(cfg);
            SolveReport rep;
            {
                py::gil_scoped_release release;
                rep = picard_solve(mu, cfg.params, pc);
            }
            return report_dict(rep);
        },
        py::arg("settings"), "Picard solve; raises PolyheatError (with .report on numeric failure).");

    mod.def(
        "delta_sweep",
        [](const py::dict &settings) {
            const auto cfg = config_from(settings);
            std::vector<double> eps;
            for (int k = 1; k <= cfg.sweep_eps_count; ++k) eps.push_back(std::ldexp(1.0, -k));
            const auto rows = delta_sweep(cfg.params, cfg.sweep_D, eps, make_solver_config(cfg));
            py::list out;
            for (const auto &r : rows) {
                py::dict d;
                d["eps"] = r.eps;
                d["D_star"] = r.D_star;
                d["nu"] = r.nu;
                d["converged"] = r.converged;
                d["sup_half"] = r.sup_half;
                d["failure"] = r.failure;
                out.append(d);
            }
            return out;
        },
        py::arg("settings"), "D_* and solve outcome along mollified Dirac data, eps = 2^-1 .. 2^-sweep_eps_count.");

    mod.def("eta", py::vectorize(&eta), py::arg("s"));
    mod.def("eta_star", py::vectorize(&eta_star), py::arg("s"));
    mod.def("eta_derivative", &eta_derivative, py::arg("k"), py::arg("s"));
    mod.def(
        "derivative_bound_check",
        [](double p, int k_max) {
            py::list out;
            for (const auto &e : derivative_bound_check(p, k_max)) out.append(constant_dict(e));
            return out;
        },
        py::arg("p"), py::arg("k_max"));
}
