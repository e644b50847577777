#include "polyheat/operators.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>

#include "polyheat/errors.hpp"

namespace polyheat {

    Propagator::Propagator(int N, double L, int n, int m, double theta)
        : grid_(N, L, n), m_(m), theta_(theta), work_(grid_.spectral_size()) {
        require(m >= 1, ErrorCode::InvalidArgument, "order m must be >= 1");
        require(theta > 0.0 && theta < 2.0, ErrorCode::InvalidArgument, "theta must lie in (0,2)");
        abs_xi_.resize(grid_.spectral_size());
        for (std::size_t k = 0; k < abs_xi_.size(); ++k) abs_xi_[k] = std::sqrt(grid_.xi_squared()[k]);
    }

    void Propagator::apply_symbol(std::vector<double> &values, double tau, double q) const {
        require(values.size() == grid_.real_size(), ErrorCode::InvalidArgument, "field size does not match grid");
        grid_.forward(values, work_);
        for (std::size_t k = 0; k < work_.size(); ++k) work_[k] *= std::exp(-tau * std::pow(abs_xi_[k], q));
        grid_.inverse(work_, values);
    }

    void Propagator::apply_Sm_inplace(std::vector<double> &values, double dt) const {
        require(dt >= 0.0, ErrorCode::InvalidArgument, "S_m needs dt >= 0");
        if (dt == 0.0) return;
        apply_symbol(values, dt, 2.0 * m_);
    }

    GridField Propagator::apply_Sm(const GridField &f, double dt) const {
        GridField out = f;
        apply_Sm_inplace(out.values, dt);
        if (out.time) *out.time += dt;
        return out;
    }

    GridField Propagator::apply_SK(const GridField &f, double t) const {
        require(t > 0.0, ErrorCode::NonPositiveTime, "S_K(t) needs t > 0");
        GridField out = f;
        apply_symbol(out.values, std::pow(t, theta_ / (2.0 * m_)), theta_);
        out.time = t;
        return out;
    }

    GridField apply_Sm(const GridField &f, int m, double dt) {
        Propagator prop(f.N, f.L, f.n, m, 1.0);
        return prop.apply_Sm(f, dt);
    }

    GridField apply_SK(const GridField &f, const ProblemParams &params, double t) {
        Propagator prop(f.N, f.L, f.n, params.m, params.theta);
        return prop.apply_SK(f, t);
    }

    namespace {

        double K_at(const RadialKernelProfile &gtheta, const ProblemParams &params, double r, double t) {
            return eval_kernel_radial(gtheta, r, std::pow(t, params.theta / (2.0 * params.m)));
        }

        double atom_sum(const InitialData &mu, const RadialKernelProfile &gtheta, const ProblemParams &params,
                        const std::array<double, 3> &x, double t) {
            double s = 0.0;
            for (const auto &at : mu.atoms) {
                double r2 = 0.0;
                for (int d = 0; d < mu.N; ++d) r2 += (x[d] - at.x[d]) * (x[d] - at.x[d]);
                s += at.mass * K_at(gtheta, params, std::sqrt(r2), t);
            }
            return s;
        }

    }  // namespace

    GridField apply_SK_measure(const InitialData &mu, const RadialKernelProfile &gtheta, const ProblemParams &params,
                               double t, double L, int n) {
        require(t > 0.0, ErrorCode::NonPositiveTime, "S_K(t) needs t > 0");
        require(gtheta.spec().kind == KernelKind::Stable && gtheta.spec().N == mu.N, ErrorCode::InvalidArgument,
                "S_K needs a stable profile of matching dimension");
        if (mu.is_atomic()) {
            GridField out(mu.N, L, n);
            for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = atom_sum(mu, gtheta, params, out.point(k), t);
            out.time = t;
            return out;
        }
        Propagator prop(mu.N, L, n, params.m, params.theta);
        return prop.apply_SK(sample_density(mu, L, n), t);
    }

    double sup_SK_measure(const InitialData &mu, const RadialKernelProfile &gtheta, const ProblemParams &params,
                          double t, double L, int n) {
        require(t > 0.0, ErrorCode::NonPositiveTime, "S_K(t) needs t > 0");
        if (mu.is_zero()) return 0.0;
        if (mu.kind == DataKind::Dirac) return mu.atoms.front().mass * K_at(gtheta, params, 0.0, t);
        if (mu.is_radial() && mu.radially_monotone()) {
            // Convolution of two radially nonincreasing functions peaks at 0.
            require(!mu.non_sigma_finite(), ErrorCode::NonSigmaFinite, "profile is not locally integrable at 0");
            const double R = mu.cutoff;
            auto integrand = [&](double w) {
                const double r = R * std::exp(-w);
                if (r == 0.0) return 0.0;
                return mu.radial_density(r) * K_at(gtheta, params, r, t) * std::pow(r, mu.N);
            };
            boost::math::quadrature::exp_sinh<double> integrator;
            return unit_sphere_area(mu.N) * integrator.integrate(integrand, 1e-12);
        }
        const auto field = apply_SK_measure(mu, gtheta, params, t, L, n);
        double best = 0.0;
        for (double v : field.values) best = std::max(best, v);
        if (mu.is_atomic())
            for (const auto &at : mu.atoms) best = std::max(best, atom_sum(mu, gtheta, params, at.x, t));
        return best;
    }

}  // namespace polyheat
