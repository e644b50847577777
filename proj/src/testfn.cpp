#include "polyheat/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyheat/errors.hpp"

namespace polyheat {

    double log_eta(double s) {
        if (s <= 1.0) return 0.0;
        if (s >= 2.0) return -std::numeric_limits<double>::infinity();
        // eta = 1 / (1 + exp(z)), z = 1/(2 - s) - 1/(s - 1)
        const double z = 1.0 / (2.0 - s) - 1.0 / (s - 1.0);
        return z > 0.0 ? -z - std::log1p(std::exp(-z)) : -std::log1p(std::exp(z));
    }

    double eta(double s) {
        require(s >= 0.0, ErrorCode::InvalidArgument, "eta needs s >= 0");
        return std::exp(log_eta(s));
    }

    double eta_star(double s) {
        require(s >= 0.0, ErrorCode::InvalidArgument, "eta_star needs s >= 0");
        return s < 1.0 ? 0.0 : eta(s);
    }

    std::vector<double> fd_weights(int k, const std::vector<double> &z) {
        const int n = static_cast<int>(z.size());
        require(k >= 0 && k < n, ErrorCode::InvalidArgument, "stencil too short for the derivative order");
        // c[i][j]: weight of node i for derivative j.
        std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
        double c1 = 1.0, c4 = z[0];
        c[0][0] = 1.0;
        for (int i = 1; i < n; ++i) {
            const int mn = std::min(i, k);
            double c2 = 1.0;
            const double c5 = c4;
            c4 = z[i];
            for (int j = 0; j < i; ++j) {
                const double c3 = z[i] - z[j];
                c2 *= c3;
                if (j == i - 1) {
                    for (int d = mn; d >= 1; --d) c[i][d] = c1 * (d * c[i - 1][d - 1] - c5 * c[i - 1][d]) / c2;
                    c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
                }
                for (int d = mn; d >= 1; --d) c[j][d] = (c4 * c[j][d] - d * c[j][d - 1]) / c3;
                c[j][0] = c4 * c[j][0] / c3;
            }
            c1 = c2;
        }
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = c[i][k];
        return w;
    }

    double eta_derivative(int k, double s) {
        require(k >= 1 && k <= 4, ErrorCode::InvalidArgument, "derivative order must be in 1..4");
        const int r = 3 + (k - 1) / 2;
        std::vector<double> offsets;
        for (int i = -r; i <= r; ++i) offsets.push_back(i);
        const auto w = fd_weights(k, offsets);
        if (s <= 1.0 || s >= 2.0) return 0.0;
        // eta(3 - s) = 1 - eta(s): differentiate where eta is small so values keep relative precision.
        if (s < 1.5) return (k % 2 == 0 ? -1.0 : 1.0) * eta_derivative(k, 3.0 - s);
        // eta varies on the scale (2 - s)^2 near the edge.
        const double h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (k + 6)) *
                         std::min(1.0, 4.0 * (2.0 - s) * (2.0 - s));
        double acc = 0.0;
        for (int i = 0; i <= 2 * r; ++i) acc += w[i] * std::exp(log_eta(std::max(0.0, s + offsets[i] * h)));
        return acc / std::pow(h, k);
    }

    void CutoffSpec::validate() const {
        params.validate();
        require(R > 0.0 && R <= 1.0, ErrorCode::InvalidArgument, "cutoff scale R must lie in (0, 1]");
    }

    double CutoffSpec::argument(std::span<const double> x, double t) const {
        double r2 = 0.0;
        for (int d = 0; d < params.N; ++d) r2 += (x[d] - x0[d]) * (x[d] - x0[d]);
        return 3.0 * (std::pow(r2, params.m) + t) / R;
    }

    double CutoffSpec::support_radius() const { return std::pow(2.0 * R / 3.0, 1.0 / (2.0 * params.m)); }

    std::vector<ConstantEstimate> derivative_bound_check(double p, int k_max, const std::vector<int> &grid_sizes) {
        require(p > 1.0, ErrorCode::InvalidArgument, "p must exceed 1");
        require(k_max >= 1 && k_max <= 4, ErrorCode::InvalidArgument, "k_max must be in 1..4");
        const std::vector<int> sizes = grid_sizes.empty() ? std::vector<int>{1000, 2000, 4000, 8000} : grid_sizes;
        require(sizes.size() >= 2, ErrorCode::InvalidArgument, "need at least two grid sizes");
        std::vector<ConstantEstimate> out;
        for (int k = 1; k <= k_max; ++k) {
            ConstantEstimate est;
            est.name = "eta_derivative_" + std::to_string(k);
            for (int n : sizes) {
                double best = 0.0;
                for (int i = 0; i <= n; ++i) {
                    const double s = 1.0 + static_cast<double>(i) / n;
                    const double num = std::abs(eta_derivative(k, s));
                    if (num == 0.0) continue;  // also covers eta_star = 0 at s = 2
                    best = std::max(best, num * std::exp(-log_eta(s) / p));
                }
                est.push(n, best, 1e-3);
            }
            if (!est.saturated || !std::isfinite(est.value))
                fail(ErrorCode::EstimateDiverging, est.name + " does not saturate under refinement");
            out.push_back(std::move(est));
        }
        return out;
    }

    namespace {

        // int_0^{t_end} int |u|^p w(x, t) dx dt with u linear in time between snapshots.
        double weighted_integral(const std::vector<Snapshot> &u, const CutoffSpec &spec, bool star, double t_end) {
            const auto &g0 = u.front().u;
            const int N = g0.N;
            const double p = spec.params.p;
            const int nq = 64;  // midpoint nodes per snapshot interval
            double total = 0.0;
            for (std::size_t j = 0; j + 1 < u.size(); ++j) {
                const double ta = u[j].t, tb = std::min(u[j + 1].t, t_end);
                if (tb <= ta) break;
                const double full = u[j + 1].t - u[j].t;
                const double h = (tb - ta) / nq;
                for (int q = 0; q < nq; ++q) {
                    const double t = ta + (q + 0.5) * h;
                    const double lam = (t - u[j].t) / full;
                    double sx = 0.0;
                    for (std::size_t k = 0; k < g0.size(); ++k) {
                        const auto x = g0.point(k);
                        const std::span<const double> xs(x.data(), N);
                        const double w = star ? spec.psi_star(xs, t) : spec.psi(xs, t);
                        if (w == 0.0) continue;
                        const double v = (1.0 - lam) * u[j].u.values[k] + lam * u[j + 1].u.values[k];
                        sx += std::pow(std::abs(v), p) * w;
                    }
                    total += sx * g0.cell_volume() * h;
                }
            }
            return total;
        }

    }  // namespace

    DiagnosticTable nonexistence_diagnostic(const std::vector<Snapshot> &u, const InitialData &mu,
                                            const ProblemParams &params, std::array<double, 3> x0,
                                            const std::vector<double> &R_list) {
        params.validate();
        require(u.size() >= 2, ErrorCode::InvalidArgument, "need at least two snapshots");
        require(u.front().t == 0.0, ErrorCode::InvalidArgument, "first snapshot must be at t = 0");
        for (std::size_t j = 1; j < u.size(); ++j) {
            require(u[j].t > u[j - 1].t, ErrorCode::InvalidArgument, "snapshot times must increase");
            require(u[j].u.N == u[0].u.N && u[j].u.n == u[0].u.n && u[j].u.L == u[0].u.L, ErrorCode::InvalidArgument,
                    "snapshots must share one grid");
        }
        require(u[0].u.N == params.N, ErrorCode::InvalidArgument, "snapshot dimension differs from N");
        const double L = u[0].u.L, exponent = (params.N * (params.p - 1.0) / (2.0 * params.m) - 1.0) / params.p;

        DiagnosticTable table;
        for (double R : R_list) {
            CutoffSpec spec{x0, R, params};
            spec.validate();
            const double rad = spec.support_radius();
            for (int d = 0; d < params.N; ++d)
                require(std::abs(x0[d]) + rad < L, ErrorCode::SupportMismatch, "cutoff support leaves the solver box");
            // psi_R vanishes for t >= 2R/3.
            const double t_end = 2.0 * R / 3.0;
            require(u.back().t >= t_end, ErrorCode::SupportMismatch, "snapshots end before the cutoff support");

            DiagnosticRow row;
            row.R = R;
            row.m_R = ball_mass(mu, x0, std::pow(R / 3.0, 1.0 / (2.0 * params.m)));
            row.lhs = row.m_R + weighted_integral(u, spec, false, t_end);
            row.rhs = std::pow(R, exponent) * std::pow(weighted_integral(u, spec, true, t_end), 1.0 / params.p);
            row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : (row.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            table.rows.push_back(row);
        }

        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int cnt = 0;
        for (const auto &r : table.rows) {
            if (std::isinf(r.ratio)) table.diverging = true;
            if (!(r.ratio > 0.0) || std::isinf(r.ratio)) continue;
            const double x = std::log(r.R), y = std::log(r.ratio);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2 && sxx * cnt - sx * sx > 0.0) table.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        if (table.slope <= -0.5) table.diverging = true;
        return table;
    }

}  // namespace polyheat
