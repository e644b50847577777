#include "polyheat/initial_data.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polyheat/errors.hpp"
#include "polyheat/params.hpp"

namespace polyheat {

    namespace {

        constexpr double kE = std::numbers::e;
        constexpr double kInf = std::numeric_limits<double>::infinity();

        // log(e + 1/r) from log r, stable for r -> 0.
        double log_e_plus_inv(double log_r) {
            if (log_r < -30.0) return -log_r + std::log1p(kE * std::exp(log_r));
            return std::log(kE + std::exp(-log_r));
        }

        double norm3(const std::array<double, 3> &x, int N) {
            double s = 0.0;
            for (int d = 0; d < N; ++d) s += x[d] * x[d];
            return std::sqrt(s);
        }

        double dist(const std::array<double, 3> &a, const std::array<double, 3> &b, int N) {
            double s = 0.0;
            for (int d = 0; d < N; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
            return std::sqrt(s);
        }

        // log of the radial density at radius e^{log_r}, inside the cutoff.
        double log_density(const InitialData &mu, double log_r) {
            double v = std::log(mu.c) - mu.a * log_r;
            if (mu.kind == DataKind::LogPower) v -= mu.b * std::log(log_e_plus_inv(log_r));
            return v;
        }

        double atoms_in_ball(const std::vector<Atom> &atoms, const std::array<double, 3> &c, double sigma, int N) {
            double s = 0.0;
            for (const auto &at : atoms)
                if (dist(at.x, c, N) <= sigma) s += at.mass;
            return s;
        }

        // Centres that can realise the sup of the atom count in a ball of radius sigma.
        std::vector<std::array<double, 3>> atom_candidate_centres(const std::vector<Atom> &atoms, double sigma, int N) {
            std::vector<std::array<double, 3>> out;
            const double s = sigma * (1.0 - 1e-9);
            for (const auto &a : atoms) out.push_back(a.x);
            for (std::size_t i = 0; i < atoms.size(); ++i)
                for (std::size_t j = i + 1; j < atoms.size(); ++j) {
                    const auto &p = atoms[i].x, &q = atoms[j].x;
                    const double dpq = dist(p, q, N);
                    if (dpq > 2.0 * s || dpq == 0.0) continue;
                    std::array<double, 3> mid{};
                    for (int d = 0; d < N; ++d) mid[d] = 0.5 * (p[d] + q[d]);
                    out.push_back(mid);
                    if (N == 2) {
                        const double h = std::sqrt(std::max(0.0, s * s - 0.25 * dpq * dpq));
                        const double ux = -(q[1] - p[1]) / dpq, uy = (q[0] - p[0]) / dpq;
                        out.push_back({mid[0] + h * ux, mid[1] + h * uy, 0.0});
                        out.push_back({mid[0] - h * ux, mid[1] - h * uy, 0.0});
                    }
                    if (N == 3) {
                        for (std::size_t k = j + 1; k < atoms.size(); ++k) {
                            // Points at distance s from p, q and atoms[k] (trilateration).
                            const auto &r = atoms[k].x;
                            std::array<double, 3> ex{}, ey{}, ez{};
                            for (int d = 0; d < 3; ++d) ex[d] = (q[d] - p[d]) / dpq;
                            double i_ = 0.0;
                            for (int d = 0; d < 3; ++d) i_ += ex[d] * (r[d] - p[d]);
                            for (int d = 0; d < 3; ++d) ey[d] = r[d] - p[d] - i_ * ex[d];
                            const double ny = std::sqrt(ey[0] * ey[0] + ey[1] * ey[1] + ey[2] * ey[2]);
                            if (ny < 1e-14) continue;
                            for (int d = 0; d < 3; ++d) ey[d] /= ny;
                            ez = {ex[1] * ey[2] - ex[2] * ey[1], ex[2] * ey[0] - ex[0] * ey[2],
                                  ex[0] * ey[1] - ex[1] * ey[0]};
                            double j_ = 0.0;
                            for (int d = 0; d < 3; ++d) j_ += ey[d] * (r[d] - p[d]);
                            const double x = 0.5 * dpq;
                            const double y = (i_ * i_ + j_ * j_) / (2.0 * j_) - i_ * x / j_;
                            const double z2 = s * s - x * x - y * y;
                            if (z2 < 0.0) continue;
                            for (double sg : {-1.0, 1.0}) {
                                std::array<double, 3> c{};
                                for (int d = 0; d < 3; ++d)
                                    c[d] = p[d] + x * ex[d] + y * ey[d] + sg * std::sqrt(z2) * ez[d];
                                out.push_back(c);
                            }
                        }
                    }
                }
            return out;
        }

        // Area of the part of the sphere |y| = r inside B(d e_1, sigma).
        double shell_fraction_area(int N, double r, double d, double sigma) {
            if (N == 1) return 1.0;  // only y = +r can lie in the ball once r >= sigma - d
            const double c = std::clamp((r * r + d * d - sigma * sigma) / (2.0 * r * d), -1.0, 1.0);
            if (N == 2) return 2.0 * r * std::acos(c);
            return 2.0 * std::numbers::pi * r * r * (1.0 - c);
        }

    }  // namespace

    InitialData InitialData::zero(int N) {
        InitialData mu;
        mu.kind = DataKind::Atoms;
        mu.N = N;
        return mu;
    }

    InitialData InitialData::dirac(int N, double mass, std::array<double, 3> at) {
        InitialData mu;
        mu.kind = DataKind::Dirac;
        mu.N = N;
        mu.atoms = {Atom{at, mass}};
        mu.validate();
        return mu;
    }

    InitialData InitialData::atom_list(int N, std::vector<Atom> atoms) {
        InitialData mu;
        mu.kind = DataKind::Atoms;
        mu.N = N;
        mu.atoms = std::move(atoms);
        mu.validate();
        return mu;
    }

    InitialData InitialData::power(int N, double c, double a, double cutoff) {
        InitialData mu;
        mu.kind = DataKind::Power;
        mu.N = N;
        mu.c = c;
        mu.a = a;
        mu.cutoff = cutoff;
        mu.validate();
        return mu;
    }

    InitialData InitialData::logpower(int N, double c, double a, double b, double cutoff) {
        InitialData mu;
        mu.kind = DataKind::LogPower;
        mu.N = N;
        mu.c = c;
        mu.a = a;
        mu.b = b;
        mu.cutoff = cutoff;
        mu.validate();
        return mu;
    }

    InitialData InitialData::from_grid(GridField density) {
        InitialData mu;
        mu.kind = DataKind::Grid;
        mu.N = density.N;
        mu.grid = std::move(density);
        mu.validate();
        return mu;
    }

    void InitialData::validate() const {
        require(N >= 1 && N <= 3, ErrorCode::UnsupportedDimension, "initial data supports N in 1..3");
        switch (kind) {
            case DataKind::Dirac:
                require(atoms.size() == 1, ErrorCode::InvalidArgument, "a Dirac measure carries exactly one atom");
                [[fallthrough]];
            case DataKind::Atoms:
                for (const auto &at : atoms) {
                    require(std::isfinite(at.mass) && at.mass >= 0.0, ErrorCode::InvalidArgument,
                            "atom masses must be finite and nonnegative");
                    for (int d = 0; d < 3; ++d)
                        require(std::isfinite(at.x[d]), ErrorCode::InvalidArgument, "atom position must be finite");
                }
                if (kind == DataKind::Dirac)
                    require(atoms.front().mass > 0.0, ErrorCode::InvalidArgument, "Dirac mass must be positive");
                break;
            case DataKind::Power:
            case DataKind::LogPower:
                require(std::isfinite(c) && c > 0.0, ErrorCode::InvalidArgument, "profile amplitude c must be > 0");
                require(std::isfinite(a) && std::isfinite(b), ErrorCode::InvalidArgument, "exponents must be finite");
                require(kind == DataKind::LogPower || a >= 0.0, ErrorCode::InvalidArgument,
                        "power exponent a must be >= 0");
                require(std::isfinite(cutoff) && cutoff > 0.0, ErrorCode::InvalidArgument,
                        "profile cutoff must be finite and > 0");
                break;
            case DataKind::Grid:
                require(grid.has_value(), ErrorCode::InvalidArgument, "grid data needs a density field");
                grid->validate();
                require(grid->N == N, ErrorCode::InvalidArgument, "grid dimension mismatch");
                for (double v : grid->values)
                    require(v >= 0.0, ErrorCode::InvalidArgument, "grid density must be nonnegative");
                break;
        }
    }

    bool InitialData::is_zero() const {
        switch (kind) {
            case DataKind::Dirac:
            case DataKind::Atoms:
                return std::all_of(atoms.begin(), atoms.end(), [](const Atom &a) { return a.mass == 0.0; });
            case DataKind::Grid:
                return std::all_of(grid->values.begin(), grid->values.end(), [](double v) { return v == 0.0; });
            default:
                return false;
        }
    }

    bool InitialData::non_sigma_finite() const {
        if (kind == DataKind::Power) return a >= N;
        if (kind == DataKind::LogPower) return a > N || (a == N && b <= 1.0);
        return false;
    }

    double InitialData::radial_density(double r) const {
        require(is_radial(), ErrorCode::PointwiseUnavailable, "radial density needs POWER or LOGPOWER data");
        r = std::abs(r);
        if (r > cutoff) return 0.0;
        if (r == 0.0) {
            if (a != 0.0) return a > 0.0 ? kInf : 0.0;
            if (kind == DataKind::Power || b == 0.0) return c;
            return b > 0.0 ? 0.0 : kInf;
        }
        return std::exp(log_density(*this, std::log(r)));
    }

    bool InitialData::radially_monotone() const {
        if (kind == DataKind::Power) return a >= 0.0;
        if (kind != DataKind::LogPower) return false;
        // d/dr log f <= 0  <=>  a (1 + e r) log(e + 1/r) >= b
        for (int k = 0; k <= 600; ++k) {
            const double r = cutoff * std::pow(10.0, -12.0 * (1.0 - k / 600.0));
            if (a * (1.0 + kE * r) * log_e_plus_inv(std::log(r)) < b) return false;
        }
        return true;
    }

    double radial_transformed_mass_within(const InitialData &mu, double r,
                                          const std::function<double(double)> &log_g) {
        require(mu.is_radial(), ErrorCode::InvalidArgument, "radial mass needs POWER or LOGPOWER data");
        const double rho = std::min(r, mu.cutoff);
        if (rho <= 0.0) return 0.0;
        const int N = mu.N;
        const double log_rho = std::log(rho);
        // y = rho e^{-w}, w = e^v - 1:
        //   integral of g(f) r^{N-1} dr = rho^N int_0^inf g(f(rho e^{-w})) e^{-N w} e^v dv.
        // Log-power profiles with a = N only decay algebraically in w, hence the outer map.
        auto log_h = [&](double v) {
            const double w = std::expm1(v);
            return log_g(log_density(mu, log_rho - w)) + N * (log_rho - w) + v;
        };
        // Beyond w ~ 1e10 the cancellation between N log r and log f costs digits, so
        // the tail past v_max is closed with its exponential rate in v. A nonpositive
        // rate means the integral diverges.
        const double v_mid = 17.0, v_max = 23.0;
        const double h_end = log_h(v_max);
        double tail = 0.0;
        if (h_end > -700.0) {
            const double rate = (log_h(v_mid) - h_end) / (v_max - v_mid);
            if (!(rate > 1e-3)) return kInf;
            tail = std::exp(h_end) / rate;
        }
        auto integrand = [&](double v) {
            const double h = std::exp(log_h(v));
            return std::isfinite(h) ? h : 0.0;
        };
        boost::math::quadrature::tanh_sinh<double> integrator;
        double val = tail;
        for (auto [lo, hi] : {std::pair{0.0, 3.0}, {3.0, 10.0}, {10.0, v_max}}) val += integrator.integrate(integrand, lo, hi);
        return unit_sphere_area(N) * val;
    }

    double radial_mass_within(const InitialData &mu, double r) {
        require(!mu.non_sigma_finite(), ErrorCode::NonSigmaFinite, "profile is not locally integrable at 0");
        const double rho = std::min(r, mu.cutoff);
        if (rho <= 0.0) return 0.0;
        if (mu.kind == DataKind::Power)
            return mu.c * unit_sphere_area(mu.N) * std::pow(rho, mu.N - mu.a) / (mu.N - mu.a);
        return radial_transformed_mass_within(mu, r, [](double lf) { return lf; });
    }

    double ball_mass(const InitialData &mu, std::array<double, 3> center, double sigma) {
        require(sigma > 0.0, ErrorCode::InvalidArgument, "ball radius must be > 0");
        const int N = mu.N;
        switch (mu.kind) {
            case DataKind::Dirac:
            case DataKind::Atoms:
                return atoms_in_ball(mu.atoms, center, sigma, N);
            case DataKind::Grid: {
                const auto &g = *mu.grid;
                double s = 0.0;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    const auto x = g.point(k);
                    if (dist(x, center, N) <= sigma) s += g.values[k];
                }
                return s * g.cell_volume();
            }
            default: break;
        }
        require(!mu.non_sigma_finite(), ErrorCode::NonSigmaFinite, "profile is not locally integrable at 0");
        const double d = norm3(center, N);
        if (d == 0.0) return radial_mass_within(mu, sigma);
        double total = sigma > d ? radial_mass_within(mu, sigma - d) : 0.0;
        const double lo = std::abs(d - sigma);
        const double hi = std::min(d + sigma, mu.cutoff);
        if (hi > lo) {
            boost::math::quadrature::tanh_sinh<double> integrator;
            auto f = [&](double r) {
                if (r <= 0.0) return 0.0;
                return mu.radial_density(r) * shell_fraction_area(N, r, d, sigma);
            };
            total += integrator.integrate(f, lo, hi, 1e-12);
        }
        return total;
    }

    double grid_ball_mass_sup(const GridField &density, double sigma) {
        GridField ball(density.N, density.L, density.n);
        ball.fill([&](std::span<const double> x) {
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            return r2 <= sigma * sigma ? 1.0 : 0.0;
        });
        const auto sums = linear_convolution_centered(ball, density);
        double best = 0.0;
        for (double v : sums) best = std::max(best, v);
        return best;
    }

    double ball_mass_sup(const InitialData &mu, double sigma) {
        require(sigma > 0.0, ErrorCode::InvalidArgument, "ball radius must be > 0");
        if (mu.non_sigma_finite()) fail(ErrorCode::NonSigmaFinite, "profile is not locally integrable at 0");
        const int N = mu.N;
        switch (mu.kind) {
            case DataKind::Dirac: return mu.atoms.front().mass;
            case DataKind::Atoms: {
                if (mu.atoms.empty()) return 0.0;
                if (N == 1) {
                    auto atoms = mu.atoms;
                    std::sort(atoms.begin(), atoms.end(), [](const Atom &a, const Atom &b) { return a.x[0] < b.x[0]; });
                    double best = 0.0, window = 0.0;
                    std::size_t lo = 0;
                    for (std::size_t hi = 0; hi < atoms.size(); ++hi) {
                        window += atoms[hi].mass;
                        while (atoms[hi].x[0] - atoms[lo].x[0] > 2.0 * sigma) window -= atoms[lo++].mass;
                        best = std::max(best, window);
                    }
                    return best;
                }
                double best = 0.0;
                for (const auto &c : atom_candidate_centres(mu.atoms, sigma, N))
                    best = std::max(best, atoms_in_ball(mu.atoms, c, sigma, N));
                return best;
            }
            case DataKind::Grid: return grid_ball_mass_sup(*mu.grid, sigma);
            default: break;
        }
        if (mu.radially_monotone()) return radial_mass_within(mu, sigma);
        // Scan the centre offset, then refine around the best by golden section.
        const double span = mu.cutoff + sigma;
        double best_d = 0.0, best = ball_mass(mu, {0.0, 0.0, 0.0}, sigma);
        const int scan = 200;
        for (int k = 1; k <= scan; ++k) {
            const double d = span * k / scan;
            const double v = ball_mass(mu, {d, 0.0, 0.0}, sigma);
            if (v > best) {
                best = v;
                best_d = d;
            }
        }
        double lo = std::max(0.0, best_d - span / scan), hi = std::min(span, best_d + span / scan);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60; ++it) {
            const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            const double f1 = ball_mass(mu, {x1, 0.0, 0.0}, sigma), f2 = ball_mass(mu, {x2, 0.0, 0.0}, sigma);
            best = std::max({best, f1, f2});
            (f1 > f2 ? hi : lo) = (f1 > f2 ? x2 : x1);
        }
        return best;
    }

    double InitialData::total_mass() const {
        switch (kind) {
            case DataKind::Dirac:
            case DataKind::Atoms: {
                double s = 0.0;
                for (const auto &at : atoms) s += at.mass;
                return s;
            }
            case DataKind::Grid: return grid->integral();
            default: return radial_mass_within(*this, cutoff);
        }
    }

    InitialData InitialData::radial_power(double alpha) const {
        require(alpha > 0.0, ErrorCode::InvalidArgument, "power of the data needs alpha > 0");
        switch (kind) {
            case DataKind::Power: return power(N, std::pow(c, alpha), a * alpha, cutoff);
            case DataKind::LogPower: return logpower(N, std::pow(c, alpha), a * alpha, b * alpha, cutoff);
            case DataKind::Grid: {
                auto g = *grid;
                for (double &v : g.values) v = std::pow(std::abs(v), alpha);
                return from_grid(std::move(g));
            }
            default:
                if (is_zero()) return zero(N);
                fail(ErrorCode::PointwiseUnavailable, "|mu|^alpha is undefined for atomic data");
        }
    }

    std::string InitialData::describe() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind) {
            case DataKind::Dirac: os << "kind=dirac mass=" << atoms.front().mass; break;
            case DataKind::Atoms: os << "kind=atoms count=" << atoms.size(); break;
            case DataKind::Power: os << "kind=power c=" << c << " a=" << a << " cutoff=" << cutoff; break;
            case DataKind::LogPower:
                os << "kind=logpower c=" << c << " a=" << a << " b=" << b << " cutoff=" << cutoff;
                break;
            case DataKind::Grid: os << "kind=grid L=" << grid->L << " n=" << grid->n; break;
        }
        return os.str();
    }

    GridField sample_density(const InitialData &mu, double L, int n) {
        mu.validate();
        const int N = mu.N;
        if (mu.kind == DataKind::Grid) {
            require(mu.grid->L == L && mu.grid->n == n, ErrorCode::InvalidArgument,
                    "grid data geometry differs from the requested grid");
            return *mu.grid;
        }
        GridField g(N, L, n);
        if (mu.is_atomic()) {
            require(mu.is_zero(), ErrorCode::PointwiseUnavailable, "atomic data has no density to sample");
            return g;
        }
        require(!mu.non_sigma_finite(), ErrorCode::NonSigmaFinite, "profile is not locally integrable at 0");
        g.fill([&](std::span<const double> x) {
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            return r2 == 0.0 ? 0.0 : mu.radial_density(std::sqrt(r2));
        });
        // Origin node: average over the ball whose volume equals one cell.
        const double rc = std::pow(g.cell_volume() / unit_ball_volume(N), 1.0 / N);
        std::array<int, 3> mid{n / 2, n / 2, n / 2};
        for (int d = N; d < 3; ++d) mid[d] = 0;
        g.values[g.flat_index(mid)] = radial_mass_within(mu, rc) / g.cell_volume();
        return g;
    }

}  // namespace polyheat
