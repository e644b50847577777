#include "polyheat/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "polyheat/errors.hpp"
#include "polyheat/params.hpp"

namespace polyheat {

    namespace {

        constexpr double kPi = std::numbers::pi;
        // Integrand magnitude below which the rho-integral is truncated.
        constexpr double kTruncationFloor = 1e-17;
        // Declared absolute tolerance on each tabulated value.
        constexpr double kValueTolerance = 1e-10;

        // z^{-nu} J_nu(z) with nu = N/2 - 1 (shift 0) or nu = N/2 (shift 1),
        // without the sqrt(2/pi) factor for half-integer orders.
        double sinc(double z) {
            if (std::abs(z) < 1e-4) {
                const double z2 = z * z;
                return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
            }
            return std::sin(z) / z;
        }

        // (sin z - z cos z) / z^3
        double spherical_j1_over_z(double z) {
            if (std::abs(z) < 0.1) {
                const double z2 = z * z;
                return 1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0 - z2 * z2 * z2 / 45360.0;
            }
            return (std::sin(z) - z * std::cos(z)) / (z * z * z);
        }

        double j1_over_z(double z) {
            if (std::abs(z) < 1e-4) return 0.5 - z * z / 16.0;
            return boost::math::cyl_bessel_j(1, z) / z;
        }

        struct RadialIntegrands {
            int N;
            double q;
            double prefactor;  // (2 pi)^{-N/2}, times sqrt(2/pi) for odd N

            double weight(double rho) const { return std::exp(-std::pow(rho, q)); }

            double value(double r, double rho) const {
                const double z = r * rho;
                double j = 0.0;
                switch (N) {
                    case 1: j = std::cos(z); break;
                    case 2: j = boost::math::cyl_bessel_j(0, z); break;
                    default: j = sinc(z); break;
                }
                return prefactor * j * std::pow(rho, N - 1) * weight(rho);
            }

            // dG/dr integrand: -r rho^{N+1} z^{-nu-1} J_{nu+1}(z) w(rho)
            double slope(double r, double rho) const {
                const double z = r * rho;
                double j = 0.0;
                switch (N) {
                    case 1: j = sinc(z); break;
                    case 2: j = j1_over_z(z); break;
                    default: j = spherical_j1_over_z(z); break;
                }
                return -prefactor * r * j * std::pow(rho, N + 1) * weight(rho);
            }
        };

        RadialIntegrands integrands_for(const KernelSpec &spec) {
            const int N = spec.N;
            double pref = std::pow(2.0 * kPi, -0.5 * N);
            if (N % 2 == 1) pref *= std::sqrt(2.0 / kPi);
            return {N, spec.symbol_power(), pref};
        }

        double truncation_point(const KernelSpec &spec) {
            const double q = spec.symbol_power();
            const int k = spec.N + 1;
            const double peak = std::pow(static_cast<double>(k) / q, 1.0 / q);
            double rho = std::max(1.0, peak);
            while (std::pow(rho, k) * std::exp(-std::pow(rho, q)) > kTruncationFloor) rho *= 1.01;
            return rho;
        }

        // Error is |K61 - K31|; bisection against an absolute budget
        // proportional to the panel width, floored at round-off of the panel's L1 norm.
        template <class F>
        double panel_integral(const F &f, double a, double b, double budget, double &err_sum, int depth = 0) {
            using boost::math::quadrature::gauss_kronrod;
            double l1 = 0.0;
            const double coarse = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0);
            const double fine = gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, nullptr, &l1);
            const double err = std::abs(fine - coarse);
            if (err <= std::max(budget, 1e-14 * l1) || depth >= 12) {
                err_sum += err;
                return fine;
            }
            const double mid = 0.5 * (a + b);
            return panel_integral(f, a, mid, 0.5 * budget, err_sum, depth + 1) +
                   panel_integral(f, mid, b, 0.5 * budget, err_sum, depth + 1);
        }

        // Fit on the last decade of radii; see TailModel for the two families.
        TailModel fit_tail(const KernelSpec &spec, const std::vector<double> &radii, const std::vector<double> &values) {
            TailModel tail;
            tail.exponent = spec.tail_exponent();
            const double r_max = radii.back();
            const double lo = r_max / 10.0;
            if (spec.kind == KernelKind::Stable) {
                double acc = 0.0;
                int count = 0;
                for (std::size_t k = 0; k < radii.size(); ++k) {
                    if (radii[k] < lo || values[k] <= 0.0) continue;
                    acc += std::log(values[k] * std::pow(radii[k], tail.exponent));
                    ++count;
                }
                tail.amplitude = count > 0 ? std::exp(acc / count) : 0.0;
                return tail;
            }

            // Upper envelope of |G| over reliable nodes, least squares in (r^kappa, log|G|).
            const double floor = 1e-13 * std::abs(values.front());
            auto collect = [&](double from) {
                std::vector<std::pair<double, double>> pts;
                double suffix_max = 0.0;
                for (std::size_t k = radii.size(); k-- > 0;) {
                    const double a = std::abs(values[k]);
                    if (radii[k] < from) break;
                    if (a > floor && a >= suffix_max) pts.emplace_back(std::pow(radii[k], tail.exponent), std::log(a));
                    suffix_max = std::max(suffix_max, a > floor ? a : 0.0);
                }
                return pts;
            };
            auto pts = collect(lo);
            if (pts.size() < 3) pts = collect(std::min(1.0, lo));
            if (pts.size() < 2) return tail;
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto [x, y] : pts) {
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double cnt = static_cast<double>(pts.size());
            const double den = cnt * sxx - sx * sx;
            if (den <= 0.0) return tail;
            const double slope = (cnt * sxy - sx * sy) / den;
            const double icpt = (sy - slope * sx) / cnt;
            if (slope >= 0.0) return tail;
            tail.rate = -slope;
            tail.amplitude = std::exp(icpt);
            return tail;
        }

    }  // namespace

    double KernelSpec::symbol_power() const {
        return kind == KernelKind::Polyharmonic ? 2.0 * m : theta;
    }

    double KernelSpec::tail_exponent() const {
        return kind == KernelKind::Polyharmonic ? 2.0 * m / (2.0 * m - 1.0) : N + theta;
    }

    std::string KernelSpec::label() const {
        std::ostringstream os;
        os.precision(17);
        if (kind == KernelKind::Polyharmonic)
            os << "polyharmonic_N" << N << "_m" << m;
        else
            os << "stable_N" << N << "_theta" << theta;
        return os.str();
    }

    void KernelSpec::validate() const {
        require(N >= 1, ErrorCode::InvalidArgument, "kernel dimension must be >= 1");
        require(N <= 3, ErrorCode::UnsupportedDimension, "radial quadrature is shipped for N <= 3 only");
        if (kind == KernelKind::Polyharmonic)
            require(m >= 1, ErrorCode::InvalidArgument, "polyharmonic order m must be >= 1");
        else
            require(theta > 0.0 && theta < 2.0, ErrorCode::InvalidArgument, "stable index theta must lie in (0,2)");
    }

    int default_resolution(double r_max) {
        const double octaves = std::log2(r_max / kProfileInnerRadius);
        return std::max(kMinProfileResolution, static_cast<int>(std::ceil(16.0 * octaves)) + 1);
    }

    RadialSample radial_quadrature(const KernelSpec &spec, double r) {
        spec.validate();
        const auto f = integrands_for(spec);
        const double P = truncation_point(spec);
        RadialSample out;

        // Panels of width pi/r follow the zeros of the oscillatory factor.
        long panels = 8;
        if (r * P > 8.0 * kPi) panels = static_cast<long>(std::ceil(P * r / kPi));
        const double h = P / static_cast<double>(panels);
        double err = 0.0;
        double v = 0.0, s = 0.0;
        for (long k = 0; k < panels; ++k) {
            const double a = k * h;
            const double b = (k + 1 == panels) ? P : (k + 1) * h;
            const double budget = 1e-12 * (b - a) / P;
            v += panel_integral([&](double rho) { return f.value(r, rho); }, a, b, budget, err);
            if (r > 0.0) s += panel_integral([&](double rho) { return f.slope(r, rho); }, a, b, budget, err);
        }
        out.value = v;
        out.slope = s;
        out.error_estimate = err;
        out.panels = panels;
        return out;
    }

    RadialKernelProfile build_profile(const KernelSpec &spec, double r_max, int resolution) {
        spec.validate();
        require(r_max > kProfileInnerRadius && std::isfinite(r_max), ErrorCode::InvalidArgument,
                "profile r_max must exceed the inner radius 1e-3");
        require(resolution >= kMinProfileResolution, ErrorCode::InvalidArgument,
                "profile resolution must be >= " + std::to_string(kMinProfileResolution));

        std::vector<double> radii(static_cast<std::size_t>(resolution) + 1);
        radii[0] = 0.0;
        const double ratio = std::log(r_max / kProfileInnerRadius) / (resolution - 1);
        for (int k = 0; k < resolution; ++k) radii[k + 1] = kProfileInnerRadius * std::exp(ratio * k);
        radii.back() = r_max;

        std::vector<double> values(radii.size()), slopes(radii.size());
        QuadratureMeta meta;
        meta.truncation = truncation_point(spec);
        meta.abs_tolerance = kValueTolerance;
        meta.nodes_per_octave = (resolution - 1) / std::log2(r_max / kProfileInnerRadius);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const auto sample = radial_quadrature(spec, radii[k]);
            if (!(sample.error_estimate <= kValueTolerance) || !std::isfinite(sample.value))
                fail(ErrorCode::QuadratureNonConvergence,
                     "radial quadrature did not reach tolerance at r=" + std::to_string(radii[k]) +
                         " (error estimate " + std::to_string(sample.error_estimate) + ")");
            values[k] = sample.value;
            slopes[k] = sample.slope;
            meta.max_error_estimate = std::max(meta.max_error_estimate, sample.error_estimate);
            meta.max_panels = std::max(meta.max_panels, sample.panels);
        }
        auto tail = fit_tail(spec, radii, values);
        return RadialKernelProfile(spec, r_max, resolution, std::move(radii), std::move(values), std::move(slopes),
                                   tail, meta);
    }

    RadialKernelProfile::RadialKernelProfile(KernelSpec spec, double r_max, int resolution, std::vector<double> radii,
                                             std::vector<double> values, std::vector<double> slopes, TailModel tail,
                                             QuadratureMeta quad)
        : spec_(spec), r_max_(r_max), resolution_(resolution), radii_(std::move(radii)), values_(std::move(values)),
          slopes_(std::move(slopes)), tail_(tail), quad_(quad) {
        spec_.validate();
        require(radii_.size() >= 2 && radii_.size() == values_.size() && radii_.size() == slopes_.size(),
                ErrorCode::InvalidArgument, "profile arrays must have equal length >= 2");
        require(radii_.front() == 0.0, ErrorCode::InvalidArgument, "profile grid must start at r = 0");
        for (std::size_t k = 1; k < radii_.size(); ++k)
            require(radii_[k] > radii_[k - 1], ErrorCode::InvalidArgument, "profile radii must increase strictly");
        require(values_.front() > 0.0, ErrorCode::InvalidArgument, "profile value at r = 0 must be positive");

        // Fritsch-Carlson limiting applied to the quadrature slopes: on an
        // interval where the data and both end slopes share a direction the
        // interpolant stays monotone.
        const std::size_t ni = radii_.size() - 1;
        left_slope_.resize(ni);
        right_slope_.resize(ni);
        for (std::size_t k = 0; k < ni; ++k) {
            const double h = radii_[k + 1] - radii_[k];
            const double delta = (values_[k + 1] - values_[k]) / h;
            double d0 = slopes_[k], d1 = slopes_[k + 1];
            if (delta != 0.0) {
                const double a = d0 / delta, b = d1 / delta;
                if (a >= 0.0 && b >= 0.0 && a * a + b * b > 9.0) {
                    const double tau = 3.0 / std::sqrt(a * a + b * b);
                    d0 = tau * a * delta;
                    d1 = tau * b * delta;
                }
            }
            left_slope_[k] = d0;
            right_slope_[k] = d1;
        }
    }

    double RadialKernelProfile::tail_value(double r) const {
        if (spec_.kind == KernelKind::Stable) return tail_.amplitude * std::pow(r, -tail_.exponent);
        return tail_.amplitude * std::exp(-tail_.rate * std::pow(r, tail_.exponent));
    }

    double RadialKernelProfile::at_radius(double r) const {
        r = std::abs(r);
        if (r >= r_max_) return r == r_max_ ? values_.back() : tail_value(r);
        const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
        const std::size_t k = static_cast<std::size_t>(it - radii_.begin()) - 1;
        const double h = radii_[k + 1] - radii_[k];
        const double t = (r - radii_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * values_[k] + (t3 - 2 * t2 + t) * h * left_slope_[k] +
               (-2 * t3 + 3 * t2) * values_[k + 1] + (t3 - t2) * h * right_slope_[k];
    }

    double RadialKernelProfile::tail_mass_beyond(double r) const {
        const int N = spec_.N;
        const double S = unit_sphere_area(N);
        if (spec_.kind == KernelKind::Stable) return S * tail_.amplitude * std::pow(r, -spec_.theta) / spec_.theta;
        if (tail_.amplitude == 0.0 || tail_.rate <= 0.0) return 0.0;
        const double kappa = tail_.exponent;
        const double a = N / kappa;
        return S * tail_.amplitude / kappa * std::pow(tail_.rate, -a) *
               boost::math::tgamma(a, tail_.rate * std::pow(r, kappa));
    }

    double RadialKernelProfile::mass() const {
        const int N = spec_.N;
        const double S = unit_sphere_area(N);
        auto g = [&](std::size_t k) { return S * std::pow(radii_[k], N - 1) * values_[k]; };
        auto dg = [&](std::size_t k) {
            const double r = radii_[k];
            const double lead = (N == 1) ? 0.0 : (N - 1) * std::pow(r, N - 2) * values_[k];
            return S * (lead + std::pow(r, N - 1) * slopes_[k]);
        };
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < radii_.size(); ++k) {
            const double h = radii_[k + 1] - radii_[k];
            total += 0.5 * h * (g(k) + g(k + 1)) + h * h / 12.0 * (dg(k) - dg(k + 1));
        }
        return total + tail_mass_beyond(r_max_);
    }

    double RadialKernelProfile::min_value() const {
        double lo = std::numeric_limits<double>::infinity();
        for (double v : values_) lo = std::min(lo, std::abs(v) <= quad_.max_error_estimate ? 0.0 : v);
        return lo;
    }

    double eval_kernel_radial(const RadialKernelProfile &profile, double r, double t) {
        require(t > 0.0, ErrorCode::NonPositiveTime, "kernel evaluation needs t > 0");
        const double q = profile.spec().symbol_power();
        const double N = profile.spec().N;
        return std::pow(t, -N / q) * profile.at_radius(std::abs(r) * std::pow(t, -1.0 / q));
    }

    double eval_kernel(const RadialKernelProfile &profile, std::span<const double> x, double t) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        return eval_kernel_radial(profile, std::sqrt(r2), t);
    }

    GridField sample_kernel(const RadialKernelProfile &profile, double t, int N, double L, int n) {
        GridField g(N, L, n);
        g.fill([&](std::span<const double> x) { return eval_kernel(profile, x, t); });
        g.time = t;
        return g;
    }

    namespace {

        double stable_mass_outside(const RadialKernelProfile &profile, double radius, double t) {
            // Mass of G(., t) outside B(0, radius), via the profile at t = 1.
            const double theta = profile.spec().theta;
            const double r1 = radius * std::pow(t, -1.0 / theta);
            if (r1 >= profile.r_max()) return profile.tail_mass_beyond(r1);
            const int N = profile.spec().N;
            const double S = unit_sphere_area(N);
            // Trapezoid over the nodes beyond r1, plus the tail.
            const auto &rad = profile.radii();
            double total = profile.tail_mass_beyond(profile.r_max());
            double prev_r = r1, prev_g = S * std::pow(r1, N - 1) * profile.at_radius(r1);
            for (std::size_t k = 0; k < rad.size(); ++k) {
                if (rad[k] <= r1) continue;
                const double g = S * std::pow(rad[k], N - 1) * profile.values()[k];
                total += 0.5 * (rad[k] - prev_r) * (g + prev_g);
                prev_r = rad[k];
                prev_g = g;
            }
            return total;
        }

        // Unit-mass renormalisation of a factor that the grid cannot resolve.
        void renormalise_if_unresolved(GridField &f, double width) {
            if (width >= 2.0 * f.dx()) return;
            const double mass = f.integral();
            if (mass > 0.0)
                for (double &v : f.values) v /= mass;
        }

    }  // namespace

    double semigroup_truncation_estimate(const RadialKernelProfile &profile, double t, double s, double L) {
        const double a_half = eval_kernel_radial(profile, 0.5 * L, t - s);
        const double a_full = eval_kernel_radial(profile, L, t - s);
        const double b_half = eval_kernel_radial(profile, 0.5 * L, s);
        const double b_full = eval_kernel_radial(profile, L, s);
        const double out_b_L = stable_mass_outside(profile, L, s);
        const double out_b_half = stable_mass_outside(profile, 0.5 * L, s);
        const double out_a_L = stable_mass_outside(profile, L, t - s);
        const double out_a_half = stable_mass_outside(profile, 0.5 * L, t - s);
        // Either factor may be the one whose far field gets cut off.
        return std::max(a_half * out_b_L + a_full * out_b_half, b_half * out_a_L + b_full * out_a_half);
    }

    double semigroup_residual(const RadialKernelProfile &profile, double t, double s, double L, int n) {
        require(profile.spec().kind == KernelKind::Stable, ErrorCode::InvalidArgument,
                "semigroup residual is defined for stable profiles");
        require(s > 0.0 && s < t, ErrorCode::InvalidArgument, "semigroup residual needs 0 < s < t");
        const double trunc = semigroup_truncation_estimate(profile, t, s, L);
        require(trunc <= 1e-6, ErrorCode::BoxTooSmall,
                "estimated tail truncation " + std::to_string(trunc) + " exceeds 1e-6; enlarge L");
        const int N = profile.spec().N;
        const double theta = profile.spec().theta;
        auto a = sample_kernel(profile, t - s, N, L, n);
        auto b = sample_kernel(profile, s, N, L, n);
        renormalise_if_unresolved(a, std::pow(t - s, 1.0 / theta));
        renormalise_if_unresolved(b, std::pow(s, 1.0 / theta));
        const auto conv = linear_convolution_centered(a, b);
        double residual = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const auto x = a.point(k);
            bool inner = true;
            for (int d = 0; d < N; ++d) inner = inner && std::abs(x[d]) <= 0.5 * L;
            if (!inner) continue;
            const double exact = eval_kernel(profile, std::span<const double>(x.data(), N), t);
            residual = std::max(residual, std::abs(conv[k] - exact));
        }
        return residual;
    }

    std::vector<std::vector<int>> multi_indices(int N, int j) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur(static_cast<std::size_t>(N), 0);
        auto rec = [&](auto &&self, int d, int left) -> void {
            if (d == N - 1) {
                cur[d] = left;
                out.push_back(cur);
                return;
            }
            for (int a = left; a >= 0; --a) {
                cur[d] = a;
                self(self, d + 1, left - a);
            }
        };
        rec(rec, 0, j);
        return out;
    }

    GridField spectral_kernel_derivative(const KernelSpec &spec, std::span<const int> alpha, double L, int n) {
        spec.validate();
        require(static_cast<int>(alpha.size()) == spec.N, ErrorCode::InvalidArgument,
                "multi-index length must equal N");
        const int N = spec.N;
        SpectralGrid grid(N, L, n);
        int order = 0;
        for (int a : alpha) order += a;
        const double q = spec.symbol_power();
        const double scale = std::pow(static_cast<double>(n) / (2.0 * L), N);
        std::vector<std::complex<double>> coeffs(grid.spectral_size());
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (order % 2 == 1 && grid.is_nyquist(k)) continue;
            const auto xi = grid.wave_vector(k);
            std::complex<double> c = scale * std::exp(-std::pow(grid.xi_squared()[k], 0.5 * q));
            long phase = 0;
            for (int d = 0; d < N; ++d) {
                c *= std::pow(std::complex<double>(0.0, xi[d]), alpha[d]);
                phase += std::lround(xi[d] * L / std::numbers::pi);
            }
            // Grid starts at -L: e^{i xi (-L)} = (-1)^k.
            if (phase % 2 != 0) c = -c;
            coeffs[k] = c;
        }
        GridField out(N, L, n);
        grid.inverse(coeffs, out.values);
        out.time = 1.0;
        return out;
    }

    std::vector<GridLevel> default_envelope_grids(int N) {
        switch (N) {
            case 1: return {{8, 128}, {16, 256}, {32, 512}, {64, 1024}};
            case 2: return {{8, 128}, {16, 256}, {32, 512}};
            default: return {{8, 64}, {16, 128}, {32, 256}};
        }
    }

    namespace {

        // Smallest C with C exp(-a / C) >= f; the left side increases with C.
        double envelope_constant(double a, double f) {
            if (a == 0.0) return f;
            double lo = 1e-12, hi = 1.0;
            auto g = [&](double c) { return std::log(c) - a / c - std::log(f); };
            while (g(hi) < 0.0) hi *= 2.0;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) < 0.0 ? lo : hi) = mid;
            }
            return hi;
        }

    }  // namespace

    ConstantEstimate derivative_envelope_check(const RadialKernelProfile &profile, int j,
                                               const std::vector<GridLevel> &grids) {
        const auto &spec = profile.spec();
        require(spec.kind == KernelKind::Polyharmonic, ErrorCode::InvalidArgument,
                "derivative envelope check needs a polyharmonic profile");
        require(j >= 0 && j <= 2, ErrorCode::InvalidArgument, "derivative order must be 0, 1 or 2");
        require(!grids.empty(), ErrorCode::InvalidArgument, "need at least one grid level");
        const double kappa = spec.tail_exponent();
        ConstantEstimate est;
        est.name = "C_" + std::to_string(j);
        int growth_streak = 0;
        for (const auto &lvl : grids) {
            double best = 0.0;
            double reach = 0.0;
            for (const auto &alpha : multi_indices(spec.N, j)) {
                const auto field = spectral_kernel_derivative(spec, alpha, lvl.L, lvl.n);
                const double floor = 1e-13 * std::max(field.sup_norm(), 1e-300);
                for (std::size_t k = 0; k < field.size(); ++k) {
                    const double f = std::abs(field.values[k]);
                    if (f <= floor) continue;
                    const auto x = field.point(k);
                    double r2 = 0.0;
                    for (int d = 0; d < spec.N; ++d) r2 += x[d] * x[d];
                    const double a = std::pow(std::sqrt(r2), kappa);
                    reach = std::max(reach, std::sqrt(r2));
                    if (best > 0.0 && best * std::exp(-a / best) >= f) continue;
                    best = std::max(best, envelope_constant(a, f));
                }
            }
            const double prev = est.refinement_history.empty() ? 0.0 : est.value;
            est.push(static_cast<long>(std::pow(lvl.n, spec.N)), best);
            est.tail_radius = reach;
            growth_streak = (prev > 0.0 && best > prev * 1.02) ? growth_streak + 1 : 0;
            if (growth_streak >= 3)
                fail(ErrorCode::EstimateDiverging, "envelope constant keeps growing under grid enlargement");
        }
        return est;
    }

}  // namespace polyheat
