#include "polyheat/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "polyheat/errors.hpp"

namespace polyheat {

    bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

    GridField::GridField(int N_, double L_, int n_) : N(N_), L(L_), n(n_) {
        require(N >= 1 && N <= 3, ErrorCode::UnsupportedDimension, "grid dimension must be 1..3");
        std::size_t total = 1;
        for (int d = 0; d < N; ++d) total *= static_cast<std::size_t>(n);
        values.assign(total, 0.0);
    }

    void GridField::validate() const {
        require(N >= 1 && N <= 3, ErrorCode::UnsupportedDimension, "grid dimension must be 1..3");
        require(n >= 16 && is_power_of_two(n), ErrorCode::InvalidArgument,
                "grid n must be a power of two >= 16, got " + std::to_string(n));
        require(L > 0.0 && std::isfinite(L), ErrorCode::InvalidArgument, "grid half-width L must be > 0");
        std::size_t total = 1;
        for (int d = 0; d < N; ++d) total *= static_cast<std::size_t>(n);
        require(values.size() == total, ErrorCode::InvalidArgument, "grid value count does not match n^N");
        for (double v : values) require(std::isfinite(v), ErrorCode::NaNDetected, "grid holds a non-finite value");
    }

    double GridField::cell_volume() const { return std::pow(dx(), N); }

    std::array<int, 3> GridField::multi_index(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int d = N - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % static_cast<std::size_t>(n));
            flat /= static_cast<std::size_t>(n);
        }
        return idx;
    }

    std::size_t GridField::flat_index(const std::array<int, 3> &idx) const {
        std::size_t flat = 0;
        for (int d = 0; d < N; ++d) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[d]);
        return flat;
    }

    std::array<double, 3> GridField::point(std::size_t flat) const {
        const auto idx = multi_index(flat);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < N; ++d) x[d] = coordinate(idx[d]);
        return x;
    }

    double GridField::sup_norm() const {
        double s = 0.0;
        for (double v : values) s = std::max(s, std::abs(v));
        return s;
    }

    double GridField::mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return values.empty() ? 0.0 : s / static_cast<double>(values.size());
    }

    double GridField::integral() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * cell_volume();
    }

    void GridField::fill(const std::function<double(std::span<const double>)> &f) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            const auto x = point(k);
            values[k] = f(std::span<const double>(x.data(), static_cast<std::size_t>(N)));
        }
    }

    namespace {

        struct FftwBuffer {
            double *real = nullptr;
            fftw_complex *spec = nullptr;
            FftwBuffer(std::size_t nr, std::size_t nc)
                : real(fftw_alloc_real(nr)), spec(fftw_alloc_complex(nc)) {}
            ~FftwBuffer() {
                fftw_free(real);
                fftw_free(spec);
            }
            FftwBuffer(const FftwBuffer &) = delete;
            FftwBuffer &operator=(const FftwBuffer &) = delete;
        };

        int signed_mode(int i, int n) { return i <= n / 2 ? (i == n / 2 ? -n / 2 : i) : i - n; }

    }  // namespace

    struct SpectralGrid::Impl {
        int N;
        double L;
        int n;
        std::size_t nreal = 1;
        std::size_t nspec = 1;
        std::vector<double> xi2;
        FftwBuffer buf;
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;

        static std::size_t real_count(int N, int n) {
            std::size_t t = 1;
            for (int d = 0; d < N; ++d) t *= static_cast<std::size_t>(n);
            return t;
        }
        static std::size_t spec_count(int N, int n) {
            std::size_t t = static_cast<std::size_t>(n / 2 + 1);
            for (int d = 0; d + 1 < N; ++d) t *= static_cast<std::size_t>(n);
            return t;
        }

        Impl(int N_, double L_, int n_)
            : N(N_), L(L_), n(n_), nreal(real_count(N_, n_)), nspec(spec_count(N_, n_)), buf(nreal, nspec) {
            std::array<int, 3> dims{n, n, n};
            // FFTW_ESTIMATE never inspects data, so the buffers may be uninitialised here.
            fwd = fftw_plan_dft_r2c(N, dims.data(), buf.real, buf.spec, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r(N, dims.data(), buf.spec, buf.real, FFTW_ESTIMATE);
            require(fwd != nullptr && bwd != nullptr, ErrorCode::InvalidArgument, "FFTW plan creation failed");
            xi2.resize(nspec);
            for (std::size_t k = 0; k < nspec; ++k) {
                const auto w = wave(k);
                xi2[k] = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            }
        }

        ~Impl() {
            if (fwd) fftw_destroy_plan(fwd);
            if (bwd) fftw_destroy_plan(bwd);
        }

        std::array<int, 3> spec_index(std::size_t k) const {
            std::array<int, 3> idx{0, 0, 0};
            const auto last = static_cast<std::size_t>(n / 2 + 1);
            idx[N - 1] = static_cast<int>(k % last);
            k /= last;
            for (int d = N - 2; d >= 0; --d) {
                idx[d] = static_cast<int>(k % static_cast<std::size_t>(n));
                k /= static_cast<std::size_t>(n);
            }
            return idx;
        }

        std::array<double, 3> wave(std::size_t k) const {
            const auto idx = spec_index(k);
            const double base = std::numbers::pi / L;
            std::array<double, 3> w{0.0, 0.0, 0.0};
            for (int d = 0; d < N; ++d) {
                const int mode = (d == N - 1) ? idx[d] : signed_mode(idx[d], n);
                w[d] = base * mode;
            }
            return w;
        }

        bool nyquist(std::size_t k) const {
            const auto idx = spec_index(k);
            for (int d = 0; d < N; ++d)
                if (idx[d] == n / 2) return true;
            return false;
        }
    };

    SpectralGrid::SpectralGrid(int N, double L, int n) {
        require(N >= 1 && N <= 3, ErrorCode::UnsupportedDimension, "spectral grid dimension must be 1..3");
        require(n >= 2 && n % 2 == 0, ErrorCode::InvalidArgument, "spectral grid n must be even");
        require(L > 0.0, ErrorCode::InvalidArgument, "spectral grid L must be positive");
        impl_ = std::make_unique<Impl>(N, L, n);
    }
    SpectralGrid::~SpectralGrid() = default;
    SpectralGrid::SpectralGrid(SpectralGrid &&) noexcept = default;
    SpectralGrid &SpectralGrid::operator=(SpectralGrid &&) noexcept = default;

    int SpectralGrid::N() const { return impl_->N; }
    double SpectralGrid::L() const { return impl_->L; }
    int SpectralGrid::n() const { return impl_->n; }
    std::size_t SpectralGrid::real_size() const { return impl_->nreal; }
    std::size_t SpectralGrid::spectral_size() const { return impl_->nspec; }
    const std::vector<double> &SpectralGrid::xi_squared() const { return impl_->xi2; }
    std::array<double, 3> SpectralGrid::wave_vector(std::size_t k) const { return impl_->wave(k); }
    bool SpectralGrid::is_nyquist(std::size_t k) const { return impl_->nyquist(k); }

    void SpectralGrid::forward(std::span<const double> in, std::span<std::complex<double>> coeffs) const {
        require(in.size() == impl_->nreal && coeffs.size() == impl_->nspec, ErrorCode::InvalidArgument,
                "spectral forward: size mismatch");
        std::copy(in.begin(), in.end(), impl_->buf.real);
        fftw_execute(impl_->fwd);
        for (std::size_t k = 0; k < impl_->nspec; ++k)
            coeffs[k] = {impl_->buf.spec[k][0], impl_->buf.spec[k][1]};
    }

    void SpectralGrid::inverse(std::span<const std::complex<double>> coeffs, std::span<double> out) const {
        require(out.size() == impl_->nreal && coeffs.size() == impl_->nspec, ErrorCode::InvalidArgument,
                "spectral inverse: size mismatch");
        for (std::size_t k = 0; k < impl_->nspec; ++k) {
            impl_->buf.spec[k][0] = coeffs[k].real();
            impl_->buf.spec[k][1] = coeffs[k].imag();
        }
        fftw_execute(impl_->bwd);
        const double scale = 1.0 / static_cast<double>(impl_->nreal);
        for (std::size_t i = 0; i < impl_->nreal; ++i) out[i] = impl_->buf.real[i] * scale;
    }

    void SpectralGrid::apply_real_multiplier(std::span<const double> in, std::span<const double> multiplier,
                                             std::span<double> out) const {
        require(in.size() == impl_->nreal && out.size() == impl_->nreal && multiplier.size() == impl_->nspec,
                ErrorCode::InvalidArgument, "spectral multiplier: size mismatch");
        std::copy(in.begin(), in.end(), impl_->buf.real);
        fftw_execute(impl_->fwd);
        for (std::size_t k = 0; k < impl_->nspec; ++k) {
            impl_->buf.spec[k][0] *= multiplier[k];
            impl_->buf.spec[k][1] *= multiplier[k];
        }
        fftw_execute(impl_->bwd);
        const double scale = 1.0 / static_cast<double>(impl_->nreal);
        for (std::size_t i = 0; i < impl_->nreal; ++i) out[i] = impl_->buf.real[i] * scale;
    }

    void SpectralGrid::apply_complex_multiplier(std::span<const double> in,
                                                std::span<const std::complex<double>> multiplier,
                                                std::span<double> out) const {
        require(in.size() == impl_->nreal && out.size() == impl_->nreal && multiplier.size() == impl_->nspec,
                ErrorCode::InvalidArgument, "spectral multiplier: size mismatch");
        std::copy(in.begin(), in.end(), impl_->buf.real);
        fftw_execute(impl_->fwd);
        for (std::size_t k = 0; k < impl_->nspec; ++k) {
            const std::complex<double> c(impl_->buf.spec[k][0], impl_->buf.spec[k][1]);
            const auto r = c * multiplier[k];
            impl_->buf.spec[k][0] = r.real();
            impl_->buf.spec[k][1] = r.imag();
        }
        fftw_execute(impl_->bwd);
        const double scale = 1.0 / static_cast<double>(impl_->nreal);
        for (std::size_t i = 0; i < impl_->nreal; ++i) out[i] = impl_->buf.real[i] * scale;
    }

    std::vector<double> SpectralGrid::power_decay_multiplier(double tau, double q) const {
        std::vector<double> mult(impl_->nspec);
        for (std::size_t k = 0; k < impl_->nspec; ++k) {
            const double xi2 = impl_->xi2[k];
            mult[k] = (xi2 == 0.0) ? 1.0 : std::exp(-tau * std::pow(xi2, 0.5 * q));
        }
        return mult;
    }

    std::vector<double> linear_convolution_centered(const GridField &a, const GridField &b) {
        require(a.N == b.N && a.n == b.n && a.L == b.L, ErrorCode::InvalidArgument,
                "linear convolution needs identical grids");
        const int N = a.N;
        const int n = a.n;
        const int n2 = 2 * n;
        SpectralGrid pad(N, 2.0 * a.L, n2);
        std::vector<double> pa(pad.real_size(), 0.0), pb(pad.real_size(), 0.0);

        auto padded_flat = [&](const std::array<int, 3> &idx) {
            std::size_t flat = 0;
            for (int d = 0; d < N; ++d) flat = flat * static_cast<std::size_t>(n2) + static_cast<std::size_t>(idx[d]);
            return flat;
        };
        for (std::size_t k = 0; k < a.size(); ++k) {
            const auto idx = a.multi_index(k);
            std::array<int, 3> ca{0, 0, 0}, cb{0, 0, 0};
            for (int d = 0; d < N; ++d) {
                ca[d] = ((idx[d] - n / 2) % n2 + n2) % n2;
                cb[d] = idx[d];
            }
            pa[padded_flat(ca)] = a.values[k];
            pb[padded_flat(cb)] = b.values[k];
        }
        std::vector<std::complex<double>> fa(pad.spectral_size()), fb(pad.spectral_size());
        pad.forward(pa, fa);
        pad.forward(pb, fb);
        for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
        std::vector<double> pc(pad.real_size());
        pad.inverse(fa, pc);

        std::vector<double> out(a.size());
        const double vol = a.cell_volume();
        for (std::size_t k = 0; k < a.size(); ++k) out[k] = pc[padded_flat(a.multi_index(k))] * vol;
        return out;
    }

}  // namespace polyheat
