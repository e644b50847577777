#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace polyheat {

    /// A real function sampled on the periodic box [-L, L)^N with n points per
    /// axis. Node i on an axis sits at -L + i * (2L / n); storage is row-major
    /// with the last axis fastest.
    struct GridField {
        int N = 1;
        double L = 1.0;
        int n = 16;
        std::vector<double> values;
        std::optional<double> time;

        GridField() = default;
        GridField(int N_, double L_, int n_);

        /// n >= 16, power of two, L > 0, N in 1..3, finite values.
        void validate() const;

        [[nodiscard]] std::size_t size() const { return values.size(); }
        [[nodiscard]] double dx() const { return 2.0 * L / n; }
        [[nodiscard]] double cell_volume() const;
        [[nodiscard]] double coordinate(int i) const { return -L + i * dx(); }

        /// Point of the flat index `flat` (unused trailing components are zero).
        [[nodiscard]] std::array<double, 3> point(std::size_t flat) const;
        [[nodiscard]] std::array<int, 3> multi_index(std::size_t flat) const;
        [[nodiscard]] std::size_t flat_index(const std::array<int, 3> &idx) const;

        [[nodiscard]] double sup_norm() const;
        [[nodiscard]] double mean() const;
        [[nodiscard]] double integral() const;

        /// Fill with f(point) at every node.
        void fill(const std::function<double(std::span<const double>)> &f);
    };

    bool is_power_of_two(int n);

    /// FFT-backed Fourier multipliers on a fixed periodic grid. Plans are built
    /// once with FFTW_ESTIMATE so repeated runs are bitwise reproducible.
    class SpectralGrid {
    public:
        SpectralGrid(int N, double L, int n);
        ~SpectralGrid();
        SpectralGrid(const SpectralGrid &) = delete;
        SpectralGrid &operator=(const SpectralGrid &) = delete;
        SpectralGrid(SpectralGrid &&) noexcept;
        SpectralGrid &operator=(SpectralGrid &&) noexcept;

        [[nodiscard]] int N() const;
        [[nodiscard]] double L() const;
        [[nodiscard]] int n() const;
        [[nodiscard]] std::size_t real_size() const;
        [[nodiscard]] std::size_t spectral_size() const;

        /// |xi|^2 for every retained spectral coefficient (r2c layout).
        [[nodiscard]] const std::vector<double> &xi_squared() const;
        /// Wave vector of spectral coefficient `k` (r2c layout).
        [[nodiscard]] std::array<double, 3> wave_vector(std::size_t k) const;
        /// True when some component of coefficient `k` is the Nyquist mode.
        [[nodiscard]] bool is_nyquist(std::size_t k) const;

        /// out = IFFT(multiplier .* FFT(in)); multiplier has spectral_size() entries.
        void apply_real_multiplier(std::span<const double> in, std::span<const double> multiplier,
                                   std::span<double> out) const;
        void apply_complex_multiplier(std::span<const double> in,
                                      std::span<const std::complex<double>> multiplier,
                                      std::span<double> out) const;

        /// Returns the inverse transform of the given spectral coefficients
        /// (already scaled as Fourier-series coefficients times n^N).
        void inverse(std::span<const std::complex<double>> coeffs, std::span<double> out) const;
        void forward(std::span<const double> in, std::span<std::complex<double>> coeffs) const;

        /// Multiplier e^{-tau |xi|^q} in r2c layout.
        [[nodiscard]] std::vector<double> power_decay_multiplier(double tau, double q) const;

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
    };

    /// Linear (non-periodic) convolution of two fields sampled on the same box,
    /// computed with zero padding:  out(x_i) = sum_j a(x_i - x_j) b(x_j) dx^N,
    /// where `a` is treated as centred (a(0) stored at the node of x = 0).
    std::vector<double> linear_convolution_centered(const GridField &a, const GridField &b);

}  // namespace polyheat
