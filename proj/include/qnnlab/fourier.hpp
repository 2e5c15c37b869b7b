// Copyright 2026 The qnnlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Truncated Fourier series and multidimensional spectra of sampled models.
 *
 * Series use the exponent convention f(x) = sum_n c_n e^{i 2 pi n x / T},
 * c_n = (1/T) int_T f(x) e^{-i 2 pi n x / T} dx.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "qsim.hpp"

namespace qnnlab {

/// Partial sum sum_{|n| <= K} c_n e^{i 2 pi n x / T}.
struct FourierSeries {
    int K = 0;
    double period = 2.0 * std::numbers::pi;
    std::vector<Complex> coeffs = std::vector<Complex>(1, Complex{});

    FourierSeries() = default;
    explicit FourierSeries(int order, double T = 2.0 * std::numbers::pi)
        : K(order), period(T), coeffs(static_cast<std::size_t>(2 * order + 1), Complex{}) {
        if (order < 0) {
            throw std::invalid_argument("series order must be non-negative");
        }
        if (!(T > 0.0) || !std::isfinite(T)) {
            throw std::invalid_argument("period must be positive");
        }
    }

    [[nodiscard]] Complex coeff(int n) const noexcept {
        if (n < -K || n > K) {
            return Complex{};
        }
        return coeffs[static_cast<std::size_t>(n + K)];
    }
    Complex &coeff_ref(int n) { return coeffs.at(static_cast<std::size_t>(n + K)); }

    /// c_{-n} = conj(c_n) for every n, so the series is real-valued.
    [[nodiscard]] bool is_real_valued(double tol = 1e-10) const noexcept {
        for (int n = 0; n <= K; ++n) {
            if (std::abs(coeff(-n) - std::conj(coeff(n))) > tol) {
                return false;
            }
        }
        return true;
    }

    /// Real, even coefficients: c_n = c_{-n} in R.
    [[nodiscard]] bool is_real_even(double tol = 1e-10) const noexcept {
        for (int n = 0; n <= K; ++n) {
            if (std::abs(coeff(n).imag()) > tol ||
                std::abs(coeff(n) - coeff(-n)) > tol) {
                return false;
            }
        }
        return true;
    }
};

[[nodiscard]] inline Complex eval_series(const FourierSeries &s, double x) {
    const double omega = 2.0 * std::numbers::pi / s.period;
    const Complex step = std::polar(1.0, omega * x);
    Complex acc = s.coeff(0);
    Complex up{1.0};
    for (int n = 1; n <= s.K; ++n) {
        up *= step;
        acc += s.coeff(n) * up + s.coeff(-n) * std::conj(up);
    }
    return acc;
}

/// Trapezoidal node count for order K: max(16384, 64 K). Targets whose
/// periodic extension has a kink (sinc on [-pi, pi]) converge only as
/// N^-2; 4096 nodes leave ~2e-8 coefficient error there, 16384 ~1e-9.
[[nodiscard]] inline std::size_t quadrature_points(int K) {
    return std::max<std::size_t>(16384, 64 * static_cast<std::size_t>(std::max(K, 0)));
}

/// Projects samples taken at x_j = -T/2 + j T / N onto orders |n| <= K.
[[nodiscard]] inline FourierSeries project_samples(std::span<const double> samples, int K,
                                                   double period = 2.0 * std::numbers::pi) {
    FourierSeries s(K, period);
    const std::size_t N = samples.size();
    if (N < static_cast<std::size_t>(2 * K + 1)) {
        throw std::invalid_argument("too few samples for the requested order");
    }
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw DataError("non-finite sample in Fourier projection");
        }
    }
    // Node j sits at phase -pi + 2 pi j / N relative to the base frequency.
    for (int n = 0; n <= K; ++n) {
        Complex acc{};
        const double dphi = 2.0 * std::numbers::pi * n / static_cast<double>(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double phase = -n * (-std::numbers::pi) - dphi * static_cast<double>(j);
            acc += samples[j] * Complex{std::cos(phase), std::sin(phase)};
        }
        acc /= static_cast<double>(N);
        s.coeff_ref(n) = acc;
        if (n > 0) {
            s.coeff_ref(-n) = std::conj(acc);
        }
    }
    s.coeff_ref(0) = Complex{s.coeff(0).real()};
    return s;
}

/// Uniform trapezoidal projection of a real function over one period
/// [-T/2, T/2).
[[nodiscard]] inline FourierSeries project(const std::function<double(double)> &f, int K,
                                           double period = 2.0 * std::numbers::pi) {
    if (K < 0) {
        throw std::invalid_argument("series order must be non-negative");
    }
    const std::size_t N = quadrature_points(K);
    std::vector<double> samples(N);
    for (std::size_t j = 0; j < N; ++j) {
        samples[j] = f(-period / 2.0 + period * static_cast<double>(j) / static_cast<double>(N));
    }
    return project_samples(samples, K, period);
}

/// sup |s(x) - f(x)| on 2048 points. Without an interval the grid covers one
/// period [-T/2, T/2); with one it is the inclusive linspace over [a, b].
[[nodiscard]] inline double truncation_error(const std::function<double(double)> &f,
                                             const FourierSeries &s) {
    constexpr std::size_t n = 2048;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = -s.period / 2.0 + s.period * static_cast<double>(j) / n;
        worst = std::max(worst, std::abs(eval_series(s, x) - f(x)));
    }
    return worst;
}

[[nodiscard]] inline double truncation_error(const std::function<double(double)> &f,
                                             const FourierSeries &s, double a, double b) {
    constexpr std::size_t n = 2048;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = a + (b - a) * static_cast<double>(j) / (n - 1);
        worst = std::max(worst, std::abs(eval_series(s, x) - f(x)));
    }
    return worst;
}

/// The frequency lattice {-K..K}^d of a model uploading each of d inputs K
/// times, against the 3(Kd + 1) real parameters of the single-qubit U3 model.
struct SpectrumSpec {
    int d = 1;
    int K = 1;
    long long omega_size = 0;
    long long dof = 0;

    /// Enumerates Omega in lexicographic order (dimension 0 slowest).
    [[nodiscard]] std::vector<std::vector<int>> omega() const {
        std::vector<std::vector<int>> out;
        out.reserve(static_cast<std::size_t>(omega_size));
        std::vector<int> w(static_cast<std::size_t>(d), -K);
        for (long long idx = 0; idx < omega_size; ++idx) {
            out.push_back(w);
            for (int m = d - 1; m >= 0; --m) {
                auto &wm = w[static_cast<std::size_t>(m)];
                if (++wm <= K) {
                    break;
                }
                wm = -K;
            }
        }
        return out;
    }
};

[[nodiscard]] inline SpectrumSpec spectrum_spec(int d, int K) {
    if (d < 1 || K < 1) {
        throw std::invalid_argument("spectrum_spec needs d >= 1 and K >= 1");
    }
    SpectrumSpec s;
    s.d = d;
    s.K = K;
    s.omega_size = 1;
    for (int i = 0; i < d; ++i) {
        s.omega_size *= (2 * K + 1);
    }
    s.dof = 3LL * (static_cast<long long>(K) * d + 1);
    return s;
}

namespace detail {

inline bool is_pow2(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 DFT, X_k = sum_j x_j e^{-2 pi i jk / n}, over
/// elements data[offset + j * stride].
inline void fft_strided(std::vector<Complex> &data, std::size_t offset, std::size_t stride,
                        std::size_t n) {
    std::vector<Complex> a(n);
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = data[offset + j * stride];
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; (j & bit) != 0U; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = std::polar(1.0, ang * static_cast<double>(k));
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        data[offset + j * stride] = a[j];
    }
}

} // namespace detail

/// Fourier coefficients of a sampled d-dimensional model on the frequency
/// box {-g/2 .. g/2 - 1}^d, stored row-major with dimension 0 slowest.
struct SpectrumGrid {
    int d = 1;
    int grid = 2;
    std::vector<Complex> data;

    [[nodiscard]] std::size_t index_of(std::span<const int> freq) const {
        std::size_t idx = 0;
        for (int m = 0; m < d; ++m) {
            const int f = freq[static_cast<std::size_t>(m)];
            if (f < -grid / 2 || f >= grid / 2) {
                throw std::out_of_range("frequency outside the sampled box");
            }
            idx = idx * static_cast<std::size_t>(grid) +
                  static_cast<std::size_t>((f + grid) % grid);
        }
        return idx;
    }

    [[nodiscard]] Complex at(std::span<const int> freq) const { return data[index_of(freq)]; }

    /// Frequency vector of flat index `idx`.
    [[nodiscard]] std::vector<int> frequency(std::size_t idx) const {
        std::vector<int> f(static_cast<std::size_t>(d));
        for (int m = d - 1; m >= 0; --m) {
            const int k = static_cast<int>(idx % static_cast<std::size_t>(grid));
            idx /= static_cast<std::size_t>(grid);
            f[static_cast<std::size_t>(m)] = (k < grid / 2) ? k : k - grid;
        }
        return f;
    }

    /// Largest |c_w| over bins with some |w_m| > K.
    [[nodiscard]] double max_outside(int K) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto f = frequency(i);
            const bool outside =
                std::any_of(f.begin(), f.end(), [K](int v) { return std::abs(v) > K; });
            if (outside) {
                worst = std::max(worst, std::abs(data[i]));
            }
        }
        return worst;
    }
};

/// Samples `model` on the grid x_j = -pi + 2 pi j / g in each dimension and
/// returns its discrete Fourier coefficients (1/g^d) sum f(x) e^{-i w.x}.
///
/// `max_frequency`, when positive, is the largest per-dimension frequency the
/// caller expects; grids too coarse to resolve it are rejected.
[[nodiscard]] inline SpectrumGrid
empirical_spectrum(const std::function<double(std::span<const double>)> &model, int d,
                   int grid_size, int max_frequency = 0) {
    if (d < 1 || d > 3) {
        throw std::invalid_argument("empirical_spectrum supports 1 <= d <= 3");
    }
    if (grid_size < 2 || !detail::is_pow2(static_cast<std::size_t>(grid_size))) {
        throw std::invalid_argument("grid size must be a power of two");
    }
    if (max_frequency > 0 && grid_size < 2 * max_frequency + 2) {
        throw std::invalid_argument("grid too small: frequencies would alias");
    }
    const auto g = static_cast<std::size_t>(grid_size);
    std::size_t total = 1;
    for (int m = 0; m < d; ++m) {
        total *= g;
    }
    SpectrumGrid out;
    out.d = d;
    out.grid = grid_size;
    out.data.assign(total, Complex{});

    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (int m = d - 1; m >= 0; --m) {
            const std::size_t j = rem % g;
            rem /= g;
            x[static_cast<std::size_t>(m)] =
                -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / grid_size;
        }
        const double v = model(x);
        if (!std::isfinite(v)) {
            throw DataError("model returned a non-finite value");
        }
        out.data[idx] = v;
    }

    // Row-column transform: one pass of 1-D FFTs per dimension.
    std::size_t stride = 1;
    for (int m = d - 1; m >= 0; --m) {
        const std::size_t block = stride * g;
        for (std::size_t outer = 0; outer < total; outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                detail::fft_strided(out.data, outer + inner, stride, g);
            }
        }
        stride = block;
    }

    // The grid starts at -pi, so each bin carries a factor e^{i w pi} = (-1)^w.
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const auto f = out.frequency(idx);
        int parity = 0;
        for (int v : f) {
            parity += v;
        }
        out.data[idx] *= ((parity % 2 == 0) ? scale : -scale);
    }
    return out;
}

} // namespace qnnlab
