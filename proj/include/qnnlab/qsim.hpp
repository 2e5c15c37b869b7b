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
 * Exact statevector simulation for small circuits built from Pauli
 * rotations, generic U3 rotations and CNOT.
 *
 * Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of
 * the amplitude index. Global phase is kept as-is; only expectation values
 * are treated as physical outputs.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace qnnlab {

using Complex = std::complex<double>;

enum class Axis { X, Y, Z };
enum class Pauli { I, X, Y, Z };

inline void require_finite(double v, const char *what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

/// Row-major 2x2 complex matrix.
struct Unitary2 {
    std::array<Complex, 4> m{Complex{1.0}, Complex{}, Complex{}, Complex{1.0}};

    [[nodiscard]] constexpr Complex &operator()(std::size_t r, std::size_t c) {
        return m[2 * r + c];
    }
    [[nodiscard]] constexpr const Complex &operator()(std::size_t r,
                                                      std::size_t c) const {
        return m[2 * r + c];
    }

    [[nodiscard]] static Unitary2 identity() { return {}; }

    [[nodiscard]] Unitary2 adjoint() const {
        Unitary2 a;
        a(0, 0) = std::conj(m[0]);
        a(0, 1) = std::conj(m[2]);
        a(1, 0) = std::conj(m[1]);
        a(1, 1) = std::conj(m[3]);
        return a;
    }

    [[nodiscard]] Complex det() const { return m[0] * m[3] - m[1] * m[2]; }

    friend Unitary2 operator*(const Unitary2 &a, const Unitary2 &b) {
        Unitary2 c;
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
            }
        }
        return c;
    }

    friend Unitary2 operator*(Complex s, Unitary2 a) {
        for (auto &v : a.m) {
            v *= s;
        }
        return a;
    }
};

/// Largest entrywise deviation of G^dagger G from the identity.
[[nodiscard]] inline double unitarity_defect(const Unitary2 &g) {
    const Unitary2 p = g.adjoint() * g;
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const Complex target = (i == j) ? Complex{1.0} : Complex{};
            worst = std::max(worst, std::abs(p(i, j) - target));
        }
    }
    return worst;
}

/// exp(-i * angle * P / 2) for the Pauli matrix on `axis`.
[[nodiscard]] inline Unitary2 rot_gate(Axis axis, double angle) {
    require_finite(angle, "rotation angle");
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    Unitary2 g;
    switch (axis) {
    case Axis::X:
        g.m = {Complex{c}, Complex{0.0, -s}, Complex{0.0, -s}, Complex{c}};
        break;
    case Axis::Y:
        g.m = {Complex{c}, Complex{-s}, Complex{s}, Complex{c}};
        break;
    case Axis::Z:
        g.m = {std::polar(1.0, -angle / 2.0), Complex{}, Complex{},
               std::polar(1.0, angle / 2.0)};
        break;
    }
    return g;
}

/// Generic rotation
///   [[cos(t/2), -e^{i lam} sin(t/2)], [e^{i phi} sin(t/2), e^{i(phi+lam)} cos(t/2)]].
///
/// Equals e^{i(phi+lam)/2} RZ(phi) RY(theta) RZ(lam); training relies on that
/// factorisation for the parameter-shift rule.
[[nodiscard]] inline Unitary2 u3_gate(double theta, double phi, double lam) {
    require_finite(theta, "theta");
    require_finite(phi, "phi");
    require_finite(lam, "lambda");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Unitary2 g;
    // std::polar needs a non-negative modulus, and c, s may be negative.
    g.m = {Complex{c}, -s * std::polar(1.0, lam), s * std::polar(1.0, phi),
           c * std::polar(1.0, phi + lam)};
    return g;
}

class StateVector {
  public:
    static constexpr std::size_t max_qubits = 16;

    /// |0...0> on `n` qubits.
    explicit StateVector(std::size_t n) : n_(n) {
        if (n == 0 || n > max_qubits) {
            throw std::invalid_argument("qubit count must be in [1, 16]");
        }
        amp_.assign(std::size_t{1} << n, Complex{});
        amp_[0] = 1.0;
    }

    /// Takes ownership of `amplitudes`; length must be a power of two and the
    /// vector must be normalised to within 1e-10.
    [[nodiscard]] static StateVector from_amplitudes(std::vector<Complex> amplitudes) {
        std::size_t n = 0;
        while ((std::size_t{1} << n) < amplitudes.size()) {
            ++n;
        }
        if (amplitudes.size() < 2 || (std::size_t{1} << n) != amplitudes.size()) {
            throw std::invalid_argument(
                "amplitude count must be a power of two >= 2");
        }
        StateVector s(n);
        s.amp_ = std::move(amplitudes);
        if (std::abs(s.norm() - 1.0) > 1e-10) {
            throw std::invalid_argument("state vector is not normalised");
        }
        return s;
    }

    /// Computational basis state |index>.
    [[nodiscard]] static StateVector basis(std::size_t n, std::size_t index) {
        StateVector s(n);
        if (index >= s.amp_.size()) {
            throw std::out_of_range("basis index out of range");
        }
        s.amp_[0] = 0.0;
        s.amp_[index] = 1.0;
        return s;
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return amp_.size(); }
    [[nodiscard]] const std::vector<Complex> &amplitudes() const noexcept {
        return amp_;
    }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amp_[i]; }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &a : amp_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    /// Mask selecting `qubit` in an amplitude index.
    [[nodiscard]] std::size_t bit(std::size_t qubit) const noexcept {
        return std::size_t{1} << (n_ - 1 - qubit);
    }

    /// In-place variant used by the model evaluators.
    void apply_single_inplace(const Unitary2 &g, std::size_t target) {
        if (target >= n_) {
            throw std::out_of_range("target qubit out of range");
        }
        const std::size_t mask = bit(target);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if ((i & mask) != 0U) {
                continue;
            }
            const Complex a0 = amp_[i];
            const Complex a1 = amp_[i | mask];
            amp_[i] = g(0, 0) * a0 + g(0, 1) * a1;
            amp_[i | mask] = g(1, 0) * a0 + g(1, 1) * a1;
        }
    }

    void apply_cnot_inplace(std::size_t control, std::size_t target) {
        if (control >= n_ || target >= n_ || control == target) {
            throw std::invalid_argument(
                "CNOT needs distinct control and target qubits in range");
        }
        const std::size_t cm = bit(control);
        const std::size_t tm = bit(target);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if ((i & cm) != 0U && (i & tm) == 0U) {
                std::swap(amp_[i], amp_[i | tm]);
            }
        }
    }

  private:
    std::size_t n_;
    std::vector<Complex> amp_;
};

/// Tensor product of Pauli factors, one per qubit (factor 0 acts on qubit 0).
class Observable {
  public:
    explicit Observable(std::vector<Pauli> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) {
            throw std::invalid_argument("observable needs at least one factor");
        }
    }

    /// Parses strings such as "ZII" or "XY".
    [[nodiscard]] static Observable parse(std::string_view s) {
        std::vector<Pauli> f;
        f.reserve(s.size());
        for (char ch : s) {
            switch (ch) {
            case 'I': f.push_back(Pauli::I); break;
            case 'X': f.push_back(Pauli::X); break;
            case 'Y': f.push_back(Pauli::Y); break;
            case 'Z': f.push_back(Pauli::Z); break;
            default:
                throw std::invalid_argument("unknown Pauli factor '" +
                                            std::string(1, ch) + "'");
            }
        }
        return Observable(std::move(f));
    }

    /// Z on `qubit`, identity elsewhere.
    [[nodiscard]] static Observable z_on(std::size_t qubit, std::size_t n) {
        if (qubit >= n) {
            throw std::out_of_range("observable qubit out of range");
        }
        std::vector<Pauli> f(n, Pauli::I);
        f[qubit] = Pauli::Z;
        return Observable(std::move(f));
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return factors_.size(); }
    [[nodiscard]] const std::vector<Pauli> &factors() const noexcept { return factors_; }

    [[nodiscard]] std::string str() const {
        std::string s;
        for (Pauli p : factors_) {
            s += "IXYZ"[static_cast<int>(p)];
        }
        return s;
    }

  private:
    std::vector<Pauli> factors_;
};

[[nodiscard]] inline StateVector apply_single(StateVector state, const Unitary2 &gate,
                                              std::size_t target) {
    state.apply_single_inplace(gate, target);
    return state;
}

[[nodiscard]] inline StateVector apply_cnot(StateVector state, std::size_t control,
                                            std::size_t target) {
    state.apply_cnot_inplace(control, target);
    return state;
}

/// <psi|M|psi> for a Pauli product M.
[[nodiscard]] inline double expect(const StateVector &state, const Observable &obs) {
    const std::size_t n = state.num_qubits();
    if (obs.num_qubits() != n) {
        throw std::invalid_argument("observable and state qubit counts differ");
    }
    std::size_t flip = 0;
    std::size_t zmask = 0;
    std::size_t ymask = 0;
    std::size_t ycount = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t b = state.bit(q);
        switch (obs.factors()[q]) {
        case Pauli::I: break;
        case Pauli::X: flip |= b; break;
        case Pauli::Y:
            flip |= b;
            ymask |= b;
            ++ycount;
            break;
        case Pauli::Z: zmask |= b; break;
        }
    }
    // M|i> = i^ycount * (-1)^{popcount(i & (zmask|ymask))} |i ^ flip>
    // (Y|0> = i|1>, Y|1> = -i|0>).
    static constexpr std::array<Complex, 4> ipow{Complex{1, 0}, Complex{0, 1},
                                                 Complex{-1, 0}, Complex{0, -1}};
    const Complex global = ipow[ycount % 4];
    const std::size_t sign_mask = zmask | ymask;
    const auto &a = state.amplitudes();
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool odd = (__builtin_popcountll(i & sign_mask) & 1) != 0;
        const Complex term = std::conj(a[i ^ flip]) * a[i];
        acc += odd ? -term : term;
    }
    acc *= global;
    if (std::abs(acc.imag()) > 1e-12) {
        throw NumericalError("expectation value has imaginary residue " +
                             std::to_string(acc.imag()));
    }
    return acc.real();
}

} // namespace qnnlab
