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
 * Laurent polynomials in w = e^{ix/2}.
 *
 * Exponent k stands for w^k = e^{ikx/2}, so an integer frequency n of
 * e^{inx} lives at exponent 2n. Coefficients are stored densely over
 * [-D, D].
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <initializer_list>
#include <utility>
#include <vector>

#include "qsim.hpp"

namespace qnnlab {

/// Coefficients below this magnitude do not count towards degree or parity.
inline constexpr double laurent_zero_tol = 1e-14;

enum class Parity { Even = 0, Odd = 1, Mixed = 2 };

class LaurentPoly {
  public:
    LaurentPoly() : coeffs_(1, Complex{}) {}

    /// Zero polynomial with storage for exponents in [-max_exp, max_exp].
    explicit LaurentPoly(int max_exp)
        : max_exp_(std::max(max_exp, 0)),
          coeffs_(static_cast<std::size_t>(2 * max_exp_ + 1), Complex{}) {}

    LaurentPoly(std::initializer_list<std::pair<int, Complex>> terms) : LaurentPoly() {
        for (const auto &[k, c] : terms) {
            set(k, coeff(k) + c);
        }
    }

    [[nodiscard]] static LaurentPoly constant(Complex c) {
        LaurentPoly p;
        p.coeffs_[0] = c;
        return p;
    }

    /// The monomial c * w^k.
    [[nodiscard]] static LaurentPoly monomial(int k, Complex c = 1.0) {
        LaurentPoly p(std::abs(k));
        p.set(k, c);
        return p;
    }

    [[nodiscard]] int max_exponent() const noexcept { return max_exp_; }

    [[nodiscard]] Complex coeff(int k) const noexcept {
        if (k < -max_exp_ || k > max_exp_) {
            return Complex{};
        }
        return coeffs_[static_cast<std::size_t>(k + max_exp_)];
    }

    void set(int k, Complex c) {
        if (std::abs(k) > max_exp_) {
            grow(std::abs(k));
        }
        coeffs_[static_cast<std::size_t>(k + max_exp_)] = c;
    }

    /// Largest |k| with |c_k| >= tol; the zero polynomial has degree 0.
    [[nodiscard]] int degree(double tol = laurent_zero_tol) const noexcept {
        for (int k = max_exp_; k > 0; --k) {
            if (std::abs(coeff(k)) >= tol || std::abs(coeff(-k)) >= tol) {
                return k;
            }
        }
        return 0;
    }

    [[nodiscard]] double max_abs_coeff() const noexcept {
        double m = 0.0;
        for (const auto &c : coeffs_) {
            m = std::max(m, std::abs(c));
        }
        return m;
    }

    [[nodiscard]] bool is_zero(double tol = laurent_zero_tol) const noexcept {
        return max_abs_coeff() < tol;
    }

    [[nodiscard]] bool is_real(double tol = laurent_zero_tol) const noexcept {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [tol](const Complex &c) { return std::abs(c.imag()) < tol; });
    }

    /// sum_k c_k e^{ikx/2}
    [[nodiscard]] Complex operator()(double x) const {
        // Walk outward from exponent 0 with two phasors rather than calling
        // polar() per term.
        const Complex step = std::polar(1.0, x / 2.0);
        Complex up{1.0};
        Complex down{1.0};
        Complex acc = coeff(0);
        for (int k = 1; k <= max_exp_; ++k) {
            up *= step;
            down = std::conj(up);
            acc += coeff(k) * up + coeff(-k) * down;
        }
        return acc;
    }

    /// Multiply by w^k.
    [[nodiscard]] LaurentPoly shifted(int k) const {
        LaurentPoly r(max_exp_ + std::abs(k));
        for (int j = -max_exp_; j <= max_exp_; ++j) {
            r.set(j + k, coeff(j));
        }
        return r;
    }

    /// Drops storage beyond `max_exp`.
    [[nodiscard]] LaurentPoly truncated(int max_exp) const {
        LaurentPoly r(std::min(max_exp, max_exp_));
        for (int j = -r.max_exp_; j <= r.max_exp_; ++j) {
            r.set(j, coeff(j));
        }
        return r;
    }

    /// Shrinks storage to the degree at tolerance `tol`.
    [[nodiscard]] LaurentPoly trimmed(double tol = laurent_zero_tol) const {
        return truncated(degree(tol));
    }

    /// Zeroes the imaginary part of every coefficient.
    [[nodiscard]] LaurentPoly real_part() const {
        LaurentPoly r = *this;
        for (auto &c : r.coeffs_) {
            c = Complex{c.real()};
        }
        return r;
    }

    LaurentPoly &operator+=(const LaurentPoly &o) {
        if (o.max_exp_ > max_exp_) {
            grow(o.max_exp_);
        }
        for (int k = -o.max_exp_; k <= o.max_exp_; ++k) {
            coeffs_[static_cast<std::size_t>(k + max_exp_)] += o.coeff(k);
        }
        return *this;
    }

    LaurentPoly &operator-=(const LaurentPoly &o) { return *this += (-1.0) * o; }

    LaurentPoly &operator*=(Complex s) {
        for (auto &c : coeffs_) {
            c *= s;
        }
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly &b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly &b) { return a -= b; }
    friend LaurentPoly operator*(Complex s, LaurentPoly a) { return a *= s; }
    friend LaurentPoly operator*(double s, LaurentPoly a) { return a *= Complex{s}; }

    [[nodiscard]] const std::vector<Complex> &dense() const noexcept { return coeffs_; }

  private:
    void grow(int new_max) {
        std::vector<Complex> c(static_cast<std::size_t>(2 * new_max + 1), Complex{});
        for (int k = -max_exp_; k <= max_exp_; ++k) {
            c[static_cast<std::size_t>(k + new_max)] = coeff(k);
        }
        coeffs_ = std::move(c);
        max_exp_ = new_max;
    }

    int max_exp_ = 0;
    std::vector<Complex> coeffs_;
};

[[nodiscard]] inline Complex eval(const LaurentPoly &p, double x) { return p(x); }

/// Coefficient convolution.
[[nodiscard]] inline LaurentPoly mul(const LaurentPoly &a, const LaurentPoly &b) {
    const int da = a.max_exponent();
    const int db = b.max_exponent();
    LaurentPoly r(da + db);
    std::vector<Complex> acc(static_cast<std::size_t>(2 * (da + db) + 1), Complex{});
    for (int i = -da; i <= da; ++i) {
        const Complex ai = a.coeff(i);
        if (ai == Complex{}) {
            continue;
        }
        for (int j = -db; j <= db; ++j) {
            acc[static_cast<std::size_t>(i + j + da + db)] += ai * b.coeff(j);
        }
    }
    for (int k = -(da + db); k <= da + db; ++k) {
        r.set(k, acc[static_cast<std::size_t>(k + da + db)]);
    }
    return r;
}

/// P* with P*(x) = conj(P(x)) for real x: c*_k = conj(c_{-k}).
[[nodiscard]] inline LaurentPoly conj_reflect(const LaurentPoly &p) {
    const int d = p.max_exponent();
    LaurentPoly r(d);
    for (int k = -d; k <= d; ++k) {
        r.set(k, std::conj(p.coeff(-k)));
    }
    return r;
}

/// Parity of the exponents carrying non-negligible coefficients. The zero
/// polynomial reports Even.
[[nodiscard]] inline Parity parity_of(const LaurentPoly &p) {
    bool even = false;
    bool odd = false;
    for (int k = -p.max_exponent(); k <= p.max_exponent(); ++k) {
        if (std::abs(p.coeff(k)) >= laurent_zero_tol) {
            ((k % 2 == 0) ? even : odd) = true;
        }
    }
    if (even && odd) {
        return Parity::Mixed;
    }
    return odd ? Parity::Odd : Parity::Even;
}

/// Largest coefficient difference over the union of supports.
[[nodiscard]] inline double max_coeff_diff(const LaurentPoly &a, const LaurentPoly &b) {
    const int d = std::max(a.max_exponent(), b.max_exponent());
    double m = 0.0;
    for (int k = -d; k <= d; ++k) {
        m = std::max(m, std::abs(a.coeff(k) - b.coeff(k)));
    }
    return m;
}

/// The (P, Q) filling the single-qubit unitary [[P, -Q], [Q*, P*]].
struct PolyPair {
    LaurentPoly P;
    LaurentPoly Q;
    int L = 0;
};

/// Points x_j = -2pi + 4pi j / n, j < n: one full period of w.
[[nodiscard]] inline std::vector<double> validation_grid(std::size_t n = 1024) {
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) {
        xs[j] = -2.0 * std::numbers::pi +
                4.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    }
    return xs;
}

/// max over the validation grid of | |P|^2 + |Q|^2 - 1 |.
[[nodiscard]] inline double unit_modulus_residual(const LaurentPoly &P, const LaurentPoly &Q,
                                                  std::size_t n = 1024) {
    double worst = 0.0;
    for (double x : validation_grid(n)) {
        worst = std::max(worst, std::abs(std::norm(P(x)) + std::norm(Q(x)) - 1.0));
    }
    return worst;
}

/// The matrix [[P, -Q], [Q*, P*]] at x.
[[nodiscard]] inline Unitary2 assemble(const PolyPair &pq, double x) {
    const Complex p = pq.P(x);
    const Complex q = pq.Q(x);
    Unitary2 u;
    u.m = {p, -q, std::conj(q), std::conj(p)};
    return u;
}

} // namespace qnnlab
