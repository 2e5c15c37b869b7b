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
 * Re-uploading circuit templates and model evaluation.
 *
 * Products are written left to right as matrices, so the rightmost factor
 * acts first on |0...0>:
 *
 *   YZY   RY(t_0) prod_{j=1..L} RZ(x) RY(t_j)
 *   WZW   RZ(v) W_0 prod_{j=1..L} RZ(x) W_j,   W_j = RY(t_j) RZ(f_j)
 *   UZU   U3_0 prod_{j=1..L} RZ(x) U3_j
 *   MULTIVARIATE_UZU   as UZU, slot j encodes x[layout[j-1]]
 *
 * The parallel-entanglement models act on d qubits and alternate trainable
 * blocks with a layer of RZ(x_q) on every qubit q, starting and ending with
 * a trainable block: T_L S T_{L-1} ... S T_0. Each trainable block holds
 * D_tr sub-blocks. A plain sub-block is one U3 per qubit followed by the
 * CNOT ladder 0->1, 1->2, ..., (d-1)->0. The UTB sub-block (two qubits,
 * 15 angles) is U3 x U3, CX(1->0), RZ x RY, CX(0->1), RY on qubit 1,
 * CX(1->0), U3 x U3.
 *
 * Parameter layout (part of the serialization contract):
 *   YZY    [t_0 .. t_L]
 *   WZW    [v, t_0, f_0, t_1, f_1, ..., t_L, f_L]
 *   U3-based models: (theta, phi, lambda) per U3 in time order of blocks,
 *          then sub-blocks, then qubits; hybrid weights w_1..w_d last.
 * For UZU the U3 blocks are stored by index j = 0..L (not time order) so
 * that index j always multiplies the j-th factor of the product above.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "qsim.hpp"

namespace qnnlab {

enum class Ansatz {
    YZY,
    WZW,
    UZU,
    MULTIVARIATE_UZU,
    PARALLEL_ENTANGLEMENT,
    PARALLEL_ENTANGLEMENT_UTB
};

[[nodiscard]] inline std::string_view ansatz_name(Ansatz a) {
    switch (a) {
    case Ansatz::YZY:
        return "YZY";
    case Ansatz::WZW:
        return "WZW";
    case Ansatz::UZU:
        return "UZU";
    case Ansatz::MULTIVARIATE_UZU:
        return "MULTIVARIATE_UZU";
    case Ansatz::PARALLEL_ENTANGLEMENT:
        return "PARALLEL_ENTANGLEMENT";
    case Ansatz::PARALLEL_ENTANGLEMENT_UTB:
        return "PARALLEL_ENTANGLEMENT_UTB";
    }
    return "?";
}

[[nodiscard]] inline Ansatz parse_ansatz(std::string_view s) {
    for (Ansatz a : {Ansatz::YZY, Ansatz::WZW, Ansatz::UZU, Ansatz::MULTIVARIATE_UZU,
                     Ansatz::PARALLEL_ENTANGLEMENT, Ansatz::PARALLEL_ENTANGLEMENT_UTB}) {
        if (ansatz_name(a) == s) {
            return a;
        }
    }
    throw std::invalid_argument("unknown ansatz '" + std::string(s) + "'");
}

using ParamVector = std::vector<double>;

struct CircuitTemplate {
    Ansatz ansatz = Ansatz::YZY;
    int n_qubits = 1;
    int L = 0;
    int d = 1;
    /// Input dimension per encoding slot (MULTIVARIATE_UZU). Left empty, the
    /// cyclic layout 0, 1, ..., d-1, 0, 1, ... is used.
    std::vector<int> layout;
    int d_tr = 1;
    bool hybrid = false;

    [[nodiscard]] bool single_qubit() const {
        return ansatz == Ansatz::YZY || ansatz == Ansatz::WZW || ansatz == Ansatz::UZU ||
               ansatz == Ansatz::MULTIVARIATE_UZU;
    }

    [[nodiscard]] bool u3_based() const {
        return ansatz != Ansatz::YZY && ansatz != Ansatz::WZW;
    }

    /// Dimension encoded by slot j (1-based, as in the product above).
    [[nodiscard]] int slot_dimension(int j) const {
        if (ansatz != Ansatz::MULTIVARIATE_UZU) {
            return 0;
        }
        return layout.empty() ? (j - 1) % d : layout[static_cast<std::size_t>(j - 1)];
    }

    void validate() const {
        if (n_qubits < 1 || n_qubits > static_cast<int>(StateVector::max_qubits)) {
            throw std::invalid_argument("n_qubits out of range");
        }
        if (L < 0) {
            throw std::invalid_argument("layer count must be non-negative");
        }
        if (d < 1) {
            throw std::invalid_argument("input dimension must be positive");
        }
        if (single_qubit() && n_qubits != 1) {
            throw std::invalid_argument(std::string(ansatz_name(ansatz)) +
                                        " is a single-qubit ansatz");
        }
        if (hybrid && !u3_based()) {
            throw std::invalid_argument("hybrid weights need a U3-based ansatz");
        }
        switch (ansatz) {
        case Ansatz::YZY:
        case Ansatz::WZW:
        case Ansatz::UZU:
            if (d != 1) {
                throw std::invalid_argument("univariate ansatz needs d = 1");
            }
            break;
        case Ansatz::MULTIVARIATE_UZU: {
            if (L % d != 0) {
                throw std::invalid_argument("L must be a multiple of d");
            }
            if (!layout.empty()) {
                if (layout.size() != static_cast<std::size_t>(L)) {
                    throw std::invalid_argument("layout must have one entry per layer");
                }
                std::vector<int> uses(static_cast<std::size_t>(d), 0);
                for (int m : layout) {
                    if (m < 0 || m >= d) {
                        throw std::invalid_argument("layout entry out of range");
                    }
                    ++uses[static_cast<std::size_t>(m)];
                }
                for (int u : uses) {
                    if (u != L / d) {
                        throw std::invalid_argument(
                            "every dimension must be uploaded the same number of times");
                    }
                }
            }
            break;
        }
        case Ansatz::PARALLEL_ENTANGLEMENT:
        case Ansatz::PARALLEL_ENTANGLEMENT_UTB:
            if (n_qubits != d) {
                throw std::invalid_argument("parallel entanglement needs n_qubits = d");
            }
            if (d_tr < 1) {
                throw std::invalid_argument("d_tr must be positive");
            }
            if (ansatz == Ansatz::PARALLEL_ENTANGLEMENT_UTB && n_qubits != 2) {
                throw std::invalid_argument("the UTB block is defined on two qubits");
            }
            break;
        }
    }
};

inline constexpr std::size_t utb_params = 15;

/// Count of gate angles, i.e. parameters obeying the shift rule.
[[nodiscard]] inline std::size_t angle_count(const CircuitTemplate &t) {
    const auto L1 = static_cast<std::size_t>(t.L + 1);
    switch (t.ansatz) {
    case Ansatz::YZY:
        return L1;
    case Ansatz::WZW:
        return 2 * L1 + 1;
    case Ansatz::UZU:
    case Ansatz::MULTIVARIATE_UZU:
        return 3 * L1;
    case Ansatz::PARALLEL_ENTANGLEMENT:
        return 3 * static_cast<std::size_t>(t.n_qubits * t.d_tr) * L1;
    case Ansatz::PARALLEL_ENTANGLEMENT_UTB:
        return utb_params * static_cast<std::size_t>(t.d_tr) * L1;
    }
    return 0;
}

[[nodiscard]] inline std::size_t param_count(const CircuitTemplate &t) {
    return angle_count(t) + (t.hybrid ? static_cast<std::size_t>(t.d) : 0U);
}

/// The R_Z argument w . x of a weighted encoding.
[[nodiscard]] inline double encode_hybrid(std::span<const double> x,
                                          std::span<const double> w) {
    if (x.size() != w.size()) {
        throw std::invalid_argument("encode_hybrid: x and w differ in length");
    }
    return std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
}

namespace detail {

inline std::size_t qidx(int q) { return static_cast<std::size_t>(q); }

/// Emits the gates of the circuit in time order through the sink calls
/// rot(q, axis, k) for RAxis(p[k]), u3(q, k) for U3(p[k], p[k+1], p[k+2]),
/// data(q, m) for RZ(w_m x_m) and cnot(control, target).
template <class Sink> void emit_circuit(const CircuitTemplate &t, Sink &sink) {
    switch (t.ansatz) {
    case Ansatz::YZY:
        for (int j = t.L; j >= 1; --j) {
            sink.rot(0, Axis::Y, qidx(j));
            sink.data(0, 0);
        }
        sink.rot(0, Axis::Y, 0);
        break;
    case Ansatz::WZW:
        for (int j = t.L; j >= 1; --j) {
            sink.rot(0, Axis::Z, qidx(2 * j + 2));
            sink.rot(0, Axis::Y, qidx(2 * j + 1));
            sink.data(0, 0);
        }
        sink.rot(0, Axis::Z, 2);
        sink.rot(0, Axis::Y, 1);
        sink.rot(0, Axis::Z, 0);
        break;
    case Ansatz::UZU:
    case Ansatz::MULTIVARIATE_UZU:
        for (int j = t.L; j >= 1; --j) {
            sink.u3(0, 3 * qidx(j));
            sink.data(0, t.slot_dimension(j));
        }
        sink.u3(0, 0);
        break;
    case Ansatz::PARALLEL_ENTANGLEMENT:
    case Ansatz::PARALLEL_ENTANGLEMENT_UTB: {
        const int n = t.n_qubits;
        const bool utb = t.ansatz == Ansatz::PARALLEL_ENTANGLEMENT_UTB;
        std::size_t k = 0;
        for (int b = 0; b <= t.L; ++b) {
            if (b > 0) {
                for (int q = 0; q < n; ++q) {
                    sink.data(q, q);
                }
            }
            for (int s = 0; s < t.d_tr; ++s) {
                if (utb) {
                    sink.u3(0, k);
                    sink.u3(1, k + 3);
                    sink.cnot(1, 0);
                    sink.rot(0, Axis::Z, k + 6);
                    sink.rot(1, Axis::Y, k + 7);
                    sink.cnot(0, 1);
                    sink.rot(1, Axis::Y, k + 8);
                    sink.cnot(1, 0);
                    sink.u3(0, k + 9);
                    sink.u3(1, k + 12);
                    k += utb_params;
                    continue;
                }
                for (int q = 0; q < n; ++q) {
                    sink.u3(q, k);
                    k += 3;
                }
                if (n > 1) {
                    for (int q = 0; q + 1 < n; ++q) {
                        sink.cnot(q, q + 1);
                    }
                    sink.cnot(n - 1, 0);
                }
            }
        }
        break;
    }
    }
}

/// Weight multiplying x_m in the data gates.
[[nodiscard]] inline double data_weight(const CircuitTemplate &t, std::span<const double> p,
                                        int m) {
    return t.hybrid ? p[angle_count(t) + qidx(m)] : 1.0;
}

struct StateSink {
    const CircuitTemplate &t;
    std::span<const double> p;
    std::span<const double> x;
    StateVector &psi;

    void rot(int q, Axis a, std::size_t k) { psi.apply_single_inplace(rot_gate(a, p[k]), qidx(q)); }
    void u3(int q, std::size_t k) {
        psi.apply_single_inplace(u3_gate(p[k], p[k + 1], p[k + 2]), qidx(q));
    }
    void data(int q, int m) {
        psi.apply_single_inplace(rot_gate(Axis::Z, data_weight(t, p, m) * x[qidx(m)]), qidx(q));
    }
    void cnot(int c, int tq) { psi.apply_cnot_inplace(qidx(c), qidx(tq)); }
};

inline void check_inputs(const CircuitTemplate &t, std::span<const double> params,
                         std::span<const double> x) {
    if (params.size() != param_count(t)) {
        throw std::invalid_argument("expected " + std::to_string(param_count(t)) +
                                    " parameters, got " + std::to_string(params.size()));
    }
    if (x.size() != static_cast<std::size_t>(t.d)) {
        throw std::invalid_argument("expected input of dimension " + std::to_string(t.d));
    }
    for (double v : x) {
        require_finite(v, "input");
    }
    for (double v : params) {
        require_finite(v, "parameter");
    }
}

} // namespace detail

/// Output state U(x)|0...0>.
[[nodiscard]] inline StateVector run_circuit(const CircuitTemplate &t,
                                             std::span<const double> params,
                                             std::span<const double> x) {
    detail::check_inputs(t, params, x);
    StateVector psi(static_cast<std::size_t>(t.n_qubits));
    detail::StateSink sink{t, params, x, psi};
    detail::emit_circuit(t, sink);
    return psi;
}

/// <obs> on U(x)|0...0>; the default observable is Z on qubit 0.
[[nodiscard]] inline double evaluate(const CircuitTemplate &t, std::span<const double> params,
                                     std::span<const double> x) {
    const StateVector psi = run_circuit(t, params, x);
    return expect(psi, Observable::z_on(0, psi.num_qubits()));
}

[[nodiscard]] inline double evaluate(const CircuitTemplate &t, std::span<const double> params,
                                     std::span<const double> x, const Observable &obs) {
    return expect(run_circuit(t, params, x), obs);
}

/// One simulation, several observables.
[[nodiscard]] inline std::vector<double> evaluate_many(const CircuitTemplate &t,
                                                       std::span<const double> params,
                                                       std::span<const double> x,
                                                       const std::vector<Observable> &obs) {
    const StateVector psi = run_circuit(t, params, x);
    std::vector<double> out;
    out.reserve(obs.size());
    for (const auto &o : obs) {
        out.push_back(expect(psi, o));
    }
    return out;
}

/// Dense row-major 2^n x 2^n matrix of U(x); n <= 3.
[[nodiscard]] inline std::vector<Complex> build_unitary(const CircuitTemplate &t,
                                                        std::span<const double> params,
                                                        std::span<const double> x) {
    if (t.n_qubits > 3) {
        throw std::invalid_argument("build_unitary supports at most 3 qubits");
    }
    detail::check_inputs(t, params, x);
    const auto n = static_cast<std::size_t>(t.n_qubits);
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> u(dim * dim);
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector psi = StateVector::basis(n, col);
        detail::StateSink sink{t, params, x, psi};
        detail::emit_circuit(t, sink);
        for (std::size_t row = 0; row < dim; ++row) {
            u[row * dim + col] = psi[row];
        }
    }
    return u;
}

} // namespace qnnlab
