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
 * MSE training of circuit templates: parameter-shift gradients, Adam,
 * multi-instance fitting, classification heads and PCA.
 *
 * A target row of length c is compared with <Z_0>, ..., <Z_{c-1}>; scalar
 * regression is the case c = 1. One training iteration is one pass over
 * the training rows in shuffled mini-batches.
 */
#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "models.hpp"
#include "qsim.hpp"

namespace qnnlab {

enum class Split { Train, Test };

struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;
    std::vector<Split> split;
    /// Class index per row when the targets encode classes, else empty.
    std::vector<int> labels;

    [[nodiscard]] std::size_t size() const noexcept { return inputs.size(); }

    [[nodiscard]] std::size_t dim() const { return inputs.empty() ? 0 : inputs.front().size(); }

    [[nodiscard]] std::size_t outputs() const {
        return targets.empty() ? 0 : targets.front().size();
    }

    /// Row indices tagged `s`.
    [[nodiscard]] std::vector<std::size_t> rows(Split s) const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < split.size(); ++i) {
            if (split[i] == s) {
                r.push_back(i);
            }
        }
        return r;
    }

    [[nodiscard]] std::vector<std::size_t> all_rows() const {
        std::vector<std::size_t> r(size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = i;
        }
        return r;
    }

    void validate(bool regression = true) const {
        if (inputs.size() != targets.size() || inputs.size() != split.size()) {
            throw std::invalid_argument("dataset columns differ in length");
        }
        if (!labels.empty() && labels.size() != inputs.size()) {
            throw std::invalid_argument("label column differs in length");
        }
        for (std::size_t i = 0; i < size(); ++i) {
            if (inputs[i].size() != dim() || targets[i].size() != outputs()) {
                throw std::invalid_argument("ragged dataset row " + std::to_string(i));
            }
            for (double t : targets[i]) {
                if (!std::isfinite(t) || (regression && std::abs(t) > 1.0 + 1e-12)) {
                    throw std::invalid_argument("target outside [-1, 1] in row " +
                                                std::to_string(i));
                }
            }
        }
    }
};

struct TrainConfig {
    double learning_rate = 0.1;
    int iterations = 100;
    int batch_size = 20;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int instances = 5;

    void validate() const {
        if (!(learning_rate > 0.0) || iterations < 1 || batch_size < 1 || instances < 1) {
            throw std::invalid_argument("train config needs positive sizes and learning rate");
        }
        if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
            throw std::invalid_argument("Adam constants out of range");
        }
    }
};

struct TrainReport {
    /// curves[i][k]: training MSE of instance i after k iterations (k = 0 is
    /// the initial point).
    std::vector<std::vector<double>> curves;
    std::vector<ParamVector> params;
    std::vector<double> final_train;
    /// Empty when the dataset has no test rows.
    std::vector<double> final_test;
    std::vector<double> seconds;
    std::size_t best_instance = 0;

    [[nodiscard]] double best_train() const { return final_train.at(best_instance); }
};

namespace detail {

inline std::vector<Observable> z_heads(const CircuitTemplate &t, std::size_t c) {
    if (c > static_cast<std::size_t>(t.n_qubits)) {
        throw std::invalid_argument("more outputs than qubits");
    }
    std::vector<Observable> obs;
    for (std::size_t q = 0; q < c; ++q) {
        obs.push_back(Observable::z_on(q, static_cast<std::size_t>(t.n_qubits)));
    }
    return obs;
}

inline double row_loss(const std::vector<double> &f, const std::vector<double> &y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        acc += (f[i] - y[i]) * (f[i] - y[i]);
    }
    return acc / static_cast<double>(f.size());
}

} // namespace detail

/// Mean over `batch` of the mean squared output error.
[[nodiscard]] inline double mse_loss(const CircuitTemplate &t, std::span<const double> params,
                                     const Dataset &data, std::span<const std::size_t> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("mse_loss: empty batch");
    }
    const auto obs = detail::z_heads(t, data.outputs());
    double acc = 0.0;
    for (std::size_t r : batch) {
        acc += detail::row_loss(evaluate_many(t, params, data.inputs.at(r), obs),
                                data.targets[r]);
    }
    return acc / static_cast<double>(batch.size());
}

[[nodiscard]] inline double mse_loss(const CircuitTemplate &t, std::span<const double> params,
                                     const Dataset &data) {
    const auto rows = data.all_rows();
    return mse_loss(t, params, data, rows);
}

inline constexpr double hybrid_fd_step = 1e-5;

/// Gradient of mse_loss. Gate angles use the two-point shift rule
/// [f(p + pi/2) - f(p - pi/2)] / 2; hybrid weights use central differences.
[[nodiscard]] inline std::vector<double>
grad_parameter_shift(const CircuitTemplate &t, std::span<const double> params,
                     const Dataset &data, std::span<const std::size_t> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("grad_parameter_shift: empty batch");
    }
    const auto obs = detail::z_heads(t, data.outputs());
    const std::size_t np = params.size();
    const std::size_t na = angle_count(t);
    const double c = static_cast<double>(data.outputs());
    std::vector<double> grad(np, 0.0);
    ParamVector shifted(params.begin(), params.end());
    for (std::size_t r : batch) {
        const auto &x = data.inputs.at(r);
        const auto &y = data.targets[r];
        const auto f = evaluate_many(t, params, x, obs);
        for (std::size_t k = 0; k < np; ++k) {
            const double h = (k < na) ? std::numbers::pi / 2.0 : hybrid_fd_step;
            const double scale = (k < na) ? 0.5 : 0.5 / hybrid_fd_step;
            shifted[k] = params[k] + h;
            const auto fp = evaluate_many(t, shifted, x, obs);
            shifted[k] = params[k] - h;
            const auto fm = evaluate_many(t, shifted, x, obs);
            shifted[k] = params[k];
            double g = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                g += 2.0 * (f[i] - y[i]) * (fp[i] - fm[i]) * scale;
            }
            grad[k] += g / c;
        }
    }
    for (double &g : grad) {
        g /= static_cast<double>(batch.size());
    }
    return grad;
}

namespace detail {

/// Straight-line gate list with the parameter each rotation depends on. U3
/// gates are split into RZ(lambda), RY(theta), RZ(phi); the global phase
/// does not reach any expectation value.
struct TapeOp {
    bool cnot = false;
    std::size_t q = 0;
    std::size_t c = 0;
    Axis axis = Axis::Z;
    double angle = 0.0;
    /// Parameter the angle depends on, or npos for a fixed data gate.
    std::size_t pidx = npos;
    /// d(angle)/d(param).
    double dscale = 1.0;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct TapeSink {
    const CircuitTemplate &t;
    std::span<const double> p;
    std::span<const double> x;
    std::vector<TapeOp> ops;

    void rot(int q, Axis a, std::size_t k) {
        ops.push_back({false, qidx(q), 0, a, p[k], k, 1.0});
    }
    void u3(int q, std::size_t k) {
        rot(q, Axis::Z, k + 2);
        rot(q, Axis::Y, k);
        rot(q, Axis::Z, k + 1);
    }
    void data(int q, int m) {
        const double xm = x[qidx(m)];
        const std::size_t w = t.hybrid ? angle_count(t) + qidx(m) : TapeOp::npos;
        ops.push_back({false, qidx(q), 0, Axis::Z, data_weight(t, p, m) * xm, w, xm});
    }
    void cnot(int c, int tq) { ops.push_back({true, qidx(tq), qidx(c), Axis::Z, 0.0}); }
};

using Amps = std::vector<Complex>;

inline void apply_op(Amps &a, std::size_t n, const TapeOp &op, bool adjoint) {
    if (op.cnot) {
        const std::size_t cm = std::size_t{1} << (n - 1 - op.c);
        const std::size_t tm = std::size_t{1} << (n - 1 - op.q);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if ((i & cm) != 0U && (i & tm) == 0U) {
                std::swap(a[i], a[i | tm]);
            }
        }
        return;
    }
    const Unitary2 g0 = rot_gate(op.axis, op.angle);
    const Unitary2 g = adjoint ? g0.adjoint() : g0;
    const std::size_t mask = std::size_t{1} << (n - 1 - op.q);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((i & mask) == 0U) {
            const Complex a0 = a[i];
            const Complex a1 = a[i | mask];
            a[i] = g(0, 0) * a0 + g(0, 1) * a1;
            a[i | mask] = g(1, 0) * a0 + g(1, 1) * a1;
        }
    }
}

/// Im <lam| sigma_q |phi> for the Pauli matching `axis`.
inline double im_pauli_overlap(const Amps &lam, const Amps &phi, std::size_t n, std::size_t q,
                               Axis axis) {
    const std::size_t mask = std::size_t{1} << (n - 1 - q);
    const Complex I{0.0, 1.0};
    Complex acc{};
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if ((i & mask) != 0U) {
            continue;
        }
        const std::size_t j = i | mask;
        switch (axis) {
        case Axis::X:
            acc += std::conj(lam[i]) * phi[j] + std::conj(lam[j]) * phi[i];
            break;
        case Axis::Y:
            acc += std::conj(lam[i]) * (-I * phi[j]) + std::conj(lam[j]) * (I * phi[i]);
            break;
        case Axis::Z:
            acc += std::conj(lam[i]) * phi[i] - std::conj(lam[j]) * phi[j];
            break;
        }
    }
    return acc.imag();
}

} // namespace detail

/// Same gradient as grad_parameter_shift, computed by one forward and one
/// reverse sweep per sample. Hybrid weights get their exact derivative here.
/// Returns the batch loss alongside the gradient.
[[nodiscard]] inline std::pair<double, std::vector<double>>
loss_and_grad(const CircuitTemplate &t, std::span<const double> params, const Dataset &data,
              std::span<const std::size_t> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("loss_and_grad: empty batch");
    }
    const std::size_t n = static_cast<std::size_t>(t.n_qubits);
    const std::size_t c = data.outputs();
    if (c > n) {
        throw std::invalid_argument("more outputs than qubits");
    }
    std::vector<double> grad(params.size(), 0.0);
    double loss = 0.0;
    for (std::size_t r : batch) {
        const auto &x = data.inputs.at(r);
        const auto &y = data.targets[r];
        detail::check_inputs(t, params, x);
        detail::TapeSink tape{t, params, x, {}};
        detail::emit_circuit(t, tape);
        detail::Amps phi(std::size_t{1} << n);
        phi[0] = 1.0;
        for (const auto &op : tape.ops) {
            detail::apply_op(phi, n, op, false);
        }
        // H = sum_i a_i Z_i with a_i = d(row loss)/d<Z_i>; lam = H phi.
        std::vector<double> a(c);
        double row = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            const std::size_t mask = std::size_t{1} << (n - 1 - i);
            double z = 0.0;
            for (std::size_t j = 0; j < phi.size(); ++j) {
                z += ((j & mask) != 0U ? -1.0 : 1.0) * std::norm(phi[j]);
            }
            row += (z - y[i]) * (z - y[i]);
            a[i] = 2.0 * (z - y[i]) / static_cast<double>(c);
        }
        loss += row / static_cast<double>(c);
        detail::Amps lam(phi.size());
        for (std::size_t j = 0; j < phi.size(); ++j) {
            double h = 0.0;
            for (std::size_t i = 0; i < c; ++i) {
                h += ((j & (std::size_t{1} << (n - 1 - i))) != 0U ? -a[i] : a[i]);
            }
            lam[j] = h * phi[j];
        }
        for (auto it = tape.ops.rbegin(); it != tape.ops.rend(); ++it) {
            if (!it->cnot && it->pidx != detail::TapeOp::npos) {
                grad[it->pidx] +=
                    it->dscale * detail::im_pauli_overlap(lam, phi, n, it->q, it->axis);
            }
            detail::apply_op(phi, n, *it, true);
            detail::apply_op(lam, n, *it, true);
        }
    }
    const double nb = static_cast<double>(batch.size());
    for (double &g : grad) {
        g /= nb;
    }
    return {loss / nb, std::move(grad)};
}

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

/// One bias-corrected Adam update in place.
inline void adam_step(std::vector<double> &params, std::span<const double> grads,
                      AdamState &state, const TrainConfig &cfg) {
    if (grads.size() != params.size()) {
        throw std::invalid_argument("adam_step: gradient and parameter shapes differ");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    } else if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: optimizer state shape differs");
    }
    ++state.step;
    const double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * grads[k];
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * grads[k] * grads[k];
        const double mh = state.m[k] / b1t;
        const double vh = state.v[k] / b2t;
        params[k] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon);
    }
}

/// Angles uniform on [0, 2pi]; hybrid weights start at 1 (the native
/// encoding).
[[nodiscard]] inline ParamVector init_params(const CircuitTemplate &t, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    ParamVector p(param_count(t), 1.0);
    for (std::size_t k = 0; k < angle_count(t); ++k) {
        p[k] = u(rng);
    }
    return p;
}

/// Generator for instance `i` of a run seeded with `seed`.
[[nodiscard]] inline std::mt19937_64 instance_rng(std::uint64_t seed, std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    return std::mt19937_64(seq);
}

/// Trains `config.instances` independent restarts on the Train rows.
[[nodiscard]] inline TrainReport fit(const CircuitTemplate &t, const Dataset &data,
                                     const TrainConfig &cfg) {
    t.validate();
    cfg.validate();
    data.validate(data.labels.empty());
    if (data.dim() != static_cast<std::size_t>(t.d)) {
        throw std::invalid_argument("dataset dimension does not match the template");
    }
    const auto train = data.rows(Split::Train);
    const auto test = data.rows(Split::Test);
    if (train.empty()) {
        throw std::invalid_argument("dataset has no training rows");
    }
    TrainReport rep;
    for (std::size_t inst = 0; inst < static_cast<std::size_t>(cfg.instances); ++inst) {
        const auto t0 = std::chrono::steady_clock::now();
        auto rng = instance_rng(cfg.seed, inst);
        ParamVector p = init_params(t, rng);
        AdamState st;
        std::vector<double> curve{mse_loss(t, p, data, train)};
        std::vector<std::size_t> order = train;
        const auto bs = static_cast<std::size_t>(cfg.batch_size);
        for (int it = 0; it < cfg.iterations; ++it) {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t b = 0; b < order.size(); b += bs) {
                const std::span<const std::size_t> batch(order.data() + b,
                                                         std::min(bs, order.size() - b));
                adam_step(p, loss_and_grad(t, p, data, batch).second, st, cfg);
            }
            const double loss = mse_loss(t, p, data, train);
            if (!std::isfinite(loss)) {
                throw NumericalError("training loss became non-finite");
            }
            curve.push_back(loss);
        }
        rep.final_train.push_back(curve.back());
        if (!test.empty()) {
            rep.final_test.push_back(mse_loss(t, p, data, test));
        }
        rep.curves.push_back(std::move(curve));
        rep.params.push_back(std::move(p));
        rep.seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    rep.best_instance = static_cast<std::size_t>(
        std::min_element(rep.final_train.begin(), rep.final_train.end()) -
        rep.final_train.begin());
    return rep;
}

/// argmax_i <Z_i> over the first n_classes qubits; ties go to the lowest
/// index.
[[nodiscard]] inline int argmax_head(std::span<const double> z) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < z.size(); ++i) {
        if (z[i] > z[best]) {
            best = i;
        }
    }
    return static_cast<int>(best);
}

[[nodiscard]] inline int classify_head(const CircuitTemplate &t, std::span<const double> params,
                                       std::span<const double> x, int n_classes) {
    if (n_classes < 1 || n_classes > t.n_qubits) {
        throw std::invalid_argument("n_classes must lie in [1, n_qubits]");
    }
    const auto z = evaluate_many(t, params, x,
                                 detail::z_heads(t, static_cast<std::size_t>(n_classes)));
    return argmax_head(z);
}

/// Fraction of `rows` whose predicted class equals data.labels.
[[nodiscard]] inline double accuracy(const CircuitTemplate &t, std::span<const double> params,
                                     const Dataset &data, std::span<const std::size_t> rows,
                                     int n_classes) {
    if (data.labels.size() != data.size()) {
        throw std::invalid_argument("accuracy needs class labels");
    }
    if (rows.empty()) {
        return 0.0;
    }
    std::size_t hit = 0;
    for (std::size_t r : rows) {
        hit += classify_head(t, params, data.inputs.at(r), n_classes) == data.labels[r] ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(rows.size());
}

/// Projection of mean-centred rows onto the leading `out_dim` covariance
/// eigenvectors. Each axis is signed so that its largest-magnitude entry is
/// positive; axes with eigenvalue below 1e-12 (relative) project to 0.
[[nodiscard]] inline std::vector<std::vector<double>>
pca_reduce(const std::vector<std::vector<double>> &rows, std::size_t out_dim) {
    if (rows.empty()) {
        throw std::invalid_argument("pca_reduce: no rows");
    }
    const std::size_t n = rows.size();
    const std::size_t m = rows.front().size();
    if (out_dim > m) {
        throw std::invalid_argument("pca_reduce: out_dim exceeds the column count");
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != m) {
            throw std::invalid_argument("pca_reduce: ragged rows");
        }
        for (std::size_t j = 0; j < m; ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    X.rowwise() -= X.colwise().mean();
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    const Eigen::MatrixXd cov = (X.transpose() * X) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) {
        throw NumericalError("covariance eigendecomposition failed");
    }
    // Eigen sorts ascending.
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = std::max(ev(ev.size() - 1), 0.0);
    Eigen::MatrixXd W(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(out_dim));
    for (std::size_t k = 0; k < out_dim; ++k) {
        const Eigen::Index col = ev.size() - 1 - static_cast<Eigen::Index>(k);
        Eigen::VectorXd v = es.eigenvectors().col(col);
        if (ev(col) <= 1e-12 * std::max(top, 1e-300)) {
            v.setZero();
        } else {
            Eigen::Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            if (v(arg) < 0.0) {
                v = -v;
            }
        }
        W.col(static_cast<Eigen::Index>(k)) = v;
    }
    const Eigen::MatrixXd Y = X * W;
    std::vector<std::vector<double>> out(n, std::vector<double>(out_dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < out_dim; ++k) {
            out[i][k] = Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }
    return out;
}

} // namespace qnnlab
