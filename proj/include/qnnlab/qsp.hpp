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
 * Angle synthesis for single-qubit re-uploading circuits.
 *
 * Two circuit families are covered:
 *
 *   YZY:  U(x) = RY(t_0) prod_{j=1..L} RZ(x) RY(t_j)
 *   WZW:  U(x) = RZ(v) W(t_0, f_0) prod_{j=1..L} RZ(x) W(t_j, f_j),
 *         W(t, f) = RY(t) RZ(f)
 *
 * Both equal [[P, -Q], [Q*, P*]] for Laurent polynomials P, Q in
 * w = e^{ix/2} with degree <= L, parity L mod 2 and |P|^2 + |Q|^2 = 1
 * (real coefficients for YZY). `forward_*` expands angles into (P, Q);
 * `peel_*` recovers angles from such a pair one layer at a time by
 * cancelling the leading coefficients; `complete` builds Q from P by
 * spectral factorisation; `synthesize_*` chain these into a
 * function-to-circuit pipeline.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fourier.hpp"
#include "laurent.hpp"
#include "qsim.hpp"

namespace qnnlab {

enum class QspAnsatz { YZY, WZW };

/// Gate angles of a YZY or WZW circuit. `phi` and `varphi` are only
/// meaningful for WZW. Angles are stored as produced, without reduction.
struct AngleSet {
    QspAnsatz ansatz = QspAnsatz::YZY;
    int L = 0;
    std::vector<double> theta;
    std::vector<double> phi;
    double varphi = 0.0;

    void validate() const {
        if (L < 0) {
            throw std::invalid_argument("layer count must be non-negative");
        }
        if (theta.size() != static_cast<std::size_t>(L + 1)) {
            throw std::invalid_argument("theta must hold L + 1 angles");
        }
        if (ansatz == QspAnsatz::WZW && phi.size() != static_cast<std::size_t>(L + 1)) {
            throw std::invalid_argument("phi must hold L + 1 angles");
        }
        for (double t : theta) {
            require_finite(t, "theta");
        }
        for (double p : phi) {
            require_finite(p, "phi");
        }
        require_finite(varphi, "varphi");
    }
};

enum class Field { Real, Complex };

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

/// max |coefficient| over both polynomials, floored so that relative
/// thresholds never collapse to zero.
inline double pair_scale(const PolyPair &pq) {
    return std::max({pq.P.max_abs_coeff(), pq.Q.max_abs_coeff(), 1e-300});
}

/// Degree of the pair where coefficients below `rel * scale` count as zero.
inline int pair_degree(const PolyPair &pq, double rel) {
    const double tol = rel * pair_scale(pq);
    return std::max(pq.P.degree(tol), pq.Q.degree(tol));
}

inline bool parity_matches(const LaurentPoly &p, int L) {
    const Parity par = parity_of(p);
    if (par == Parity::Mixed) {
        return false;
    }
    if (p.is_zero()) {
        return true;
    }
    return static_cast<int>(par) == (L % 2);
}

/// Checks the three layer conditions (and the coefficient field).
inline void validate_pair(const PolyPair &pq, Field field, double modulus_tol) {
    if (pq.L < 0) {
        throw std::invalid_argument("layer bound must be non-negative");
    }
    if (field == Field::Real && (!pq.P.is_real(1e-12) || !pq.Q.is_real(1e-12))) {
        throw ValidationError(0, "YZY pairs need real coefficients");
    }
    if (pq.P.degree() > pq.L || pq.Q.degree() > pq.L) {
        throw ValidationError(1, "deg(P) or deg(Q) exceeds L = " + std::to_string(pq.L));
    }
    if (!parity_matches(pq.P, pq.L) || !parity_matches(pq.Q, pq.L)) {
        throw ValidationError(2, "P and Q must have parity L mod 2 = " +
                                     std::to_string(pq.L % 2));
    }
    const double res = unit_modulus_residual(pq.P, pq.Q);
    if (res > modulus_tol) {
        throw ValidationError(3, "|P|^2 + |Q|^2 deviates from 1 by " + std::to_string(res));
    }
}

/// Removes storage beyond |k| = keep after checking the dropped part is
/// negligible.
inline LaurentPoly drop_above(const LaurentPoly &p, int keep, double &dropped) {
    for (int k = keep + 1; k <= p.max_exponent(); ++k) {
        dropped = std::max({dropped, std::abs(p.coeff(k)), std::abs(p.coeff(-k))});
    }
    return p.truncated(keep);
}

/// Unit vector spanning the (near-)null space of a 2x2 system.
inline Eigen::Vector2cd null_vector(const Eigen::Matrix2cd &m) {
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m, Eigen::ComputeFullV);
    Eigen::Vector2cd v = svd.matrixV().col(1);
    // Rotate the larger component onto the positive real axis, so a real
    // system yields a real vector.
    const Complex lead = std::abs(v(0)) >= std::abs(v(1)) ? v(0) : v(1);
    v *= std::conj(lead) / std::abs(lead);
    return v;
}

inline constexpr double peel_rel_zero = 1e-12;
inline constexpr double peel_residual_tol = 1e-8;
// Per-layer abort threshold. Near-degenerate layers (a cos or sin of a
// half angle close to zero) shrink the extreme coefficients of every
// outer layer, and each peel step then amplifies round-off by roughly the
// inverse of that size. Such runs are kept as a starting point for the
// refinement step; only a grossly broken layer aborts here.
inline constexpr double peel_cancel_tol = 1e-2;

} // namespace detail

/// Expands YZY angles into the polynomial pair of the circuit unitary.
[[nodiscard]] inline PolyPair forward_yzy(const AngleSet &a) {
    if (a.ansatz != QspAnsatz::YZY) {
        throw std::invalid_argument("forward_yzy needs a YZY angle set");
    }
    a.validate();
    PolyPair pq;
    pq.L = a.L;
    pq.P = LaurentPoly::constant(std::cos(a.theta[0] / 2.0));
    pq.Q = LaurentPoly::constant(std::sin(a.theta[0] / 2.0));
    for (int k = 1; k <= a.L; ++k) {
        const double c = std::cos(a.theta[static_cast<std::size_t>(k)] / 2.0);
        const double s = std::sin(a.theta[static_cast<std::size_t>(k)] / 2.0);
        // [[P, -Q], [Q*, P*]] RZ(x) RY(t_k)
        LaurentPoly p = c * pq.P.shifted(-1) - s * pq.Q.shifted(1);
        LaurentPoly q = s * pq.P.shifted(-1) + c * pq.Q.shifted(1);
        pq.P = std::move(p);
        pq.Q = std::move(q);
    }
    return pq;
}

/// Expands WZW angles (including the leading RZ(varphi)) into (P, Q).
[[nodiscard]] inline PolyPair forward_wzw(const AngleSet &a) {
    if (a.ansatz != QspAnsatz::WZW) {
        throw std::invalid_argument("forward_wzw needs a WZW angle set");
    }
    a.validate();
    PolyPair pq;
    pq.L = a.L;
    {
        const double c = std::cos(a.theta[0] / 2.0);
        const double s = std::sin(a.theta[0] / 2.0);
        pq.P = LaurentPoly::constant(c * std::polar(1.0, -a.phi[0] / 2.0));
        pq.Q = LaurentPoly::constant(s * std::polar(1.0, a.phi[0] / 2.0));
    }
    for (int k = 1; k <= a.L; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double c = std::cos(a.theta[ks] / 2.0);
        const double s = std::sin(a.theta[ks] / 2.0);
        const Complex em = std::polar(1.0, -a.phi[ks] / 2.0);
        const Complex ep = std::conj(em);
        // [[P, -Q], [Q*, P*]] RZ(x) RY(t_k) RZ(f_k)
        LaurentPoly p = (c * em) * pq.P.shifted(-1) - (s * em) * pq.Q.shifted(1);
        LaurentPoly q = (s * ep) * pq.P.shifted(-1) + (c * ep) * pq.Q.shifted(1);
        pq.P = std::move(p);
        pq.Q = std::move(q);
    }
    const Complex front = std::polar(1.0, -a.varphi / 2.0);
    pq.P *= front;
    pq.Q *= front;
    return pq;
}

namespace detail {

inline AngleSet peel_yzy_raw(const PolyPair &input) {
    detail::validate_pair(input, Field::Real, 1e-8);
    AngleSet out;
    out.ansatz = QspAnsatz::YZY;
    out.L = input.L;
    out.theta.assign(static_cast<std::size_t>(input.L + 1), 0.0);

    PolyPair pq{input.P.real_part().truncated(input.L), input.Q.real_part().truncated(input.L),
                input.L};
    for (int layer = input.L; layer >= 1; --layer) {
        const int d = detail::pair_degree(pq, detail::peel_rel_zero);
        // Below full degree any angle keeps deg <= layer - 1 after the shift;
        // 0 is used.
        double half = 0.0;
        if (d == layer) {
            // Need cos(h) p_d + sin(h) q_d = 0 and -sin(h) p_{-d} + cos(h) q_{-d} = 0.
            // Solved jointly: the least-squares null vector of the 2x2 system.
            Eigen::Matrix2cd m;
            m << pq.P.coeff(d).real(), pq.Q.coeff(d).real(), pq.Q.coeff(-d).real(),
                -pq.P.coeff(-d).real();
            const auto v = detail::null_vector(m);
            half = std::atan2(v(1).real(), v(0).real());
        }
        const double c = std::cos(half);
        const double s = std::sin(half);
        // [[P, -Q], [Q*, P*]] RY(t)^dagger RZ(x)^dagger
        LaurentPoly p = (c * pq.P + s * pq.Q).shifted(1);
        LaurentPoly q = (c * pq.Q - s * pq.P).shifted(-1);
        double dropped = 0.0;
        pq.P = detail::drop_above(p, layer - 1, dropped);
        pq.Q = detail::drop_above(q, layer - 1, dropped);
        pq.L = layer - 1;
        if (dropped > detail::peel_cancel_tol) {
            throw NumericalError("leading coefficients failed to cancel at layer " +
                                 std::to_string(layer) + " (residual " + detail::sci(dropped) +
                                 ")");
        }
        out.theta[static_cast<std::size_t>(layer)] = 2.0 * half;
    }
    const double p0 = pq.P.coeff(0).real();
    const double q0 = pq.Q.coeff(0).real();
    out.theta[0] = 2.0 * std::atan2(q0, p0);
    return out;
}

} // namespace detail

namespace detail {

inline AngleSet peel_wzw_raw(const PolyPair &input) {
    detail::validate_pair(input, Field::Complex, 1e-8);
    AngleSet out;
    out.ansatz = QspAnsatz::WZW;
    out.L = input.L;
    out.theta.assign(static_cast<std::size_t>(input.L + 1), 0.0);
    out.phi.assign(static_cast<std::size_t>(input.L + 1), 0.0);

    PolyPair pq{input.P.truncated(input.L), input.Q.truncated(input.L), input.L};
    for (int layer = input.L; layer >= 1; --layer) {
        const int d = detail::pair_degree(pq, detail::peel_rel_zero);
        double half = 0.0;
        double phi = 0.0;
        if (d == layer) {
            // With a = cos(h) e^{if/2}, b = sin(h) e^{-if/2}:
            //   a p_d + b q_d = 0,  a conj(q_{-d}) - b conj(p_{-d}) = 0.
            Eigen::Matrix2cd m;
            m << pq.P.coeff(d), pq.Q.coeff(d), std::conj(pq.Q.coeff(-d)),
                -std::conj(pq.P.coeff(-d));
            const auto v = detail::null_vector(m);
            half = std::atan2(std::abs(v(1)), std::abs(v(0)));
            phi = (std::abs(v(0)) > 0.0 && std::abs(v(1)) > 0.0)
                      ? std::arg(v(0)) - std::arg(v(1))
                      : 0.0;
        }
        const double c = std::cos(half);
        const double s = std::sin(half);
        const Complex ep = std::polar(1.0, phi / 2.0);
        const Complex em = std::conj(ep);
        // [[P, -Q], [Q*, P*]] W(t, f)^dagger RZ(x)^dagger
        LaurentPoly p = ((c * ep) * pq.P + (s * em) * pq.Q).shifted(1);
        LaurentPoly q = ((c * em) * pq.Q - (s * ep) * pq.P).shifted(-1);
        double dropped = 0.0;
        pq.P = detail::drop_above(p, layer - 1, dropped);
        pq.Q = detail::drop_above(q, layer - 1, dropped);
        pq.L = layer - 1;
        if (dropped > detail::peel_cancel_tol) {
            throw NumericalError("leading coefficients failed to cancel at layer " +
                                 std::to_string(layer) + " (residual " + detail::sci(dropped) +
                                 ")");
        }
        out.theta[static_cast<std::size_t>(layer)] = 2.0 * half;
        out.phi[static_cast<std::size_t>(layer)] = phi;
    }

    // P = e^{-i(v + f_0)/2} cos(t_0/2), Q = e^{-i(v - f_0)/2} sin(t_0/2).
    const Complex p0 = pq.P.coeff(0);
    const Complex q0 = pq.Q.coeff(0);
    // A vanishing factor leaves its phase free; borrow the other one's.
    const double tiny = 1e-14;
    double alpha = -2.0 * std::arg(p0);
    double beta = -2.0 * std::arg(q0);
    if (std::abs(p0) <= tiny) {
        alpha = beta;
    } else if (std::abs(q0) <= tiny) {
        beta = alpha;
    }
    out.theta[0] = 2.0 * std::atan2(std::abs(q0), std::abs(p0));
    out.varphi = (alpha + beta) / 2.0;
    out.phi[0] = (alpha - beta) / 2.0;
    return out;
}

inline PolyPair peel_target(const PolyPair &input, Field field) {
    PolyPair t{input.P.truncated(input.L), input.Q.truncated(input.L), input.L};
    if (field == Field::Real) {
        t.P = t.P.real_part();
        t.Q = t.Q.real_part();
    }
    return t;
}

/// Largest coefficient gap between forward(a) and `target`.
inline double forward_mismatch(const AngleSet &a, const PolyPair &target) {
    const PolyPair f = (a.ansatz == QspAnsatz::YZY) ? forward_yzy(a) : forward_wzw(a);
    return std::max(max_coeff_diff(f.P, target.P), max_coeff_diff(f.Q, target.Q));
}

/// Flattened angle vector: theta, then phi and varphi for WZW.
inline std::vector<double> pack_angles(const AngleSet &a) {
    std::vector<double> v = a.theta;
    if (a.ansatz == QspAnsatz::WZW) {
        v.insert(v.end(), a.phi.begin(), a.phi.end());
        v.push_back(a.varphi);
    }
    return v;
}

inline AngleSet unpack_angles(const AngleSet &like, const std::vector<double> &v) {
    AngleSet a = like;
    const auto n = like.theta.size();
    std::copy_n(v.begin(), n, a.theta.begin());
    if (a.ansatz == QspAnsatz::WZW) {
        std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(n), n, a.phi.begin());
        a.varphi = v.back();
    }
    return a;
}

/// Real residual vector forward(a) - target over all coefficients.
inline Eigen::VectorXd coeff_residual(const AngleSet &a, const PolyPair &target) {
    const PolyPair f = (a.ansatz == QspAnsatz::YZY) ? forward_yzy(a) : forward_wzw(a);
    const int L = target.L;
    const bool cplx = a.ansatz == QspAnsatz::WZW;
    const Eigen::Index per = cplx ? 2 : 1;
    Eigen::VectorXd r(2 * per * (2 * L + 1));
    Eigen::Index i = 0;
    for (const auto *pair : {&f.P, &f.Q}) {
        const LaurentPoly &want = pair == &f.P ? target.P : target.Q;
        for (int k = -L; k <= L; ++k) {
            const Complex diff = pair->coeff(k) - want.coeff(k);
            r(i++) = diff.real();
            if (cplx) {
                r(i++) = diff.imag();
            }
        }
    }
    return r;
}

// From a good start LM converges in a handful of steps; more rarely helps.
inline constexpr int refine_iterations = 15;

/// Levenberg-Marquardt on the coefficient residual, central-difference
/// Jacobian. The system is consistent, so a good start converges to
/// round-off even where the layer-stripping angles were inaccurate.
inline AngleSet refine_angles(const AngleSet &start, const PolyPair &target) {
    std::vector<double> x = pack_angles(start);
    const auto np = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXd r = coeff_residual(start, target);
    double cost = r.squaredNorm();
    double mu = 1e-6;
    constexpr double h = 1e-6;
    for (int it = 0; it < refine_iterations && r.cwiseAbs().maxCoeff() > 1e-14; ++it) {
        Eigen::MatrixXd J(r.size(), np);
        for (Eigen::Index j = 0; j < np; ++j) {
            auto xp = x;
            auto xm = x;
            xp[static_cast<std::size_t>(j)] += h;
            xm[static_cast<std::size_t>(j)] -= h;
            J.col(j) = (coeff_residual(unpack_angles(start, xp), target) -
                        coeff_residual(unpack_angles(start, xm), target)) /
                       (2.0 * h);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        for (int tries = 0; tries < 12 && !accepted; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += mu * (1.0 + JtJ.diagonal().array());
            const Eigen::VectorXd d = A.ldlt().solve(-g);
            auto xn = x;
            for (Eigen::Index j = 0; j < np; ++j) {
                xn[static_cast<std::size_t>(j)] += d(j);
            }
            const Eigen::VectorXd rn = coeff_residual(unpack_angles(start, xn), target);
            if (rn.allFinite() && rn.squaredNorm() < cost) {
                x = std::move(xn);
                r = rn;
                cost = rn.squaredNorm();
                mu = std::max(mu / 10.0, 1e-15);
                accepted = true;
            } else {
                mu *= 10.0;
            }
        }
        if (!accepted) {
            break;
        }
    }
    return unpack_angles(start, x);
}

/// Pair of the transposed unitary. U^T is again a circuit of the same
/// ansatz with the layers in reverse order, so peeling it strips layers
/// from the other end.
inline PolyPair transpose_pair(const PolyPair &pq) {
    return PolyPair{pq.P, -1.0 * conj_reflect(pq.Q), pq.L};
}

/// Maps angles of the transposed circuit back to the original order.
///   YZY: t_j = -t'_{L-j}.
///   WZW: t_j = -t'_{L-j}, f_j = f'_{L-1-j} (j < L), f_L = v', v = f'_L.
inline AngleSet untranspose_angles(const AngleSet &t) {
    AngleSet a = t;
    const auto L = static_cast<std::size_t>(t.L);
    for (std::size_t j = 0; j <= L; ++j) {
        a.theta[j] = -t.theta[L - j];
    }
    if (t.ansatz == QspAnsatz::WZW) {
        for (std::size_t j = 0; j < L; ++j) {
            a.phi[j] = t.phi[L - 1 - j];
        }
        a.phi[L] = t.varphi;
        a.varphi = t.phi[L];
    }
    return a;
}

// Refinement only pays off from a nearby start; far starts stall in the
// degenerate valleys and cost O(L^3) per iteration.
inline constexpr double refine_start_tol = 1e-3;

/// Strips layers from both ends of the circuit in turn and keeps whichever
/// angle set reproduces the pair better, refining it if needed.
///
/// Error growth in layer stripping is driven by small extreme coefficients,
/// which a nearly degenerate layer causes for every step taken while it is
/// still inside the remaining circuit; starting from the end nearer to it
/// shortens that stretch.
template <class Raw>
AngleSet peel_both_ways(const PolyPair &input, Field field, Raw raw) {
    const PolyPair target = peel_target(input, field);
    AngleSet best;
    double err = std::numeric_limits<double>::infinity();
    const auto consider = [&](const auto &make) {
        try {
            AngleSet a = make();
            const double e = forward_mismatch(a, target);
            if (e < err) {
                best = std::move(a);
                err = e;
            }
        } catch (const NumericalError &) {
        }
    };
    consider([&] { return raw(input); });
    if (err > peel_residual_tol) {
        consider([&] { return untranspose_angles(raw(transpose_pair(input))); });
    }
    if (err > peel_residual_tol && err < refine_start_tol) {
        consider([&] { return refine_angles(best, target); });
    }
    if (!std::isfinite(err)) {
        throw NumericalError("leading coefficients failed to cancel from either end");
    }
    if (err > peel_residual_tol) {
        throw NumericalError("peeled angles reproduce the pair only to " + detail::sci(err));
    }
    return best;
}

} // namespace detail

/// Recovers YZY angles from a real pair satisfying the layer conditions.
///
/// Throws ValidationError naming the failed condition, or NumericalError
/// when the recovered angles do not reproduce the pair to 1e-8.
[[nodiscard]] inline AngleSet peel_yzy(const PolyPair &input) {
    return detail::peel_both_ways(input, Field::Real,
                                  [](const PolyPair &pq) { return detail::peel_yzy_raw(pq); });
}

/// Recovers WZW angles from a complex pair satisfying the layer conditions.
[[nodiscard]] inline AngleSet peel_wzw(const PolyPair &input) {
    return detail::peel_both_ways(input, Field::Complex,
                                  [](const PolyPair &pq) { return detail::peel_wzw_raw(pq); });
}

namespace detail {

/// Evaluates sum_i b_i z^i (Horner).
inline Complex poly_eval(const std::vector<Complex> &b, Complex z) {
    Complex acc{};
    for (std::size_t i = b.size(); i-- > 0;) {
        acc = acc * z + b[i];
    }
    return acc;
}

/// All roots of sum_i b_i z^i via eigenvalues of the companion matrix,
/// each refined by a few Newton steps on the original coefficients.
inline std::vector<Complex> poly_roots(const std::vector<Complex> &b) {
    const auto n = static_cast<Eigen::Index>(b.size()) - 1;
    if (n < 1) {
        return {};
    }
    const Complex lead = b.back();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        comp(i, i - 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        comp(i, n - 1) = -b[static_cast<std::size_t>(i)] / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("companion-matrix eigenvalue iteration did not converge");
    }
    std::vector<Complex> deriv(b.size() - 1);
    for (std::size_t i = 1; i < b.size(); ++i) {
        deriv[i - 1] = static_cast<double>(i) * b[i];
    }
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex z = solver.eigenvalues()(i);
        double fz = std::abs(poly_eval(b, z));
        for (int it = 0; it < 4; ++it) {
            const Complex dz = poly_eval(deriv, z);
            if (std::abs(dz) == 0.0) {
                break;
            }
            const Complex cand = z - poly_eval(b, z) / dz;
            const double fc = std::abs(poly_eval(b, cand));
            if (!(fc < fz)) {
                break;
            }
            z = cand;
            fz = fc;
        }
        roots[static_cast<std::size_t>(i)] = z;
    }
    return roots;
}

/// Picks `m` of the 2m roots of a polynomial that is self-reciprocal under
/// z -> 1/conj(z): everything strictly inside the unit disk, plus every
/// other root (by angle) from the cluster on the circle.
inline std::vector<Complex> select_inner_roots(std::vector<Complex> roots, std::size_t m) {
    for (double tol = 1e-9; tol <= 1e-4; tol *= 10.0) {
        std::vector<Complex> inside;
        std::vector<Complex> boundary;
        std::size_t outside = 0;
        for (const Complex &r : roots) {
            const double mod = std::abs(r);
            if (mod < 1.0 - tol) {
                inside.push_back(r);
            } else if (mod > 1.0 + tol) {
                ++outside;
            } else {
                boundary.push_back(r);
            }
        }
        if (inside.size() > m || outside > m) {
            continue;
        }
        std::sort(boundary.begin(), boundary.end(),
                  [](const Complex &a, const Complex &b) { return std::arg(a) < std::arg(b); });
        for (std::size_t i = 0; i < boundary.size() && inside.size() < m; i += 2) {
            inside.push_back(boundary[i]);
        }
        if (inside.size() == m) {
            return inside;
        }
    }
    // Fall back to the m smallest moduli.
    std::sort(roots.begin(), roots.end(),
              [](const Complex &a, const Complex &b) { return std::abs(a) < std::abs(b); });
    roots.resize(m);
    return roots;
}

/// Minimum-phase factor of A(z) = sum_j a_j z^j (a_j indexed from -half),
/// by the cepstral method: h = exp of the causal part of log A. Needs A
/// bounded away from zero on the circle; returns nothing otherwise.
inline std::optional<std::vector<Complex>> cepstral_factor(const std::vector<Complex> &a, int half,
                                                           int m) {
    std::size_t n = 4096;
    while (n < 16 * static_cast<std::size_t>(m + 1)) {
        n <<= 1;
    }
    // Inverse DFT through the forward transform: conj(F(conj(x))).
    const auto inverse = [n](std::vector<Complex> &v) {
        for (auto &c : v) {
            c = std::conj(c);
        }
        fft_strided(v, 0, 1, n);
        for (auto &c : v) {
            c = std::conj(c);
        }
    };
    std::vector<Complex> vals(n);
    for (int j = -half; j <= half; ++j) {
        const auto slot = static_cast<std::size_t>((j % static_cast<int>(n) + static_cast<int>(n)) %
                                                   static_cast<int>(n));
        vals[slot] += a[static_cast<std::size_t>(j + half)];
    }
    inverse(vals);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto &v : vals) {
        lo = std::min(lo, v.real());
        hi = std::max(hi, v.real());
    }
    if (!(lo > 1e-8 * hi)) {
        return std::nullopt;
    }
    for (auto &v : vals) {
        v = std::log(v.real());
    }
    fft_strided(vals, 0, 1, n);
    std::vector<Complex> causal(n);
    causal[0] = 0.5 * vals[0] / static_cast<double>(n);
    for (std::size_t k = 1; k < n / 2; ++k) {
        causal[k] = vals[k] / static_cast<double>(n);
    }
    inverse(causal);
    for (auto &v : causal) {
        v = std::exp(v);
    }
    fft_strided(causal, 0, 1, n);
    std::vector<Complex> h(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k) {
        h[static_cast<std::size_t>(k)] = causal[static_cast<std::size_t>(k)] / static_cast<double>(n);
    }
    return h;
}

} // namespace detail

/// Builds Q with deg(Q) <= L, parity L mod 2 and |P|^2 + |Q|^2 = 1.
///
/// Forms A = 1 - P P*, which is non-negative on the unit circle, roots
/// w^{deg} A as an ordinary polynomial in z = w^2, keeps one root from each
/// reciprocal-conjugate pair and rebuilds Q from the kept roots.
[[nodiscard]] inline LaurentPoly complete(const LaurentPoly &P, int L, Field field) {
    if (L < 0) {
        throw std::invalid_argument("layer bound must be non-negative");
    }
    if (P.degree() > L) {
        throw ValidationError(1, "deg(P) exceeds L = " + std::to_string(L));
    }
    if (!detail::parity_matches(P, L)) {
        throw ValidationError(2, "P must have parity L mod 2 = " + std::to_string(L % 2));
    }
    if (field == Field::Real && !P.is_real(1e-12)) {
        throw ValidationError(0, "real completion needs a real-coefficient P");
    }
    const auto grid = validation_grid();
    for (double x : grid) {
        const double mod = std::abs(P(x));
        if (mod > 1.0 + 1e-10) {
            throw ConstraintViolation(x, mod);
        }
    }

    const LaurentPoly A = LaurentPoly::constant(1.0) - mul(P, conj_reflect(P));
    // A has even exponents only; a_j is its coefficient of z^j = w^{2j}.
    const int half = A.max_exponent() / 2;
    std::vector<Complex> a(static_cast<std::size_t>(2 * half + 1));
    double amax = 0.0;
    for (int j = -half; j <= half; ++j) {
        a[static_cast<std::size_t>(j + half)] = A.coeff(2 * j);
        amax = std::max(amax, std::abs(A.coeff(2 * j)));
    }
    LaurentPoly Q(L);
    if (amax < 1e-14) {
        return Q;
    }
    int m = 0;
    for (int j = half; j > 0; --j) {
        if (std::abs(a[static_cast<std::size_t>(j + half)]) > 1e-13 * amax ||
            std::abs(a[static_cast<std::size_t>(-j + half)]) > 1e-13 * amax) {
            m = j;
            break;
        }
    }

    std::vector<Complex> kept;
    if (m > 0) {
        // z^m A(z) has coefficients a_{-m}, ..., a_m.
        std::vector<Complex> b(static_cast<std::size_t>(2 * m + 1));
        for (int i = 0; i <= 2 * m; ++i) {
            b[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i - m + half)];
        }
        kept = detail::select_inner_roots(detail::poly_roots(b), static_cast<std::size_t>(m));
    }

    // Coefficients of prod (z - r_j) from samples on the circle.
    std::size_t nfft = 1;
    while (nfft < static_cast<std::size_t>(2 * (m + 1))) {
        nfft <<= 1;
    }
    std::vector<Complex> samples(nfft);
    for (std::size_t k = 0; k < nfft; ++k) {
        const Complex z =
            std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / nfft);
        Complex v{1.0};
        for (const Complex &r : kept) {
            v *= (z - r);
        }
        samples[k] = v;
    }
    std::vector<Complex> qt(static_cast<std::size_t>(m + 1));
    for (int j = 0; j <= m; ++j) {
        Complex acc{};
        for (std::size_t k = 0; k < nfft; ++k) {
            acc += samples[k] *
                   std::polar(1.0, -2.0 * std::numbers::pi * j * static_cast<double>(k) / nfft);
        }
        qt[static_cast<std::size_t>(j)] = acc / static_cast<double>(nfft);
    }

    // Q(w) = w^shift * qt(w^2); shift fixes the parity to L mod 2.
    const auto assemble_q = [&](const std::vector<Complex> &coef) {
        LaurentPoly out(L);
        const int shift = ((L - m) % 2 == 0) ? -m : -m - 1;
        for (int j = 0; j <= m; ++j) {
            out.set(shift + 2 * j, coef[static_cast<std::size_t>(j)]);
        }
        if (field == Field::Real) {
            out = out.real_part();
        }
        // Least-squares scale so that |Q|^2 matches A on the grid.
        double num = 0.0;
        double den = 0.0;
        for (double x : grid) {
            const double target = 1.0 - std::norm(P(x));
            const double q2 = std::norm(out(x));
            num += target * q2;
            den += q2 * q2;
        }
        if (!(den > 0.0)) {
            throw NumericalError("spectral factor vanished on the grid");
        }
        out *= Complex{std::sqrt(std::max(num / den, 0.0))};
        return out.truncated(L);
    };
    Q = assemble_q(qt);
    double res = unit_modulus_residual(P, Q);
    if (res > 1e-7 && m > 0) {
        // Companion-matrix roots lose accuracy when A's tail decays by many
        // orders of magnitude; the log-domain factor does not care.
        if (const auto h = detail::cepstral_factor(a, half, m)) {
            const LaurentPoly alt = assemble_q(*h);
            const double alt_res = unit_modulus_residual(P, alt);
            if (alt_res < res) {
                Q = alt;
                res = alt_res;
            }
        }
    }
    if (res > 1e-7) {
        throw NumericalError("completion residual " + std::to_string(res) + " exceeds 1e-7");
    }
    return Q;
}

/// Diagnostics from the function-to-circuit pipeline.
struct SynthesisResult {
    AngleSet angles;
    PolyPair pair;
    /// Truncated series of sqrt((1 + f_K) / 2).
    FourierSeries g;
    /// sup |g - sqrt((1 + f_K) / 2)| on the check grid.
    double inner_error = 0.0;
    /// Factor applied to g when its sup-norm exceeded 1 (1 otherwise).
    double scale = 1.0;
};

struct SynthesisOptions {
    /// Order of g; 0 selects max(2K, 16).
    int inner_order = 0;
    /// Points used for the inner-error and sup checks.
    std::size_t check_points = 4096;
};

namespace detail {

inline std::vector<double> periodic_grid(std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) {
        xs[j] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / n;
    }
    return xs;
}

/// sqrt((1 + f)/2) with tiny negative excursions clamped.
/// Relative size below which trailing coefficients of g are dropped.
inline constexpr double g_tail_rel = 1e-7;

inline double half_angle_root(double f) {
    const double v = 1.0 + f;
    if (v < -1e-9) {
        throw DomainError("1 + f_K is negative (" + std::to_string(v) +
                          "); target leaves [-1, 1]");
    }
    return std::sqrt(std::max(v, 0.0) / 2.0);
}

inline SynthesisResult synthesize_common(const FourierSeries &fK, Field field,
                                         const SynthesisOptions &opt) {
    if (std::abs(fK.period - 2.0 * std::numbers::pi) > 1e-12) {
        throw std::invalid_argument("synthesis targets must have period 2 pi");
    }
    const int M = opt.inner_order > 0 ? opt.inner_order : std::max(2 * fK.K, 16);
    const auto grid = periodic_grid(opt.check_points);
    for (double x : grid) {
        const Complex v = eval_series(fK, x);
        if (std::abs(v.imag()) > 1e-9) {
            throw std::invalid_argument("target series is not real-valued");
        }
        (void)half_angle_root(v.real());
    }
    const auto h = [&fK](double x) { return half_angle_root(eval_series(fK, x).real()); };

    SynthesisResult res;
    res.g = project(h, M);
    if (field == Field::Real) {
        for (int n = -M; n <= M; ++n) {
            const double c = 0.5 * (res.g.coeff(n).real() + res.g.coeff(-n).real());
            res.g.coeff_ref(n) = c;
        }
    }
    // Drop a negligible tail of g. Tiny leading coefficients make the peel
    // angles ratios of round-off and cost accuracy without adding any.
    double gmax = 0.0;
    for (int n = -M; n <= M; ++n) {
        gmax = std::max(gmax, std::abs(res.g.coeff(n)));
    }
    int order = M;
    while (order > 0 && std::abs(res.g.coeff(order)) <= g_tail_rel * gmax &&
           std::abs(res.g.coeff(-order)) <= g_tail_rel * gmax) {
        --order;
    }
    if (order < M) {
        FourierSeries trimmed(order, res.g.period);
        for (int n = -order; n <= order; ++n) {
            trimmed.coeff_ref(n) = res.g.coeff(n);
        }
        res.g = trimmed;
    }
    const int L = 2 * order;
    LaurentPoly P(L);
    for (int n = -order; n <= order; ++n) {
        P.set(2 * n, res.g.coeff(n));
    }

    double sup_g = 0.0;
    for (double x : grid) {
        res.inner_error = std::max(res.inner_error, std::abs(eval_series(res.g, x) - h(x)));
    }
    for (double x : validation_grid(4 * opt.check_points)) {
        sup_g = std::max(sup_g, std::abs(P(x)));
    }
    if (sup_g > 1.0) {
        res.scale = 1.0 / sup_g;
        P *= Complex{res.scale};
    }

    res.pair.L = L;
    res.pair.P = P;
    res.pair.Q = complete(P, L, field);
    res.angles = (field == Field::Real) ? peel_yzy(res.pair) : peel_wzw(res.pair);
    return res;
}

} // namespace detail

/// Even, real target: YZY circuit with L = 2 * (order of g) whose
/// <0|U|0> is the truncated series g of sqrt((1 + f_K)/2).
[[nodiscard]] inline SynthesisResult synthesize_even_report(const FourierSeries &fK,
                                                            const SynthesisOptions &opt = {}) {
    if (!fK.is_real_even()) {
        throw std::invalid_argument("synthesize_even needs real, even coefficients");
    }
    return detail::synthesize_common(fK, Field::Real, opt);
}

[[nodiscard]] inline AngleSet synthesize_even(const FourierSeries &fK,
                                              const SynthesisOptions &opt = {}) {
    return synthesize_even_report(fK, opt).angles;
}

/// Any real-valued target: WZW circuit built the same way with complex g.
[[nodiscard]] inline SynthesisResult synthesize_any_report(const FourierSeries &fK,
                                                           const SynthesisOptions &opt = {}) {
    return detail::synthesize_common(fK, Field::Complex, opt);
}

[[nodiscard]] inline AngleSet synthesize_any(const FourierSeries &fK,
                                             const SynthesisOptions &opt = {}) {
    return synthesize_any_report(fK, opt).angles;
}

/// <Z> of the circuit on |0> from its polynomial pair: |P|^2 - |Q|^2.
[[nodiscard]] inline double z_expectation(const PolyPair &pq, double x) {
    return std::norm(pq.P(x)) - std::norm(pq.Q(x));
}

} // namespace qnnlab
