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

#include <gtest/gtest.h>

#include <qnnlab/experiment.hpp>
#include <qnnlab/qsp.hpp>

#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace qnnlab;
using std::numbers::pi;

namespace {

AngleSet random_yzy(int L, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-2 * pi, 2 * pi);
    AngleSet a;
    a.L = L;
    for (int k = 0; k <= L; ++k) {
        a.theta.push_back(u(rng));
    }
    return a;
}

AngleSet random_wzw(int L, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-2 * pi, 2 * pi);
    AngleSet a;
    a.ansatz = QspAnsatz::WZW;
    a.L = L;
    for (int k = 0; k <= L; ++k) {
        a.theta.push_back(u(rng));
        a.phi.push_back(u(rng));
    }
    a.varphi = u(rng);
    return a;
}

double pair_diff(const PolyPair &a, const PolyPair &b) {
    return std::max(max_coeff_diff(a.P, b.P), max_coeff_diff(a.Q, b.Q));
}

// Gate-by-gate product in the circuit's matrix order.
oracle::Mat yzy_matrix(const AngleSet &a, double x) {
    oracle::Mat m = oracle::from2(rot_gate(Axis::Y, a.theta[0]));
    for (int j = 1; j <= a.L; ++j) {
        m = oracle::matmul(m, oracle::from2(rot_gate(Axis::Z, x)));
        m = oracle::matmul(m, oracle::from2(rot_gate(Axis::Y, a.theta[static_cast<std::size_t>(j)])));
    }
    return m;
}

oracle::Mat wzw_matrix(const AngleSet &a, double x) {
    const auto W = [&](std::size_t j) {
        return oracle::matmul(oracle::from2(rot_gate(Axis::Y, a.theta[j])),
                              oracle::from2(rot_gate(Axis::Z, a.phi[j])));
    };
    oracle::Mat m = oracle::matmul(oracle::from2(rot_gate(Axis::Z, a.varphi)), W(0));
    for (int j = 1; j <= a.L; ++j) {
        m = oracle::matmul(m, oracle::from2(rot_gate(Axis::Z, x)));
        m = oracle::matmul(m, W(static_cast<std::size_t>(j)));
    }
    return m;
}

double matrix_gap(const PolyPair &pq, const oracle::Mat &m, double x) {
    const auto u = assemble(pq, x);
    double g = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            g = std::max(g, std::abs(u(r, c) - m[r][c]));
        }
    }
    return g;
}

// Pair conditions: degree, parity, unit modulus.
void expect_valid_pair(const PolyPair &pq, double tol = 1e-9) {
    EXPECT_LE(pq.P.degree(), pq.L);
    EXPECT_LE(pq.Q.degree(), pq.L);
    const Parity want = pq.L % 2 == 0 ? Parity::Even : Parity::Odd;
    if (!pq.P.is_zero()) {
        EXPECT_EQ(parity_of(pq.P), want);
    }
    if (!pq.Q.is_zero()) {
        EXPECT_EQ(parity_of(pq.Q), want);
    }
    EXPECT_LT(unit_modulus_residual(pq.P, pq.Q), tol);
}

} // namespace

TEST(ForwardYzy, BaseCases) {
    AngleSet a;
    a.theta = {pi / 2};
    const auto pq = forward_yzy(a);
    EXPECT_NEAR(pq.P.coeff(0).real(), std::cos(pi / 4), 1e-15);
    EXPECT_NEAR(pq.Q.coeff(0).real(), std::sin(pi / 4), 1e-15);

    AngleSet b;
    b.L = 1;
    b.theta = {0.0, 0.0};
    const auto bare = forward_yzy(b);
    EXPECT_NEAR(std::abs(bare.P.coeff(-1) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(bare.P.degree(), 1);
    EXPECT_TRUE(bare.Q.is_zero());
}

TEST(ForwardYzy, MatchesGateProduct) {
    std::mt19937_64 rng(20);
    const auto a = random_yzy(20, rng);
    const auto pq = forward_yzy(a);
    EXPECT_TRUE(pq.P.is_real() && pq.Q.is_real());
    expect_valid_pair(pq);
    for (double x : linspace({-2 * pi, 2 * pi}, 50)) {
        EXPECT_LT(matrix_gap(pq, yzy_matrix(a, x), x), 1e-10);
    }
}

TEST(ForwardYzy, RejectsWrongTag) {
    std::mt19937_64 rng(1);
    EXPECT_THROW((void)forward_yzy(random_wzw(2, rng)), std::invalid_argument);
    EXPECT_THROW((void)forward_wzw(random_yzy(2, rng)), std::invalid_argument);
}

TEST(ForwardWzw, BaseCases) {
    AngleSet a;
    a.ansatz = QspAnsatz::WZW;
    a.theta = {pi / 2};
    a.phi = {0.0};
    const auto pq = forward_wzw(a);
    EXPECT_NEAR(std::abs(pq.P.coeff(0) - std::sqrt(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(pq.Q.coeff(0) - std::sqrt(0.5)), 0.0, 1e-15);

    AngleSet b = a;
    b.varphi = pi;
    b.theta = {0.0};
    const auto ph = forward_wzw(b);
    EXPECT_NEAR(std::abs(ph.P.coeff(0) - Complex{0, -1}), 0.0, 1e-15);
    EXPECT_TRUE(ph.Q.is_zero());
}

TEST(ForwardWzw, MatchesGateProduct) {
    std::mt19937_64 rng(21);
    const auto a = random_wzw(15, rng);
    const auto pq = forward_wzw(a);
    expect_valid_pair(pq);
    for (double x : linspace({-2 * pi, 2 * pi}, 50)) {
        EXPECT_LT(matrix_gap(pq, wzw_matrix(a, x), x), 1e-9);
    }
}

TEST(PeelYzy, Examples) {
    PolyPair id;
    id.P = LaurentPoly::constant(1.0);
    const auto a = peel_yzy(id);
    ASSERT_EQ(a.theta.size(), 1U);
    EXPECT_LT(pair_diff(forward_yzy(a), id), 1e-15);

    AngleSet src;
    src.L = 2;
    src.theta = {0.3, 1.1, -0.7};
    const auto pq = forward_yzy(src);
    EXPECT_LT(pair_diff(forward_yzy(peel_yzy(pq)), pq), 1e-9);

    PolyPair trig;
    trig.L = 1;
    trig.P = LaurentPoly{{-1, 0.5}, {1, -0.5}};
    trig.Q = LaurentPoly{{-1, 0.5}, {1, 0.5}};
    EXPECT_LT(pair_diff(forward_yzy(peel_yzy(trig)), trig), 1e-10);
    AngleSet half;
    half.L = 1;
    half.theta = {pi / 2, pi / 2};
    EXPECT_LT(pair_diff(forward_yzy(half), trig), 1e-15);
}

TEST(PeelYzy, ConditionErrors) {
    PolyPair bad;
    bad.L = 1;
    bad.P = LaurentPoly{{-2, 0.5}, {0, 0.5}};
    try {
        (void)peel_yzy(bad);
        FAIL() << "degree violation accepted";
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.condition(), 1);
    }
    bad.L = 2;
    bad.P = LaurentPoly{{-1, 1.0}};
    try {
        (void)peel_yzy(bad);
        FAIL() << "parity violation accepted";
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.condition(), 2);
    }
    bad.P = LaurentPoly{{0, 0.5}};
    try {
        (void)peel_yzy(bad);
        FAIL() << "non-unimodular pair accepted";
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.condition(), 3);
    }
    bad.P = LaurentPoly{{0, Complex{0, 1}}};
    try {
        (void)peel_yzy(bad);
        FAIL() << "complex pair accepted by the real peel";
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.condition(), 0);
    }
}

TEST(PeelWzw, Examples) {
    PolyPair ph;
    ph.P = LaurentPoly::constant(Complex{0, -1});
    const auto a = peel_wzw(ph);
    EXPECT_NEAR(std::abs(std::cos(a.theta[0] / 2)), 1.0, 1e-12);
    const double s = std::remainder(a.varphi + a.phi[0] - pi, 4 * pi);
    // cos(theta/2) may carry a sign that shifts the phase branch by 2 pi.
    EXPECT_TRUE(std::abs(s) < 1e-12 || std::abs(std::abs(s) - 2 * pi) < 1e-12) << s;
    EXPECT_LT(pair_diff(forward_wzw(a), ph), 1e-15);

    PolyPair bad;
    bad.L = 3;
    bad.P = LaurentPoly{{-2, 0.6}, {2, 0.8}};
    try {
        (void)peel_wzw(bad);
        FAIL() << "parity violation accepted";
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.condition(), 2);
    }
}

// Shallow circuits peel reliably at the contract tolerance.
TEST(Peel, RoundTripShallow) {
    std::mt19937_64 rng(30);
    for (int L = 0; L <= 12; ++L) {
        for (int i = 0; i < 25; ++i) {
            const auto y = forward_yzy(random_yzy(L, rng));
            EXPECT_LT(pair_diff(forward_yzy(peel_yzy(y)), y), 1e-8) << "YZY L=" << L;
            const auto w = forward_wzw(random_wzw(L, rng));
            EXPECT_LT(pair_diff(forward_wzw(peel_wzw(w)), w), 1e-8) << "WZW L=" << L;
        }
    }
}

// Deep random circuits: the peel either reproduces the pair or raises
// NumericalError; it never returns angles that miss the pair.
TEST(Peel, DeepCircuitsNeverFailSilently) {
    std::mt19937_64 rng(31);
    int recovered = 0;
    int total = 0;
    for (int L : {25, 35}) {
        for (int i = 0; i < 6; ++i) {
            for (bool wzw : {false, true}) {
                const auto pq = wzw ? forward_wzw(random_wzw(L, rng)) : forward_yzy(random_yzy(L, rng));
                ++total;
                try {
                    const auto a = wzw ? peel_wzw(pq) : peel_yzy(pq);
                    const auto back = wzw ? forward_wzw(a) : forward_yzy(a);
                    EXPECT_LT(pair_diff(back, pq), 1e-8);
                    ++recovered;
                } catch (const NumericalError &) {
                }
            }
        }
    }
    RecordProperty("recovered", recovered);
    RecordProperty("total", total);
}

TEST(Peel, SmoothTargetsPeelAtDepth) {
    // A smooth target has a rapidly decaying g; its negligible tail is
    // dropped before peeling, so the circuit depth tracks the useful order.
    const auto f = [](double x) { return 0.5 * std::cos(3 * x); };
    for (int M : {16, 32, 48}) {
        const auto d = synth_demo(f, 3, false, SynthesisOptions{M, 4096});
        EXPECT_EQ(d.synthesis.angles.L, 2 * d.synthesis.g.K);
        EXPECT_LE(d.synthesis.g.K, M);
        EXPECT_LE(d.deviation, d.bound);
        EXPECT_LT(pair_diff(forward_wzw(d.synthesis.angles), d.synthesis.pair), 1e-8);
    }
}

TEST(Complete, Examples) {
    const auto q0 = complete(LaurentPoly::constant(1.0), 0, Field::Real);
    EXPECT_LT(q0.max_abs_coeff(), 1e-7);

    const LaurentPoly P{{-1, 0.5}, {1, -0.5}};
    const auto Q = complete(P, 1, Field::Real);
    EXPECT_TRUE(Q.is_real(1e-12));
    EXPECT_LT(unit_modulus_residual(P, Q), 1e-7);
    const LaurentPoly cosine{{-1, 0.5}, {1, 0.5}};
    EXPECT_TRUE(max_coeff_diff(Q, cosine) < 1e-7 || max_coeff_diff(Q, -1.0 * cosine) < 1e-7);
}

TEST(Complete, RandomRealAndComplex) {
    std::mt19937_64 rng(40);
    std::normal_distribution<double> g;
    for (Field field : {Field::Real, Field::Complex}) {
        for (int t = 0; t < 5; ++t) {
            const int L = 12;
            LaurentPoly P(L);
            for (int k = -L; k <= L; k += 2) {
                P.set(k, field == Field::Real ? Complex{g(rng)} : Complex{g(rng), g(rng)});
            }
            double sup = 0.0;
            for (double x : validation_grid(8192)) {
                sup = std::max(sup, std::abs(P(x)));
            }
            P *= Complex{0.9 / sup};
            const auto Q = complete(P, L, field);
            EXPECT_LE(Q.degree(), L);
            EXPECT_NE(parity_of(Q), Parity::Odd);
            if (field == Field::Real) {
                EXPECT_TRUE(Q.is_real(1e-12));
            }
            EXPECT_LT(unit_modulus_residual(P, Q), 1e-7);
            PolyPair pq{P, Q, L};
            for (double x : validation_grid()) {
                EXPECT_LT(unitarity_defect(assemble(pq, x)), 1e-7);
            }
        }
    }
}

TEST(Complete, RejectsModulusAboveOne) {
    const LaurentPoly P{{0, 0.7}, {2, 0.7}};
    try {
        (void)complete(P, 2, Field::Complex);
        FAIL() << "|P| > 1 accepted";
    } catch (const ConstraintViolation &e) {
        EXPECT_GT(e.modulus(), 1.0);
        EXPECT_NEAR(std::abs(P(e.witness())), e.modulus(), 1e-6);
    }
}

TEST(SynthesizeEven, ZeroTarget) {
    FourierSeries f(0);
    const auto r = synthesize_even_report(f);
    const auto pq = forward_yzy(r.angles);
    for (double x : linspace({-pi, pi}, 64)) {
        EXPECT_NEAR(z_expectation(pq, x), 0.0, 1e-9);
    }
}

// The chain bound |<Z> - f_K| <= 4 |g - sqrt((1 + f_K)/2)| + 1e-6 is the
// guaranteed quantity; the absolute error shrinks with the inner order.
TEST(SynthesizeEven, CosineWithinChainBound) {
    const auto f = [](double x) { return std::cos(x); };
    for (int M : {16, 32}) {
        const auto d = synth_demo(f, 1, true, SynthesisOptions{M, 4096});
        EXPECT_LE(d.deviation, d.bound) << "M=" << M;
        double sup = 0.0;
        const auto pq = forward_yzy(d.synthesis.angles);
        for (double x : linspace({-pi, pi}, 512)) {
            sup = std::max(sup, std::abs(z_expectation(pq, x) - std::cos(x)));
        }
        if (M == 32) {
            EXPECT_LT(sup, 1e-3);
        }
    }
}

TEST(SynthesizeEven, SincK8WithinChainBound) {
    const auto d = synth_demo(sinc5, 8, true);
    EXPECT_LE(d.deviation, d.bound);
    EXPECT_EQ(d.synthesis.angles.ansatz, QspAnsatz::YZY);
}

TEST(SynthesizeAny, SineAndZero) {
    const auto d = synth_demo([](double x) { return std::sin(x); }, 1, false,
                              SynthesisOptions{32, 4096});
    EXPECT_LE(d.deviation, d.bound);
    EXPECT_LT(d.deviation, 1e-3);
    const auto z = synthesize_any_report(FourierSeries(0));
    const auto pq = forward_wzw(z.angles);
    for (double x : linspace({-pi, pi}, 64)) {
        EXPECT_NEAR(z_expectation(pq, x), 0.0, 1e-9);
    }
}

TEST(SynthesizeAny, SquareWaveSeries) {
    // Gibbs overshoot pushes the unit-amplitude K=8 series below -1.
    EXPECT_THROW((void)synth_demo(named_target("square"), 8, false), DomainError);
    const auto d = synth_demo([](double x) { return 0.8 * square_wave(x, 2 * pi, 1.0); }, 8, false);
    EXPECT_LE(d.deviation, d.bound);
}

TEST(Synthesize, RejectsOutOfRangeTargets) {
    FourierSeries f(0);
    f.coeff_ref(0) = -1.5;
    EXPECT_THROW((void)synthesize_even(f), DomainError);
    FourierSeries odd(1);
    odd.coeff_ref(1) = Complex{0, -0.5};
    odd.coeff_ref(-1) = Complex{0, 0.5};
    EXPECT_THROW((void)synthesize_even(odd), std::invalid_argument);
}
