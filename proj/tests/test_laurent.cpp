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

#include <qnnlab/io.hpp>
#include <qnnlab/laurent.hpp>

#include <numbers>
#include <random>

using namespace qnnlab;

namespace {

LaurentPoly random_poly(int D, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    LaurentPoly p(D);
    for (int k = -D; k <= D; ++k) {
        p.set(k, Complex{g(rng), g(rng)});
    }
    return p;
}

// Term-by-term sum, independent of the class's evaluator.
Complex direct_sum(const LaurentPoly &p, double x) {
    Complex acc{};
    for (int k = -p.max_exponent(); k <= p.max_exponent(); ++k) {
        acc += p.coeff(k) * Complex{std::cos(k * x / 2), std::sin(k * x / 2)};
    }
    return acc;
}

} // namespace

TEST(LaurentEval, Examples) {
    EXPECT_EQ(eval(LaurentPoly::constant(1.0), 3.7), Complex{1.0});
    const LaurentPoly c{{-1, 0.5}, {1, 0.5}};
    for (double x : {0.0, 0.4, -2.0, 5.5}) {
        EXPECT_NEAR(std::abs(eval(c, x) - std::cos(x / 2)), 0.0, 1e-15);
    }
}

TEST(LaurentEval, MatchesDirectSum) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10, 10);
    const auto p = random_poly(4, rng);
    for (int i = 0; i < 30; ++i) {
        const double x = i == 0 ? 0.7 : u(rng);
        EXPECT_LT(std::abs(eval(p, x) - direct_sum(p, x)), 1e-12);
    }
}

TEST(LaurentMul, Examples) {
    std::mt19937_64 rng(2);
    const auto p = random_poly(3, rng);
    EXPECT_LT(max_coeff_diff(mul(p, LaurentPoly::constant(1.0)), p), 1e-15);
    const auto r = mul(LaurentPoly::monomial(1), LaurentPoly::monomial(-1));
    EXPECT_EQ(r.coeff(0), Complex{1.0});
    EXPECT_EQ(r.degree(), 0);
}

TEST(LaurentMul, PointwiseProductProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2 * std::numbers::pi, 2 * std::numbers::pi);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_poly(2, rng);
        const auto b = random_poly(3, rng);
        const auto ab = mul(a, b);
        EXPECT_LE(ab.degree(), a.degree() + b.degree());
        for (int i = 0; i < 20; ++i) {
            const double x = u(rng);
            EXPECT_LT(std::abs(ab(x) - a(x) * b(x)), 1e-10);
        }
    }
}

TEST(LaurentMul, ParityAdds) {
    const LaurentPoly even{{-2, 0.3}, {0, 0.5}, {2, 0.1}};
    const LaurentPoly odd{{-1, 0.5}, {1, 0.5}};
    EXPECT_EQ(parity_of(mul(even, odd)), Parity::Odd);
    EXPECT_EQ(parity_of(mul(odd, odd)), Parity::Even);
    EXPECT_EQ(parity_of(mul(even, even)), Parity::Even);
}

TEST(ConjReflect, Examples) {
    EXPECT_EQ(conj_reflect(LaurentPoly::constant(1.0)).coeff(0), Complex{1.0});
    const auto r = conj_reflect(LaurentPoly::monomial(1, Complex{0, 1}));
    EXPECT_EQ(r.coeff(-1), (Complex{0, -1}));
    EXPECT_EQ(r.coeff(1), Complex{});
}

TEST(ConjReflect, PointwiseConjugateAndInvolution) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-7, 7);
    for (int t = 0; t < 10; ++t) {
        const auto p = random_poly(5, rng);
        const auto r = conj_reflect(p);
        for (int i = 0; i < 20; ++i) {
            const double x = u(rng);
            EXPECT_LT(std::abs(r(x) - std::conj(p(x))), 1e-12);
        }
        EXPECT_EQ(max_coeff_diff(conj_reflect(r), p), 0.0);
    }
}

TEST(Parity, Examples) {
    EXPECT_EQ(parity_of(LaurentPoly{{-2, 0.3}, {0, 0.5}, {2, 0.1}}), Parity::Even);
    EXPECT_EQ(parity_of(LaurentPoly{{-1, 0.5}, {1, 0.5}}), Parity::Odd);
    EXPECT_EQ(parity_of(LaurentPoly{{0, 0.5}, {1, 0.5}}), Parity::Mixed);
    // Below the zero threshold a coefficient does not count.
    EXPECT_EQ(parity_of(LaurentPoly{{0, 0.5}, {1, 1e-15}}), Parity::Even);
}

TEST(Degree, IgnoresTinyCoefficients) {
    LaurentPoly p(6);
    p.set(6, 1e-15);
    p.set(-3, 2.0);
    EXPECT_EQ(p.degree(), 3);
}

TEST(LaurentJson, RoundTripIsExact) {
    std::mt19937_64 rng(5);
    const auto p = random_poly(6, rng);
    const Json j = p;
    EXPECT_TRUE(j.at("coeffs").at(0).size() == 3);
    const auto back = Json::parse(j.dump()).get<LaurentPoly>();
    EXPECT_EQ(max_coeff_diff(back, p), 0.0);
}
