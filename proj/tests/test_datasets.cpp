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

#include <qnnlab/datasets.hpp>
#include <qnnlab/errors.hpp>

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace qnnlab;
using std::numbers::pi;

TEST(Sinc, Examples) {
    EXPECT_EQ(sinc5(0.0), 1.0);
    EXPECT_NEAR(sinc5(pi / 5), 0.0, 1e-16);
    // sin(1.5) / 1.5 to 50 digits: 0.66499665773603628729...
    EXPECT_NEAR(sinc5(0.3), 0.66499665773603628729, 2e-16);
    // The Taylor branch joins the direct formula smoothly.
    for (double x : {1.9e-5, 2.1e-5, -2e-5, 1e-9}) {
        const double u = 5 * x;
        EXPECT_NEAR(sinc5(x), 1.0 - u * u / 6.0 + u * u * u * u / 120.0, 2.3e-16);
    }
}

TEST(Sinc, GridAndSplit) {
    const Dataset ds = gen_sinc();
    ASSERT_EQ(ds.size(), 300U);
    EXPECT_EQ(ds.rows(Split::Train).size(), 200U);
    EXPECT_EQ(ds.rows(Split::Test).size(), 100U);
    EXPECT_EQ(ds.inputs.front()[0], 0.0);
    EXPECT_DOUBLE_EQ(ds.inputs.back()[0], pi);
    EXPECT_EQ(ds.targets.front()[0], 1.0);
    ds.validate();

    const Dataset again = gen_sinc();
    EXPECT_EQ(again.split, ds.split);
    EXPECT_NE(gen_sinc(300, {0.0, pi}, 1).split, ds.split);
}

TEST(SquareWave, Examples) {
    const double period = 4.0;
    EXPECT_EQ(square_wave(period / 4, period, 0.7), 0.7);
    EXPECT_EQ(square_wave(3 * period / 4, period, 0.7), -0.7);
    EXPECT_EQ(square_wave(0.0, period, 0.7), 0.7);
    // Every crossing counts as sign(0) = +1.
    for (int k = 1; k < 12; ++k) {
        EXPECT_EQ(square_wave(k * period / 2, period, 1.0), 1.0) << k;
        EXPECT_EQ(square_wave(k * pi / 2, pi, 1.0), 1.0) << k;
    }
    EXPECT_THROW((void)square_wave(1.0, 0.0, 1.0), std::invalid_argument);

    const Dataset ds = gen_square_wave();
    EXPECT_EQ(ds.size(), 400U);
    EXPECT_EQ(ds.inputs.back()[0], 20.0);
    for (const auto &t : ds.targets) {
        EXPECT_EQ(std::abs(t[0]), 1.0);
    }
    EXPECT_THROW((void)gen_square_wave(10, {0, 1}, pi, 1.5), std::invalid_argument);
}

TEST(Bivariate, RangeAndMinimum) {
    const Range r = bivariate_extrema();
    EXPECT_GE(r.lo, 0.0);
    // The raw function is a sum of squares with exact zeros inside the box:
    // y = 1.5 pi - x^2 and x = pi - y^2 meet at a root of the quartic below.
    double lo = -pi;
    double hi = pi;
    auto h = [](double x) {
        const double y = 1.5 * pi - x * x;
        return x + y * y - pi;
    };
    // Bracket one root on the coarse grid, then bisect.
    for (double x = -pi; x < pi; x += 0.01) {
        if (h(x) * h(x + 0.01) <= 0 && std::abs(1.5 * pi - x * x) <= pi) {
            lo = x;
            hi = x + 0.01;
            break;
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (h(lo) * h(m) <= 0 ? hi : lo) = m;
    }
    const double x0 = 0.5 * (lo + hi);
    const double y0 = 1.5 * pi - x0 * x0;
    EXPECT_LT(bivariate_raw(x0, y0), 1e-20);
    EXPECT_EQ(bivariate_normalized(x0, y0, r), -1.0);
    // The grid minimum is close to the true minimum.
    EXPECT_LT(r.lo, 0.05 * (r.hi - r.lo));

    const Dataset ds = gen_bivariate();
    ASSERT_EQ(ds.size(), 400U);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_GE(ds.targets[i][0], -1.0 - 1e-9);
        EXPECT_LE(ds.targets[i][0], 1.0 + 1e-9);
        for (double v : ds.inputs[i]) {
            EXPECT_LE(std::abs(v), pi);
        }
    }
    EXPECT_EQ(gen_bivariate(50, 3).inputs, gen_bivariate(50, 3).inputs);
    EXPECT_NE(gen_bivariate(50, 3).inputs, gen_bivariate(50, 4).inputs);
    EXPECT_THROW((void)gen_bivariate(3), std::invalid_argument);
}

TEST(Csv, ToyFile) {
    std::istringstream in("a,b,label\n1,5,yes\n2,5,no\n3,5,yes\n");
    const Dataset ds = parse_csv(in);
    ASSERT_EQ(ds.size(), 3U);
    EXPECT_EQ(ds.dim(), 2U);
    EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(class_count(ds), 2);
    EXPECT_EQ(ds.inputs[0][0], 0.0);
    EXPECT_DOUBLE_EQ(ds.inputs[1][0], pi / 2);
    EXPECT_DOUBLE_EQ(ds.inputs[2][0], pi);
    for (const auto &r : ds.inputs) {
        EXPECT_EQ(r[1], 0.0);
    }
    EXPECT_EQ(ds.targets[1], (std::vector<double>{-1.0, 1.0}));
}

TEST(Csv, NamedLabelAndNoScaling) {
    std::istringstream in("kind,x\nb,0.5\na,-2\n");
    const Dataset ds = parse_csv(in, "kind", Normalization::None);
    EXPECT_EQ(ds.inputs, (std::vector<std::vector<double>>{{0.5}, {-2.0}}));
    EXPECT_EQ(ds.labels, (std::vector<int>{0, 1}));
}

TEST(Csv, Errors) {
    auto fails_with = [](const std::string &text, const std::string &needle) {
        std::istringstream in(text);
        try {
            (void)parse_csv(in);
        } catch (const DataError &e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
            return;
        }
        ADD_FAILURE() << "no DataError for: " << text;
    };
    fails_with("", "line 1");
    fails_with("a,label\n1,x\n2\n", "line 3");
    fails_with("a,label\n1,x\nfoo,y\n", "line 3: non-numeric");
    fails_with("a,label\n", "no data rows");
    std::istringstream in("a,label\n1,x\n");
    EXPECT_THROW((void)parse_csv(in, "nope"), DataError);
    EXPECT_THROW((void)load_csv("/nonexistent/file.csv"), DataError);
}

TEST(Csv, Iris) {
    const Dataset ds = load_csv(std::string(QNNLAB_TEST_DATA) + "/iris.csv");
    EXPECT_EQ(ds.size(), 150U);
    EXPECT_EQ(ds.dim(), 4U);
    EXPECT_EQ(class_count(ds), 3);
    for (const auto &r : ds.inputs) {
        for (double v : r) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, pi);
        }
    }
    ds.validate(false);
}

TEST(Stratified, SampleAndSplit) {
    const Dataset iris = load_csv(std::string(QNNLAB_TEST_DATA) + "/iris.csv");
    const auto rows = stratified_sample(iris, 100, 9);
    ASSERT_EQ(rows.size(), 100U);
    EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end()));
    std::vector<int> per(3, 0);
    for (auto r : rows) {
        ++per[static_cast<std::size_t>(iris.labels[r])];
    }
    for (int c : per) {
        EXPECT_GE(c, 33);
        EXPECT_LE(c, 34);
    }
    Dataset ds = subset(iris, rows);
    stratified_split(ds, 0.8, 9);
    EXPECT_EQ(ds.rows(Split::Train).size(), 80U);
    EXPECT_EQ(ds.rows(Split::Test).size(), 20U);
    EXPECT_EQ(stratified_sample(iris, 100, 9), rows);

    Dataset unlabeled = gen_sinc(10);
    EXPECT_THROW((void)stratified_sample(unlabeled, 5, 0), std::invalid_argument);
}

TEST(CsvTable, RoundTripIsBitExact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    Table t{{"iteration", "instance", "loss"}, {}};
    for (int i = 0; i < 200; ++i) {
        t.rows.push_back({static_cast<double>(i), u(rng), u(rng) * 1e-12});
    }
    t.rows.push_back({std::numeric_limits<double>::min(), -0.0, 0.1});
    t.rows.push_back({std::numeric_limits<double>::max(), 1.0 / 3.0, 5e-324});
    std::stringstream buf;
    write_csv(buf, t);
    const Table back = read_csv_table(buf);
    EXPECT_EQ(back.header, t.header);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(std::bit_cast<std::uint64_t>(back.rows[i][j]),
                      std::bit_cast<std::uint64_t>(t.rows[i][j]));
        }
    }
    Table ragged{{"a", "b"}, {{1.0}}};
    std::stringstream sink;
    EXPECT_THROW(write_csv(sink, ragged), std::invalid_argument);
    std::istringstream bad("a,b\n1,zz\n");
    EXPECT_THROW((void)read_csv_table(bad), DataError);
}
