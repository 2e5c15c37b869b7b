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
 * Synthetic target generators, CSV ingestion and exact CSV emission.
 *
 * Generators are pure functions of their arguments and seed. Classification
 * targets are one-hot rows encoded as +1 for the true class and -1 elsewhere.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "training.hpp"

namespace qnnlab {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// n uniformly spaced points including both ends.
[[nodiscard]] inline std::vector<double> linspace(Interval iv, std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("linspace needs at least two points");
    }
    std::vector<double> x(n);
    const double h = (iv.hi - iv.lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = iv.lo + h * static_cast<double>(i);
    }
    x.back() = iv.hi;
    return x;
}

/// sin(5x)/(5x), continuous at 0.
[[nodiscard]] inline double sinc5(double x) {
    const double u = 5.0 * x;
    if (std::abs(u) < 1e-4) {
        // Taylor through u^4; truncation below 1e-19.
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

/// Marks a seeded random `n_train` of the rows Train and the rest Test.
inline void assign_split(Dataset &ds, std::size_t n_train, std::uint64_t seed) {
    std::vector<std::size_t> order = ds.all_rows();
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    ds.split.assign(ds.size(), Split::Test);
    for (std::size_t i = 0; i < std::min(n_train, order.size()); ++i) {
        ds.split[order[i]] = Split::Train;
    }
}

/// Grid samples of sin(5x)/(5x); two thirds of the rows train (200/100 at
/// the default 300 points).
[[nodiscard]] inline Dataset gen_sinc(std::size_t n_points = 300,
                                      Interval iv = {0.0, std::numbers::pi},
                                      std::uint64_t seed = 0) {
    Dataset ds;
    for (double x : linspace(iv, n_points)) {
        ds.inputs.push_back({x});
        ds.targets.push_back({sinc5(x)});
    }
    assign_split(ds, (2 * n_points + 1) / 3, seed);
    return ds;
}

/// amplitude * sign(sin(2 pi x / period)) with sign(0) = +1.
[[nodiscard]] inline double square_wave(double x, double period, double amplitude) {
    if (!(period > 0.0)) {
        throw std::invalid_argument("square-wave period must be positive");
    }
    // Zeros of sin sit on the half-period grid but evaluate to +-eps; snap
    // them so sign(0) = +1 holds at every crossing.
    double frac = x / (period / 2.0);
    frac -= std::floor(frac);
    if (frac < 1e-12 || frac > 1.0 - 1e-12) {
        return amplitude;
    }
    const double s = std::sin(2.0 * std::numbers::pi * x / period);
    return s >= 0.0 ? amplitude : -amplitude;
}

/// Grid samples of the square wave, every row tagged `tag`.
[[nodiscard]] inline Dataset gen_square_wave(std::size_t n_points = 400,
                                             Interval iv = {0.0, 20.0},
                                             double period = std::numbers::pi,
                                             double amplitude = 1.0,
                                             Split tag = Split::Train) {
    if (!(std::abs(amplitude) <= 1.0)) {
        throw std::invalid_argument("square-wave amplitude must lie in [-1, 1]");
    }
    Dataset ds;
    for (double x : linspace(iv, n_points)) {
        ds.inputs.push_back({x});
        ds.targets.push_back({square_wave(x, period, amplitude)});
        ds.split.push_back(tag);
    }
    return ds;
}

[[nodiscard]] inline double bivariate_raw(double x, double y) {
    const double a = x * x + y - 1.5 * std::numbers::pi;
    const double b = x + y * y - std::numbers::pi;
    return a * a + b * b;
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Extrema of bivariate_raw on the inclusive 512 x 512 grid over [-pi, pi]^2.
[[nodiscard]] inline Range bivariate_extrema(std::size_t grid = 512) {
    const auto g = linspace({-std::numbers::pi, std::numbers::pi}, grid);
    Range r{bivariate_raw(g[0], g[0]), bivariate_raw(g[0], g[0])};
    for (double x : g) {
        for (double y : g) {
            const double v = bivariate_raw(x, y);
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    }
    return r;
}

/// bivariate_raw min-max mapped to [-1, 1] with the grid extrema, clamped
/// because the true minimum (0) lies below the grid minimum.
[[nodiscard]] inline double bivariate_normalized(double x, double y, Range r) {
    const double v = 2.0 * (bivariate_raw(x, y) - r.lo) / (r.hi - r.lo) - 1.0;
    return std::clamp(v, -1.0, 1.0);
}

/// Uniform random samples over [-pi, pi]^2, all tagged Train.
[[nodiscard]] inline Dataset gen_bivariate(std::size_t n_points = 400, std::uint64_t seed = 0) {
    if (n_points < 4) {
        throw std::invalid_argument("gen_bivariate needs at least 4 points");
    }
    const Range r = bivariate_extrema();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    Dataset ds;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = u(rng);
        const double y = u(rng);
        ds.inputs.push_back({x, y});
        ds.targets.push_back({bivariate_normalized(x, y, r)});
        ds.split.push_back(Split::Train);
    }
    return ds;
}

enum class Normalization { None, MinMaxToPi };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

inline bool parse_double(const std::string &s, double &v) {
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    return ec == std::errc{} && ptr == last && std::isfinite(v);
}

} // namespace detail

/// One-hot rows with +1 at the class and -1 elsewhere.
[[nodiscard]] inline std::vector<double> pm_one_hot(int label, int n_classes) {
    std::vector<double> t(static_cast<std::size_t>(n_classes), -1.0);
    t.at(static_cast<std::size_t>(label)) = 1.0;
    return t;
}

[[nodiscard]] inline int class_count(const Dataset &ds) {
    return ds.labels.empty() ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
}

/// Per-feature min-max map into [0, pi]; constant columns map to 0.
inline void minmax_to_pi(std::vector<std::vector<double>> &rows) {
    if (rows.empty()) {
        return;
    }
    for (std::size_t j = 0; j < rows.front().size(); ++j) {
        double lo = rows[0][j];
        double hi = rows[0][j];
        for (const auto &r : rows) {
            lo = std::min(lo, r[j]);
            hi = std::max(hi, r[j]);
        }
        for (auto &r : rows) {
            r[j] = hi > lo ? std::numbers::pi * (r[j] - lo) / (hi - lo) : 0.0;
        }
    }
}

/// Headered CSV with one label column (by name; empty selects the last
/// column). Labels become class indices in order of first appearance. Every
/// row is tagged Train.
[[nodiscard]] inline Dataset parse_csv(std::istream &in, const std::string &label_column = {},
                                       Normalization norm = Normalization::MinMaxToPi) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("line 1: missing header");
    }
    const auto header = detail::split_csv_line(line);
    std::size_t label_idx = header.size() - 1;
    if (!label_column.empty()) {
        const auto it = std::find(header.begin(), header.end(), label_column);
        if (it == header.end()) {
            throw DataError("line 1: no column named '" + label_column + "'");
        }
        label_idx = static_cast<std::size_t>(it - header.begin());
    }
    if (header.size() < 2) {
        throw DataError("line 1: need at least one feature and one label column");
    }
    Dataset ds;
    std::map<std::string, int> classes;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(cells.size()));
        }
        std::vector<double> x;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_idx) {
                continue;
            }
            double v = 0.0;
            if (!detail::parse_double(cells[j], v)) {
                throw DataError("line " + std::to_string(lineno) + ": non-numeric feature '" +
                                cells[j] + "' in column '" + header[j] + "'");
            }
            x.push_back(v);
        }
        const auto [it, fresh] =
            classes.try_emplace(cells[label_idx], static_cast<int>(classes.size()));
        ds.labels.push_back(it->second);
        ds.inputs.push_back(std::move(x));
        ds.split.push_back(Split::Train);
    }
    if (ds.inputs.empty()) {
        throw DataError("no data rows");
    }
    if (norm == Normalization::MinMaxToPi) {
        minmax_to_pi(ds.inputs);
    }
    const int k = static_cast<int>(classes.size());
    for (int label : ds.labels) {
        ds.targets.push_back(pm_one_hot(label, k));
    }
    return ds;
}

[[nodiscard]] inline Dataset load_csv(const std::string &path,
                                      const std::string &label_column = {},
                                      Normalization norm = Normalization::MinMaxToPi) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return parse_csv(in, label_column, norm);
}

/// Rows of `src` listed in `rows`, labels and split tags carried along.
[[nodiscard]] inline Dataset subset(const Dataset &src, const std::vector<std::size_t> &rows) {
    Dataset ds;
    for (std::size_t r : rows) {
        ds.inputs.push_back(src.inputs.at(r));
        ds.targets.push_back(src.targets.at(r));
        ds.split.push_back(src.split.at(r));
        if (!src.labels.empty()) {
            ds.labels.push_back(src.labels[r]);
        }
    }
    return ds;
}

/// Class-stratified draw of about `n` rows (per-class share rounded, the
/// remainder going to the largest classes first). Returned rows are sorted.
[[nodiscard]] inline std::vector<std::size_t> stratified_sample(const Dataset &ds, std::size_t n,
                                                                std::uint64_t seed) {
    const int k = class_count(ds);
    if (k == 0) {
        throw std::invalid_argument("stratified sampling needs labels");
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    }
    n = std::min(n, ds.size());
    std::vector<std::size_t> quota(by_class.size());
    std::size_t used = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        quota[c] = by_class[c].size() * n / ds.size();
        used += quota[c];
    }
    for (std::size_t c = 0; used < n; c = (c + 1) % by_class.size()) {
        if (quota[c] < by_class[c].size()) {
            ++quota[c];
            ++used;
        }
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto members = by_class[c];
        std::shuffle(members.begin(), members.end(), rng);
        out.insert(out.end(), members.begin(),
                   members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Tags a class-stratified `train_fraction` of rows Train, the rest Test.
inline void stratified_split(Dataset &ds, double train_fraction, std::uint64_t seed) {
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(ds.size())));
    const auto train = stratified_sample(ds, n_train, seed);
    ds.split.assign(ds.size(), Split::Test);
    for (std::size_t r : train) {
        ds.split[r] = Split::Train;
    }
}

/// Shortest decimal that parses back to exactly `v`.
[[nodiscard]] inline std::string format_exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream &out, const Table &t) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        out << (j ? "," : "") << t.header[j];
    }
    out << '\n';
    for (const auto &r : t.rows) {
        if (r.size() != t.header.size()) {
            throw std::invalid_argument("CSV row width differs from header");
        }
        for (std::size_t j = 0; j < r.size(); ++j) {
            out << (j ? "," : "") << format_exact(r[j]);
        }
        out << '\n';
    }
}

/// Inverse of write_csv.
[[nodiscard]] inline Table read_csv_table(std::istream &in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("line 1: missing header");
    }
    t.header = detail::split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != t.header.size()) {
            throw DataError("line " + std::to_string(lineno) + ": wrong field count");
        }
        std::vector<double> r(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (!detail::parse_double(cells[j], r[j])) {
                throw DataError("line " + std::to_string(lineno) + ": bad number '" + cells[j] +
                                "'");
            }
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

} // namespace qnnlab
