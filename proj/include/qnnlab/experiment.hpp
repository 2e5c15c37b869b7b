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
 * One-call reproductions of the reference experiments.
 *
 * run_experiment writes everything into a sibling temporary directory and
 * renames it over the output directory at the end, so a failed run leaves
 * no partial artifacts behind.
 */
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "datasets.hpp"
#include "fourier.hpp"
#include "io.hpp"
#include "qsp.hpp"
#include "training.hpp"

namespace qnnlab {

inline const std::set<std::string> &experiment_ids() {
    static const std::set<std::string> ids{"sinc",  "square_wave", "bivariate", "parallel_2q",
                                           "iris",  "synth_demo",  "spectrum_demo"};
    return ids;
}

struct ExperimentConfig {
    std::string id;
    std::filesystem::path output_dir = "out";
    TrainConfig train;
    /// Replaces the experiment's default circuit when set.
    std::optional<CircuitTemplate> tmpl;
    /// Experiment-specific knobs; unknown keys are ignored.
    Json options = Json::object();

    void validate() const {
        if (experiment_ids().count(id) == 0) {
            throw std::invalid_argument("unknown experiment '" + id + "'");
        }
        train.validate();
        if (tmpl) {
            tmpl->validate();
        }
        if (id == "iris") {
            const auto csv = options.value("csv", std::string{"tests/data/iris.csv"});
            if (!std::filesystem::exists(csv)) {
                throw std::invalid_argument("iris: CSV not found: " + csv);
            }
        }
        if (output_dir.empty()) {
            throw std::invalid_argument("output_dir must not be empty");
        }
    }
};

inline void from_json(const Json &j, ExperimentConfig &c) {
    c = ExperimentConfig{};
    c.id = j.at("experiment").get<std::string>();
    c.output_dir = j.value("output_dir", std::string{"out"});
    if (j.contains("train")) {
        c.train = j.at("train").get<TrainConfig>();
    }
    if (j.contains("template")) {
        c.tmpl = j.at("template").get<CircuitTemplate>();
    }
    c.options = j.value("options", Json::object());
    if (!c.options.is_object()) {
        throw std::invalid_argument("options must be an object");
    }
}

inline void to_json(Json &j, const ExperimentConfig &c) {
    j = Json{{"experiment", c.id},
             {"output_dir", c.output_dir.string()},
             {"train", c.train},
             {"options", c.options}};
    if (c.tmpl) {
        j["template"] = *c.tmpl;
    }
}

/// output_dir, re-rooted under $QNNLAB_OUT_DIR when that is set and the
/// path is relative.
[[nodiscard]] inline std::filesystem::path resolve_output(const std::filesystem::path &dir) {
    const char *root = std::getenv("QNNLAB_OUT_DIR");
    if (root != nullptr && *root != '\0' && dir.is_relative()) {
        return std::filesystem::path(root) / dir;
    }
    return dir;
}

namespace detail {

/// Collects artifacts in a temporary directory.
class Staging {
  public:
    explicit Staging(std::filesystem::path final_dir) : final_(std::move(final_dir)) {
        const auto parent = final_.has_parent_path() ? final_.parent_path()
                                                     : std::filesystem::path(".");
        std::filesystem::create_directories(parent);
        std::random_device rd;
        tmp_ = parent / ("." + final_.filename().string() + ".tmp-" + std::to_string(rd()));
        std::filesystem::create_directories(tmp_);
    }

    Staging(const Staging &) = delete;
    Staging &operator=(const Staging &) = delete;

    ~Staging() {
        if (!committed_) {
            std::error_code ec;
            std::filesystem::remove_all(tmp_, ec);
        }
    }

    [[nodiscard]] std::filesystem::path path(const std::string &name) const { return tmp_ / name; }

    void json(const std::string &name, const Json &j) const {
        std::ofstream out(path(name));
        out << j.dump(2) << '\n';
        if (!out) {
            throw std::runtime_error("failed writing " + name);
        }
    }

    void csv(const std::string &name, const Table &t) const {
        std::ofstream out(path(name));
        write_csv(out, t);
        if (!out) {
            throw std::runtime_error("failed writing " + name);
        }
    }

    void commit() {
        std::error_code ec;
        std::filesystem::path old;
        if (std::filesystem::exists(final_)) {
            old = tmp_;
            old += ".old";
            std::filesystem::rename(final_, old);
        }
        std::filesystem::rename(tmp_, final_);
        committed_ = true;
        if (!old.empty()) {
            std::filesystem::remove_all(old, ec);
        }
    }

  private:
    std::filesystem::path final_;
    std::filesystem::path tmp_;
    bool committed_ = false;
};

inline Table loss_table(const TrainReport &r) {
    Table t{{"iteration", "instance", "loss"}, {}};
    for (std::size_t i = 0; i < r.curves.size(); ++i) {
        for (std::size_t k = 0; k < r.curves[i].size(); ++k) {
            t.rows.push_back({static_cast<double>(k), static_cast<double>(i), r.curves[i][k]});
        }
    }
    return t;
}

inline CircuitTemplate pick(const ExperimentConfig &c, CircuitTemplate def) {
    return c.tmpl ? *c.tmpl : std::move(def);
}

inline void append(Dataset &dst, const Dataset &src) {
    dst.inputs.insert(dst.inputs.end(), src.inputs.begin(), src.inputs.end());
    dst.targets.insert(dst.targets.end(), src.targets.begin(), src.targets.end());
    dst.split.insert(dst.split.end(), src.split.begin(), src.split.end());
}

} // namespace detail

/// sup over `xs` of |model(x) - f(x)| for a univariate template.
[[nodiscard]] inline double sup_error(const CircuitTemplate &t, std::span<const double> params,
                                      const std::function<double(double)> &f,
                                      std::span<const double> xs) {
    double worst = 0.0;
    for (double x : xs) {
        const double v = evaluate(t, params, std::span<const double>(&x, 1));
        worst = std::max(worst, std::abs(v - f(x)));
    }
    return worst;
}

inline constexpr std::size_t sup_grid_points = 2001;

[[nodiscard]] inline CircuitTemplate sinc_template(int L) {
    CircuitTemplate t;
    t.ansatz = Ansatz::YZY;
    t.L = L;
    return t;
}

[[nodiscard]] inline CircuitTemplate single_qubit_bivariate_template(int L = 40) {
    CircuitTemplate t;
    t.ansatz = Ansatz::MULTIVARIATE_UZU;
    t.d = 2;
    t.L = L;
    return t;
}

[[nodiscard]] inline CircuitTemplate parallel_template(int n, int L, int d_tr) {
    CircuitTemplate t;
    t.ansatz = Ansatz::PARALLEL_ENTANGLEMENT;
    t.n_qubits = n;
    t.d = n;
    t.L = L;
    t.d_tr = d_tr;
    return t;
}

struct SincRow {
    int L = 0;
    TrainReport report;
    /// Per-instance sup error over [0, pi].
    std::vector<double> sup;
    double best_sup = 0.0;
    double truncation = 0.0;
};

/// Trains YZY models of each depth on the sinc data and measures the
/// uniform error of every instance on a dense grid.
[[nodiscard]] inline std::vector<SincRow> sinc_sweep(const std::vector<int> &layers,
                                                     const TrainConfig &cfg,
                                                     std::size_t n_points = 300) {
    const Dataset ds = gen_sinc(n_points, {0.0, std::numbers::pi}, cfg.seed);
    const auto grid = linspace({0.0, std::numbers::pi}, sup_grid_points);
    std::vector<SincRow> out;
    for (int L : layers) {
        SincRow row;
        row.L = L;
        const auto t = sinc_template(L);
        row.report = fit(t, ds, cfg);
        for (const auto &p : row.report.params) {
            row.sup.push_back(sup_error(t, p, sinc5, grid));
        }
        row.best_sup = *std::min_element(row.sup.begin(), row.sup.end());
        row.truncation = truncation_error(sinc5, project(sinc5, L), 0.0, std::numbers::pi);
        out.push_back(std::move(row));
    }
    return out;
}

struct SynthDemo {
    FourierSeries fK;
    SynthesisResult synthesis;
    /// sup |circuit - f_K| over one period.
    double deviation = 0.0;
    double bound = 0.0;
};

[[nodiscard]] inline std::function<double(double)> named_target(const std::string &name) {
    if (name == "sinc") {
        return sinc5;
    }
    if (name == "cos") {
        return [](double x) { return std::cos(x); };
    }
    if (name == "sin") {
        return [](double x) { return std::sin(x); };
    }
    if (name == "square") {
        return [](double x) { return square_wave(x, 2.0 * std::numbers::pi, 1.0); };
    }
    throw std::invalid_argument("unknown target '" + name + "' (sinc, cos, sin, square)");
}

/// Fourier-truncates `f` at order K, then synthesizes a WZW (or YZY when
/// `even`) circuit and measures it against f_K.
[[nodiscard]] inline SynthDemo synth_demo(const std::function<double(double)> &f, int K,
                                          bool even, const SynthesisOptions &opt = {}) {
    SynthDemo d;
    d.fK = project(f, K);
    if (even) {
        // Quadrature leaves ~1e-17 odd residue; symmetrize so the even path
        // accepts the series.
        for (int n = 0; n <= K; ++n) {
            const double c = 0.5 * (d.fK.coeff(n).real() + d.fK.coeff(-n).real());
            d.fK.coeff_ref(n) = c;
            d.fK.coeff_ref(-n) = c;
        }
    }
    d.synthesis = even ? synthesize_even_report(d.fK, opt) : synthesize_any_report(d.fK, opt);
    const PolyPair pq = even ? forward_yzy(d.synthesis.angles) : forward_wzw(d.synthesis.angles);
    for (double x : detail::periodic_grid(opt.check_points)) {
        d.deviation =
            std::max(d.deviation, std::abs(z_expectation(pq, x) - eval_series(d.fK, x).real()));
    }
    d.bound = 4.0 * d.synthesis.inner_error + 1e-6;
    return d;
}

/// Summary of a run; also written to summary.json.
[[nodiscard]] inline Json run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    const auto out_dir = resolve_output(cfg.output_dir);
    detail::Staging stage(out_dir);
    Json summary{{"experiment", cfg.id}, {"config", cfg}};
    const auto &opt = cfg.options;

    if (cfg.id == "sinc") {
        const auto layers = opt.value("layers", std::vector<int>{3, 7, 15});
        const auto rows = sinc_sweep(layers, cfg.train, opt.value("n_points", std::size_t{300}));
        Table sup{{"layers", "best_sup_error", "truncation_error"}, {}};
        const auto xs = linspace({0.0, std::numbers::pi}, opt.value("grid", std::size_t{500}));
        for (const auto &r : rows) {
            const auto tag = "_L" + std::to_string(r.L);
            stage.json("report" + tag + ".json", r.report);
            stage.csv("loss" + tag + ".csv", detail::loss_table(r.report));
            const auto t = sinc_template(r.L);
            const auto best = static_cast<std::size_t>(
                std::min_element(r.sup.begin(), r.sup.end()) - r.sup.begin());
            Table pred{{"x", "target", "prediction"}, {}};
            for (double x : xs) {
                pred.rows.push_back(
                    {x, sinc5(x), evaluate(t, r.report.params[best], std::span(&x, 1))});
            }
            stage.csv("predictions" + tag + ".csv", pred);
            sup.rows.push_back({static_cast<double>(r.L), r.best_sup, r.truncation});
            summary["sup_error"][std::to_string(r.L)] = r.best_sup;
        }
        stage.csv("sup_error.csv", sup);
    } else if (cfg.id == "square_wave") {
        const double period = opt.value("period", std::numbers::pi);
        const double amplitude = opt.value("amplitude", 1.0);
        Dataset ds = gen_square_wave(opt.value("n_points", std::size_t{400}),
                                     {0.0, opt.value("train_end", 20.0)}, period, amplitude);
        detail::append(ds, gen_square_wave(opt.value("test_points", std::size_t{200}),
                                           {opt.value("train_end", 20.0), opt.value("test_end", 30.0)},
                                           period, amplitude, Split::Test));
        CircuitTemplate def;
        def.ansatz = Ansatz::WZW;
        def.L = 45;
        const auto t = detail::pick(cfg, def);
        const auto rep = fit(t, ds, cfg.train);
        stage.json("report.json", rep);
        stage.csv("loss.csv", detail::loss_table(rep));
        Table pred{{"x", "target", "prediction"}, {}};
        for (double x : linspace({0.0, opt.value("test_end", 30.0)}, opt.value("grid", std::size_t{900}))) {
            pred.rows.push_back({x, square_wave(x, period, amplitude),
                                 evaluate(t, rep.params[rep.best_instance], std::span(&x, 1))});
        }
        stage.csv("predictions.csv", pred);
        summary["best_train_mse"] = rep.best_train();
        summary["best_test_mse"] = rep.final_test.at(rep.best_instance);
    } else if (cfg.id == "bivariate" || cfg.id == "parallel_2q") {
        const Dataset ds = gen_bivariate(opt.value("n_points", std::size_t{400}), cfg.train.seed);
        const auto t = detail::pick(cfg, cfg.id == "bivariate"
                                             ? single_qubit_bivariate_template()
                                             : parallel_template(2, 10, 3));
        const auto rep = fit(t, ds, cfg.train);
        stage.json("report.json", rep);
        stage.csv("loss.csv", detail::loss_table(rep));
        const Range r = bivariate_extrema();
        Table pred{{"x", "y", "target", "prediction"}, {}};
        const auto g = linspace({-std::numbers::pi, std::numbers::pi}, opt.value("grid", std::size_t{41}));
        for (double x : g) {
            for (double y : g) {
                const std::vector<double> v{x, y};
                pred.rows.push_back(
                    {x, y, bivariate_normalized(x, y, r), evaluate(t, rep.params[rep.best_instance], v)});
            }
        }
        stage.csv("predictions.csv", pred);
        summary["best_train_mse"] = rep.best_train();
        summary["param_count"] = param_count(t);
    } else if (cfg.id == "iris") {
        const auto all = load_csv(opt.value("csv", std::string{"tests/data/iris.csv"}),
                                  opt.value("label_column", std::string{}));
        const int k = class_count(all);
        const auto t = detail::pick(cfg, parallel_template(static_cast<int>(all.dim()), 1, 1));
        const int runs = opt.value("runs", 10);
        TrainConfig tc = cfg.train;
        tc.instances = 1;
        tc.batch_size = opt.value("batch_size", 40);
        Table acc{{"instance", "train_accuracy", "test_accuracy"}, {}};
        double mean = 0.0;
        for (int i = 0; i < runs; ++i) {
            const std::uint64_t s = cfg.train.seed + static_cast<std::uint64_t>(i);
            Dataset ds = subset(all, stratified_sample(all, opt.value("samples", std::size_t{100}), s));
            stratified_split(ds, 0.8, s);
            for (auto &y : ds.targets) {
                y.resize(static_cast<std::size_t>(k));
            }
            tc.seed = s;
            const auto rep = fit(t, ds, tc);
            stage.json("report_" + std::to_string(i) + ".json", rep);
            const double tr = accuracy(t, rep.params[0], ds, ds.rows(Split::Train), k);
            const double te = accuracy(t, rep.params[0], ds, ds.rows(Split::Test), k);
            acc.rows.push_back({static_cast<double>(i), tr, te});
            mean += te / runs;
        }
        stage.csv("accuracy.csv", acc);
        summary["mean_test_accuracy"] = mean;
        summary["param_count"] = param_count(t);
    } else if (cfg.id == "synth_demo") {
        const auto name = opt.value("target", std::string{"sinc"});
        SynthesisOptions so;
        so.inner_order = opt.value("inner_order", 0);
        const auto d = synth_demo(named_target(name), opt.value("order", 8),
                                  opt.value("even", false), so);
        stage.json("angles.json", d.synthesis.angles);
        stage.json("series.json", d.fK);
        const PolyPair pq = d.synthesis.angles.ansatz == QspAnsatz::YZY
                                ? forward_yzy(d.synthesis.angles)
                                : forward_wzw(d.synthesis.angles);
        Table pred{{"x", "target", "prediction"}, {}};
        for (double x : linspace({-std::numbers::pi, std::numbers::pi}, opt.value("grid", std::size_t{512}))) {
            pred.rows.push_back({x, eval_series(d.fK, x).real(), z_expectation(pq, x)});
        }
        stage.csv("predictions.csv", pred);
        summary["deviation"] = d.deviation;
        summary["bound"] = d.bound;
        summary["inner_error"] = d.synthesis.inner_error;
        summary["layers"] = d.synthesis.angles.L;
    } else if (cfg.id == "spectrum_demo") {
        const int K = opt.value("K", 3);
        const int dim = opt.value("d", 2);
        CircuitTemplate def;
        def.ansatz = Ansatz::MULTIVARIATE_UZU;
        def.d = dim;
        def.L = K * dim;
        const auto t = detail::pick(cfg, def);
        const Dataset ds = gen_bivariate(opt.value("n_points", std::size_t{400}), cfg.train.seed);
        if (dim != 2) {
            throw std::invalid_argument("spectrum_demo trains on the bivariate target; d must be 2");
        }
        const auto rep = fit(t, ds, cfg.train);
        stage.json("report.json", rep);
        stage.csv("loss.csv", detail::loss_table(rep));
        const auto &p = rep.params[rep.best_instance];
        const auto spec = empirical_spectrum(
            [&](std::span<const double> x) { return evaluate(t, p, x); }, dim,
            opt.value("grid", 16), K);
        Table mag{{"n1", "n2", "magnitude"}, {}};
        for (std::size_t i = 0; i < spec.data.size(); ++i) {
            const auto f = spec.frequency(i);
            mag.rows.push_back({static_cast<double>(f[0]), static_cast<double>(f[1]),
                                std::abs(spec.data[i])});
        }
        stage.csv("spectrum.csv", mag);
        const auto s = spectrum_spec(dim, K);
        summary["max_outside"] = spec.max_outside(K);
        summary["dof"] = s.dof;
        summary["omega_size"] = s.omega_size;
    }
    stage.json("summary.json", summary);
    stage.commit();
    return summary;
}

} // namespace qnnlab
