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

// qnnlab command-line front end. Every subcommand takes --config (JSON) and
// --seed; flags given on the command line override the config file.

#include <CLI11.hpp>

#include <qnnlab/experiment.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace qnnlab;

Json read_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return Json::parse(in);
}

void emit(const std::string &out, const std::string &text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    f << text;
    if (!f) {
        throw std::runtime_error("failed writing " + out);
    }
}

std::string csv_text(const Table &t) {
    std::ostringstream s;
    write_csv(s, t);
    return s.str();
}

// Dataset CSV: columns x*, target*, optional split (0 train, 1 test).
Table dataset_table(const Dataset &ds) {
    Table t;
    for (std::size_t m = 0; m < ds.dim(); ++m) {
        t.header.push_back("x" + std::to_string(m));
    }
    for (std::size_t c = 0; c < ds.outputs(); ++c) {
        t.header.push_back("target" + std::to_string(c));
    }
    t.header.emplace_back("split");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto row = ds.inputs[i];
        row.insert(row.end(), ds.targets[i].begin(), ds.targets[i].end());
        row.push_back(ds.split[i] == Split::Train ? 0.0 : 1.0);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Dataset dataset_from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    const Table t = read_csv_table(in);
    Dataset ds;
    for (const auto &row : t.rows) {
        std::vector<double> x;
        std::vector<double> y;
        Split s = Split::Train;
        for (std::size_t j = 0; j < t.header.size(); ++j) {
            const auto &h = t.header[j];
            if (h.rfind("target", 0) == 0) {
                y.push_back(row[j]);
            } else if (h == "split") {
                s = row[j] == 0.0 ? Split::Train : Split::Test;
            } else {
                x.push_back(row[j]);
            }
        }
        ds.inputs.push_back(std::move(x));
        ds.targets.push_back(std::move(y));
        ds.split.push_back(s);
    }
    return ds;
}

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;

    void attach(CLI::App *app) {
        app->add_option("--config", config, "JSON configuration file");
        app->add_option("--seed", seed, "Override the random seed");
        app->add_option("-o,--out", out, "Output file or directory ('-' for stdout)");
    }

    [[nodiscard]] Json json() const { return config.empty() ? Json::object() : read_json(config); }
};

// Template from --template (file) or the config's "template" key.
CircuitTemplate load_template(const Json &cfg, const std::string &file) {
    if (!file.empty()) {
        return read_json(file).get<CircuitTemplate>();
    }
    if (!cfg.contains("template")) {
        throw std::invalid_argument("no circuit template: pass --template or a config with one");
    }
    return cfg.at("template").get<CircuitTemplate>();
}

TrainConfig load_train(const Json &cfg, const std::optional<std::uint64_t> &seed) {
    TrainConfig tc = cfg.contains("train") ? cfg.at("train").get<TrainConfig>() : TrainConfig{};
    if (seed) {
        tc.seed = *seed;
    }
    return tc;
}

// Parameters from a plain JSON array or from a TrainReport (best instance).
ParamVector load_params(const std::string &file) {
    const Json j = read_json(file);
    if (j.is_array()) {
        return j.get<ParamVector>();
    }
    const auto rep = j.get<TrainReport>();
    return rep.params.at(rep.best_instance);
}

std::vector<double> parse_point(const std::string &s) {
    std::vector<double> x;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        double v = 0.0;
        if (!detail::parse_double(cell, v)) {
            throw std::invalid_argument("bad coordinate '" + cell + "'");
        }
        x.push_back(v);
    }
    return x;
}

void check_against_schema(const Json &j) {
    static const std::set<std::string> top{"experiment", "output_dir", "train", "template",
                                           "options"};
    for (const auto &[k, v] : j.items()) {
        if (top.count(k) == 0) {
            throw std::invalid_argument("unknown top-level key '" + k + "'");
        }
    }
    if (j.contains("train")) {
        static const std::set<std::string> keys{"learning_rate", "iterations", "batch_size",
                                                "seed",          "beta1",      "beta2",
                                                "epsilon",       "instances"};
        for (const auto &[k, v] : j.at("train").items()) {
            if (keys.count(k) == 0) {
                throw std::invalid_argument("unknown train key '" + k + "'");
            }
        }
    }
    if (j.contains("template")) {
        static const std::set<std::string> keys{"ansatz", "n_qubits", "layers", "d",
                                                "layout", "d_tr",     "hybrid"};
        for (const auto &[k, v] : j.at("template").items()) {
            if (keys.count(k) == 0) {
                throw std::invalid_argument("unknown template key '" + k + "'");
            }
        }
    }
    j.get<ExperimentConfig>().validate();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qnnlab: single- and multi-qubit data re-uploading models"};
    app.require_subcommand(1);

    // synthesize
    Common syn_c;
    std::string syn_target = "sinc";
    int syn_order = 8;
    int syn_inner = 0;
    bool syn_even = false;
    auto *syn = app.add_subcommand("synthesize", "Build circuit angles for a Fourier-truncated target");
    syn_c.attach(syn);
    syn->add_option("--target", syn_target, "sinc, cos, sin or square");
    syn->add_option("--order", syn_order, "Fourier truncation order K");
    syn->add_option("--inner-order", syn_inner, "Order of the square-root series (0 = auto)");
    syn->add_flag("--even", syn_even, "Use the real YZY path (even targets only)");

    // train
    Common tr_c;
    std::string tr_data;
    std::string tr_template;
    std::string tr_curve;
    auto *tr = app.add_subcommand("train", "Fit a template to a dataset CSV");
    tr_c.attach(tr);
    tr->add_option("--data", tr_data, "Dataset CSV (x*, target*, split)")->required();
    tr->add_option("--template", tr_template, "Template JSON");
    tr->add_option("--loss-csv", tr_curve, "Also write the loss curve here");

    // eval
    Common ev_c;
    std::string ev_template;
    std::string ev_params;
    std::vector<std::string> ev_points;
    std::string ev_obs;
    auto *ev = app.add_subcommand("eval", "Evaluate a model at points");
    ev_c.attach(ev);
    ev->add_option("--template", ev_template, "Template JSON");
    ev->add_option("--params", ev_params, "Parameter array or TrainReport JSON")->required();
    ev->add_option("--x", ev_points, "Comma-separated input point (repeatable)")->required();
    ev->add_option("--observable", ev_obs, "Pauli string, default Z on qubit 0");

    // spectrum
    Common sp_c;
    std::string sp_template;
    std::string sp_params;
    int sp_grid = 16;
    auto *sp = app.add_subcommand("spectrum", "FFT-bin magnitudes of a model");
    sp_c.attach(sp);
    sp->add_option("--template", sp_template, "Template JSON");
    sp->add_option("--params", sp_params, "Parameter array or TrainReport JSON")->required();
    sp->add_option("--grid", sp_grid, "Samples per dimension (power of two)");

    // classify
    Common cl_c;
    std::string cl_csv;
    std::string cl_label;
    int cl_runs = 10;
    auto *cl = app.add_subcommand("classify", "Train and score a classifier on a labelled CSV");
    cl_c.attach(cl);
    cl->add_option("--csv", cl_csv, "Labelled CSV with header")->required();
    cl->add_option("--label", cl_label, "Label column name (default: last)");
    cl->add_option("--runs", cl_runs, "Independent training instances");

    // gen-data
    Common gd_c;
    std::string gd_kind = "sinc";
    std::size_t gd_n = 0;
    double gd_period = std::numbers::pi;
    double gd_amp = 1.0;
    double gd_lo = 0.0;
    double gd_hi = 0.0;
    auto *gd = app.add_subcommand("gen-data", "Write a synthetic dataset CSV");
    gd_c.attach(gd);
    gd->add_option("--kind", gd_kind, "sinc, square_wave or bivariate");
    gd->add_option("-n,--points", gd_n, "Sample count (default per kind)");
    gd->add_option("--period", gd_period, "Square-wave period");
    gd->add_option("--amplitude", gd_amp, "Square-wave amplitude");
    gd->add_option("--lo", gd_lo, "Interval start");
    gd->add_option("--hi", gd_hi, "Interval end (0 = default)");

    // validate-config
    std::string vc_file;
    auto *vc = app.add_subcommand("validate-config", "Check an experiment config");
    vc->add_option("file", vc_file, "Config JSON")->required();

    // run
    Common run_c;
    std::string run_id;
    auto *run = app.add_subcommand("run", "Run a named experiment end to end");
    run_c.attach(run);
    run->add_option("--experiment", run_id, "Experiment id (overrides the config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (syn->parsed()) {
            const Json cfg = syn_c.json();
            SynthesisOptions so;
            so.inner_order = syn_inner;
            const auto d = synth_demo(named_target(syn_target), syn_order, syn_even, so);
            Json out{{"angles", d.synthesis.angles},
                     {"deviation", d.deviation},
                     {"bound", d.bound},
                     {"inner_error", d.synthesis.inner_error}};
            emit(syn_c.out, out.dump(2) + "\n");
            std::cerr << "sup |circuit - f_K| = " << d.deviation << " (bound " << d.bound << ")\n";
        } else if (tr->parsed()) {
            const Json cfg = tr_c.json();
            const auto t = load_template(cfg, tr_template);
            const auto rep = fit(t, dataset_from_file(tr_data), load_train(cfg, tr_c.seed));
            emit(tr_c.out, Json(rep).dump(2) + "\n");
            if (!tr_curve.empty()) {
                emit(tr_curve, csv_text(detail::loss_table(rep)));
            }
            std::cerr << "best instance " << rep.best_instance << ", train MSE "
                      << rep.best_train() << "\n";
        } else if (ev->parsed()) {
            const auto t = load_template(ev_c.json(), ev_template);
            const auto p = load_params(ev_params);
            const Observable obs = ev_obs.empty()
                                       ? Observable::z_on(0, static_cast<std::size_t>(t.n_qubits))
                                       : Observable::parse(ev_obs);
            std::ostringstream s;
            for (const auto &pt : ev_points) {
                s << format_exact(evaluate(t, p, parse_point(pt), obs)) << "\n";
            }
            emit(ev_c.out, s.str());
        } else if (sp->parsed()) {
            const auto t = load_template(sp_c.json(), sp_template);
            const auto p = load_params(sp_params);
            const auto g = empirical_spectrum(
                [&](std::span<const double> x) { return evaluate(t, p, x); }, t.d, sp_grid);
            Table tab;
            for (int m = 0; m < t.d; ++m) {
                tab.header.push_back("n" + std::to_string(m + 1));
            }
            tab.header.emplace_back("magnitude");
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                std::vector<double> row;
                for (int f : g.frequency(i)) {
                    row.push_back(f);
                }
                row.push_back(std::abs(g.data[i]));
                tab.rows.push_back(std::move(row));
            }
            emit(sp_c.out, csv_text(tab));
        } else if (cl->parsed()) {
            Json cfg = cl_c.json();
            cfg["experiment"] = "iris";
            cfg["options"]["csv"] = cl_csv;
            cfg["options"]["runs"] = cl_runs;
            if (!cl_label.empty()) {
                cfg["options"]["label_column"] = cl_label;
            }
            auto ec = cfg.get<ExperimentConfig>();
            if (cl_c.seed) {
                ec.train.seed = *cl_c.seed;
            }
            if (!cl_c.out.empty()) {
                ec.output_dir = cl_c.out;
            }
            const auto summary = run_experiment(ec);
            std::cout << "mean test accuracy " << summary.at("mean_test_accuracy") << "\n";
        } else if (gd->parsed()) {
            const std::uint64_t seed = gd_c.seed.value_or(gd_c.json().value("seed", 0ULL));
            Dataset ds;
            if (gd_kind == "sinc") {
                ds = gen_sinc(gd_n ? gd_n : 300,
                              {gd_lo, gd_hi != 0.0 ? gd_hi : std::numbers::pi}, seed);
            } else if (gd_kind == "square_wave") {
                ds = gen_square_wave(gd_n ? gd_n : 400, {gd_lo, gd_hi != 0.0 ? gd_hi : 20.0},
                                     gd_period, gd_amp);
            } else if (gd_kind == "bivariate") {
                ds = gen_bivariate(gd_n ? gd_n : 400, seed);
            } else {
                throw std::invalid_argument("unknown dataset kind '" + gd_kind + "'");
            }
            emit(gd_c.out, csv_text(dataset_table(ds)));
        } else if (vc->parsed()) {
            check_against_schema(read_json(vc_file));
            std::cout << vc_file << ": ok\n";
        } else if (run->parsed()) {
            Json cfg = run_c.json();
            if (!run_id.empty()) {
                cfg["experiment"] = run_id;
            }
            auto ec = cfg.get<ExperimentConfig>();
            if (run_c.seed) {
                ec.train.seed = *run_c.seed;
            }
            if (!run_c.out.empty()) {
                ec.output_dir = run_c.out;
            }
            const auto summary = run_experiment(ec);
            Json brief = summary;
            brief.erase("config");
            std::cout << brief.dump(2) << "\n";
        }
    } catch (const std::exception &e) {
        Json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
