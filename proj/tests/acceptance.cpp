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

// Acceptance run. Each criterion prints one line
//   criterion N: PASS|FAIL  <measurements>  (<seconds> s, limit <seconds> s)
// and passes only when both the measured property and the time limit hold.

#include <qnnlab/experiment.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace qnnlab;
using std::numbers::pi;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::filesystem::path scratch_dir(const std::string &tag) {
    std::random_device rd;
    return std::filesystem::temp_directory_path() /
           ("qnnlab-acceptance-" + tag + "-" + std::to_string(rd()));
}

AngleSet random_angles(QspAnsatz a, int L, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-2 * pi, 2 * pi);
    AngleSet s;
    s.ansatz = a;
    s.L = L;
    for (int k = 0; k <= L; ++k) {
        s.theta.push_back(u(rng));
        if (a == QspAnsatz::WZW) {
            s.phi.push_back(u(rng));
        }
    }
    if (a == QspAnsatz::WZW) {
        s.varphi = u(rng);
    }
    return s;
}

Outcome roundtrip() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> depth(0, 50);
    std::ostringstream os;
    bool ok = true;
    for (QspAnsatz a : {QspAnsatz::YZY, QspAnsatz::WZW}) {
        const bool yzy = a == QspAnsatz::YZY;
        int good = 0;
        int thrown = 0;
        int worst_L = -1;
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const int L = depth(rng);
            const auto s = random_angles(a, L, rng);
            const PolyPair pq = yzy ? forward_yzy(s) : forward_wzw(s);
            double err = 0.0;
            try {
                const AngleSet back = yzy ? peel_yzy(pq) : peel_wzw(pq);
                const PolyPair again = yzy ? forward_yzy(back) : forward_wzw(back);
                err = std::max(max_coeff_diff(pq.P, again.P), max_coeff_diff(pq.Q, again.Q));
            } catch (const NumericalError &) {
                ++thrown;
                err = std::numeric_limits<double>::infinity();
            }
            if (err < 1e-8) {
                ++good;
            } else if (worst_L < 0 || L < worst_L) {
                worst_L = L;
            }
            if (std::isfinite(err)) {
                worst = std::max(worst, err);
            }
        }
        ok = ok && good == 200;
        os << (yzy ? "YZY" : "WZW") << " " << good << "/200 within 1e-8 (" << thrown
           << " peel errors, max finite err " << fmt("%.2e", worst);
        if (worst_L >= 0) {
            os << ", shallowest miss L=" << worst_L;
        }
        os << ")  ";
    }
    return {ok, os.str()};
}

Outcome completion() {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> depth(0, 40);
    std::normal_distribution<double> g;
    double worst = 0.0;
    int thrown = 0;
    for (int i = 0; i < 100; ++i) {
        const Field field = i % 2 == 0 ? Field::Real : Field::Complex;
        const int L = depth(rng);
        LaurentPoly P(L);
        for (int k = -L; k <= L; k += 2) {
            P.set(k, field == Field::Real ? Complex{g(rng)} : Complex{g(rng), g(rng)});
        }
        double sup = 0.0;
        for (double x : validation_grid(8192)) {
            sup = std::max(sup, std::abs(P(x)));
        }
        P *= Complex{0.95 / sup};
        try {
            const LaurentPoly Q = complete(P, L, field);
            worst = std::max(worst, unit_modulus_residual(P, Q, 8192));
        } catch (const std::exception &) {
            ++thrown;
        }
    }
    return {thrown == 0 && worst < 1e-7,
            "max | |P|^2+|Q|^2-1 | = " + fmt("%.2e", worst) + " over 100 (" +
                std::to_string(thrown) + " failures)"};
}

Outcome pipeline() {
    const auto d = synth_demo(sinc5, 8, false);
    return {d.deviation <= d.bound, "sup|<Z>-f_K| = " + fmt("%.3e", d.deviation) +
                                        ", chain bound = " + fmt("%.3e", d.bound) +
                                        ", L = " + std::to_string(d.synthesis.angles.L)};
}

Outcome simulator() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ua(0, 2 * pi);
    std::uniform_real_distribution<double> ux(-pi, pi);
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_int_distribution<int> small(1, 3);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        CircuitTemplate t;
        t.ansatz = static_cast<Ansatz>(pick(rng));
        t.L = small(rng);
        if (t.ansatz == Ansatz::MULTIVARIATE_UZU) {
            t.d = small(rng);
            t.L *= t.d;
        } else if (!t.single_qubit()) {
            t.n_qubits = t.d = t.ansatz == Ansatz::PARALLEL_ENTANGLEMENT_UTB ? 2 : small(rng);
            t.d_tr = small(rng);
        }
        t.hybrid = t.u3_based() && i % 3 == 0;
        t.validate();
        std::vector<double> p(param_count(t));
        std::vector<double> x(static_cast<std::size_t>(t.d));
        for (auto &v : p) {
            v = ua(rng);
        }
        for (auto &v : x) {
            v = ux(rng);
        }
        const auto u = build_unitary(t, p, x);
        const auto ref = oracle::model_matrix(t, p, x);
        for (std::size_t r = 0; r < ref.size(); ++r) {
            for (std::size_t c = 0; c < ref.size(); ++c) {
                worst = std::max(worst, std::abs(u[r * ref.size() + c] - ref[r][c]));
            }
        }
    }
    return {worst < 1e-10, "max entry gap over 100 circuits = " + fmt("%.2e", worst)};
}

Outcome gradients() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ua(0, 2 * pi);
    std::uniform_real_distribution<double> ux(-pi, pi);
    std::uniform_real_distribution<double> uy(-1, 1);
    std::vector<CircuitTemplate> kinds;
    const auto add = [&](Ansatz a, int L, int n, int d, int d_tr, bool hybrid) {
        CircuitTemplate t;
        t.ansatz = a;
        t.L = L;
        t.n_qubits = n;
        t.d = d;
        t.d_tr = d_tr;
        t.hybrid = hybrid;
        t.validate();
        kinds.push_back(t);
    };
    add(Ansatz::YZY, 6, 1, 1, 1, false);
    add(Ansatz::WZW, 8, 1, 1, 1, false);
    add(Ansatz::UZU, 4, 1, 1, 1, true);
    add(Ansatz::MULTIVARIATE_UZU, 4, 1, 2, 1, false);
    add(Ansatz::PARALLEL_ENTANGLEMENT, 2, 2, 2, 2, false);
    add(Ansatz::PARALLEL_ENTANGLEMENT_UTB, 1, 2, 2, 2, true);
    add(Ansatz::PARALLEL_ENTANGLEMENT, 1, 3, 3, 1, true);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto &t = kinds[static_cast<std::size_t>(i) % kinds.size()];
        Dataset ds;
        const std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(t.n_qubits), 2);
        for (int r = 0; r < 8; ++r) {
            std::vector<double> x(static_cast<std::size_t>(t.d));
            std::vector<double> y(c);
            for (auto &v : x) {
                v = ux(rng);
            }
            for (auto &v : y) {
                v = uy(rng);
            }
            ds.inputs.push_back(x);
            ds.targets.push_back(y);
            ds.split.push_back(Split::Train);
        }
        std::vector<double> p(param_count(t));
        for (auto &v : p) {
            v = ua(rng);
        }
        const auto rows = ds.all_rows();
        const auto ps = grad_parameter_shift(t, p, ds, rows);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double h = 1e-5;
            auto q = p;
            q[k] = p[k] + h;
            const double fp = mse_loss(t, q, ds, rows);
            q[k] = p[k] - h;
            const double fm = mse_loss(t, q, ds, rows);
            const double fd = (fp - fm) / (2 * h);
            num += (ps[k] - fd) * (ps[k] - fd);
            den += fd * fd;
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return {worst < 1e-6, "max relative gap over 20 models = " + fmt("%.2e", worst)};
}

Outcome sinc_trend() {
    const auto rows = sinc_sweep({3, 7, 15}, TrainConfig{});
    std::ostringstream os;
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << "L=" << rows[i].L << " sup " << fmt("%.4f", rows[i].best_sup) << "  ";
        if (i > 0 && !(rows[i].best_sup < rows[i - 1].best_sup)) {
            decreasing = false;
        }
    }
    const double trunc3 = rows.front().truncation;
    os << "L=3 truncation " << fmt("%.4f", trunc3);
    return {decreasing && rows.back().best_sup < trunc3, os.str()};
}

Outcome spectrum() {
    CircuitTemplate t;
    t.ansatz = Ansatz::MULTIVARIATE_UZU;
    t.d = 2;
    t.L = 6;
    TrainConfig cfg;
    cfg.instances = 1;
    const auto rep = fit(t, gen_bivariate(), cfg);
    const auto &p = rep.params[rep.best_instance];
    const auto grid = empirical_spectrum(
        [&](std::span<const double> x) { return evaluate(t, p, x); }, 2, 16, 3);
    const double outside = grid.max_outside(3);
    const auto s = spectrum_spec(2, 3);
    const bool ok = outside < 1e-8 && s.dof == 21 && s.omega_size == 49 && s.dof < s.omega_size;
    return {ok, "max out-of-support bin = " + fmt("%.2e", outside) +
                    ", DOF = " + std::to_string(s.dof) +
                    ", |Omega| = " + std::to_string(s.omega_size) +
                    ", train MSE = " + fmt("%.4f", rep.best_train())};
}

Outcome bivariate() {
    const Dataset ds = gen_bivariate(400, 0);
    const TrainConfig cfg;
    const auto single = fit(single_qubit_bivariate_template(40), ds, cfg);
    const auto parallel = fit(parallel_template(2, 10, 3), ds, cfg);
    const double ratio = single.best_train() / parallel.best_train();
    return {ratio >= 2.0, "single-qubit L=40 best MSE " + fmt("%.5f", single.best_train()) +
                              ", 2-qubit PE best MSE " + fmt("%.5f", parallel.best_train()) +
                              ", ratio " + fmt("%.2f", ratio) + " (need >= 2)"};
}

Outcome iris() {
    ExperimentConfig c;
    c.id = "iris";
    c.output_dir = scratch_dir("iris");
    c.options = {{"csv", std::string(QNNLAB_TEST_DATA) + "/iris.csv"}, {"runs", 10}};
    const Json s = run_experiment(c);
    std::filesystem::remove_all(c.output_dir);
    const double mean = s.at("mean_test_accuracy").get<double>();
    return {mean >= 0.95, "mean test accuracy over 10 instances = " + fmt("%.4f", mean) +
                              " (need >= 0.95)"};
}

Outcome extrapolation() {
    ExperimentConfig c;
    c.id = "square_wave";
    c.output_dir = scratch_dir("square");
    const Json s = run_experiment(c);
    std::filesystem::remove_all(c.output_dir);
    const double tr = s.at("best_train_mse").get<double>();
    const double te = s.at("best_test_mse").get<double>();
    return {te <= 2.0 * tr, "best instance train MSE " + fmt("%.5f", tr) + ", [20,30] MSE " +
                                fmt("%.5f", te) + " (need <= 2x)"};
}

} // namespace

int main(int argc, char **argv) {
    bool strict = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: qnnlab_acceptance [--strict] [--only N]\n";
            return 2;
        }
    }
    struct Criterion {
        int id;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, 30, roundtrip},   {2, 60, completion}, {3, 10, pipeline},
        {4, 60, simulator},   {5, 60, gradients},  {6, 300, sinc_trend},
        {7, 120, spectrum},   {8, 1200, bivariate}, {9, 600, iris},
        {10, 900, extrapolation}};
    int evaluated = 0;
    int passed = 0;
    for (const auto &c : all) {
        if (only != 0 && c.id != only) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = o.ok && secs < c.limit_s;
        std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << o.detail
                  << "  (" << fmt("%.1f", secs) << " s, limit " << fmt("%.0f", c.limit_s)
                  << " s)" << std::endl;
        ++evaluated;
        passed += ok ? 1 : 0;
    }
    std::cout << "acceptance: " << evaluated << "/" << (only ? 1 : 10)
              << " criteria evaluated, " << passed << " passed" << std::endl;
    return strict && passed != evaluated ? 1 : 0;
}
