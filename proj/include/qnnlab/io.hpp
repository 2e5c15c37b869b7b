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
 * JSON forms of the public value types (nlohmann::json ADL hooks).
 *
 * Coefficient lists are [exponent, re, im] triples. Doubles are written with
 * round-trip precision by the library, so to_json/from_json is lossless.
 */
#pragma once

#include <json.hpp>

#include "fourier.hpp"
#include "laurent.hpp"
#include "models.hpp"
#include "qsp.hpp"
#include "training.hpp"

namespace qnnlab {

using Json = nlohmann::json;

inline void to_json(Json &j, const LaurentPoly &p) {
    const int D = p.max_exponent();
    Json c = Json::array();
    for (int k = -D; k <= D; ++k) {
        c.push_back({k, p.coeff(k).real(), p.coeff(k).imag()});
    }
    j = Json{{"coeffs", c}};
}

inline void from_json(const Json &j, LaurentPoly &p) {
    p = LaurentPoly();
    for (const auto &t : j.at("coeffs")) {
        const int k = t.at(0).get<int>();
        p.set(k, p.coeff(k) + Complex{t.at(1).get<double>(), t.at(2).get<double>()});
    }
}

inline void to_json(Json &j, const PolyPair &pq) {
    j = Json{{"L", pq.L}, {"P", pq.P}, {"Q", pq.Q}};
}

inline void from_json(const Json &j, PolyPair &pq) {
    pq.L = j.at("L").get<int>();
    pq.P = j.at("P").get<LaurentPoly>();
    pq.Q = j.at("Q").get<LaurentPoly>();
}

inline void to_json(Json &j, const AngleSet &a) {
    j = Json{{"ansatz", a.ansatz == QspAnsatz::YZY ? "YZY" : "WZW"},
             {"L", a.L},
             {"theta", a.theta}};
    if (a.ansatz == QspAnsatz::WZW) {
        j["phi"] = a.phi;
        j["varphi"] = a.varphi;
    }
}

inline void from_json(const Json &j, AngleSet &a) {
    const auto name = j.at("ansatz").get<std::string>();
    if (name != "YZY" && name != "WZW") {
        throw std::invalid_argument("AngleSet JSON: ansatz must be YZY or WZW");
    }
    a.ansatz = name == "YZY" ? QspAnsatz::YZY : QspAnsatz::WZW;
    a.L = j.at("L").get<int>();
    a.theta = j.at("theta").get<std::vector<double>>();
    a.phi = j.value("phi", std::vector<double>{});
    a.varphi = j.value("varphi", 0.0);
    a.validate();
}

inline void to_json(Json &j, const FourierSeries &s) {
    Json c = Json::array();
    for (int n = -s.K; n <= s.K; ++n) {
        c.push_back({n, s.coeff(n).real(), s.coeff(n).imag()});
    }
    j = Json{{"K", s.K}, {"period", s.period}, {"coeffs", c}};
}

inline void from_json(const Json &j, FourierSeries &s) {
    s = FourierSeries(j.at("K").get<int>(), j.value("period", 2.0 * std::numbers::pi));
    for (const auto &t : j.at("coeffs")) {
        const int n = t.at(0).get<int>();
        if (n < -s.K || n > s.K) {
            throw std::invalid_argument("FourierSeries JSON: frequency outside [-K, K]");
        }
        s.coeff_ref(n) += Complex{t.at(1).get<double>(), t.at(2).get<double>()};
    }
}

inline void to_json(Json &j, const CircuitTemplate &t) {
    j = Json{{"ansatz", std::string(ansatz_name(t.ansatz))},
             {"n_qubits", t.n_qubits},
             {"layers", t.L},
             {"d", t.d},
             {"layout", t.layout},
             {"d_tr", t.d_tr},
             {"hybrid", t.hybrid}};
}

inline void from_json(const Json &j, CircuitTemplate &t) {
    t = CircuitTemplate{};
    t.ansatz = parse_ansatz(j.at("ansatz").get<std::string>());
    t.n_qubits = j.value("n_qubits", 1);
    t.L = j.value("layers", 0);
    t.d = j.value("d", 1);
    t.layout = j.value("layout", std::vector<int>{});
    t.d_tr = j.value("d_tr", 1);
    t.hybrid = j.value("hybrid", false);
    t.validate();
}

inline void to_json(Json &j, const TrainConfig &c) {
    j = Json{{"learning_rate", c.learning_rate},
             {"iterations", c.iterations},
             {"batch_size", c.batch_size},
             {"seed", c.seed},
             {"beta1", c.beta1},
             {"beta2", c.beta2},
             {"epsilon", c.epsilon},
             {"instances", c.instances}};
}

inline void from_json(const Json &j, TrainConfig &c) {
    const TrainConfig def;
    c.learning_rate = j.value("learning_rate", def.learning_rate);
    c.iterations = j.value("iterations", def.iterations);
    c.batch_size = j.value("batch_size", def.batch_size);
    c.seed = j.value("seed", def.seed);
    c.beta1 = j.value("beta1", def.beta1);
    c.beta2 = j.value("beta2", def.beta2);
    c.epsilon = j.value("epsilon", def.epsilon);
    c.instances = j.value("instances", def.instances);
    c.validate();
}

inline void to_json(Json &j, const TrainReport &r) {
    j = Json{{"curves", r.curves},           {"params", r.params},
             {"final_train", r.final_train}, {"final_test", r.final_test},
             {"seconds", r.seconds},         {"best_instance", r.best_instance}};
}

inline void from_json(const Json &j, TrainReport &r) {
    r.curves = j.at("curves").get<std::vector<std::vector<double>>>();
    r.params = j.at("params").get<std::vector<ParamVector>>();
    r.final_train = j.at("final_train").get<std::vector<double>>();
    r.final_test = j.value("final_test", std::vector<double>{});
    r.seconds = j.value("seconds", std::vector<double>{});
    r.best_instance = j.at("best_instance").get<std::size_t>();
}

} // namespace qnnlab
