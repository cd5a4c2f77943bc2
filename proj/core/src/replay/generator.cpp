// Copyright 2026 The qcstream Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qcstream/replay/generator.hpp"

#include "qcstream/util/hash.hpp"
#include "qcstream/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qcstream::replay {

Prototypes compute_prototypes(const LabeledSet &data) {
    data.check();
    const auto d = static_cast<std::size_t>(data.dim());
    Prototypes p;
    std::array<std::vector<double>, 2> sq;
    for (int c = 0; c < 2; ++c) {
        p.mu[c].assign(d, 0.0);
        sq[c].assign(d, 0.0);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int c = data.y[i];
        ++p.count[c];
        const auto row = data.row(i);
        for (std::size_t j = 0; j < d; ++j)
            p.mu[c][j] += row[j];
    }
    if (p.count[0] == 0 || p.count[1] == 0) {
        throw std::invalid_argument("compute_prototypes: both classes must be present");
    }
    for (int c = 0; c < 2; ++c)
        for (auto &v : p.mu[c])
            v /= static_cast<double>(p.count[c]);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int c = data.y[i];
        const auto row = data.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double r = row[j] - p.mu[c][j];
            sq[c][j] += r * r;
        }
    }
    for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            s += std::sqrt(sq[c][j] / static_cast<double>(p.count[c]));
        p.sigma[c] = s / static_cast<double>(d);
    }
    return p;
}

sim::CircuitSpec generator_circuit(int num_qubits, int num_layers, int condition) {
    if (condition != 0 && condition != 1) {
        throw std::invalid_argument("generator_circuit: condition must be 0 or 1");
    }
    return sim::CircuitSpec::reuploading(num_qubits, num_layers)
        .with_prefix({sim::GateOp::ry(0, std::numbers::pi * condition)});
}

std::vector<double> generator_expectations(const sim::CircuitSpec &circuit,
                                           std::span<const double> phi,
                                           const sim::NoiseParams &noise, bool exact,
                                           std::int64_t shots, std::uint64_t seed) {
    const std::vector<double> zeros(static_cast<std::size_t>(circuit.num_qubits()), 0.0);
    const auto state = sim::run_circuit(circuit, phi, zeros, noise);
    if (exact) {
        return sim::expectations_z(state, noise);
    }
    return sim::sampled_expectations_z(state, shots, noise.enabled ? noise.p_ro : 0.0, seed);
}

double prototype_loss(const sim::CircuitSpec &circuit, std::span<const double> phi,
                      std::span<const double> mu, const sim::NoiseParams &noise) {
    if (mu.size() != static_cast<std::size_t>(circuit.num_qubits())) {
        throw std::invalid_argument("prototype_loss: prototype dimension must equal qubit count");
    }
    const auto f = generator_expectations(circuit, phi, noise);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += (f[i] - mu[i]) * (f[i] - mu[i]);
    return s;
}

GeneratorSnapshot::GeneratorSnapshot(Fields fields) : f_(std::move(fields)) {
    const auto q = static_cast<std::size_t>(f_.num_qubits);
    const auto p = static_cast<std::size_t>(2 * f_.num_qubits * f_.num_layers);
    for (int c = 0; c < 2; ++c) {
        if (f_.phi[c].size() != p || f_.mu[c].size() != q) {
            throw std::invalid_argument("GeneratorSnapshot: shape mismatch");
        }
        if (!(f_.sigma[c] >= 0.0) || !std::isfinite(f_.sigma[c])) {
            throw std::invalid_argument("GeneratorSnapshot: sigma must be finite and >= 0");
        }
    }
    checksum_ = compute_checksum();
}

std::uint64_t GeneratorSnapshot::compute_checksum() const noexcept {
    util::Fnv1a h;
    h.update_value(f_.task_id);
    h.update_value(f_.num_qubits);
    h.update_value(f_.num_layers);
    for (int c = 0; c < 2; ++c) {
        h.update(std::span<const double>(f_.phi[c]));
        h.update(std::span<const double>(f_.mu[c]));
        h.update_value(f_.sigma[c]);
    }
    h.update_value(f_.noise.p1);
    h.update_value(f_.noise.p2);
    h.update_value(f_.noise.p_ro);
    h.update_value(f_.noise.enabled);
    return h.digest();
}

bool GeneratorSnapshot::verify() const noexcept { return compute_checksum() == checksum_; }

std::vector<double> GeneratorSnapshot::prototype_output(int condition) const {
    const auto circuit = generator_circuit(f_.num_qubits, f_.num_layers, condition);
    return generator_expectations(circuit, f_.phi[condition], f_.noise);
}

LabeledSet GeneratorSnapshot::synthesize(int condition, std::size_t n, std::uint64_t seed) const {
    if (n == 0) {
        throw std::invalid_argument("synthesize: n must be >= 1");
    }
    if (condition != 0 && condition != 1) {
        throw std::invalid_argument("synthesize: condition must be 0 or 1");
    }
    const auto center = prototype_output(condition);
    const double sigma = f_.sigma[condition];
    LabeledSet out;
    out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(center.size()));
    out.y.assign(n, condition);
    util::Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < center.size(); ++j) {
            double v = center[j];
            if (sigma > 0.0)
                v += sigma * gauss(rng);
            out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::clamp(v, -1.5, 1.5);
        }
    }
    return out;
}

nlohmann::json GeneratorSnapshot::to_json() const {
    nlohmann::json j;
    j["kind"] = kind();
    j["task_id"] = f_.task_id;
    j["num_qubits"] = f_.num_qubits;
    j["num_layers"] = f_.num_layers;
    j["phi"] = {f_.phi[0], f_.phi[1]};
    j["mu"] = {f_.mu[0], f_.mu[1]};
    j["sigma"] = {f_.sigma[0], f_.sigma[1]};
    j["final_loss"] = {f_.final_loss[0], f_.final_loss[1]};
    j["noise"] = {{"p1", f_.noise.p1}, {"p2", f_.noise.p2}, {"p_ro", f_.noise.p_ro},
                  {"enabled", f_.noise.enabled}};
    j["support"] = f_.support;
    j["attack_fraction"] = f_.attack_fraction;
    j["checksum"] = util::to_hex(checksum_);
    return j;
}

GeneratorSnapshot GeneratorSnapshot::from_json(const nlohmann::json &j) {
    if (j.value("kind", "") != "quantum-generator") {
        throw std::invalid_argument("generator document: unexpected kind");
    }
    Fields f;
    f.task_id = j.at("task_id").get<int>();
    f.num_qubits = j.at("num_qubits").get<int>();
    f.num_layers = j.at("num_layers").get<int>();
    for (int c = 0; c < 2; ++c) {
        f.phi[c] = j.at("phi").at(c).get<std::vector<double>>();
        f.mu[c] = j.at("mu").at(c).get<std::vector<double>>();
        f.sigma[c] = j.at("sigma").at(c).get<double>();
        f.final_loss[c] = j.at("final_loss").at(c).get<double>();
    }
    const auto &n = j.at("noise");
    f.noise = {n.at("p1").get<double>(), n.at("p2").get<double>(), n.at("p_ro").get<double>(),
               n.at("enabled").get<bool>()};
    f.support = j.at("support").get<std::size_t>();
    f.attack_fraction = j.at("attack_fraction").get<double>();
    GeneratorSnapshot s(std::move(f));
    if (util::to_hex(s.checksum()) != j.at("checksum").get<std::string>()) {
        throw std::invalid_argument("generator document: checksum mismatch");
    }
    return s;
}

GeneratorSnapshot train_generator(const LabeledSet &data, int task_id,
                                  const GeneratorConfig &cfg, std::uint64_t seed) {
    const auto protos = compute_prototypes(data);
    if (protos.mu[0].size() != static_cast<std::size_t>(cfg.num_qubits)) {
        throw std::invalid_argument("train_generator: feature dimension must equal qubit count");
    }
    GeneratorSnapshot::Fields f;
    f.task_id = task_id;
    f.num_qubits = cfg.num_qubits;
    f.num_layers = cfg.num_layers;
    f.noise = cfg.noise;
    f.support = data.size();
    f.attack_fraction = static_cast<double>(protos.count[1]) / static_cast<double>(data.size());
    const auto p = static_cast<std::size_t>(2 * cfg.num_qubits * cfg.num_layers);
    for (int c = 0; c < 2; ++c) {
        f.sigma[c] = protos.sigma[c];
        f.mu[c] = protos.mu[c];
        for (auto &v : f.mu[c])
            v = std::clamp(v, -cfg.prototype_clip, cfg.prototype_clip);
        const auto circuit = generator_circuit(cfg.num_qubits, cfg.num_layers, c);
        const auto &mu = f.mu[c];
        auto exact = [&](std::span<const double> phi) {
            return prototype_loss(circuit, phi, mu, cfg.noise);
        };
        optim::SpsaMinimizeOptions opts = cfg.spsa;
        opts.seed = util::derive_seed(seed, {static_cast<std::uint64_t>(c), util::tag(util::Stream::kSpsa)});
        optim::Objective train = exact;
        std::uint64_t shot_calls = 0;
        if (cfg.shot_training) {
            const auto shot_base = util::derive_seed(seed, {static_cast<std::uint64_t>(c),
                                                            util::tag(util::Stream::kShots)});
            train = [&, shot_base](std::span<const double> phi) {
                const auto z = generator_expectations(circuit, phi, cfg.noise, false, cfg.shots,
                                                      util::derive_seed(shot_base, {shot_calls++}));
                double s = 0.0;
                for (std::size_t i = 0; i < z.size(); ++i)
                    s += (z[i] - mu[i]) * (z[i] - mu[i]);
                return s;
            };
            opts.exact = exact;
        }
        util::Rng rng(util::derive_seed(seed, {static_cast<std::uint64_t>(c), util::tag(util::Stream::kInit)}));
        // Near-zero angles sit on a stationary point of every <Z_i>; start spread out.
        std::uniform_real_distribution<double> init(-std::numbers::pi, std::numbers::pi);
        std::vector<double> phi0(p);
        for (auto &v : phi0)
            v = init(rng);
        const auto result = optim::spsa_minimize(train, std::move(phi0), opts);
        f.phi[c] = result.best;
        f.final_loss[c] = result.best_value;
    }
    return GeneratorSnapshot(std::move(f));
}

} // namespace qcstream::replay
