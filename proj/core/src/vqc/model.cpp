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
#include "qcstream/vqc/model.hpp"

#include "qcstream/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace qcstream::vqc {

VqcModel VqcModel::create(int num_qubits, int num_layers, int input_dim, std::uint64_t seed) {
    if (input_dim < 1) {
        throw std::invalid_argument("VqcModel: input dimension must be >= 1");
    }
    VqcModel m;
    m.circuit_ = std::make_shared<const sim::CircuitSpec>(
        sim::CircuitSpec::reuploading(num_qubits, num_layers));
    m.input_dim_ = input_dim;
    const auto q = static_cast<std::size_t>(num_qubits);
    const auto d = static_cast<std::size_t>(input_dim);
    ParamLayout &l = m.layout_;
    l.theta = 0;
    l.theta_count = m.circuit_->param_count();
    l.conditioning = l.theta + l.theta_count;
    l.conditioning_count = q * d;
    l.readout = l.conditioning + l.conditioning_count;
    l.readout_count = q;
    l.bias = l.readout + l.readout_count;
    l.tau_raw = l.bias + 1;
    l.total = l.tau_raw + 1;

    m.params_.assign(l.total, 0.0);
    util::Rng rng(seed);
    std::uniform_real_distribution<double> small(-0.1, 0.1);
    for (std::size_t i = 0; i < l.theta_count; ++i)
        m.params_[l.theta + i] = small(rng);
    for (std::size_t r = 0; r < q; ++r) {
        if (r < d)
            m.params_[l.conditioning + r * d + r] = 1.0;
    }
    for (std::size_t i = 0; i < q; ++i)
        m.params_[l.readout + i] = 1.0 / static_cast<double>(q);
    return m;
}

double VqcModel::tau() const noexcept { return std::exp(tau_raw()); }

void VqcModel::set_params(std::span<const double> params) {
    if (params.size() != params_.size()) {
        throw std::invalid_argument("VqcModel::set_params: expected " +
                                    std::to_string(params_.size()) + " values, got " +
                                    std::to_string(params.size()));
    }
    for (double v : params) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("VqcModel::set_params: non-finite parameter");
        }
    }
    std::copy(params.begin(), params.end(), params_.begin());
}

VqcModel VqcModel::with_params(std::span<const double> params) const {
    VqcModel copy = *this;
    copy.set_params(params);
    return copy;
}

void VqcModel::set_conditioning(std::span<const double> w_row_major) {
    if (w_row_major.size() != layout_.conditioning_count) {
        throw std::invalid_argument("VqcModel::set_conditioning: size mismatch");
    }
    std::copy(w_row_major.begin(), w_row_major.end(), params_.begin() + static_cast<std::ptrdiff_t>(layout_.conditioning));
}

void VqcModel::set_readout(std::span<const double> weights, double bias, double tau_raw) {
    if (weights.size() != layout_.readout_count) {
        throw std::invalid_argument("VqcModel::set_readout: size mismatch");
    }
    std::copy(weights.begin(), weights.end(), params_.begin() + static_cast<std::ptrdiff_t>(layout_.readout));
    params_[layout_.bias] = bias;
    params_[layout_.tau_raw] = tau_raw;
}

void VqcModel::set_theta(std::span<const double> theta) {
    if (theta.size() != layout_.theta_count) {
        throw std::invalid_argument("VqcModel::set_theta: size mismatch");
    }
    std::copy(theta.begin(), theta.end(), params_.begin() + static_cast<std::ptrdiff_t>(layout_.theta));
}

std::vector<double> condition_input(const VqcModel &model, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(model.input_dim())) {
        throw std::invalid_argument("condition_input: expected input of dimension " +
                                    std::to_string(model.input_dim()) + ", got " +
                                    std::to_string(x.size()));
    }
    const auto w = model.conditioning();
    const std::size_t d = x.size();
    std::vector<double> out(static_cast<std::size_t>(model.num_qubits()));
    for (std::size_t r = 0; r < out.size(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c)
            acc += w[r * d + c] * x[c];
        if (!std::isfinite(acc)) {
            throw std::invalid_argument("condition_input: non-finite input");
        }
        out[r] = std::clamp(acc, -1.0, 1.0);
    }
    return out;
}

double angle_map(double conditioned) noexcept { return std::numbers::pi * conditioned; }

double sigmoid(double z) noexcept {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Forward forward(const VqcModel &model, std::span<const double> x, const Execution &exec,
                std::uint64_t shot_seed) {
    auto angles = condition_input(model, x);
    for (auto &a : angles)
        a = angle_map(a);
    const auto state = sim::run_circuit(model.circuit(), model.theta(), angles, exec.noise);
    Forward f;
    if (exec.exact) {
        f.z = sim::expectations_z(state, exec.noise);
    } else {
        f.z = sim::sampled_expectations_z(state, exec.shots,
                                          exec.noise.enabled ? exec.noise.p_ro : 0.0, shot_seed);
    }
    const auto w = model.readout();
    double s = 0.0;
    for (std::size_t i = 0; i < f.z.size(); ++i)
        s += w[i] * f.z[i];
    f.score = s - model.bias();
    f.prob = sigmoid(model.tau() * f.score);
    return f;
}

double predict_proba(const VqcModel &model, std::span<const double> x, const Execution &exec,
                     std::uint64_t shot_seed) {
    return forward(model, x, exec, shot_seed).prob;
}

std::vector<double> predict_proba(const VqcModel &model, const FeatureMatrix &x,
                                  const Execution &exec, std::uint64_t seed) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto s = util::derive_seed(seed, {static_cast<std::uint64_t>(i)});
        out[static_cast<std::size_t>(i)] = predict_proba(model, row_span(x, i), exec, s);
    }
    return out;
}

nlohmann::json to_json(const VqcModel &model) {
    auto block = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    nlohmann::json doc;
    doc["format"] = "qcstream.vqc";
    doc["version"] = 1;
    doc["num_qubits"] = model.num_qubits();
    doc["num_layers"] = model.num_layers();
    doc["input_dim"] = model.input_dim();
    doc["field_order"] = {"theta", "W", "w", "bias", "tau_raw"};
    doc["theta"] = block(model.theta());
    doc["W"] = block(model.conditioning());
    doc["w"] = block(model.readout());
    doc["bias"] = model.bias();
    doc["tau_raw"] = model.tau_raw();
    return doc;
}

VqcModel model_from_json(const nlohmann::json &doc) {
    if (doc.value("format", "") != "qcstream.vqc") {
        throw std::invalid_argument("model document: unexpected format tag");
    }
    if (doc.value("version", 0) != 1) {
        throw std::invalid_argument("model document: unsupported version");
    }
    auto m = VqcModel::create(doc.at("num_qubits").get<int>(), doc.at("num_layers").get<int>(),
                              doc.at("input_dim").get<int>(), 0);
    m.set_theta(doc.at("theta").get<std::vector<double>>());
    m.set_conditioning(doc.at("W").get<std::vector<double>>());
    m.set_readout(doc.at("w").get<std::vector<double>>(), doc.at("bias").get<double>(),
                  doc.at("tau_raw").get<double>());
    return m;
}

} // namespace qcstream::vqc
