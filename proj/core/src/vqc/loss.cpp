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
#include "qcstream/vqc/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcstream::vqc {

namespace {

void check_label(int y) {
    if (y != 0 && y != 1) {
        throw std::invalid_argument("loss: labels must be 0 or 1");
    }
}

std::vector<double> resolve_weights(std::span<const double> sample_weights, std::size_t n) {
    if (sample_weights.empty()) {
        return std::vector<double>(n, 1.0);
    }
    if (sample_weights.size() != n) {
        throw std::invalid_argument("loss: sample weight count mismatch");
    }
    return {sample_weights.begin(), sample_weights.end()};
}

} // namespace

void LossConfig::validate() const {
    if (!(w0 > 0.0) || !(w1 > 0.0)) {
        throw std::invalid_argument("LossConfig: class weights must be positive");
    }
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("LossConfig: focal gamma must be >= 0");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("LossConfig: focal alpha must lie in (0, 1)");
    }
    if (!(clamp > 0.0 && clamp < 0.5)) {
        throw std::invalid_argument("LossConfig: clamp must lie in (0, 0.5)");
    }
}

double sample_loss(double p, int y, const LossConfig &cfg) {
    check_label(y);
    const double pc = std::clamp(p, cfg.clamp, 1.0 - cfg.clamp);
    if (cfg.kind == LossKind::kWeightedBce) {
        return y == 1 ? -cfg.w1 * std::log(pc) : -cfg.w0 * std::log(1.0 - pc);
    }
    const double pt = y == 1 ? pc : 1.0 - pc;
    const double at = y == 1 ? cfg.alpha : 1.0 - cfg.alpha;
    return -at * std::pow(1.0 - pt, cfg.gamma) * std::log(pt);
}

double dloss_dlogit(double logit, int y, const LossConfig &cfg) {
    check_label(y);
    const double p = sigmoid(logit);
    if (p < cfg.clamp || p > 1.0 - cfg.clamp) {
        return 0.0;
    }
    if (cfg.kind == LossKind::kWeightedBce) {
        return y == 1 ? -cfg.w1 * (1.0 - p) : cfg.w0 * p;
    }
    // p_t = sigmoid(s * logit) with s = +1 for y = 1, -1 otherwise.
    const double pt = y == 1 ? p : 1.0 - p;
    const double at = y == 1 ? cfg.alpha : 1.0 - cfg.alpha;
    const double s = y == 1 ? 1.0 : -1.0;
    const double q = 1.0 - pt;
    // dL/dlogit = -at s [q^(gamma+1) - gamma q^gamma pt log pt].
    double core = std::pow(q, cfg.gamma + 1.0);
    if (cfg.gamma != 0.0) {
        core -= cfg.gamma * std::pow(q, cfg.gamma) * pt * std::log(pt);
    }
    return -at * s * core;
}

double mean_loss(std::span<const double> probs, std::span<const int> labels,
                 const LossConfig &cfg, std::span<const double> sample_weights) {
    if (probs.empty()) {
        throw std::invalid_argument("loss: empty batch");
    }
    if (probs.size() != labels.size()) {
        throw std::invalid_argument("loss: probability/label count mismatch");
    }
    const auto sw = resolve_weights(sample_weights, probs.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        num += sw[i] * sample_loss(probs[i], labels[i], cfg);
        den += sw[i];
    }
    if (!(den > 0.0)) {
        throw std::invalid_argument("loss: sample weights must have positive sum");
    }
    return num / den;
}

double supervised_loss(const VqcModel &model, const LabeledSet &batch, const LossConfig &cfg,
                       const Execution &exec, std::span<const double> sample_weights) {
    if (batch.empty()) {
        throw std::invalid_argument("supervised_loss: empty batch");
    }
    std::vector<double> probs(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        probs[i] = predict_proba(model, batch.row(i), exec, i);
    return mean_loss(probs, batch.y, cfg, sample_weights);
}

WeightStrategy parse_weight_strategy(const std::string &name) {
    if (name == "sqrt-boost" || name == "sqrt_boost")
        return WeightStrategy::kSqrtBoost;
    if (name == "auto")
        return WeightStrategy::kAuto;
    throw std::invalid_argument("unknown class weight strategy '" + name +
                                "' (expected sqrt-boost or auto)");
}

std::string to_string(WeightStrategy s) {
    return s == WeightStrategy::kSqrtBoost ? "sqrt-boost" : "auto";
}

ClassWeights class_weights(std::span<const int> labels, WeightStrategy strategy,
                           const ClassWeightOptions &options) {
    double n0 = 0.0;
    double n1 = 0.0;
    for (int y : labels) {
        check_label(y);
        (y == 1 ? n1 : n0) += 1.0;
    }
    if (n0 == 0.0 || n1 == 0.0) {
        throw std::invalid_argument("class_weights: both classes must be present");
    }
    const double n = n0 + n1;
    ClassWeights cw;
    cw.w0 = std::sqrt(n / (2.0 * n0));
    cw.w1 = std::sqrt(n / (2.0 * n1));
    if (strategy == WeightStrategy::kSqrtBoost) {
        cw.w1 *= options.boost;
    } else if (std::max(n0, n1) / std::min(n0, n1) > options.imbalance_threshold) {
        cw.use_focal = true;
        cw.focal_alpha = n0 / n;
    }
    const double mean = 0.5 * (cw.w0 + cw.w1);
    cw.w0 /= mean;
    cw.w1 /= mean;
    return cw;
}

LossConfig make_loss_config(const ClassWeights &weights, double gamma) {
    LossConfig cfg;
    cfg.kind = weights.use_focal ? LossKind::kFocal : LossKind::kWeightedBce;
    cfg.w0 = weights.w0;
    cfg.w1 = weights.w1;
    cfg.gamma = gamma;
    cfg.alpha = weights.focal_alpha;
    cfg.validate();
    return cfg;
}

std::vector<double> readout_gradient(const VqcModel &model, std::span<const Forward> forwards,
                                     std::span<const int> labels, const LossConfig &cfg,
                                     std::span<const double> sample_weights) {
    if (forwards.empty() || forwards.size() != labels.size()) {
        throw std::invalid_argument("readout_gradient: batch size mismatch");
    }
    const auto sw = resolve_weights(sample_weights, forwards.size());
    const std::size_t q = static_cast<std::size_t>(model.num_qubits());
    const double tau = model.tau();
    std::vector<double> grad(q + 2, 0.0);
    double den = 0.0;
    for (std::size_t n = 0; n < forwards.size(); ++n) {
        const auto &f = forwards[n];
        const double g = sw[n] * dloss_dlogit(tau * f.score, labels[n], cfg);
        for (std::size_t i = 0; i < q; ++i)
            grad[i] += g * tau * f.z[i];
        grad[q] -= g * tau;
        grad[q + 1] += g * tau * f.score;
        den += sw[n];
    }
    for (auto &v : grad)
        v /= den;
    return grad;
}

} // namespace qcstream::vqc
