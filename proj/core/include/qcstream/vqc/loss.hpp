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
#pragma once

#include "qcstream/vqc/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace qcstream::vqc {

enum class LossKind { kWeightedBce, kFocal };

/// Weighted BCE uses (w0, w1). Focal uses alpha for the attack class and
/// 1 - alpha for the normal class; the class weights are not applied on top.
struct LossConfig {
    LossKind kind = LossKind::kWeightedBce;
    double w0 = 1.0;
    double w1 = 1.0;
    double gamma = 2.0;
    double alpha = 0.5;
    double clamp = 1e-7;

    void validate() const;
};

/// Per-sample loss for probability p and label y (p is clamped first).
double sample_loss(double p, int y, const LossConfig &cfg);

/// d sample_loss / d logit, where p = sigmoid(logit). Zero where p is clamped.
double dloss_dlogit(double logit, int y, const LossConfig &cfg);

/// Weighted mean of per-sample losses. Empty `sample_weights` means uniform.
double mean_loss(std::span<const double> probs, std::span<const int> labels,
                 const LossConfig &cfg, std::span<const double> sample_weights = {});

/// Forward pass over the batch followed by mean_loss.
double supervised_loss(const VqcModel &model, const LabeledSet &batch, const LossConfig &cfg,
                       const Execution &exec, std::span<const double> sample_weights = {});

enum class WeightStrategy { kSqrtBoost, kAuto };

WeightStrategy parse_weight_strategy(const std::string &name);
std::string to_string(WeightStrategy s);

struct ClassWeights {
    double w0 = 1.0;
    double w1 = 1.0;
    bool use_focal = false;
    double focal_alpha = 0.5; ///< N0 / N when focal is enabled
};

struct ClassWeightOptions {
    double boost = 1.5;
    double imbalance_threshold = 5.0;
};

/// sqrt-boost: w_i ~ sqrt(N / (2 N_i)), w1 *= boost. auto: sqrt weights, plus
/// focal loss with inverse-frequency alpha when max(N0,N1)/min(N0,N1) exceeds
/// the threshold. Weights are rescaled so (w0 + w1) / 2 = 1.
ClassWeights class_weights(std::span<const int> labels, WeightStrategy strategy,
                           const ClassWeightOptions &options = {});

LossConfig make_loss_config(const ClassWeights &weights, double gamma = 2.0);

/// Readout-block gradient of the batch mean loss:
/// [d/dw_0 .. d/dw_{q-1}, d/db, d/dtau_raw].
std::vector<double> readout_gradient(const VqcModel &model, std::span<const Forward> forwards,
                                     std::span<const int> labels, const LossConfig &cfg,
                                     std::span<const double> sample_weights = {});

} // namespace qcstream::vqc
