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

#include "qcstream/sim/state.hpp"
#include "qcstream/stability/qfish.hpp"
#include "qcstream/vqc/loss.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qcstream::pipeline {

enum class Group { kBaseline, kQgrOnly, kGmmReplay, kEwcOnly, kQfishOnly, kFullState, kFullGradient };

Group parse_group(const std::string &name);
std::string to_string(Group g);
std::vector<std::string> group_names();

enum class ReplayKind { kNone, kQuantum, kGmm };

/// Mechanisms switched on by a group.
struct Mechanisms {
    ReplayKind replay = ReplayKind::kNone;
    bool qfi = false;
    bool fid = false;
    /// Set for the two full groups; other groups use the configured strategy.
    std::optional<stability::AnchorStrategy> forced_strategy;

    [[nodiscard]] bool replay_on() const noexcept { return replay != ReplayKind::kNone; }
    [[nodiscard]] bool stability_on() const noexcept { return qfi || fid; }
};

Mechanisms mechanisms(Group g);

enum class OptimizerKind { kSpsa, kGradient };

struct ExperimentConfig {
    Group group = Group::kBaseline;
    std::uint64_t seed = 0;
    int epochs = 20;
    int batch_size = 256;
    int num_qubits = 6;
    int num_layers = 3;

    /// Uncoupled defaults; the coupled values apply when replay and Q-FISH are
    /// both active unless the value was set explicitly.
    std::optional<double> replay_ratio;
    std::optional<double> lambda_qfi;
    std::optional<double> lambda_fid;
    double alpha = 1.0;

    sim::NoiseParams noise = sim::NoiseParams::nisq_defaults();
    bool exact_expectations = true;
    std::int64_t shots = 2048;

    int generator_layers = 2;
    int generator_iters = 300;
    std::int64_t generator_shots = 1024;
    bool generator_shot_training = false;
    int gmm_components = 3;

    int anchor_budget = 64;
    stability::AnchorStrategy anchor_strategy = stability::AnchorStrategy::kStateSpace;
    std::optional<double> epsilon;
    int subsample = 32;
    stability::FunctionalTerm functional = stability::FunctionalTerm::kFidelity;

    vqc::WeightStrategy weight_strategy = vqc::WeightStrategy::kAuto;
    double weight_boost = 1.5;
    double imbalance_threshold = 5.0;
    double focal_gamma = 2.0;

    OptimizerKind optimizer = OptimizerKind::kGradient;
    double spsa_a = 0.1;
    double spsa_c = 0.1;
    double spsa_A_fraction = 0.1;
    double learning_rate = 0.3;

    bool class_incremental = false;

    void validate() const;
};

/// Effective values after group gating and coupling.
struct ResolvedConfig {
    ExperimentConfig base;
    Mechanisms mech;
    bool coupled = false;
    double replay_ratio = 0.0;
    stability::QfishConfig qfish;
    stability::AnchorStrategy strategy = stability::AnchorStrategy::kStateSpace;
};

ResolvedConfig resolve(const ExperimentConfig &cfg);

/// Keys match the field names; unknown keys and bad values throw with the key name.
nlohmann::json to_json(const ExperimentConfig &cfg);
ExperimentConfig config_from_json(const nlohmann::json &doc);
/// Applies the keys in `doc` on top of `base`.
void apply_json(ExperimentConfig &cfg, const nlohmann::json &doc);

nlohmann::json to_json(const ResolvedConfig &r);

std::string to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string &name);

} // namespace qcstream::pipeline
