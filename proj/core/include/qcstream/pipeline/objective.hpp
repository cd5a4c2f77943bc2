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

#include "qcstream/stability/qfish.hpp"
#include "qcstream/util/types.hpp"
#include "qcstream/vqc/loss.hpp"
#include "qcstream/vqc/model.hpp"

#include <span>
#include <vector>

namespace qcstream::pipeline {

struct CompositeParts {
    double sup = 0.0;
    double replay = 0.0;
    double reg = 0.0;
    double total = 0.0;
};

/// L_sup + alpha * L_replay + R.
double combine(double sup, double replay, double alpha, double reg) noexcept;

struct CompositeOptions {
    vqc::LossConfig loss;
    vqc::Execution exec;
    double alpha = 1.0;
    stability::QfishConfig qfish;
    std::uint64_t shot_seed = 0;
};

/// Anchor outputs of the model with `params` substituted; shared by the
/// regularizer, anchor snapshots and the sensitivity estimate.
stability::OutputFn model_outputs(const vqc::VqcModel &model, const vqc::Execution &exec,
                                  std::uint64_t shot_seed = 0);
stability::ScalarFn model_score(const vqc::VqcModel &model, const vqc::Execution &exec,
                                std::uint64_t shot_seed = 0);

/// The replay term is 0 for an empty replay batch and the regularizer is 0 for
/// an empty memory.
CompositeParts composite_loss(const vqc::VqcModel &model, const LabeledSet &real,
                              const LabeledSet &replay, const stability::AnchorMemory &memory,
                              const CompositeOptions &options,
                              const stability::AnchorSubsample *subsample = nullptr);

/// d score / d params for one input under exact expectations: reverse-mode
/// through the simulation for the circuit angles, chain rule through the
/// clipped conditioning map for W, closed form for the readout block.
std::vector<double> score_gradient(const vqc::VqcModel &model, std::span<const double> x,
                                   const sim::NoiseParams &noise = {});

/// Gradient of composite_loss under exact expectations.
std::vector<double> composite_gradient(const vqc::VqcModel &model, const LabeledSet &real,
                                       const LabeledSet &replay,
                                       const stability::AnchorMemory &memory,
                                       const CompositeOptions &options,
                                       const stability::AnchorSubsample *subsample = nullptr);

/// Closed-form gradient of composite_loss with respect to the readout block
/// (w, b, tau_raw). Valid in any execution mode since z does not depend on it.
std::vector<double> readout_composite_gradient(const vqc::VqcModel &model,
                                               const LabeledSet &real, const LabeledSet &replay,
                                               const stability::AnchorMemory &memory,
                                               const CompositeOptions &options,
                                               const stability::AnchorSubsample *subsample = nullptr);

} // namespace qcstream::pipeline
