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

#include "qcstream/util/types.hpp"
#include "qcstream/vqc/model.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qcstream::stability {

/// Scalar model output as a function of (parameters, input).
using ScalarFn = std::function<double(std::span<const double>, std::span<const double>)>;

/// Pre-sigmoid score and probability for one input.
struct AnchorOutput {
    double score = 0.0;
    double prob = 0.5;
};
using OutputFn = std::function<AnchorOutput(std::span<const double>, std::span<const double>)>;

enum class AnchorStrategy { kStateSpace, kGradientSpace, kRandom };
enum class FunctionalTerm { kFidelity, kMse, kKl };
enum class Divergence { kMse, kKl };

AnchorStrategy parse_anchor_strategy(const std::string &name);
std::string to_string(AnchorStrategy s);
FunctionalTerm parse_functional_term(const std::string &name);
std::string to_string(FunctionalTerm t);

struct QfishConfig {
    double lambda_qfi = 0.3;
    double lambda_fid = 0.1;
    double epsilon = 1e-2;
    int anchor_budget = 64;
    AnchorStrategy strategy = AnchorStrategy::kStateSpace;
    int qfi_batch = 32;
    int fid_batch = 32;
    FunctionalTerm functional = FunctionalTerm::kFidelity;
    int gradient_subset = 16;

    void validate() const;
};

/// Anchors and snapshot data for one completed task.
struct TaskAnchors {
    int task_id = 0;
    FeatureMatrix inputs;                 ///< post-preprocessing rows only
    std::vector<int> labels;
    std::vector<double> snapshot_params;  ///< theta*_k, full parameter vector
    std::vector<AnchorOutput> snapshot_outputs;
    std::vector<double> sensitivity;      ///< F_ii >= 0, same length as the parameters
};

/// Append-only store. F is summed over tasks and the quadratic term is
/// centered at the most recent snapshot.
class AnchorMemory {
  public:
    void append(TaskAnchors task);

    [[nodiscard]] bool empty() const noexcept { return tasks_.empty(); }
    [[nodiscard]] const std::vector<TaskAnchors> &tasks() const noexcept { return tasks_; }
    [[nodiscard]] std::size_t total_anchors() const noexcept;
    [[nodiscard]] std::vector<double> combined_sensitivity() const;
    [[nodiscard]] const std::vector<double> &latest_snapshot() const;

    /// (task position, row) for a flat anchor index across all tasks.
    [[nodiscard]] std::pair<std::size_t, std::size_t> locate(std::size_t flat) const;

  private:
    std::vector<TaskAnchors> tasks_;
};

/// F_ii = mean_x ((f(theta + eps e_i, x) - f(theta - eps e_i, x)) / (2 eps))^2.
/// `indices` restricts the perturbed coordinates (others get 0); empty means all.
std::vector<double> estimate_sensitivity(const ScalarFn &f, std::span<const double> params,
                                         const FeatureMatrix &anchors, double epsilon,
                                         std::span<const std::size_t> indices = {});

/// clip(1 - (a - b)^2 / 2, 0, 1).
double fidelity_proxy(double current, double snapshot) noexcept;

/// mse: (a - b)^2 on scores. kl: KL(Bernoulli(snapshot) || Bernoulli(current)).
double divergence(double current, double snapshot, Divergence d);

/// Flat anchor indices drawn for one optimization step.
struct AnchorSubsample {
    std::vector<std::size_t> qfi;
    std::vector<std::size_t> fid;
};

/// Independent draws of min(batch, stored) anchors without replacement.
AnchorSubsample draw_subsample(const AnchorMemory &memory, const QfishConfig &cfg,
                               std::uint64_t seed);

struct RegularizerTerms {
    double qfi = 0.0;        ///< sum_i F_ii (theta_i - theta*_i)^2, before lambda
    double functional = 0.0; ///< 1 - mean fidelity (or the mean divergence), before lambda
    double total = 0.0;
};

/// lambda_qfi * qfi + lambda_fid * functional; zero for an empty memory.
/// Without a subsample the functional term averages over every stored anchor.
RegularizerTerms regularizer_terms(std::span<const double> params, const AnchorMemory &memory,
                                   const QfishConfig &cfg, const OutputFn &outputs,
                                   const AnchorSubsample *subsample = nullptr);

double regularizer(std::span<const double> params, const AnchorMemory &memory,
                   const QfishConfig &cfg, const OutputFn &outputs,
                   const AnchorSubsample *subsample = nullptr);

/// Mean of divergence(f_theta(x), f_theta*(x)) over every stored anchor.
double behavioral_consistency(std::span<const double> params, const AnchorMemory &memory,
                              const OutputFn &outputs, Divergence d);

struct AnchorSelectionOptions {
    AnchorStrategy strategy = AnchorStrategy::kStateSpace;
    int budget = 64;
    std::uint64_t seed = 0;
    double epsilon = 1e-2;     ///< finite-difference step for gradient-space embeddings
    int gradient_subset = 16;  ///< parameters used for gradient-space embeddings
    vqc::Execution exec;       ///< forward mode for gradient-space embeddings
};

/// Row indices of min(budget, N) anchors, split evenly between classes when
/// both have enough rows. Greedy strategies start at the row closest to the
/// class mean and add the farthest remaining row; ties go to the lower index.
std::vector<std::size_t> select_anchors(const LabeledSet &data, const vqc::VqcModel &model,
                                        const AnchorSelectionOptions &options);

/// k-center over the given embedding rows; exposed for testing.
std::vector<std::size_t> farthest_point_order(const FeatureMatrix &embedding, std::size_t k);

nlohmann::json to_json(const AnchorMemory &memory);
AnchorMemory anchor_memory_from_json(const nlohmann::json &doc);

} // namespace qcstream::stability
