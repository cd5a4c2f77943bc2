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

#include "qcstream/data/stream.hpp"
#include "qcstream/metrics/metrics.hpp"
#include "qcstream/pipeline/config.hpp"
#include "qcstream/replay/source.hpp"
#include "qcstream/stability/qfish.hpp"
#include "qcstream/vqc/model.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qcstream::pipeline {

struct PersistentState {
    explicit PersistentState(vqc::VqcModel initial, int num_tasks)
        : model(std::move(initial)), r(num_tasks) {}

    vqc::VqcModel model;
    std::vector<replay::SourcePtr> generators;
    stability::AnchorMemory memory;
    std::vector<double> thresholds;
    /// Tuning subsets kept for class-incremental threshold re-tuning only.
    std::vector<LabeledSet> tuning_sets;
    metrics::RMatrix r;

    [[nodiscard]] int completed_tasks() const noexcept { return static_cast<int>(thresholds.size()); }
};

struct CurvePoint {
    int epoch = 0;      ///< 1-based, counted across the whole stream
    int task = 0;       ///< evaluated task
    double attack_f1 = 0.0;
};

struct TaskReport {
    int task_id = 0;
    std::string phase;
    std::size_t train_size = 0;
    int steps = 0;
    std::size_t replay_per_step = 0;
    std::vector<double> epoch_loss; ///< mean composite loss seen by the optimizer per epoch
    double threshold = 0.5;
    std::size_t anchors = 0;
    std::optional<std::uint64_t> generator_checksum;
    std::string generator_kind;
};

/// Epoch-level progress hook: (task, epoch, mean loss).
using ProgressFn = std::function<void(int, int, double)>;

/// Runs one task against the composite objective and updates the persistent
/// state (generator, anchors, sensitivity, snapshot, threshold). `curve_sets`
/// holds the validation splits of every seen task, current one last.
TaskReport train_task(PersistentState &state, const data::TaskSplit &split,
                      const ResolvedConfig &cfg, const std::vector<const LabeledSet *> &curve_sets,
                      std::vector<CurvePoint> &curves, const ProgressFn &progress = {});

/// Mixed-batch arithmetic.
struct BatchPlan {
    std::size_t steps_per_epoch = 0;
    std::size_t real_per_step = 0;
    std::size_t replay_per_step = 0;
};
BatchPlan plan_batches(std::size_t train_size, int batch_size, double replay_ratio,
                       bool replay_available);

struct StreamResult {
    metrics::RMatrix r;
    std::vector<TaskReport> tasks;
    std::vector<CurvePoint> curves;
    PersistentState state;
};

StreamResult run_stream(const std::vector<data::TaskSplit> &splits, const ResolvedConfig &cfg,
                        const ProgressFn &progress = {});

vqc::Execution evaluation_exec(const ExperimentConfig &cfg);

/// Per-task table and continual-learning summary; summary values are null for
/// fewer than two completed tasks.
nlohmann::json metrics_report(const metrics::RMatrix &r, const std::vector<TaskReport> &tasks);

nlohmann::json state_to_json(const PersistentState &state);

} // namespace qcstream::pipeline
