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

#include "qcstream/data/phase_map.hpp"
#include "qcstream/data/table.hpp"
#include "qcstream/data/transform.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qcstream::data {

enum SplitPart : std::size_t { kTrain = 0, kVal = 1, kTest = 2 };

struct TaskSplit {
    int task_id = 0;
    std::string phase;
    std::array<LabeledSet, 3> parts; ///< train, val, test
    /// Source-table row of every sample, per part (attack rows first, then NORMAL).
    std::array<std::vector<std::size_t>, 3> source_rows;
    bool transformed = false;
    TransformRecord transform;
    std::size_t clipped = 0; ///< val/test entries clipped after the transform

    [[nodiscard]] const LabeledSet &train() const { return parts[kTrain]; }
    [[nodiscard]] const LabeledSet &val() const { return parts[kVal]; }
    [[nodiscard]] const LabeledSet &test() const { return parts[kTest]; }
};

struct SplitCounts {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

/// floor(train_frac n), floor(val_frac n), remainder.
SplitCounts split_counts(std::size_t n, double train_frac = 0.6, double val_frac = 0.2);

struct StreamOptions {
    std::uint64_t seed = 42;
    double train_frac = 0.6;
    double val_frac = 0.2;
};

/// Attack row groups in task order, each split by count after a shuffle seeded
/// with seed + k. NORMAL rows come from one pool shuffled with `seed`, consumed
/// by a running pointer so tasks and parts never share a row. Per part the
/// NORMAL count is floor(ratio * attack count), ratio = |NORMAL| / |attacks|.
std::vector<TaskSplit> build_stream_from_groups(const RawTable &table,
                                                const std::vector<std::size_t> &normal_rows,
                                                const std::vector<std::vector<std::size_t>> &attack_rows,
                                                const std::vector<std::string> &names,
                                                const StreamOptions &options);

/// Three tasks in phase order RECON_SCAN, DOS_RESOURCE, INTRUSION_MALWARE.
std::vector<TaskSplit> build_task_stream(const RawTable &table, const PhaseMap &phase_map,
                                         const StreamOptions &options = {});

/// Fits on the train part only; val/test are clipped and the count recorded.
void fit_transform(TaskSplit &split, const TransformOptions &options = {});

/// Gaussian-cluster stream. NORMAL ~ N(normal_mean, normal_cov) is shared;
/// task k's attacks ~ N(attack_means[k], attack_covs[k]).
struct SynthSpec {
    std::string name = "custom";
    int dim = 6;
    std::size_t normal_per_task = 1000;
    std::size_t attack_per_task = 500;
    std::vector<double> normal_mean;
    Eigen::MatrixXd normal_cov;
    std::vector<std::vector<double>> attack_means;
    std::vector<Eigen::MatrixXd> attack_covs;
    std::uint64_t seed = 42;

    [[nodiscard]] int num_tasks() const noexcept { return static_cast<int>(attack_means.size()); }
    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;

    /// Attack centers at distance `separation` from the NORMAL mean, rotated by
    /// `shift_deg` per task in the first two coordinates, isotropic spread.
    static SynthSpec rotating(int tasks, double separation, double shift_deg, double attack_std,
                              std::uint64_t seed);
    /// "default", "no-shift" or "separable".
    static SynthSpec named(const std::string &name, std::uint64_t seed = 42);
};

RawTable synth_table(const SynthSpec &spec);
/// Raw splits for the synthetic stream (run fit_transform afterwards).
std::vector<TaskSplit> synth_stream(const SynthSpec &spec, const StreamOptions &options = {});

nlohmann::json split_summary(const TaskSplit &split);

} // namespace qcstream::data
