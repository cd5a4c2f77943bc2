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

#include "qcstream/pipeline/config.hpp"
#include "qcstream/pipeline/runner.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace qcstream::pipeline {

struct RunInfo {
    std::string dataset_id;  ///< dataset path/kind or synthetic spec name
    std::string split_hash;  ///< cache manifest hash of the task splits
    std::string version;
};

/// Digest of the canonical (key-sorted) config document.
std::string config_hash(const ExperimentConfig &cfg);

struct SummaryRow {
    std::string label;
    std::optional<double> mean_attack_f1;
    std::optional<double> forgetting;
    std::optional<double> bwt;
    std::optional<double> fwt;
    std::vector<std::optional<double>> per_task; ///< final-row Attack-F1
};

SummaryRow summarize(const std::string &label, const metrics::RMatrix &r);

std::string format_table(const std::vector<SummaryRow> &rows);

std::string curves_csv(const std::vector<CurvePoint> &curves);

/// Writes config.json, rmatrix.csv, metrics.json, curves.csv, state.json,
/// run.log and manifest.json into `directory` and returns the manifest.
nlohmann::json write_artifacts(const std::string &directory, const ResolvedConfig &cfg,
                               const StreamResult &result, const RunInfo &info);

} // namespace qcstream::pipeline
