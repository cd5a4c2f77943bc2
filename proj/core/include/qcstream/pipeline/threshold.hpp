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

#include <cstdint>
#include <span>
#include <vector>

namespace qcstream::pipeline {

/// Grid {0.01, ..., 0.99}.
std::vector<double> threshold_grid();

struct ThresholdChoice {
    double threshold = 0.5;
    double f1_macro = 0.0;
    bool degenerate = false; ///< single-class subset, 0.5 returned
};

/// Argmax of F1-macro over the grid; ties go to the value closest to 0.5, then the lower one.
ThresholdChoice best_threshold(std::span<const double> probs, std::span<const int> labels);

/// max(100, ceil(0.2 n)), capped at n.
std::size_t tuning_subset_size(std::size_t n);

/// Uniform draw without replacement, no stratification.
std::vector<std::size_t> draw_tuning_subset(std::size_t n, std::uint64_t seed);

struct ThresholdSelection {
    ThresholdChoice choice;
    std::vector<std::size_t> subset;
};

ThresholdSelection select_threshold(const vqc::VqcModel &model, const LabeledSet &train,
                                    const vqc::Execution &exec, std::uint64_t seed);

} // namespace qcstream::pipeline
