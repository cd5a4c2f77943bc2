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

#include <vector>

namespace qcstream::pipeline {

struct LogisticOptions {
    double l2 = 1e-4;
    int max_iters = 500;
    double tolerance = 1e-8;
    double learning_rate = 1.0;
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    int iterations = 0;

    [[nodiscard]] double predict_proba(std::span<const double> x) const;
};

/// Full-batch gradient descent on mean log-loss + (l2 / 2) |w|^2 (bias unpenalized).
/// Stops when the objective changes by less than the tolerance. Throws on a single-class set.
LogisticModel fit_logistic(const LabeledSet &train, const LogisticOptions &options = {});

/// Attack-F1 at 0.5 on `eval` for a model fitted on `train` alone.
double oracle_attack_f1(const LabeledSet &train, const LabeledSet &eval,
                        const LogisticOptions &options = {});

} // namespace qcstream::pipeline
