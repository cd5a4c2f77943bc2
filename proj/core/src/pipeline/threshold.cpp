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
#include "qcstream/pipeline/threshold.hpp"

#include "qcstream/metrics/metrics.hpp"
#include "qcstream/util/rng.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcstream::pipeline {

std::vector<double> threshold_grid() {
    std::vector<double> g(99);
    for (int k = 1; k <= 99; ++k)
        g[static_cast<std::size_t>(k - 1)] = k / 100.0;
    return g;
}

ThresholdChoice best_threshold(std::span<const double> probs, std::span<const int> labels) {
    if (probs.empty() || probs.size() != labels.size()) {
        throw std::invalid_argument("best_threshold: empty or mismatched inputs");
    }
    const bool has0 = std::find(labels.begin(), labels.end(), 0) != labels.end();
    const bool has1 = std::find(labels.begin(), labels.end(), 1) != labels.end();
    if (!has0 || !has1) {
        return {0.5, 0.0, true};
    }
    ThresholdChoice best{0.5, -1.0, false};
    for (double t : threshold_grid()) {
        const double f = metrics::f1_macro(metrics::apply_threshold(probs, t), labels);
        const double gap = std::abs(t - 0.5);
        const double best_gap = std::abs(best.threshold - 0.5);
        // Iterating upward, an equal gap is always the higher candidate, so it loses.
        if (f > best.f1_macro + 1e-12 || (std::abs(f - best.f1_macro) <= 1e-12 && gap < best_gap - 1e-12)) {
            best.threshold = t;
            best.f1_macro = f;
        }
    }
    return best;
}

std::size_t tuning_subset_size(std::size_t n) {
    const auto fifth = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(n) - 1e-9));
    return std::min(n, std::max<std::size_t>(100, fifth));
}

std::vector<std::size_t> draw_tuning_subset(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    util::Rng rng(seed);
    util::shuffle(idx, rng);
    idx.resize(tuning_subset_size(n));
    return idx;
}

ThresholdSelection select_threshold(const vqc::VqcModel &model, const LabeledSet &train,
                                    const vqc::Execution &exec, std::uint64_t seed) {
    if (train.empty()) {
        throw std::invalid_argument("select_threshold: empty training split");
    }
    ThresholdSelection out;
    out.subset = draw_tuning_subset(train.size(), seed);
    const auto subset = train.subset(out.subset);
    const auto probs = vqc::predict_proba(model, subset.x, exec, util::derive_seed(seed, {1}));
    out.choice = best_threshold(probs, subset.y);
    if (out.choice.degenerate) {
        spdlog::warn("threshold tuning subset holds a single class; using 0.5");
    }
    return out;
}

} // namespace qcstream::pipeline
