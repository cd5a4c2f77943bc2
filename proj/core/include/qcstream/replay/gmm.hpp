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

#include "qcstream/replay/source.hpp"
#include "qcstream/util/rng.hpp"

#include <array>

namespace qcstream::replay {

/// Gaussian mixture with diagonal covariances.
struct DiagonalGmm {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> variances;

    [[nodiscard]] std::size_t components() const noexcept { return weights.size(); }
    [[nodiscard]] double log_likelihood(const FeatureMatrix &x) const;
    [[nodiscard]] FeatureMatrix sample(std::size_t n, util::Rng &rng) const;
};

struct GmmOptions {
    int components = 3;
    int iterations = 100;
    double variance_floor = 1e-6;
    std::uint64_t seed = 0;
};

/// EM with k-means++ seeding. Throws if there are fewer rows than components.
DiagonalGmm fit_gmm(const FeatureMatrix &x, const GmmOptions &options);

/// Classical control: one mixture per class.
class GmmReplaySource final : public ReplaySource {
  public:
    GmmReplaySource(int task_id, std::array<DiagonalGmm, 2> mixtures, std::size_t support,
                    double attack_fraction);

    [[nodiscard]] int task_id() const noexcept override { return task_id_; }
    [[nodiscard]] LabeledSet synthesize(int condition, std::size_t n,
                                        std::uint64_t seed) const override;
    [[nodiscard]] std::uint64_t checksum() const noexcept override { return checksum_; }
    [[nodiscard]] std::size_t support_size() const noexcept override { return support_; }
    [[nodiscard]] double attack_fraction() const noexcept override { return attack_fraction_; }
    [[nodiscard]] std::string kind() const override { return "gmm"; }
    [[nodiscard]] nlohmann::json to_json() const override;

    [[nodiscard]] const DiagonalGmm &mixture(int condition) const { return mix_.at(condition); }

    static GmmReplaySource from_json(const nlohmann::json &doc);

  private:
    int task_id_;
    std::array<DiagonalGmm, 2> mix_;
    std::size_t support_;
    double attack_fraction_;
    std::uint64_t checksum_;
};

GmmReplaySource fit_class_gmm(const LabeledSet &data, int task_id, const GmmOptions &options);

} // namespace qcstream::replay
