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

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qcstream::replay {

/// Past-task sample source. Implementations are immutable once constructed.
class ReplaySource {
  public:
    virtual ~ReplaySource() = default;

    [[nodiscard]] virtual int task_id() const noexcept = 0;
    /// n samples labeled `condition`, deterministic in `seed`. Throws on n = 0.
    [[nodiscard]] virtual LabeledSet synthesize(int condition, std::size_t n,
                                                std::uint64_t seed) const = 0;
    /// Digest of every frozen field.
    [[nodiscard]] virtual std::uint64_t checksum() const noexcept = 0;
    /// Training rows seen for the task and the attack fraction among them.
    [[nodiscard]] virtual std::size_t support_size() const noexcept = 0;
    [[nodiscard]] virtual double attack_fraction() const noexcept = 0;
    [[nodiscard]] virtual std::string kind() const = 0;
    [[nodiscard]] virtual nlohmann::json to_json() const = 0;
};

using SourcePtr = std::shared_ptr<const ReplaySource>;

enum class TaskBalance { kUniform, kProportional };

struct ReplayPolicy {
    double ratio = 0.3;
    TaskBalance balance = TaskBalance::kUniform;
    bool class_balanced = true;
    /// Relative condition weights (normal, attack).
    double upweight[2] = {1.0, 1.0};

    void validate() const;
};

struct ReplayBatch {
    LabeledSet data;
    std::vector<int> task; ///< source task id per row
};

/// round(ratio * batch_size) draws. Each draw picks a past task (uniform or in
/// proportion to support size), then a condition (uniform when class-balanced,
/// otherwise the task's class prior; both scaled by the upweights), then
/// synthesizes. Empty when there are no sources.
ReplayBatch draw_replay_batch(std::span<const SourcePtr> sources, const ReplayPolicy &policy,
                              std::size_t batch_size, std::uint64_t seed);

/// round(ratio * batch_size), halves away from zero.
std::size_t replay_count(double ratio, std::size_t batch_size);

} // namespace qcstream::replay
