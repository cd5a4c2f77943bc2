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

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace qcstream::data {

enum class Phase { kNormal, kReconScan, kDosResource, kIntrusionMalware };

/// Attack phases in stream order.
inline constexpr std::array<Phase, 3> kAttackPhases = {Phase::kReconScan, Phase::kDosResource,
                                                       Phase::kIntrusionMalware};

std::string to_string(Phase p);
Phase parse_phase(const std::string &name);

/// Label -> phase lookup. Labels are compared after lowercasing and dropping
/// every non-alphanumeric character, so "Web Attack - XSS" and "web attack xss"
/// are the same key. Unknown labels throw.
class PhaseMap {
  public:
    PhaseMap() = default;
    explicit PhaseMap(std::string dataset) : dataset_(std::move(dataset)) {}

    void add(const std::string &label, Phase phase);
    [[nodiscard]] Phase lookup(const std::string &label) const;
    [[nodiscard]] const std::string &dataset() const noexcept { return dataset_; }
    [[nodiscard]] const std::map<std::string, Phase> &entries() const noexcept { return map_; }
    /// Digest of the dataset name and the sorted entries.
    [[nodiscard]] std::uint64_t hash() const noexcept;

    [[nodiscard]] nlohmann::json to_json() const;
    static PhaseMap from_json(const nlohmann::json &doc);
    static PhaseMap load(const std::string &path);

    static std::string normalize(const std::string &label);

  private:
    std::string dataset_;
    std::map<std::string, Phase> map_;
};

/// Reconstructed default maps; edit or replace them with a JSON file.
PhaseMap unsw_phase_map();
PhaseMap cicids_phase_map();
/// NORMAL / RECON_SCAN / DOS_RESOURCE / INTRUSION_MALWARE mapped to themselves.
PhaseMap identity_phase_map();

} // namespace qcstream::data
