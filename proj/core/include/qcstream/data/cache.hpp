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

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace qcstream::data {

struct CacheResult {
    std::string directory;
    bool hit = false;
    std::string manifest_hash; ///< digest of the descriptor, shared by every reuse
    std::vector<TaskSplit> splits;
};

/// Digest of the descriptor's canonical dump (object keys sorted).
std::string descriptor_hash(const nlohmann::json &descriptor);

/// Loads `root/<prefix>-<hash>` when its manifest matches the descriptor;
/// otherwise calls `build` and persists the result. A present but unreadable or
/// inconsistent manifest throws and asks for the directory to be deleted.
CacheResult load_or_build_cache(const std::string &root, const std::string &prefix,
                                const nlohmann::json &descriptor,
                                const std::function<std::vector<TaskSplit>()> &build);

void write_split_set(const std::string &directory, const std::vector<TaskSplit> &splits,
                     const nlohmann::json &descriptor);
std::vector<TaskSplit> read_split_set(const std::string &directory,
                                      const nlohmann::json &expected_descriptor);

} // namespace qcstream::data
