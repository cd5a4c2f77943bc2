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

#include "qcstream/data/cache.hpp"
#include "qcstream/data/stream.hpp"
#include "qcstream/data/table.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace qcstream::data {

/// Either a named synthetic stream or a CSV file with its phase map.
struct DatasetSpec {
    std::string synthetic;      ///< "default", "no-shift", "separable"; empty for CSV input
    std::string path;
    DatasetKind kind = DatasetKind::kGeneric;
    std::string phase_map_path; ///< empty selects the built-in map for the kind
    std::vector<std::string> feature_columns;
    std::uint64_t seed = 42;
    TransformOptions transform;

    [[nodiscard]] bool is_synthetic() const noexcept { return !synthetic.empty(); }
    [[nodiscard]] std::string id() const;
    void validate() const;
};

/// Content-addressed description: file digests rather than paths, so a
/// modified dataset or phase map yields a new cache entry.
nlohmann::json dataset_descriptor(const DatasetSpec &spec);

/// Builds and transforms the task splits without touching the cache.
std::vector<TaskSplit> build_splits(const DatasetSpec &spec);

CacheResult prepare_splits(const DatasetSpec &spec, const std::string &cache_root);

} // namespace qcstream::data
