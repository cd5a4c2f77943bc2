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

#include <string>
#include <vector>

namespace qcstream::data {

enum class DatasetKind { kGeneric, kUnsw, kCicids };

DatasetKind parse_dataset_kind(const std::string &name);
std::string to_string(DatasetKind kind);

struct CsvOptions {
    DatasetKind kind = DatasetKind::kGeneric;
    char delimiter = ',';
    /// Empty selects the dataset default: attack_cat (UNSW), Label (CICIDS), label.
    std::string label_column;
    /// Excluded from the features even when numeric. UNSW also drops id and label.
    std::vector<std::string> drop_columns;
    /// Explicit feature list; when set, only these columns are used.
    std::vector<std::string> feature_columns;
};

/// Numeric feature rows plus the raw label string per row.
struct RawTable {
    std::vector<std::string> feature_names;
    FeatureMatrix x;
    std::vector<std::string> labels;
    std::size_t dropped_rows = 0;
};

/// Header names are trimmed. A column is a feature when every non-empty cell
/// parses as a number (inf and nan included). Rows with a missing or non-finite
/// feature are dropped; UNSW rows with an empty label are dropped first.
RawTable parse_csv(const std::string &text, const CsvOptions &options);
RawTable load_csv(const std::string &path, const CsvOptions &options);

} // namespace qcstream::data
