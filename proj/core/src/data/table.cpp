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
#include "qcstream/data/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qcstream::data {

DatasetKind parse_dataset_kind(const std::string &name) {
    if (name == "generic")
        return DatasetKind::kGeneric;
    if (name == "unsw" || name == "unsw-nb15")
        return DatasetKind::kUnsw;
    if (name == "cicids" || name == "cicids2017")
        return DatasetKind::kCicids;
    throw std::invalid_argument("unknown dataset kind '" + name + "' (expected generic, unsw or cicids)");
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
    case DatasetKind::kUnsw:
        return "unsw";
    case DatasetKind::kCicids:
        return "cicids";
    case DatasetKind::kGeneric:
        break;
    }
    return "generic";
}

namespace {

std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::vector<std::string> split_line(const std::string &line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == delim && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

/// Parses a full cell as a double. Empty cells give NaN.
bool parse_number(const std::string &cell, double &value) {
    if (cell.empty()) {
        value = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    char *end = nullptr;
    value = std::strtod(cell.c_str(), &end);
    return end == cell.c_str() + cell.size();
}

} // namespace

RawTable parse_csv(const std::string &text, const CsvOptions &options) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("csv: missing header row");
    }
    const auto header = split_line(line, options.delimiter);

    std::string label_col = options.label_column;
    if (label_col.empty()) {
        label_col = options.kind == DatasetKind::kUnsw     ? "attack_cat"
                    : options.kind == DatasetKind::kCicids ? "Label"
                                                           : "label";
    }
    auto drop = options.drop_columns;
    if (options.kind == DatasetKind::kUnsw) {
        drop.insert(drop.end(), {"id", "label"});
    }
    const auto label_it = std::find(header.begin(), header.end(), label_col);
    if (label_it == header.end()) {
        throw std::invalid_argument("csv: label column '" + label_col + "' not found");
    }
    const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto cells = split_line(line, options.delimiter);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("csv: row " + std::to_string(rows.size() + 2) + " has " +
                                        std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(header.size()));
        }
        rows.push_back(std::move(cells));
    }

    std::vector<std::size_t> feature_idx;
    if (!options.feature_columns.empty()) {
        for (const auto &name : options.feature_columns) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw std::invalid_argument("csv: feature column '" + name + "' not found");
            }
            feature_idx.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == label_idx || std::find(drop.begin(), drop.end(), header[c]) != drop.end())
                continue;
            bool numeric = true;
            bool any = false;
            for (const auto &r : rows) {
                double v = 0.0;
                if (!parse_number(r[c], v)) {
                    numeric = false;
                    break;
                }
                any = any || !r[c].empty();
            }
            if (numeric && any)
                feature_idx.push_back(c);
        }
    }
    if (feature_idx.empty()) {
        throw std::invalid_argument("csv: no numeric feature columns");
    }

    RawTable t;
    for (auto c : feature_idx)
        t.feature_names.push_back(header[c]);
    std::vector<double> flat;
    flat.reserve(rows.size() * feature_idx.size());
    std::vector<double> vals(feature_idx.size());
    for (const auto &r : rows) {
        const auto &label = r[label_idx];
        if (options.kind == DatasetKind::kUnsw && label.empty()) {
            ++t.dropped_rows;
            continue;
        }
        bool ok = true;
        for (std::size_t j = 0; j < feature_idx.size(); ++j) {
            if (!parse_number(r[feature_idx[j]], vals[j])) {
                throw std::invalid_argument("csv: non-numeric value in feature column '" +
                                            header[feature_idx[j]] + "'");
            }
            if (!std::isfinite(vals[j])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++t.dropped_rows;
            continue;
        }
        flat.insert(flat.end(), vals.begin(), vals.end());
        t.labels.push_back(label);
    }
    if (t.labels.empty()) {
        throw std::invalid_argument("csv: no rows left after filtering");
    }
    t.x = Eigen::Map<const FeatureMatrix>(flat.data(), static_cast<Eigen::Index>(t.labels.size()),
                                          static_cast<Eigen::Index>(feature_idx.size()));
    return t;
}

RawTable load_csv(const std::string &path, const CsvOptions &options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), options);
}

} // namespace qcstream::data
