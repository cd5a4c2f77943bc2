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
#include "qcstream/data/dataset.hpp"

#include "qcstream/data/phase_map.hpp"
#include "qcstream/util/hash.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcstream::data {

namespace {

std::string file_digest(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return util::to_hex(util::fnv1a(buf.str()));
}

PhaseMap phase_map_for(const DatasetSpec &spec) {
    if (!spec.phase_map_path.empty())
        return PhaseMap::load(spec.phase_map_path);
    switch (spec.kind) {
    case DatasetKind::kUnsw:
        return unsw_phase_map();
    case DatasetKind::kCicids:
        return cicids_phase_map();
    case DatasetKind::kGeneric:
        return identity_phase_map();
    }
    return identity_phase_map();
}

} // namespace

std::string DatasetSpec::id() const {
    return is_synthetic() ? "synthetic:" + synthetic : to_string(kind) + ":" + path;
}

void DatasetSpec::validate() const {
    if (is_synthetic() == !path.empty()) {
        throw std::invalid_argument("dataset: give exactly one of a synthetic spec or a CSV path");
    }
}

nlohmann::json dataset_descriptor(const DatasetSpec &spec) {
    spec.validate();
    nlohmann::json d;
    d["seed"] = spec.seed;
    d["transform"] = {{"components", spec.transform.components},
                      {"near_constant", spec.transform.near_constant},
                      {"clip", spec.transform.clip}};
    if (spec.is_synthetic()) {
        d["source"] = "synthetic";
        d["spec"] = SynthSpec::named(spec.synthetic, spec.seed).to_json();
    } else {
        d["source"] = "csv";
        d["kind"] = to_string(spec.kind);
        d["file_digest"] = file_digest(spec.path);
        d["phase_map"] = util::to_hex(phase_map_for(spec).hash());
        d["feature_columns"] = spec.feature_columns;
    }
    return d;
}

std::vector<TaskSplit> build_splits(const DatasetSpec &spec) {
    spec.validate();
    StreamOptions options;
    options.seed = spec.seed;
    std::vector<TaskSplit> splits;
    if (spec.is_synthetic()) {
        splits = synth_stream(SynthSpec::named(spec.synthetic, spec.seed), options);
    } else {
        CsvOptions csv;
        csv.kind = spec.kind;
        csv.feature_columns = spec.feature_columns;
        splits = build_task_stream(load_csv(spec.path, csv), phase_map_for(spec), options);
    }
    for (auto &s : splits)
        fit_transform(s, spec.transform);
    return splits;
}

CacheResult prepare_splits(const DatasetSpec &spec, const std::string &cache_root) {
    const auto descriptor = dataset_descriptor(spec);
    const std::string prefix = spec.is_synthetic() ? "synthetic-" + spec.synthetic : to_string(spec.kind);
    return load_or_build_cache(cache_root, prefix, descriptor, [&] { return build_splits(spec); });
}

} // namespace qcstream::data
