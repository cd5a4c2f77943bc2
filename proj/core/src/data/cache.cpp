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
#include "qcstream/data/cache.hpp"

#include "qcstream/util/hash.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcstream::data {

namespace fs = std::filesystem;

namespace {

constexpr const char *kFormat = "qcstream.split-cache";
constexpr int kVersion = 1;
constexpr const char *kPartNames[3] = {"train", "val", "test"};

std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << text;
}

std::string set_to_csv(const LabeledSet &s) {
    std::string out;
    for (Eigen::Index j = 0; j < s.dim(); ++j)
        out += fmt::format("f{},", j);
    out += "label\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (double v : s.row(i))
            out += fmt::format("{:.17g},", v);
        out += fmt::format("{}\n", s.y[i]);
    }
    return out;
}

LabeledSet set_from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    std::vector<double> flat;
    LabeledSet s;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        Eigen::Index j = 0;
        while (std::getline(ls, cell, ',')) {
            if (j < dim)
                flat.push_back(std::stod(cell));
            else
                s.y.push_back(std::stoi(cell));
            ++j;
        }
        if (j != dim + 1) {
            throw std::runtime_error("split file: wrong column count");
        }
    }
    s.x = Eigen::Map<const FeatureMatrix>(flat.data(), static_cast<Eigen::Index>(s.y.size()), dim);
    return s;
}

[[noreturn]] void corrupted(const fs::path &dir, const std::string &why) {
    throw std::runtime_error("split cache at " + dir.string() + " is corrupted (" + why +
                             "); delete the directory and rerun");
}

} // namespace

std::string descriptor_hash(const nlohmann::json &descriptor) {
    return util::to_hex(util::fnv1a(descriptor.dump()));
}

void write_split_set(const std::string &directory, const std::vector<TaskSplit> &splits,
                     const nlohmann::json &descriptor) {
    const fs::path dir(directory);
    fs::create_directories(dir);
    nlohmann::json files = nlohmann::json::object();
    for (const auto &s : splits) {
        for (std::size_t p = 0; p < 3; ++p) {
            const auto name = fmt::format("task_{}_{}.csv", s.task_id, kPartNames[p]);
            const auto text = set_to_csv(s.parts[p]);
            write_file(dir / name, text);
            files[name] = util::to_hex(util::fnv1a(text));
        }
        nlohmann::json meta{{"task_id", s.task_id},
                            {"phase", s.phase},
                            {"transformed", s.transformed},
                            {"clipped", s.clipped},
                            {"source_rows", s.source_rows}};
        if (s.transformed)
            meta["transform"] = to_json(s.transform);
        const auto name = fmt::format("task_{}.json", s.task_id);
        const auto text = meta.dump(1);
        write_file(dir / name, text);
        files[name] = util::to_hex(util::fnv1a(text));
    }
    const nlohmann::json manifest{{"format", kFormat},
                                  {"version", kVersion},
                                  {"descriptor", descriptor},
                                  {"manifest_hash", descriptor_hash(descriptor)},
                                  {"tasks", splits.size()},
                                  {"files", files}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<TaskSplit> read_split_set(const std::string &directory,
                                      const nlohmann::json &expected_descriptor) {
    const fs::path dir(directory);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception &e) {
        corrupted(dir, std::string("manifest does not parse: ") + e.what());
    }
    try {
        if (manifest.at("format") != kFormat || manifest.at("version") != kVersion)
            corrupted(dir, "unknown format or version");
        if (manifest.at("manifest_hash") != descriptor_hash(manifest.at("descriptor")))
            corrupted(dir, "manifest hash does not match its descriptor");
        if (!expected_descriptor.is_null() && manifest.at("descriptor") != expected_descriptor)
            corrupted(dir, "descriptor differs from the requested inputs");
        for (const auto &[name, sum] : manifest.at("files").items()) {
            if (!fs::exists(dir / name))
                corrupted(dir, "missing file " + name);
            if (util::to_hex(util::fnv1a(read_file(dir / name))) != sum.get<std::string>())
                corrupted(dir, "checksum mismatch for " + name);
        }
        std::vector<TaskSplit> splits;
        const auto tasks = manifest.at("tasks").get<std::size_t>();
        for (std::size_t k = 0; k < tasks; ++k) {
            const auto meta = nlohmann::json::parse(read_file(dir / fmt::format("task_{}.json", k)));
            TaskSplit s;
            s.task_id = meta.at("task_id").get<int>();
            s.phase = meta.at("phase").get<std::string>();
            s.transformed = meta.at("transformed").get<bool>();
            s.clipped = meta.at("clipped").get<std::size_t>();
            s.source_rows = meta.at("source_rows").get<std::array<std::vector<std::size_t>, 3>>();
            if (s.transformed)
                s.transform = transform_from_json(meta.at("transform"));
            for (std::size_t p = 0; p < 3; ++p)
                s.parts[p] = set_from_csv(
                    read_file(dir / fmt::format("task_{}_{}.csv", k, kPartNames[p])));
            splits.push_back(std::move(s));
        }
        return splits;
    } catch (const nlohmann::json::exception &e) {
        corrupted(dir, std::string("manifest field error: ") + e.what());
    }
}

CacheResult load_or_build_cache(const std::string &root, const std::string &prefix,
                                const nlohmann::json &descriptor,
                                const std::function<std::vector<TaskSplit>()> &build) {
    CacheResult r;
    r.manifest_hash = descriptor_hash(descriptor);
    const fs::path dir = fs::path(root) / (prefix + "-" + r.manifest_hash);
    r.directory = dir.string();
    if (fs::exists(dir / "manifest.json")) {
        r.splits = read_split_set(r.directory, descriptor);
        r.hit = true;
        return r;
    }
    if (fs::exists(dir)) {
        corrupted(dir, "directory exists without a manifest");
    }
    r.splits = build();
    const fs::path tmp = fs::path(root) / (prefix + "-" + r.manifest_hash + ".partial");
    fs::remove_all(tmp);
    write_split_set(tmp.string(), r.splits, descriptor);
    fs::rename(tmp, dir);
    return r;
}

} // namespace qcstream::data
