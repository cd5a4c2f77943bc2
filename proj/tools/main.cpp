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
#include "qcstream/pipeline/artifacts.hpp"
#include "qcstream/pipeline/config.hpp"
#include "qcstream/pipeline/runner.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#ifndef QCSTREAM_VERSION
#define QCSTREAM_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace qcstream;

namespace {

struct Overrides {
    std::optional<std::string> group;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    std::optional<std::int64_t> shots;
    std::optional<double> noise_1q;
    std::optional<double> noise_2q;
    std::optional<double> readout_error;
    std::optional<double> replay_ratio;
    std::optional<double> lambda_qfi;
    std::optional<double> lambda_fid;
    std::optional<int> anchor_budget;
    std::optional<std::string> anchor_strategy;
    std::optional<std::string> optimizer;
    std::optional<bool> noise;
    std::optional<bool> exact;
    bool class_incremental = false;
};

struct DataOptions {
    std::string synthetic;
    std::string path;
    std::string kind = "generic";
    std::string phase_map;
    std::vector<std::string> feature_columns;
    std::string cache_dir = "cache";
};

struct Invocation {
    std::string config_path;
    std::string output_dir = "runs";
    Overrides over;
    DataOptions data;
};

nlohmann::json read_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error("config " + path + " is not valid JSON: " + e.what());
    }
}

// Splits a config document into experiment keys and the run-level keys.
pipeline::ExperimentConfig load_config(Invocation &inv) {
    pipeline::ExperimentConfig cfg;
    if (inv.config_path.empty())
        return cfg;
    auto doc = read_json(inv.config_path);
    if (!doc.is_object()) {
        throw std::invalid_argument("config: expected a JSON object");
    }
    if (doc.contains("dataset")) {
        const auto d = doc["dataset"];
        for (const auto &[key, value] : d.items()) {
            if (key == "synthetic" && inv.data.synthetic.empty() && inv.data.path.empty())
                inv.data.synthetic = value.get<std::string>();
            else if (key == "path" && inv.data.path.empty() && inv.data.synthetic.empty())
                inv.data.path = value.get<std::string>();
            else if (key == "kind")
                inv.data.kind = value.get<std::string>();
            else if (key == "phase_map" && inv.data.phase_map.empty())
                inv.data.phase_map = value.get<std::string>();
            else if (key == "feature_columns" && inv.data.feature_columns.empty())
                inv.data.feature_columns = value.get<std::vector<std::string>>();
            else if (key != "synthetic" && key != "path" && key != "phase_map" && key != "feature_columns")
                throw std::invalid_argument("config key 'dataset." + key + "': unknown key");
        }
        doc.erase("dataset");
    }
    if (doc.contains("cache_dir")) {
        inv.data.cache_dir = doc["cache_dir"].get<std::string>();
        doc.erase("cache_dir");
    }
    if (doc.contains("output_dir")) {
        inv.output_dir = doc["output_dir"].get<std::string>();
        doc.erase("output_dir");
    }
    pipeline::apply_json(cfg, doc);
    return cfg;
}

void apply_overrides(pipeline::ExperimentConfig &cfg, const Overrides &o) {
    if (o.group)
        cfg.group = pipeline::parse_group(*o.group);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.epochs)
        cfg.epochs = *o.epochs;
    if (o.shots)
        cfg.shots = *o.shots;
    if (o.noise)
        cfg.noise.enabled = *o.noise;
    if (o.noise_1q)
        cfg.noise.p1 = *o.noise_1q;
    if (o.noise_2q)
        cfg.noise.p2 = *o.noise_2q;
    if (o.readout_error)
        cfg.noise.p_ro = *o.readout_error;
    if (o.replay_ratio)
        cfg.replay_ratio = *o.replay_ratio;
    if (o.lambda_qfi)
        cfg.lambda_qfi = *o.lambda_qfi;
    if (o.lambda_fid)
        cfg.lambda_fid = *o.lambda_fid;
    if (o.anchor_budget)
        cfg.anchor_budget = *o.anchor_budget;
    if (o.anchor_strategy)
        cfg.anchor_strategy = stability::parse_anchor_strategy(*o.anchor_strategy);
    if (o.optimizer)
        cfg.optimizer = pipeline::parse_optimizer(*o.optimizer);
    if (o.exact)
        cfg.exact_expectations = *o.exact;
    if (o.class_incremental)
        cfg.class_incremental = true;
    cfg.validate();
}

data::DatasetSpec dataset_spec(const DataOptions &d, std::uint64_t seed) {
    data::DatasetSpec spec;
    spec.synthetic = d.synthetic;
    spec.path = d.path;
    spec.kind = data::parse_dataset_kind(d.kind);
    spec.phase_map_path = d.phase_map;
    spec.feature_columns = d.feature_columns;
    spec.seed = seed;
    if (!spec.is_synthetic() && spec.path.empty()) {
        throw std::invalid_argument("no dataset given; use --synthetic NAME or --data PATH");
    }
    if (!spec.path.empty() && !fs::exists(spec.path)) {
        throw std::runtime_error("dataset file not found: " + spec.path);
    }
    spec.validate();
    return spec;
}

void add_data_options(CLI::App *cmd, DataOptions &d) {
    cmd->add_option("--synthetic", d.synthetic, "Synthetic stream: default, no-shift or separable");
    cmd->add_option("--data", d.path, "CSV dataset path");
    cmd->add_option("--kind", d.kind, "Dataset kind: generic, unsw or cicids");
    cmd->add_option("--phase-map", d.phase_map, "Phase map JSON (defaults to the built-in map)");
    cmd->add_option("--no-pca-features", d.feature_columns,
                    "Use these raw feature columns instead of PCA components")
        ->delimiter(',');
    cmd->add_option("--cache-dir", d.cache_dir, "Split cache root");
}

void add_experiment_options(CLI::App *cmd, Invocation &inv) {
    auto &o = inv.over;
    cmd->add_option("--config", inv.config_path, "JSON config file");
    cmd->add_option("--out", inv.output_dir, "Artifact root directory");
    cmd->add_option("--seed", o.seed, "Global seed");
    cmd->add_option("--epochs", o.epochs, "Epochs per task");
    cmd->add_option("--shots", o.shots, "Classifier shots");
    cmd->add_option("--noise-1q", o.noise_1q, "Single-qubit depolarizing probability");
    cmd->add_option("--noise-2q", o.noise_2q, "Two-qubit depolarizing probability");
    cmd->add_option("--readout-error", o.readout_error, "Readout bit-flip probability");
    cmd->add_flag("--noise,!--no-noise", o.noise, "Enable or disable the noise model");
    cmd->add_option("--replay-ratio", o.replay_ratio, "Replay fraction of each batch");
    cmd->add_option("--lambda-qfi", o.lambda_qfi, "Sensitivity penalty weight");
    cmd->add_option("--lambda-fid", o.lambda_fid, "Functional penalty weight");
    cmd->add_option("--anchor-budget", o.anchor_budget, "Anchors kept per task");
    cmd->add_option("--anchor-strategy", o.anchor_strategy, "state-space, gradient-space or random");
    cmd->add_option("--optimizer", o.optimizer, "spsa or gradient");
    cmd->add_flag("--class-incremental", o.class_incremental, "Re-tune past-task thresholds");
    cmd->add_flag("--exact-expectations,!--shot-expectations", o.exact,
                  "Exact expectations instead of shot sampling");
    add_data_options(cmd, inv.data);
}

struct RunOutcome {
    pipeline::SummaryRow row;
    std::string split_hash;
};

RunOutcome execute(const pipeline::ExperimentConfig &cfg, const data::DatasetSpec &spec,
                   const std::string &cache_dir, const std::string &run_dir) {
    const auto resolved = pipeline::resolve(cfg);
    const auto cache = data::prepare_splits(spec, cache_dir);
    spdlog::info("splits {} ({})", cache.directory, cache.hit ? "cache hit" : "built");
    spdlog::info("group {}: replay ratio {}, lambda_qfi {}, lambda_fid {}{}", pipeline::to_string(cfg.group),
                 resolved.replay_ratio, resolved.qfish.lambda_qfi, resolved.qfish.lambda_fid,
                 resolved.coupled ? " (coupled)" : "");
    const auto result = pipeline::run_stream(cache.splits, resolved, [](int t, int e, double loss) {
        spdlog::debug("task {} epoch {} loss {:.5f}", t, e, loss);
    });
    pipeline::write_artifacts(run_dir, resolved, result,
                              {spec.id(), cache.manifest_hash, QCSTREAM_VERSION});
    return {pipeline::summarize(pipeline::to_string(cfg.group), result.r), cache.manifest_hash};
}

int cmd_run(Invocation &inv) {
    auto cfg = load_config(inv);
    apply_overrides(cfg, inv.over);
    const auto spec = dataset_spec(inv.data, cfg.seed);
    const auto run_dir = (fs::path(inv.output_dir) /
                          fmt::format("{}-seed{}", pipeline::to_string(cfg.group), cfg.seed))
                             .string();
    const auto out = execute(cfg, spec, inv.data.cache_dir, run_dir);
    std::cout << pipeline::format_table({out.row});
    std::cout << "artifacts: " << run_dir << "\n";
    return 0;
}

int cmd_ablation(Invocation &inv) {
    auto base = load_config(inv);
    apply_overrides(base, inv.over);
    const auto spec = dataset_spec(inv.data, base.seed);
    std::vector<pipeline::SummaryRow> rows;
    std::vector<std::string> failed;
    std::string split_hash;
    nlohmann::json doc = nlohmann::json::array();
    for (const auto &name : pipeline::group_names()) {
        auto cfg = base;
        cfg.group = pipeline::parse_group(name);
        const auto run_dir = (fs::path(inv.output_dir) / fmt::format("{}-seed{}", name, cfg.seed)).string();
        try {
            const auto out = execute(cfg, spec, inv.data.cache_dir, run_dir);
            if (!split_hash.empty() && split_hash != out.split_hash) {
                throw std::runtime_error("split manifest changed between groups");
            }
            split_hash = out.split_hash;
            rows.push_back(out.row);
        } catch (const std::exception &e) {
            spdlog::error("group {} failed: {}", name, e.what());
            failed.push_back(name);
            pipeline::SummaryRow row;
            row.label = name + "*";
            rows.push_back(row);
        }
        const auto &r = rows.back();
        auto opt = [](const std::optional<double> &v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
        nlohmann::json per_task = nlohmann::json::array();
        for (const auto &v : r.per_task)
            per_task.push_back(opt(v));
        doc.push_back({{"group", name},
                       {"failed", !failed.empty() && failed.back() == name},
                       {"mean_attack_f1", opt(r.mean_attack_f1)},
                       {"forgetting", opt(r.forgetting)},
                       {"bwt", opt(r.bwt)},
                       {"fwt", opt(r.fwt)},
                       {"per_task", per_task}});
    }
    const auto table = pipeline::format_table(rows);
    fs::create_directories(inv.output_dir);
    std::ofstream(fs::path(inv.output_dir) / "ablation.txt") << table;
    std::ofstream(fs::path(inv.output_dir) / "ablation.json")
        << nlohmann::json{{"split_hash", split_hash}, {"seed", base.seed}, {"groups", doc}}.dump(2) << "\n";
    std::cout << table;
    if (!failed.empty()) {
        std::cout << "partial table: groups marked * failed\n";
        return 1;
    }
    return 0;
}

int cmd_cache(const DataOptions &d, std::uint64_t seed) {
    const auto spec = dataset_spec(d, seed);
    const auto cache = data::prepare_splits(spec, d.cache_dir);
    std::cout << (cache.hit ? "cache hit: " : "cache built: ") << cache.directory << "\n";
    std::cout << "manifest hash: " << cache.manifest_hash << "\n";
    for (const auto &s : cache.splits)
        std::cout << data::split_summary(s).dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Continual-learning intrusion detection with variational quantum classifiers"};
    app.set_version_flag("--version", QCSTREAM_VERSION);
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    Invocation run_inv;
    auto *run = app.add_subcommand("run", "Run one experiment over the task stream");
    add_experiment_options(run, run_inv);
    run->add_option("--group", run_inv.over.group, "Ablation group");

    Invocation abl_inv;
    abl_inv.output_dir = "ablation";
    auto *ablation = app.add_subcommand("ablation", "Run every ablation group on shared splits");
    add_experiment_options(ablation, abl_inv);

    DataOptions cache_opts;
    std::uint64_t cache_seed = 0;
    auto *cache = app.add_subcommand("cache", "Build or reuse the cached task splits");
    add_data_options(cache, cache_opts);
    cache->add_option("--seed", cache_seed, "Split seed");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
    spdlog::set_pattern("[%l] %v");

    try {
        if (*run)
            return cmd_run(run_inv);
        if (*ablation)
            return cmd_ablation(abl_inv);
        return cmd_cache(cache_opts, cache_seed);
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return 2;
    }
}
