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
#include "qcstream/pipeline/artifacts.hpp"

#include "qcstream/util/hash.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace qcstream::pipeline {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::string cell(const std::optional<double> &v) { return v ? fmt::format("{:.4f}", *v) : "-"; }

} // namespace

std::string config_hash(const ExperimentConfig &cfg) {
    return util::to_hex(util::fnv1a(to_json(cfg).dump()));
}

SummaryRow summarize(const std::string &label, const metrics::RMatrix &r) {
    SummaryRow row;
    row.label = label;
    const int done = r.completed_tasks();
    if (done >= 1)
        row.mean_attack_f1 = metrics::final_mean(r);
    if (done >= 2) {
        row.forgetting = metrics::forgetting(r);
        row.bwt = metrics::bwt(r);
        bool fwt_inputs = true;
        for (int k = 0; k < done; ++k)
            fwt_inputs = fwt_inputs && r.baseline(k) && (k == 0 || r.has(k - 1, k));
        if (fwt_inputs)
            row.fwt = metrics::fwt(r);
    }
    for (int k = 0; k < r.num_tasks(); ++k)
        row.per_task.push_back(done >= 1 ? r.get(done - 1, k) : std::nullopt);
    return row;
}

std::string format_table(const std::vector<SummaryRow> &rows) {
    std::size_t tasks = 0;
    for (const auto &r : rows)
        tasks = std::max(tasks, r.per_task.size());
    std::string out = fmt::format("{:<15}{:>10}{:>12}{:>10}{:>10}", "group", "mean_f1", "forgetting",
                                  "bwt", "fwt");
    for (std::size_t k = 0; k < tasks; ++k)
        out += fmt::format("{:>10}", fmt::format("task_{}", k));
    out += '\n';
    for (const auto &r : rows) {
        out += fmt::format("{:<15}{:>10}{:>12}{:>10}{:>10}", r.label, cell(r.mean_attack_f1),
                           cell(r.forgetting), cell(r.bwt), cell(r.fwt));
        for (std::size_t k = 0; k < tasks; ++k)
            out += fmt::format("{:>10}", k < r.per_task.size() ? cell(r.per_task[k]) : "-");
        out += '\n';
    }
    return out;
}

std::string curves_csv(const std::vector<CurvePoint> &curves) {
    std::string out = "epoch,task,attack_f1\n";
    for (const auto &p : curves)
        out += fmt::format("{},{},{:.17g}\n", p.epoch, p.task, p.attack_f1);
    return out;
}

nlohmann::json write_artifacts(const std::string &directory, const ResolvedConfig &cfg,
                               const StreamResult &result, const RunInfo &info) {
    const fs::path dir(directory);
    fs::create_directories(dir);

    nlohmann::json config_doc = to_json(cfg.base);
    write_text(dir / "config.json", config_doc.dump(2) + "\n");
    write_text(dir / "rmatrix.csv", result.r.to_csv());
    write_text(dir / "metrics.json", metrics_report(result.r, result.tasks).dump(2) + "\n");
    write_text(dir / "curves.csv", curves_csv(result.curves));
    write_text(dir / "state.json", state_to_json(result.state).dump() + "\n");

    const auto resolved = to_json(cfg);
    std::string log = fmt::format("group {}\n", to_string(cfg.base.group));
    log += fmt::format("mechanisms replay={} qfi_term={} fid_term={}\n",
                       resolved["replay"].get<std::string>(), cfg.mech.qfi, cfg.mech.fid);
    log += fmt::format("coupled {}\n", cfg.coupled);
    log += fmt::format("replay_ratio {}\nlambda_qfi {}\nlambda_fid {}\nepsilon {}\nanchor_strategy {}\n",
                       cfg.replay_ratio, cfg.qfish.lambda_qfi, cfg.qfish.lambda_fid, cfg.qfish.epsilon,
                       stability::to_string(cfg.strategy));
    for (const auto &t : result.tasks) {
        log += fmt::format("task {} phase {} steps {} replay_per_step {} anchors {} threshold {}\n",
                           t.task_id, t.phase, t.steps, t.replay_per_step, t.anchors, t.threshold);
        for (std::size_t e = 0; e < t.epoch_loss.size(); ++e)
            log += fmt::format("  epoch {} loss {:.6f}\n", e + 1, t.epoch_loss[e]);
    }
    write_text(dir / "run.log", log);

    nlohmann::json manifest;
    manifest["format"] = "qcstream.run";
    manifest["version"] = info.version;
    manifest["config_hash"] = config_hash(cfg.base);
    manifest["dataset"] = info.dataset_id;
    manifest["split_hash"] = info.split_hash;
    manifest["group"] = to_string(cfg.base.group);
    manifest["seed"] = cfg.base.seed;
    manifest["resolved"] = resolved;
    manifest["artifacts"] = {{"config", "config.json"},   {"rmatrix", "rmatrix.csv"},
                             {"metrics", "metrics.json"}, {"curves", "curves.csv"},
                             {"state", "state.json"},     {"log", "run.log"},
                             {"manifest", "manifest.json"}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

} // namespace qcstream::pipeline
