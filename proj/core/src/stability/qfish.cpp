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
#include "qcstream/stability/qfish.hpp"

#include "qcstream/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qcstream::stability {

AnchorStrategy parse_anchor_strategy(const std::string &name) {
    if (name == "state-space" || name == "state_space")
        return AnchorStrategy::kStateSpace;
    if (name == "gradient-space" || name == "gradient_space")
        return AnchorStrategy::kGradientSpace;
    if (name == "random")
        return AnchorStrategy::kRandom;
    throw std::invalid_argument("unknown anchor strategy '" + name +
                                "' (expected state-space, gradient-space or random)");
}

std::string to_string(AnchorStrategy s) {
    switch (s) {
    case AnchorStrategy::kStateSpace:
        return "state-space";
    case AnchorStrategy::kGradientSpace:
        return "gradient-space";
    case AnchorStrategy::kRandom:
        return "random";
    }
    return "state-space";
}

FunctionalTerm parse_functional_term(const std::string &name) {
    if (name == "fidelity")
        return FunctionalTerm::kFidelity;
    if (name == "mse")
        return FunctionalTerm::kMse;
    if (name == "kl")
        return FunctionalTerm::kKl;
    throw std::invalid_argument("unknown functional term '" + name +
                                "' (expected fidelity, mse or kl)");
}

std::string to_string(FunctionalTerm t) {
    switch (t) {
    case FunctionalTerm::kFidelity:
        return "fidelity";
    case FunctionalTerm::kMse:
        return "mse";
    case FunctionalTerm::kKl:
        return "kl";
    }
    return "fidelity";
}

void QfishConfig::validate() const {
    if (!(lambda_qfi >= 0.0) || !(lambda_fid >= 0.0)) {
        throw std::invalid_argument("QfishConfig: lambdas must be >= 0");
    }
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        throw std::invalid_argument("QfishConfig: epsilon must lie in (0, 0.5]");
    }
    if (anchor_budget < 1 || qfi_batch < 1 || fid_batch < 1 || gradient_subset < 1) {
        throw std::invalid_argument("QfishConfig: budgets and batch sizes must be >= 1");
    }
}

void AnchorMemory::append(TaskAnchors task) {
    const auto n = static_cast<std::size_t>(task.inputs.rows());
    if (n == 0 || task.labels.size() != n || task.snapshot_outputs.size() != n) {
        throw std::invalid_argument("AnchorMemory::append: inconsistent anchor block");
    }
    if (task.sensitivity.size() != task.snapshot_params.size()) {
        throw std::invalid_argument("AnchorMemory::append: sensitivity length mismatch");
    }
    if (!tasks_.empty() && task.snapshot_params.size() != tasks_.front().snapshot_params.size()) {
        throw std::invalid_argument("AnchorMemory::append: parameter count changed");
    }
    for (double f : task.sensitivity) {
        if (!(f >= 0.0) || !std::isfinite(f)) {
            throw std::invalid_argument("AnchorMemory::append: sensitivity must be finite and >= 0");
        }
    }
    for (const auto &o : task.snapshot_outputs) {
        if (!std::isfinite(o.score) || !std::isfinite(o.prob)) {
            throw std::invalid_argument("AnchorMemory::append: non-finite snapshot output");
        }
    }
    tasks_.push_back(std::move(task));
}

std::size_t AnchorMemory::total_anchors() const noexcept {
    std::size_t n = 0;
    for (const auto &t : tasks_)
        n += static_cast<std::size_t>(t.inputs.rows());
    return n;
}

std::vector<double> AnchorMemory::combined_sensitivity() const {
    if (tasks_.empty())
        return {};
    std::vector<double> f(tasks_.front().sensitivity.size(), 0.0);
    for (const auto &t : tasks_)
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] += t.sensitivity[i];
    return f;
}

const std::vector<double> &AnchorMemory::latest_snapshot() const {
    if (tasks_.empty()) {
        throw std::logic_error("AnchorMemory::latest_snapshot: memory is empty");
    }
    return tasks_.back().snapshot_params;
}

std::pair<std::size_t, std::size_t> AnchorMemory::locate(std::size_t flat) const {
    for (std::size_t t = 0; t < tasks_.size(); ++t) {
        const auto n = static_cast<std::size_t>(tasks_[t].inputs.rows());
        if (flat < n)
            return {t, flat};
        flat -= n;
    }
    throw std::out_of_range("AnchorMemory::locate: index out of range");
}

std::vector<double> estimate_sensitivity(const ScalarFn &f, std::span<const double> params,
                                         const FeatureMatrix &anchors, double epsilon,
                                         std::span<const std::size_t> indices) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("estimate_sensitivity: epsilon must be > 0");
    }
    if (anchors.rows() == 0) {
        throw std::invalid_argument("estimate_sensitivity: empty anchor set");
    }
    std::vector<std::size_t> all;
    if (indices.empty()) {
        all.resize(params.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        indices = all;
    }
    std::vector<double> fhat(params.size(), 0.0);
    std::vector<double> shifted(params.begin(), params.end());
    const double inv = 1.0 / static_cast<double>(anchors.rows());
    for (std::size_t i : indices) {
        if (i >= params.size()) {
            throw std::out_of_range("estimate_sensitivity: parameter index out of range");
        }
        double acc = 0.0;
        for (Eigen::Index a = 0; a < anchors.rows(); ++a) {
            const auto x = row_span(anchors, a);
            shifted[i] = params[i] + epsilon;
            const double up = f(shifted, x);
            shifted[i] = params[i] - epsilon;
            const double down = f(shifted, x);
            const double d = (up - down) / (2.0 * epsilon);
            acc += d * d;
        }
        shifted[i] = params[i];
        fhat[i] = acc * inv;
    }
    return fhat;
}

double fidelity_proxy(double current, double snapshot) noexcept {
    const double d = current - snapshot;
    return std::clamp(1.0 - 0.5 * d * d, 0.0, 1.0);
}

double divergence(double current, double snapshot, Divergence d) {
    if (d == Divergence::kMse) {
        const double diff = current - snapshot;
        return diff * diff;
    }
    if (!(current >= 0.0 && current <= 1.0) || !(snapshot >= 0.0 && snapshot <= 1.0)) {
        throw std::invalid_argument("divergence: kl needs probability outputs in [0, 1]");
    }
    constexpr double kEps = 1e-7;
    const double p = std::clamp(snapshot, kEps, 1.0 - kEps);
    const double q = std::clamp(current, kEps, 1.0 - kEps);
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

namespace {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, util::Rng &rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

double functional_value(std::span<const double> params, const AnchorMemory &memory,
                        const OutputFn &outputs, FunctionalTerm term,
                        std::span<const std::size_t> flat) {
    double acc = 0.0;
    for (std::size_t f : flat) {
        const auto [t, r] = memory.locate(f);
        const auto &task = memory.tasks()[t];
        const auto cur = outputs(params, row_span(task.inputs, static_cast<Eigen::Index>(r)));
        const auto &snap = task.snapshot_outputs[r];
        switch (term) {
        case FunctionalTerm::kFidelity:
            acc += 1.0 - fidelity_proxy(cur.score, snap.score);
            break;
        case FunctionalTerm::kMse:
            acc += divergence(cur.score, snap.score, Divergence::kMse);
            break;
        case FunctionalTerm::kKl:
            acc += divergence(cur.prob, snap.prob, Divergence::kKl);
            break;
        }
    }
    return acc / static_cast<double>(flat.size());
}

} // namespace

AnchorSubsample draw_subsample(const AnchorMemory &memory, const QfishConfig &cfg,
                               std::uint64_t seed) {
    AnchorSubsample s;
    const std::size_t n = memory.total_anchors();
    if (n == 0)
        return s;
    util::Rng rng(seed);
    s.qfi = sample_without_replacement(n, static_cast<std::size_t>(cfg.qfi_batch), rng);
    s.fid = sample_without_replacement(n, static_cast<std::size_t>(cfg.fid_batch), rng);
    return s;
}

RegularizerTerms regularizer_terms(std::span<const double> params, const AnchorMemory &memory,
                                   const QfishConfig &cfg, const OutputFn &outputs,
                                   const AnchorSubsample *subsample) {
    RegularizerTerms r;
    if (memory.empty())
        return r;
    const auto &star = memory.latest_snapshot();
    if (star.size() != params.size()) {
        throw std::invalid_argument("regularizer: parameter count mismatch");
    }
    if (cfg.lambda_qfi > 0.0) {
        const auto fhat = memory.combined_sensitivity();
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double d = params[i] - star[i];
            r.qfi += fhat[i] * d * d;
        }
    }
    if (cfg.lambda_fid > 0.0) {
        if (subsample != nullptr && !subsample->fid.empty()) {
            r.functional = functional_value(params, memory, outputs, cfg.functional, subsample->fid);
        } else {
            std::vector<std::size_t> all(memory.total_anchors());
            std::iota(all.begin(), all.end(), std::size_t{0});
            r.functional = functional_value(params, memory, outputs, cfg.functional, all);
        }
    }
    r.total = cfg.lambda_qfi * r.qfi + cfg.lambda_fid * r.functional;
    return r;
}

double regularizer(std::span<const double> params, const AnchorMemory &memory,
                   const QfishConfig &cfg, const OutputFn &outputs,
                   const AnchorSubsample *subsample) {
    return regularizer_terms(params, memory, cfg, outputs, subsample).total;
}

double behavioral_consistency(std::span<const double> params, const AnchorMemory &memory,
                              const OutputFn &outputs, Divergence d) {
    if (memory.empty()) {
        throw std::invalid_argument("behavioral_consistency: memory is empty");
    }
    std::vector<std::size_t> all(memory.total_anchors());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return functional_value(params, memory, outputs,
                            d == Divergence::kMse ? FunctionalTerm::kMse : FunctionalTerm::kKl, all);
}

std::vector<std::size_t> farthest_point_order(const FeatureMatrix &embedding, std::size_t k) {
    const auto n = static_cast<std::size_t>(embedding.rows());
    k = std::min(k, n);
    std::vector<std::size_t> picks;
    if (k == 0)
        return picks;
    picks.reserve(k);
    const Eigen::RowVectorXd mean = embedding.colwise().mean();
    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (embedding.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
        if (d < best) {
            best = d;
            first = i;
        }
    }
    picks.push_back(first);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i)
        dist[i] = (embedding.row(static_cast<Eigen::Index>(i)) -
                   embedding.row(static_cast<Eigen::Index>(first)))
                      .squaredNorm();
    while (picks.size() < k) {
        std::size_t next = 0;
        double far = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (dist[i] > far) {
                far = dist[i];
                next = i;
            }
        }
        picks.push_back(next);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (embedding.row(static_cast<Eigen::Index>(i)) -
                              embedding.row(static_cast<Eigen::Index>(next)))
                                 .squaredNorm();
            dist[i] = std::min(dist[i], d);
        }
    }
    return picks;
}

namespace {

FeatureMatrix state_embedding(const LabeledSet &data, const vqc::VqcModel &model,
                              std::span<const std::size_t> rows) {
    FeatureMatrix e(static_cast<Eigen::Index>(rows.size()), model.num_qubits());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto c = vqc::condition_input(model, data.row(rows[r]));
        for (std::size_t j = 0; j < c.size(); ++j)
            e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = c[j];
    }
    return e;
}

FeatureMatrix gradient_embedding(const LabeledSet &data, const vqc::VqcModel &model,
                                 std::span<const std::size_t> rows,
                                 std::span<const std::size_t> coords,
                                 const AnchorSelectionOptions &options) {
    FeatureMatrix e(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(coords.size()));
    std::vector<double> p(model.params().begin(), model.params().end());
    for (std::size_t c = 0; c < coords.size(); ++c) {
        const std::size_t i = coords[c];
        p[i] = model.params()[i] + options.epsilon;
        const auto up = model.with_params(p);
        p[i] = model.params()[i] - options.epsilon;
        const auto down = model.with_params(p);
        p[i] = model.params()[i];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto x = data.row(rows[r]);
            const double fu = vqc::forward(up, x, options.exec, rows[r]).score;
            const double fd = vqc::forward(down, x, options.exec, rows[r]).score;
            e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                (fu - fd) / (2.0 * options.epsilon);
        }
    }
    return e;
}

} // namespace

std::vector<std::size_t> select_anchors(const LabeledSet &data, const vqc::VqcModel &model,
                                        const AnchorSelectionOptions &options) {
    data.check();
    if (data.empty()) {
        throw std::invalid_argument("select_anchors: empty data");
    }
    if (options.budget < 1) {
        throw std::invalid_argument("select_anchors: budget must be >= 1");
    }
    const std::size_t n = data.size();
    const auto budget = static_cast<std::size_t>(options.budget);
    if (budget >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i)
        by_class[data.y[i]].push_back(i);
    std::size_t quota[2] = {budget / 2, budget - budget / 2};
    if (by_class[0].size() < quota[0]) {
        quota[1] += quota[0] - by_class[0].size();
        quota[0] = by_class[0].size();
    }
    if (by_class[1].size() < quota[1]) {
        quota[0] += quota[1] - by_class[1].size();
        quota[1] = by_class[1].size();
    }

    util::Rng rng(options.seed);
    std::vector<std::size_t> coords;
    if (options.strategy == AnchorStrategy::kGradientSpace) {
        const std::size_t p = model.num_params();
        coords = sample_without_replacement(
            p, std::min(p, static_cast<std::size_t>(options.gradient_subset)), rng);
        std::sort(coords.begin(), coords.end());
    }

    std::vector<std::size_t> out;
    out.reserve(budget);
    for (int c = 0; c < 2; ++c) {
        const auto &rows = by_class[c];
        if (quota[c] == 0)
            continue;
        if (options.strategy == AnchorStrategy::kRandom) {
            for (std::size_t k : sample_without_replacement(rows.size(), quota[c], rng))
                out.push_back(rows[k]);
            continue;
        }
        const FeatureMatrix emb = options.strategy == AnchorStrategy::kStateSpace
                                      ? state_embedding(data, model, rows)
                                      : gradient_embedding(data, model, rows, coords, options);
        for (std::size_t k : farthest_point_order(emb, quota[c]))
            out.push_back(rows[k]);
    }
    return out;
}

nlohmann::json to_json(const AnchorMemory &memory) {
    nlohmann::json doc;
    doc["format"] = "qcstream.anchors";
    doc["version"] = 1;
    auto &tasks = doc["tasks"] = nlohmann::json::array();
    for (const auto &t : memory.tasks()) {
        nlohmann::json j;
        j["task_id"] = t.task_id;
        j["dim"] = t.inputs.cols();
        j["inputs"] = std::vector<double>(t.inputs.data(), t.inputs.data() + t.inputs.size());
        j["labels"] = t.labels;
        j["snapshot_params"] = t.snapshot_params;
        std::vector<double> scores;
        std::vector<double> probs;
        for (const auto &o : t.snapshot_outputs) {
            scores.push_back(o.score);
            probs.push_back(o.prob);
        }
        j["snapshot_scores"] = scores;
        j["snapshot_probs"] = probs;
        j["sensitivity"] = t.sensitivity;
        tasks.push_back(std::move(j));
    }
    return doc;
}

AnchorMemory anchor_memory_from_json(const nlohmann::json &doc) {
    if (doc.value("format", "") != "qcstream.anchors" || doc.value("version", 0) != 1) {
        throw std::invalid_argument("anchor document: unexpected format or version");
    }
    AnchorMemory memory;
    for (const auto &j : doc.at("tasks")) {
        TaskAnchors t;
        t.task_id = j.at("task_id").get<int>();
        const auto dim = j.at("dim").get<Eigen::Index>();
        const auto flat = j.at("inputs").get<std::vector<double>>();
        if (dim <= 0 || flat.size() % static_cast<std::size_t>(dim) != 0) {
            throw std::invalid_argument("anchor document: bad input block");
        }
        t.inputs = Eigen::Map<const FeatureMatrix>(
            flat.data(), static_cast<Eigen::Index>(flat.size()) / dim, dim);
        t.labels = j.at("labels").get<std::vector<int>>();
        t.snapshot_params = j.at("snapshot_params").get<std::vector<double>>();
        const auto scores = j.at("snapshot_scores").get<std::vector<double>>();
        const auto probs = j.at("snapshot_probs").get<std::vector<double>>();
        if (scores.size() != probs.size()) {
            throw std::invalid_argument("anchor document: output length mismatch");
        }
        for (std::size_t i = 0; i < scores.size(); ++i)
            t.snapshot_outputs.push_back({scores[i], probs[i]});
        t.sensitivity = j.at("sensitivity").get<std::vector<double>>();
        memory.append(std::move(t));
    }
    return memory;
}

} // namespace qcstream::stability
