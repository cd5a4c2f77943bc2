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
#include "qcstream/pipeline/runner.hpp"

#include "qcstream/optim/spsa.hpp"
#include "qcstream/pipeline/objective.hpp"
#include "qcstream/pipeline/oracle.hpp"
#include "qcstream/pipeline/threshold.hpp"
#include "qcstream/replay/generator.hpp"
#include "qcstream/replay/gmm.hpp"
#include "qcstream/util/hash.hpp"
#include "qcstream/util/rng.hpp"
#include "qcstream/vqc/loss.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcstream::pipeline {

using util::derive_seed;
using util::Stream;
using util::tag;

namespace {

double evaluate_f1(const vqc::VqcModel &model, const LabeledSet &set, double threshold,
                   const vqc::Execution &exec, std::uint64_t seed) {
    const auto probs = vqc::predict_proba(model, set.x, exec, seed);
    return metrics::attack_f1(probs, set.y, threshold);
}

vqc::Execution curve_exec(const ExperimentConfig &cfg) { return {cfg.noise, true, cfg.shots}; }

LabeledSet real_slice(const LabeledSet &train, const std::vector<std::size_t> &perm,
                      std::size_t step, std::size_t per_step) {
    const std::size_t n = perm.size();
    const std::size_t start = step * per_step;
    std::size_t count = per_step;
    if (start < n)
        count = std::min(per_step, n - start);
    std::vector<std::size_t> idx(count);
    for (std::size_t j = 0; j < count; ++j)
        idx[j] = perm[(start + j) % n];
    return train.subset(idx);
}

replay::SourcePtr train_replay_source(const LabeledSet &train, int task, const ResolvedConfig &cfg) {
    const auto &c = cfg.base;
    if (cfg.mech.replay == ReplayKind::kQuantum) {
        replay::GeneratorConfig gc;
        gc.num_qubits = static_cast<int>(train.dim());
        gc.num_layers = c.generator_layers;
        gc.spsa.max_iters = c.generator_iters;
        gc.spsa.seed = derive_seed(c.seed, {tag(Stream::kGenerator), static_cast<std::uint64_t>(task), 1});
        gc.noise = c.noise;
        gc.shot_training = c.generator_shot_training;
        gc.shots = c.generator_shots;
        return std::make_shared<const replay::GeneratorSnapshot>(replay::train_generator(
            train, task, gc, derive_seed(c.seed, {tag(Stream::kGenerator), static_cast<std::uint64_t>(task)})));
    }
    replay::GmmOptions go;
    go.components = c.gmm_components;
    go.seed = derive_seed(c.seed, {tag(Stream::kGmm), static_cast<std::uint64_t>(task)});
    return std::make_shared<const replay::GmmReplaySource>(replay::fit_class_gmm(train, task, go));
}

stability::TaskAnchors build_anchors(const vqc::VqcModel &model, const LabeledSet &train, int task,
                                     const ResolvedConfig &cfg, const vqc::Execution &exec) {
    const auto &c = cfg.base;
    const auto t = static_cast<std::uint64_t>(task);
    stability::AnchorSelectionOptions ao;
    ao.strategy = cfg.strategy;
    ao.budget = cfg.qfish.anchor_budget;
    ao.seed = derive_seed(c.seed, {tag(Stream::kAnchors), t});
    ao.epsilon = cfg.qfish.epsilon;
    ao.gradient_subset = cfg.qfish.gradient_subset;
    ao.exec = exec;
    const auto picked = stability::select_anchors(train, model, ao);
    const auto rows = train.subset(picked);

    stability::TaskAnchors a;
    a.task_id = task;
    a.inputs = rows.x;
    a.labels = rows.y;
    const auto params = model.params();
    a.snapshot_params.assign(params.begin(), params.end());
    const auto outputs = model_outputs(model, exec);
    for (std::size_t i = 0; i < rows.size(); ++i)
        a.snapshot_outputs.push_back(outputs(params, rows.row(i)));

    a.sensitivity.assign(params.size(), 0.0);
    if (cfg.qfish.lambda_qfi > 0.0) {
        // Sensitivity on an A_qfi-sized draw from the fresh anchors.
        std::vector<std::size_t> idx(rows.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        util::Rng rng(derive_seed(c.seed, {tag(Stream::kAnchorSubsample), t, 0xF15ULL}));
        util::shuffle(idx, rng);
        idx.resize(std::min(idx.size(), static_cast<std::size_t>(cfg.qfish.qfi_batch)));
        a.sensitivity = stability::estimate_sensitivity(model_score(model, exec), params,
                                                        rows.subset(idx).x, cfg.qfish.epsilon);
    }
    return a;
}

} // namespace

vqc::Execution evaluation_exec(const ExperimentConfig &cfg) {
    return {cfg.noise, cfg.exact_expectations, cfg.shots};
}

BatchPlan plan_batches(std::size_t train_size, int batch_size, double replay_ratio,
                       bool replay_available) {
    if (train_size == 0 || batch_size < 1) {
        throw std::invalid_argument("plan_batches: empty training split or batch size < 1");
    }
    const auto b = static_cast<std::size_t>(batch_size);
    BatchPlan plan;
    plan.steps_per_epoch = (train_size + b - 1) / b;
    plan.replay_per_step = replay_available ? replay::replay_count(replay_ratio, b) : 0;
    plan.real_per_step = std::min(train_size, b - plan.replay_per_step);
    if (plan.real_per_step == 0) {
        throw std::invalid_argument("plan_batches: replay ratio leaves no real samples per batch");
    }
    return plan;
}

TaskReport train_task(PersistentState &state, const data::TaskSplit &split,
                      const ResolvedConfig &cfg, const std::vector<const LabeledSet *> &curve_sets,
                      std::vector<CurvePoint> &curves, const ProgressFn &progress) {
    const auto &c = cfg.base;
    const int task = state.completed_tasks();
    const auto t = static_cast<std::uint64_t>(task);
    const auto &train = split.train();
    if (!split.transformed) {
        throw std::invalid_argument("train_task: task split is not preprocessed");
    }
    if (train.dim() != state.model.input_dim()) {
        throw std::invalid_argument("train_task: task features do not match the model input dimension");
    }
    train.check();

    TaskReport report;
    report.task_id = split.task_id;
    report.phase = split.phase;
    report.train_size = train.size();

    const auto cw = vqc::class_weights(train.y, c.weight_strategy,
                                       {c.weight_boost, c.imbalance_threshold});
    CompositeOptions copt;
    copt.loss = vqc::make_loss_config(cw, c.focal_gamma);
    copt.exec = evaluation_exec(c);
    copt.alpha = c.alpha;
    copt.qfish = cfg.qfish;

    const bool replay_on = cfg.mech.replay_on() && !state.generators.empty();
    const auto plan = plan_batches(train.size(), c.batch_size, cfg.replay_ratio, replay_on);
    report.replay_per_step = plan.replay_per_step;
    const std::size_t total_steps = plan.steps_per_epoch * static_cast<std::size_t>(c.epochs);

    optim::SpsaGains gains{c.spsa_a, c.spsa_c, c.spsa_A_fraction * static_cast<double>(total_steps)};
    optim::SpsaOptimizer spsa(gains, derive_seed(c.seed, {tag(Stream::kSpsa), t}));
    replay::ReplayPolicy policy;
    policy.ratio = cfg.replay_ratio;

    std::vector<double> x(state.model.params().begin(), state.model.params().end());
    std::vector<std::size_t> perm(train.size());
    const auto cexec = curve_exec(c);
    std::size_t step = 0;
    for (int epoch = 0; epoch < c.epochs; ++epoch) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        util::Rng order(derive_seed(c.seed, {tag(Stream::kBatchOrder), t, static_cast<std::uint64_t>(epoch)}));
        util::shuffle(perm, order);
        double loss_sum = 0.0;
        for (std::size_t s = 0; s < plan.steps_per_epoch; ++s, ++step) {
            const auto real = real_slice(train, perm, s, plan.real_per_step);
            LabeledSet rep;
            if (replay_on) {
                rep = replay::draw_replay_batch(state.generators, policy,
                                                static_cast<std::size_t>(c.batch_size),
                                                derive_seed(c.seed, {tag(Stream::kReplay), t, step}))
                          .data;
            }
            const auto sub = stability::draw_subsample(
                state.memory, cfg.qfish, derive_seed(c.seed, {tag(Stream::kAnchorSubsample), t, step}));
            copt.shot_seed = derive_seed(c.seed, {tag(Stream::kShots), t, step});
            const auto objective = [&](std::span<const double> p) {
                return composite_loss(state.model.with_params(p), real, rep, state.memory, copt, &sub).total;
            };
            try {
                if (c.optimizer == OptimizerKind::kSpsa) {
                    const auto info = spsa.step(objective, x);
                    loss_sum += 0.5 * (info.f_plus + info.f_minus);
                } else {
                    const auto m = state.model.with_params(x);
                    const auto g = composite_gradient(m, real, rep, state.memory, copt, &sub);
                    loss_sum += objective(x);
                    for (std::size_t i = 0; i < x.size(); ++i)
                        x[i] -= c.learning_rate * g[i];
                }
            } catch (const std::exception &e) {
                throw std::runtime_error(fmt::format("task {} aborted at epoch {}, step {}: {}", task,
                                                     epoch + 1, s + 1, e.what()));
            }
            for (double v : x) {
                if (!std::isfinite(v)) {
                    throw std::runtime_error(fmt::format(
                        "task {} aborted at epoch {}, step {}: non-finite parameters", task, epoch + 1, s + 1));
                }
            }
        }
        const double mean_loss = loss_sum / static_cast<double>(plan.steps_per_epoch);
        if (!std::isfinite(mean_loss)) {
            throw std::runtime_error(fmt::format("task {} aborted after epoch {}: non-finite loss", task, epoch + 1));
        }
        report.epoch_loss.push_back(mean_loss);

        const auto m = state.model.with_params(x);
        const int global_epoch = task * c.epochs + epoch + 1;
        for (std::size_t k = 0; k < curve_sets.size(); ++k) {
            const bool current = k + 1 == curve_sets.size();
            const double th = current ? 0.5 : state.thresholds.at(k);
            curves.push_back({global_epoch, static_cast<int>(k),
                              evaluate_f1(m, *curve_sets[k], th, cexec,
                                          derive_seed(c.seed, {tag(Stream::kShots), 0xC0ULL, k}))});
        }
        if (progress)
            progress(task, epoch + 1, mean_loss);
    }
    report.steps = static_cast<int>(step);
    state.model.set_params(x);

    const auto exec = evaluation_exec(c);
    if (cfg.mech.replay_on()) {
        auto source = train_replay_source(train, task, cfg);
        report.generator_checksum = source->checksum();
        report.generator_kind = source->kind();
        state.generators.push_back(std::move(source));
    }
    if (cfg.mech.stability_on()) {
        auto anchors = build_anchors(state.model, train, task, cfg, exec);
        report.anchors = static_cast<std::size_t>(anchors.inputs.rows());
        state.memory.append(std::move(anchors));
    }
    auto sel = select_threshold(state.model, train, exec, derive_seed(c.seed, {tag(Stream::kThreshold), t}));
    report.threshold = sel.choice.threshold;
    state.thresholds.push_back(sel.choice.threshold);
    state.tuning_sets.push_back(train.subset(sel.subset));
    return report;
}

StreamResult run_stream(const std::vector<data::TaskSplit> &splits, const ResolvedConfig &cfg,
                        const ProgressFn &progress) {
    if (splits.empty()) {
        throw std::invalid_argument("run_stream: empty task stream");
    }
    const auto &c = cfg.base;
    const auto dim = static_cast<int>(splits.front().train().dim());
    for (const auto &s : splits) {
        if (!s.transformed || static_cast<int>(s.train().dim()) != dim) {
            throw std::invalid_argument("run_stream: every task must be preprocessed to the same dimension");
        }
    }
    const int n = static_cast<int>(splits.size());
    const auto initial = vqc::VqcModel::create(c.num_qubits, c.num_layers, dim,
                                               derive_seed(c.seed, {tag(Stream::kInit)}));
    StreamResult result{metrics::RMatrix(n), {}, {}, PersistentState(initial, n)};
    auto &state = result.state;
    const auto exec = evaluation_exec(c);
    auto eval_seed = [&](int row, int k) {
        return derive_seed(c.seed, {tag(Stream::kShots), 0xE7ULL, static_cast<std::uint64_t>(row),
                                    static_cast<std::uint64_t>(k)});
    };

    for (int k = 0; k < n; ++k) {
        const auto &s = splits[static_cast<std::size_t>(k)];
        state.r.set_baseline(k, evaluate_f1(initial, s.test(), 0.5, exec, eval_seed(-1, k)));
        state.r.set_oracle(k, oracle_attack_f1(s.train(), s.test()));
    }

    std::vector<const LabeledSet *> curve_sets;
    for (int t = 0; t < n; ++t) {
        const auto &split = splits[static_cast<std::size_t>(t)];
        if (t > 0) {
            state.r.set(t - 1, t, evaluate_f1(state.model, split.test(), 0.5, exec, eval_seed(t - 1, t)));
        }
        curve_sets.push_back(&split.val());
        spdlog::info("task {} ({}): training on {} rows", t, split.phase, split.train().size());
        result.tasks.push_back(train_task(state, split, cfg, curve_sets, result.curves, progress));

        if (c.class_incremental) {
            for (int k = 0; k < t; ++k) {
                const auto &tune = state.tuning_sets[static_cast<std::size_t>(k)];
                const auto probs = vqc::predict_proba(state.model, tune.x, exec,
                                                      derive_seed(c.seed, {tag(Stream::kThreshold), 0xC1ULL, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k)}));
                state.thresholds[static_cast<std::size_t>(k)] = best_threshold(probs, tune.y).threshold;
            }
        }
        for (int k = 0; k <= t; ++k) {
            const auto &test = splits[static_cast<std::size_t>(k)].test();
            state.r.set(t, k, evaluate_f1(state.model, test,
                                          state.thresholds[static_cast<std::size_t>(k)], exec,
                                          eval_seed(t, k)));
        }
    }
    result.r = state.r;
    return result;
}

nlohmann::json metrics_report(const metrics::RMatrix &r, const std::vector<TaskReport> &tasks) {
    using nlohmann::json;
    const int done = r.completed_tasks();
    auto opt = [](std::optional<double> v) { return v ? json(*v) : json(); };
    json rows = json::array();
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        const auto &t = tasks[k];
        const int ki = static_cast<int>(k);
        json row;
        row["task"] = ki;
        row["phase"] = t.phase;
        row["threshold"] = t.threshold;
        row["final_attack_f1"] = done > 0 ? opt(r.get(done - 1, ki)) : json();
        row["just_learned_attack_f1"] = opt(r.get(ki, ki));
        row["pre_training_attack_f1"] = ki > 0 ? opt(r.get(ki - 1, ki)) : json();
        row["baseline_attack_f1"] = opt(r.baseline(ki));
        row["oracle_attack_f1"] = opt(r.oracle(ki));
        row["train_size"] = t.train_size;
        row["steps"] = t.steps;
        row["replay_per_step"] = t.replay_per_step;
        row["anchors"] = t.anchors;
        row["generator_kind"] = t.generator_kind.empty() ? json() : json(t.generator_kind);
        row["generator_checksum"] = t.generator_checksum ? json(util::to_hex(*t.generator_checksum)) : json();
        row["epoch_loss"] = t.epoch_loss;
        rows.push_back(row);
    }
    json summary;
    summary["completed_tasks"] = done;
    summary["mean_attack_f1"] = done > 0 ? json(metrics::final_mean(r)) : json();
    if (done >= 2) {
        summary["forgetting"] = metrics::forgetting(r);
        summary["bwt"] = metrics::bwt(r);
        summary["fwt"] = metrics::fwt(r);
        summary["intransigence"] = metrics::intransigence(r);
    } else {
        summary["forgetting"] = json();
        summary["bwt"] = json();
        summary["fwt"] = json();
        summary["intransigence"] = json();
    }
    return {{"format", "qcstream.metrics"}, {"version", 1}, {"tasks", rows}, {"summary", summary}};
}

nlohmann::json state_to_json(const PersistentState &state) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto &g : state.generators)
        gens.push_back(g->to_json());
    return {{"format", "qcstream.state"},
            {"version", 1},
            {"model", vqc::to_json(state.model)},
            {"generators", gens},
            {"anchors", stability::to_json(state.memory)},
            {"thresholds", state.thresholds},
            {"rmatrix", state.r.to_csv()}};
}

} // namespace qcstream::pipeline
