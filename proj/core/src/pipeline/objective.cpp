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
#include "qcstream/pipeline/objective.hpp"

#include "qcstream/util/hash.hpp"
#include "qcstream/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qcstream::pipeline {

namespace {

std::uint64_t row_seed(std::uint64_t base, std::span<const double> x) {
    util::Fnv1a h;
    h.update(x);
    return util::derive_seed(base, {h.digest()});
}

std::vector<double> batch_probs(const vqc::VqcModel &model, const LabeledSet &batch,
                                const vqc::Execution &exec, std::uint64_t seed) {
    std::vector<double> p(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        p[i] = vqc::predict_proba(model, batch.row(i), exec, util::derive_seed(seed, {i}));
    return p;
}

void check_dim(const vqc::VqcModel &model, const LabeledSet &batch, const char *what) {
    if (!batch.empty() && batch.dim() != model.input_dim()) {
        throw std::invalid_argument(std::string("composite loss: ") + what +
                                    " batch has the wrong input dimension");
    }
}

// d(functional term)/d(score or logit) for one anchor, and whether the
// derivative is taken with respect to the logit (kl) or the score.
struct FunctionalSlope {
    double value = 0.0;
    bool on_logit = false;
};

FunctionalSlope functional_slope(const vqc::Forward &cur, const stability::AnchorOutput &snap,
                                 stability::FunctionalTerm term) {
    switch (term) {
    case stability::FunctionalTerm::kFidelity: {
        const double d = cur.score - snap.score;
        return {0.5 * d * d < 1.0 ? d : 0.0, false};
    }
    case stability::FunctionalTerm::kMse:
        return {2.0 * (cur.score - snap.score), false};
    case stability::FunctionalTerm::kKl: {
        constexpr double kEps = 1e-7;
        if (cur.prob <= kEps || cur.prob >= 1.0 - kEps)
            return {0.0, true};
        const double p = std::clamp(snap.prob, kEps, 1.0 - kEps);
        return {cur.prob - p, true};
    }
    }
    return {};
}

// Shared accumulation over the parameter block [offset, offset + count).
// `dscore(x, fwd)` returns d score / d params over that block.
template <typename DScore>
std::vector<double> accumulate(const vqc::VqcModel &model, const LabeledSet &real,
                               const LabeledSet &replay, const stability::AnchorMemory &memory,
                               const CompositeOptions &opt,
                               const stability::AnchorSubsample *subsample, std::size_t offset,
                               std::size_t count, DScore &&dscore) {
    std::vector<double> grad(count, 0.0);
    const double tau = model.tau();
    const std::size_t tau_idx = model.layout().tau_raw;
    const bool has_tau = tau_idx >= offset && tau_idx < offset + count;

    auto add_logit = [&](std::span<const double> x, const vqc::Forward &f, double weight) {
        const auto ds = dscore(x, f);
        for (std::size_t j = 0; j < count; ++j)
            grad[j] += weight * tau * ds[j];
        if (has_tau)
            grad[tau_idx - offset] += weight * tau * f.score;
    };
    auto add_score = [&](std::span<const double> x, const vqc::Forward &f, double weight) {
        const auto ds = dscore(x, f);
        for (std::size_t j = 0; j < count; ++j)
            grad[j] += weight * ds[j];
    };
    auto supervised = [&](const LabeledSet &batch, double scale, std::uint64_t tagv) {
        if (batch.empty())
            return;
        const double w = scale / static_cast<double>(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto x = batch.row(i);
            const auto f = vqc::forward(model, x, opt.exec,
                                        util::derive_seed(util::derive_seed(opt.shot_seed, {tagv}), {i}));
            add_logit(x, f, w * vqc::dloss_dlogit(tau * f.score, batch.y[i], opt.loss));
        }
    };
    supervised(real, 1.0, 0);
    supervised(replay, opt.alpha, 1);

    if (memory.empty())
        return grad;
    const auto &q = opt.qfish;
    if (q.lambda_qfi > 0.0) {
        const auto fhat = memory.combined_sensitivity();
        const auto &star = memory.latest_snapshot();
        const auto params = model.params();
        for (std::size_t j = 0; j < count; ++j) {
            const std::size_t i = offset + j;
            grad[j] += 2.0 * q.lambda_qfi * fhat[i] * (params[i] - star[i]);
        }
    }
    if (q.lambda_fid > 0.0) {
        std::vector<std::size_t> flat;
        if (subsample != nullptr && !subsample->fid.empty()) {
            flat = subsample->fid;
        } else {
            flat.resize(memory.total_anchors());
            std::iota(flat.begin(), flat.end(), std::size_t{0});
        }
        const double w = q.lambda_fid / static_cast<double>(flat.size());
        for (std::size_t idx : flat) {
            const auto [t, r] = memory.locate(idx);
            const auto &task = memory.tasks()[t];
            const auto x = row_span(task.inputs, static_cast<Eigen::Index>(r));
            const auto f = vqc::forward(model, x, opt.exec, row_seed(opt.shot_seed, x));
            const auto slope = functional_slope(f, task.snapshot_outputs[r], q.functional);
            if (slope.value == 0.0)
                continue;
            if (slope.on_logit)
                add_logit(x, f, w * slope.value);
            else
                add_score(x, f, w * slope.value);
        }
    }
    return grad;
}

} // namespace

double combine(double sup, double replay, double alpha, double reg) noexcept {
    return sup + alpha * replay + reg;
}

stability::OutputFn model_outputs(const vqc::VqcModel &model, const vqc::Execution &exec,
                                  std::uint64_t shot_seed) {
    return [model, exec, shot_seed](std::span<const double> params, std::span<const double> x) {
        const auto m = model.with_params(params);
        const auto f = vqc::forward(m, x, exec, row_seed(shot_seed, x));
        return stability::AnchorOutput{f.score, f.prob};
    };
}

stability::ScalarFn model_score(const vqc::VqcModel &model, const vqc::Execution &exec,
                                std::uint64_t shot_seed) {
    auto outputs = model_outputs(model, exec, shot_seed);
    return [outputs](std::span<const double> params, std::span<const double> x) {
        return outputs(params, x).score;
    };
}

CompositeParts composite_loss(const vqc::VqcModel &model, const LabeledSet &real,
                              const LabeledSet &replay, const stability::AnchorMemory &memory,
                              const CompositeOptions &options,
                              const stability::AnchorSubsample *subsample) {
    check_dim(model, real, "current");
    check_dim(model, replay, "replay");
    CompositeParts parts;
    if (!real.empty()) {
        const auto p = batch_probs(model, real, options.exec, util::derive_seed(options.shot_seed, {0}));
        parts.sup = vqc::mean_loss(p, real.y, options.loss);
    }
    if (!replay.empty()) {
        const auto p = batch_probs(model, replay, options.exec, util::derive_seed(options.shot_seed, {1}));
        parts.replay = vqc::mean_loss(p, replay.y, options.loss);
    }
    if (!memory.empty()) {
        parts.reg = stability::regularizer(model.params(), memory, options.qfish,
                                           model_outputs(model, options.exec, options.shot_seed),
                                           subsample);
    }
    parts.total = combine(parts.sup, parts.replay, options.alpha, parts.reg);
    return parts;
}

std::vector<double> score_gradient(const vqc::VqcModel &model, std::span<const double> x,
                                   const sim::NoiseParams &noise) {
    const auto &layout = model.layout();
    const auto q = static_cast<std::size_t>(model.num_qubits());
    const auto d = static_cast<std::size_t>(model.input_dim());
    const auto cond = vqc::condition_input(model, x);
    std::vector<double> angles(cond.size());
    std::transform(cond.begin(), cond.end(), angles.begin(), vqc::angle_map);
    const auto adj = sim::adjoint_gradient(model.circuit(), model.theta(), angles, noise, model.readout());

    std::vector<double> grad(model.num_params(), 0.0);
    std::copy(adj.dparams.begin(), adj.dparams.end(), grad.begin() + static_cast<std::ptrdiff_t>(layout.theta));
    const auto wcond = model.conditioning();
    for (std::size_t j = 0; j < q; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c)
            acc += wcond[j * d + c] * x[c];
        if (!(acc > -1.0 && acc < 1.0))
            continue;
        for (std::size_t c = 0; c < d; ++c)
            grad[layout.conditioning + j * d + c] = adj.dinputs[j] * std::numbers::pi * x[c];
    }
    for (std::size_t i = 0; i < q; ++i)
        grad[layout.readout + i] = adj.z[i];
    grad[layout.bias] = -1.0;
    grad[layout.tau_raw] = 0.0;
    return grad;
}

std::vector<double> composite_gradient(const vqc::VqcModel &model, const LabeledSet &real,
                                       const LabeledSet &replay,
                                       const stability::AnchorMemory &memory,
                                       const CompositeOptions &options,
                                       const stability::AnchorSubsample *subsample) {
    if (!options.exec.exact) {
        throw std::invalid_argument("composite_gradient: analytic gradients need exact expectations");
    }
    check_dim(model, real, "current");
    check_dim(model, replay, "replay");
    return accumulate(model, real, replay, memory, options, subsample, 0, model.num_params(),
                      [&](std::span<const double> x, const vqc::Forward &) {
                          return score_gradient(model, x, options.exec.noise);
                      });
}

std::vector<double> readout_composite_gradient(const vqc::VqcModel &model,
                                               const LabeledSet &real, const LabeledSet &replay,
                                               const stability::AnchorMemory &memory,
                                               const CompositeOptions &options,
                                               const stability::AnchorSubsample *subsample) {
    check_dim(model, real, "current");
    check_dim(model, replay, "replay");
    const auto &layout = model.layout();
    const std::size_t q = static_cast<std::size_t>(model.num_qubits());
    return accumulate(model, real, replay, memory, options, subsample, layout.readout, q + 2,
                      [q](std::span<const double>, const vqc::Forward &f) {
                          std::vector<double> ds(q + 2, 0.0);
                          std::copy(f.z.begin(), f.z.end(), ds.begin());
                          ds[q] = -1.0;
                          return ds;
                      });
}

} // namespace qcstream::pipeline
