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
#include "qcstream/data/stream.hpp"

#include "qcstream/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qcstream::data {

SplitCounts split_counts(std::size_t n, double train_frac, double val_frac) {
    if (!(train_frac >= 0.0 && val_frac >= 0.0 && train_frac + val_frac <= 1.0)) {
        throw std::invalid_argument("split_counts: fractions must be >= 0 and sum to <= 1");
    }
    // The small offset keeps products such as 0.6 * 5 from landing just below an integer.
    SplitCounts c;
    c.train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 1e-9));
    c.val = static_cast<std::size_t>(std::floor(val_frac * static_cast<double>(n) + 1e-9));
    c.test = n - c.train - c.val;
    return c;
}

namespace {

LabeledSet gather(const RawTable &table, const std::vector<std::size_t> &rows,
                  const std::vector<int> &labels) {
    LabeledSet s;
    s.x.resize(static_cast<Eigen::Index>(rows.size()), table.x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        s.x.row(static_cast<Eigen::Index>(i)) = table.x.row(static_cast<Eigen::Index>(rows[i]));
    s.y = labels;
    return s;
}

} // namespace

std::vector<TaskSplit> build_stream_from_groups(const RawTable &table,
                                                const std::vector<std::size_t> &normal_rows,
                                                const std::vector<std::vector<std::size_t>> &attack_rows,
                                                const std::vector<std::string> &names,
                                                const StreamOptions &options) {
    if (attack_rows.size() != names.size()) {
        throw std::invalid_argument("build_stream: one name per attack group required");
    }
    std::size_t total_attack = 0;
    for (std::size_t k = 0; k < attack_rows.size(); ++k) {
        if (attack_rows[k].empty()) {
            throw std::invalid_argument("build_stream: phase " + names[k] + " has no rows");
        }
        total_attack += attack_rows[k].size();
    }
    if (normal_rows.empty()) {
        throw std::invalid_argument("build_stream: no NORMAL rows");
    }
    const double ratio = static_cast<double>(normal_rows.size()) / static_cast<double>(total_attack);

    std::vector<std::size_t> pool = normal_rows;
    util::Rng pool_rng(options.seed);
    util::shuffle(pool, pool_rng);
    std::size_t pointer = 0;

    std::vector<TaskSplit> out;
    for (std::size_t k = 0; k < attack_rows.size(); ++k) {
        std::vector<std::size_t> attacks = attack_rows[k];
        util::Rng rng(options.seed + k);
        util::shuffle(attacks, rng);
        const auto ac = split_counts(attacks.size(), options.train_frac, options.val_frac);
        const std::size_t a_counts[3] = {ac.train, ac.val, ac.test};
        std::size_t n_counts[3];
        std::size_t need = 0;
        for (int p = 0; p < 3; ++p) {
            n_counts[p] = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(a_counts[p]) + 1e-9));
            need += n_counts[p];
        }
        if (pointer + need > pool.size()) {
            throw std::runtime_error("build_stream: NORMAL pool exhausted at task " + std::to_string(k) +
                                     " (need " + std::to_string(need) + ", " +
                                     std::to_string(pool.size() - pointer) + " left)");
        }
        TaskSplit split;
        split.task_id = static_cast<int>(k);
        split.phase = names[k];
        std::size_t a_off = 0;
        for (int p = 0; p < 3; ++p) {
            auto &rows = split.source_rows[static_cast<std::size_t>(p)];
            rows.assign(attacks.begin() + static_cast<std::ptrdiff_t>(a_off),
                        attacks.begin() + static_cast<std::ptrdiff_t>(a_off + a_counts[p]));
            a_off += a_counts[p];
            std::vector<int> labels(rows.size(), 1);
            rows.insert(rows.end(), pool.begin() + static_cast<std::ptrdiff_t>(pointer),
                        pool.begin() + static_cast<std::ptrdiff_t>(pointer + n_counts[p]));
            pointer += n_counts[p];
            labels.resize(rows.size(), 0);
            split.parts[static_cast<std::size_t>(p)] = gather(table, rows, labels);
        }
        out.push_back(std::move(split));
    }
    return out;
}

std::vector<TaskSplit> build_task_stream(const RawTable &table, const PhaseMap &phase_map,
                                         const StreamOptions &options) {
    std::vector<std::size_t> normal;
    std::vector<std::vector<std::size_t>> attacks(kAttackPhases.size());
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        const Phase p = phase_map.lookup(table.labels[i]);
        if (p == Phase::kNormal) {
            normal.push_back(i);
            continue;
        }
        for (std::size_t k = 0; k < kAttackPhases.size(); ++k)
            if (kAttackPhases[k] == p)
                attacks[k].push_back(i);
    }
    std::vector<std::string> names;
    for (Phase p : kAttackPhases)
        names.push_back(to_string(p));
    return build_stream_from_groups(table, normal, attacks, names, options);
}

void fit_transform(TaskSplit &split, const TransformOptions &options) {
    if (split.transformed) {
        throw std::logic_error("fit_transform: split already transformed");
    }
    split.transform = fit_transform_record(split.train().x, options);
    split.parts[kTrain].x = apply_transform(split.transform, split.train().x, false);
    split.clipped = 0;
    for (auto p : {kVal, kTest})
        split.parts[p].x = apply_transform(split.transform, split.parts[p].x, true, &split.clipped);
    split.transformed = true;
}

void SynthSpec::validate() const {
    if (dim < 1 || attack_means.empty() || normal_per_task == 0 || attack_per_task == 0) {
        throw std::invalid_argument("SynthSpec: empty specification");
    }
    if (normal_mean.size() != static_cast<std::size_t>(dim) || normal_cov.rows() != dim ||
        normal_cov.cols() != dim || attack_covs.size() != attack_means.size()) {
        throw std::invalid_argument("SynthSpec: shape mismatch");
    }
    auto check_cov = [&](const Eigen::MatrixXd &c, const std::string &what) {
        if (c.rows() != dim || c.cols() != dim || !(c - c.transpose()).isZero(1e-12)) {
            throw std::invalid_argument("SynthSpec: " + what + " covariance must be symmetric " +
                                        std::to_string(dim) + "x" + std::to_string(dim));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
        if (eig.eigenvalues().minCoeff() < -1e-10) {
            throw std::invalid_argument("SynthSpec: " + what + " covariance is not positive semidefinite");
        }
    };
    check_cov(normal_cov, "NORMAL");
    for (std::size_t k = 0; k < attack_means.size(); ++k) {
        if (attack_means[k].size() != static_cast<std::size_t>(dim)) {
            throw std::invalid_argument("SynthSpec: attack mean dimension mismatch");
        }
        check_cov(attack_covs[k], "attack " + std::to_string(k));
    }
}

nlohmann::json SynthSpec::to_json() const {
    auto mat = [](const Eigen::MatrixXd &m) {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                rows[static_cast<std::size_t>(i)].push_back(m(i, j));
        return rows;
    };
    nlohmann::json covs = nlohmann::json::array();
    for (const auto &c : attack_covs)
        covs.push_back(mat(c));
    return {{"name", name},
            {"dim", dim},
            {"normal_per_task", normal_per_task},
            {"attack_per_task", attack_per_task},
            {"normal_mean", normal_mean},
            {"normal_cov", mat(normal_cov)},
            {"attack_means", attack_means},
            {"attack_covs", covs},
            {"seed", seed}};
}

SynthSpec SynthSpec::rotating(int tasks, double separation, double shift_deg, double attack_std,
                              std::uint64_t seed) {
    SynthSpec s;
    s.dim = 6;
    s.seed = seed;
    s.normal_mean.assign(6, 0.0);
    s.normal_cov = Eigen::MatrixXd::Identity(6, 6);
    const double step = shift_deg * std::numbers::pi / 180.0;
    for (int k = 0; k < tasks; ++k) {
        std::vector<double> m(6, 0.0);
        m[0] = separation * std::cos(step * k);
        m[1] = separation * std::sin(step * k);
        s.attack_means.push_back(m);
        s.attack_covs.push_back(attack_std * attack_std * Eigen::MatrixXd::Identity(6, 6));
    }
    return s;
}

SynthSpec SynthSpec::named(const std::string &name, std::uint64_t seed) {
    SynthSpec s;
    if (name == "default") {
        s = rotating(3, 3.0, 120.0, 0.7, seed);
    } else if (name == "no-shift") {
        s = rotating(3, 3.0, 0.0, 0.7, seed);
    } else if (name == "separable") {
        s = rotating(3, 8.0, 120.0, 0.3, seed);
        s.normal_cov *= 0.09;
    } else {
        throw std::invalid_argument("unknown synthetic spec '" + name +
                                    "' (expected default, no-shift or separable)");
    }
    s.name = name;
    return s;
}

namespace {

Eigen::MatrixXd sqrt_factor(const Eigen::MatrixXd &cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

void draw_rows(FeatureMatrix &x, Eigen::Index offset, std::size_t n, const std::vector<double> &mean,
               const Eigen::MatrixXd &cov, util::Rng &rng) {
    const Eigen::MatrixXd l = sqrt_factor(cov);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(static_cast<Eigen::Index>(mean.size()));
    const Eigen::Map<const Eigen::VectorXd> mu(mean.data(), static_cast<Eigen::Index>(mean.size()));
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < z.size(); ++j)
            z(j) = gauss(rng);
        x.row(offset + static_cast<Eigen::Index>(i)) = (mu + l * z).transpose();
    }
}

std::string task_label(int k) { return "TASK_" + std::to_string(k); }

} // namespace

RawTable synth_table(const SynthSpec &spec) {
    spec.validate();
    const auto t = static_cast<std::size_t>(spec.num_tasks());
    const std::size_t n_normal = t * spec.normal_per_task;
    const std::size_t total = n_normal + t * spec.attack_per_task;
    RawTable table;
    for (int j = 0; j < spec.dim; ++j)
        table.feature_names.push_back("f" + std::to_string(j));
    table.x.resize(static_cast<Eigen::Index>(total), spec.dim);
    util::Rng rng(util::derive_seed(spec.seed, {util::tag(util::Stream::kSynthetic)}));
    draw_rows(table.x, 0, n_normal, spec.normal_mean, spec.normal_cov, rng);
    table.labels.assign(n_normal, "NORMAL");
    for (std::size_t k = 0; k < t; ++k) {
        draw_rows(table.x, static_cast<Eigen::Index>(n_normal + k * spec.attack_per_task),
                  spec.attack_per_task, spec.attack_means[k], spec.attack_covs[k], rng);
        table.labels.insert(table.labels.end(), spec.attack_per_task, task_label(static_cast<int>(k)));
    }
    return table;
}

std::vector<TaskSplit> synth_stream(const SynthSpec &spec, const StreamOptions &options) {
    const RawTable table = synth_table(spec);
    std::vector<std::size_t> normal;
    std::vector<std::vector<std::size_t>> attacks(static_cast<std::size_t>(spec.num_tasks()));
    std::vector<std::string> names;
    for (int k = 0; k < spec.num_tasks(); ++k)
        names.push_back(k < 3 ? to_string(kAttackPhases[static_cast<std::size_t>(k)]) : task_label(k));
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        if (table.labels[i] == "NORMAL") {
            normal.push_back(i);
        } else {
            attacks[static_cast<std::size_t>(std::stoi(table.labels[i].substr(5)))].push_back(i);
        }
    }
    return build_stream_from_groups(table, normal, attacks, names, options);
}

nlohmann::json split_summary(const TaskSplit &split) {
    nlohmann::json j{{"task_id", split.task_id}, {"phase", split.phase}, {"clipped", split.clipped}};
    const char *names[3] = {"train", "val", "test"};
    for (std::size_t p = 0; p < 3; ++p) {
        const auto &s = split.parts[p];
        const auto attack = std::count(s.y.begin(), s.y.end(), 1);
        j[names[p]] = {{"rows", s.size()}, {"attack", attack},
                       {"normal", static_cast<std::ptrdiff_t>(s.size()) - attack}};
    }
    return j;
}

} // namespace qcstream::data
