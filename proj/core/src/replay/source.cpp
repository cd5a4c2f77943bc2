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
#include "qcstream/replay/source.hpp"

#include "qcstream/util/rng.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace qcstream::replay {

void ReplayPolicy::validate() const {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("ReplayPolicy: ratio must lie in [0, 1]");
    }
    if (!(upweight[0] > 0.0) || !(upweight[1] > 0.0)) {
        throw std::invalid_argument("ReplayPolicy: upweights must be positive");
    }
}

std::size_t replay_count(double ratio, std::size_t batch_size) {
    return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(batch_size)));
}

ReplayBatch draw_replay_batch(std::span<const SourcePtr> sources, const ReplayPolicy &policy,
                              std::size_t batch_size, std::uint64_t seed) {
    policy.validate();
    ReplayBatch batch;
    const std::size_t n = replay_count(policy.ratio, batch_size);
    if (sources.empty() || n == 0)
        return batch;

    util::Rng rng(seed);
    std::vector<double> task_w;
    for (const auto &s : sources)
        task_w.push_back(policy.balance == TaskBalance::kUniform
                             ? 1.0
                             : static_cast<double>(std::max<std::size_t>(s->support_size(), 1)));
    std::discrete_distribution<std::size_t> pick_task(task_w.begin(), task_w.end());

    std::vector<std::pair<std::size_t, int>> draws(n);
    std::map<std::pair<std::size_t, int>, std::size_t> counts;
    for (auto &d : draws) {
        d.first = pick_task(rng);
        const double prior1 = policy.class_balanced ? 0.5 : sources[d.first]->attack_fraction();
        const double w1 = prior1 * policy.upweight[1];
        const double w0 = (1.0 - prior1) * policy.upweight[0];
        std::bernoulli_distribution attack(w0 + w1 > 0.0 ? w1 / (w0 + w1) : 0.5);
        d.second = attack(rng) ? 1 : 0;
        ++counts[d];
    }

    std::map<std::pair<std::size_t, int>, LabeledSet> pools;
    std::map<std::pair<std::size_t, int>, std::size_t> cursor;
    for (const auto &[key, count] : counts) {
        const auto s = util::derive_seed(seed, {key.first, static_cast<std::uint64_t>(key.second)});
        pools.emplace(key, sources[key.first]->synthesize(key.second, count, s));
        cursor[key] = 0;
    }

    const auto dim = pools.begin()->second.dim();
    batch.data.x.resize(static_cast<Eigen::Index>(n), dim);
    batch.data.y.reserve(n);
    batch.task.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &key = draws[i];
        const auto &pool = pools.at(key);
        auto &c = cursor[key];
        batch.data.x.row(static_cast<Eigen::Index>(i)) = pool.x.row(static_cast<Eigen::Index>(c));
        batch.data.y.push_back(pool.y[c]);
        batch.task.push_back(sources[key.first]->task_id());
        ++c;
    }
    return batch;
}

} // namespace qcstream::replay
