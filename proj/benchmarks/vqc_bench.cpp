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
#include "qcstream/vqc/model.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace qcstream;

LabeledSet random_batch(std::size_t n, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LabeledSet s;
    s.x.resize(static_cast<Eigen::Index>(n), dim);
    for (Eigen::Index i = 0; i < s.x.size(); ++i)
        s.x.data()[i] = u(rng);
    for (std::size_t i = 0; i < n; ++i)
        s.y.push_back(static_cast<int>(i % 2));
    return s;
}

void BM_PredictBatch(benchmark::State &state) {
    const auto model = vqc::VqcModel::create(6, 3, 6, 1);
    const auto batch = random_batch(64, 6, 2);
    vqc::Execution exec;
    exec.noise = sim::NoiseParams::nisq_defaults();
    for (auto _ : state)
        benchmark::DoNotOptimize(vqc::predict_proba(model, batch.x, exec));
}
BENCHMARK(BM_PredictBatch);

void BM_CompositeGradient(benchmark::State &state) {
    const auto model = vqc::VqcModel::create(6, 3, 6, 1);
    const auto batch = random_batch(64, 6, 3);
    pipeline::CompositeOptions opt;
    opt.exec.noise = sim::NoiseParams::nisq_defaults();
    const stability::AnchorMemory memory;
    for (auto _ : state)
        benchmark::DoNotOptimize(pipeline::composite_gradient(model, batch, {}, memory, opt));
}
BENCHMARK(BM_CompositeGradient);

} // namespace

BENCHMARK_MAIN();
