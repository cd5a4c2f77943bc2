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
#include "qcstream/sim/circuit.hpp"
#include "qcstream/sim/state.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace qcstream::sim;

std::vector<double> random_angles(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.14, 3.14);
    std::vector<double> v(n);
    for (auto &x : v)
        x = u(rng);
    return v;
}

void BM_RunCircuit(benchmark::State &state) {
    const int q = static_cast<int>(state.range(0));
    const bool noisy = state.range(1) != 0;
    const auto spec = CircuitSpec::reuploading(q, 3);
    const auto params = random_angles(spec.param_count(), 1);
    const auto inputs = random_angles(static_cast<std::size_t>(q), 2);
    const auto noise = noisy ? NoiseParams::nisq_defaults() : NoiseParams::none();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_circuit(spec, params, inputs, noise));
}
BENCHMARK(BM_RunCircuit)->ArgsProduct({{2, 4, 6}, {0, 1}});

void BM_AdjointGradient(benchmark::State &state) {
    const int q = static_cast<int>(state.range(0));
    const auto spec = CircuitSpec::reuploading(q, 3);
    const auto params = random_angles(spec.param_count(), 3);
    const auto inputs = random_angles(static_cast<std::size_t>(q), 4);
    const std::vector<double> weights(static_cast<std::size_t>(q), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(adjoint_gradient(spec, params, inputs, NoiseParams::nisq_defaults(), weights));
}
BENCHMARK(BM_AdjointGradient)->Arg(2)->Arg(4)->Arg(6);

void BM_ParameterShift(benchmark::State &state) {
    const int q = static_cast<int>(state.range(0));
    const auto spec = CircuitSpec::reuploading(q, 3);
    const auto params = random_angles(spec.param_count(), 5);
    const auto inputs = random_angles(static_cast<std::size_t>(q), 6);
    const auto noise = NoiseParams::nisq_defaults();
    const StateReadout f = [&](const QuantumState &s) { return expectation_z(s, 0, noise); };
    for (auto _ : state)
        benchmark::DoNotOptimize(circuit_gradient(spec, params, inputs, noise, f, {}));
}
BENCHMARK(BM_ParameterShift)->Arg(2)->Arg(4)->Arg(6);

} // namespace
