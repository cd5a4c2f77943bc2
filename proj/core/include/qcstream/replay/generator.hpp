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
#pragma once

#include "qcstream/optim/spsa.hpp"
#include "qcstream/replay/source.hpp"
#include "qcstream/sim/circuit.hpp"

#include <array>

namespace qcstream::replay {

/// Class means and isotropic spreads of one task's training rows.
struct Prototypes {
    std::array<std::vector<double>, 2> mu;
    std::array<double, 2> sigma{0.0, 0.0};
    std::array<std::size_t, 2> count{0, 0};
};

/// mu_c = class mean; sigma_c = mean over dimensions of the population std.
Prototypes compute_prototypes(const LabeledSet &data);

/// Re-uploading layout without inputs, prefixed by RY(pi * condition) on qubit 0.
sim::CircuitSpec generator_circuit(int num_qubits, int num_layers, int condition);

/// <Z_i> of the generator circuit for one condition.
std::vector<double> generator_expectations(const sim::CircuitSpec &circuit,
                                           std::span<const double> phi,
                                           const sim::NoiseParams &noise, bool exact = true,
                                           std::int64_t shots = 1024, std::uint64_t seed = 0);

/// ||f_phi(c) - mu_c||^2.
double prototype_loss(const sim::CircuitSpec &circuit, std::span<const double> phi,
                      std::span<const double> mu, const sim::NoiseParams &noise);

struct GeneratorConfig {
    int num_qubits = 6;
    int num_layers = 2;
    optim::SpsaMinimizeOptions spsa;  ///< 300 iterations, a = c = 0.2, A = 30
    sim::NoiseParams noise;
    bool shot_training = false;       ///< shot-estimated training objective
    std::int64_t shots = 1024;
    double prototype_clip = 0.999;
};

/// Frozen per-task generator: one parameter vector per condition, the clipped
/// prototype targets, the spreads and the cached expectation vectors.
class GeneratorSnapshot final : public ReplaySource {
  public:
    struct Fields {
        int task_id = 0;
        int num_qubits = 6;
        int num_layers = 2;
        std::array<std::vector<double>, 2> phi;
        std::array<std::vector<double>, 2> mu;
        std::array<double, 2> sigma{0.0, 0.0};
        std::array<double, 2> final_loss{0.0, 0.0};
        sim::NoiseParams noise;
        std::size_t support = 0;
        double attack_fraction = 0.0;
    };

    explicit GeneratorSnapshot(Fields fields);

    [[nodiscard]] int task_id() const noexcept override { return f_.task_id; }
    [[nodiscard]] LabeledSet synthesize(int condition, std::size_t n,
                                        std::uint64_t seed) const override;
    [[nodiscard]] std::uint64_t checksum() const noexcept override { return checksum_; }
    [[nodiscard]] std::size_t support_size() const noexcept override { return f_.support; }
    [[nodiscard]] double attack_fraction() const noexcept override { return f_.attack_fraction; }
    [[nodiscard]] std::string kind() const override { return "quantum-generator"; }
    [[nodiscard]] nlohmann::json to_json() const override;

    [[nodiscard]] const Fields &fields() const noexcept { return f_; }
    /// Exact expectation vector f_phi*(c), evaluated once per call.
    [[nodiscard]] std::vector<double> prototype_output(int condition) const;
    /// Recomputes the digest and compares with the one taken at freeze time.
    [[nodiscard]] bool verify() const noexcept;

    static GeneratorSnapshot from_json(const nlohmann::json &doc);

  private:
    [[nodiscard]] std::uint64_t compute_checksum() const noexcept;

    Fields f_;
    std::uint64_t checksum_ = 0;
};

/// Fits one generator per condition to the clipped prototypes and freezes it.
GeneratorSnapshot train_generator(const LabeledSet &data, int task_id,
                                  const GeneratorConfig &cfg, std::uint64_t seed);

} // namespace qcstream::replay
