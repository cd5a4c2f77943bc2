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

#include "qcstream/sim/state.hpp"

#include <functional>
#include <span>
#include <vector>

namespace qcstream::sim {

/// A gate whose angle is op.angle + params[param] + inputs[input]; -1 means unused.
struct ParamGate {
    GateOp op;
    int param = -1;
    int input = -1;
};

/// Fixed gate layout of a data re-uploading ansatz. Per layer l and qubit i:
/// RY(theta_{l,i} + input_i), RZ(phi_{l,i}); then a CNOT ring i -> (i+1) mod q.
/// Parameters are laid out layer by layer as [theta_{l,0..q-1}, phi_{l,0..q-1}].
class CircuitSpec {
  public:
    static CircuitSpec reuploading(int num_qubits, int num_layers);

    /// Same layout with fixed gates applied to |0...0> before the first layer.
    [[nodiscard]] CircuitSpec with_prefix(std::vector<GateOp> prefix) const;

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] int num_layers() const noexcept { return num_layers_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return param_count_; }
    [[nodiscard]] std::span<const GateOp> prefix() const noexcept { return prefix_; }
    [[nodiscard]] std::span<const ParamGate> gates() const noexcept { return gates_; }

    [[nodiscard]] std::size_t ry_index(int layer, int qubit) const noexcept {
        return static_cast<std::size_t>(layer * 2 * num_qubits_ + qubit);
    }
    [[nodiscard]] std::size_t rz_index(int layer, int qubit) const noexcept {
        return static_cast<std::size_t>(layer * 2 * num_qubits_ + num_qubits_ + qubit);
    }

  private:
    int num_qubits_ = 0;
    int num_layers_ = 0;
    std::size_t param_count_ = 0;
    std::vector<GateOp> prefix_;
    std::vector<ParamGate> gates_;
};

/// Evolves |0...0>. Noise enabled selects the mixed representation, otherwise
/// the statevector. Throws std::invalid_argument on dimension mismatch.
QuantumState run_circuit(const CircuitSpec &spec, std::span<const double> params,
                         std::span<const double> input_angles, const NoiseParams &noise);

enum class GradientMethod { kParameterShift, kFiniteDifference, kSpsaDirection };

struct GradientOptions {
    GradientMethod method = GradientMethod::kParameterShift;
    double fd_step = 1e-5;      ///< central-difference step
    double spsa_c = 0.1;        ///< perturbation size for the SPSA direction
    std::uint64_t seed = 0;     ///< Rademacher draw for the SPSA direction
};

using StateReadout = std::function<double(const QuantumState &)>;

/// d readout(run_circuit(params)) / d params.
std::vector<double> circuit_gradient(const CircuitSpec &spec, std::span<const double> params,
                                     std::span<const double> input_angles,
                                     const NoiseParams &noise, const StateReadout &readout,
                                     const GradientOptions &options);

struct AdjointResult {
    std::vector<double> z;        ///< <Z_i>, readout contraction included
    double value = 0.0;           ///< sum_i weights_i z_i
    std::vector<double> dparams;  ///< d value / d params
    std::vector<double> dinputs;  ///< d value / d input_angles
};

/// Reverse-mode gradient of a weighted Z readout through the Pauli-vector
/// simulation, noise included. Exact for exact expectations.
AdjointResult adjoint_gradient(const CircuitSpec &spec, std::span<const double> params,
                               std::span<const double> input_angles, const NoiseParams &noise,
                               std::span<const double> weights);

} // namespace qcstream::sim
