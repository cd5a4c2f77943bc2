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

#include "qcstream/sim/circuit.hpp"
#include "qcstream/util/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace qcstream::vqc {

/// How expectations are obtained: exact trace values (with channel noise when
/// enabled) or shot estimates from `shots` samples.
struct Execution {
    sim::NoiseParams noise;
    bool exact = true;
    std::int64_t shots = 2048;
};

/// Offsets of the parameter blocks inside the flat vector
/// [theta | W | w | bias | tau_raw].
struct ParamLayout {
    std::size_t theta = 0;
    std::size_t theta_count = 0;
    std::size_t conditioning = 0;
    std::size_t conditioning_count = 0;
    std::size_t readout = 0;
    std::size_t readout_count = 0;
    std::size_t bias = 0;
    std::size_t tau_raw = 0;
    std::size_t total = 0;
};

/// Data re-uploading classifier. Input x (dimension d) is conditioned to
/// x' = clip(W x, -1, 1), mapped to angles pi * x', uploaded into every layer,
/// and read out as p = sigmoid(tau * (sum_i w_i <Z_i> - b)) with tau = exp(tau_raw).
class VqcModel {
  public:
    /// theta ~ U[-0.1, 0.1]; W = (truncated) identity; w = 1/q; b = 0; tau_raw = 0.
    static VqcModel create(int num_qubits, int num_layers, int input_dim, std::uint64_t seed);

    [[nodiscard]] int num_qubits() const noexcept { return circuit_->num_qubits(); }
    [[nodiscard]] int num_layers() const noexcept { return circuit_->num_layers(); }
    [[nodiscard]] int input_dim() const noexcept { return input_dim_; }
    [[nodiscard]] const sim::CircuitSpec &circuit() const noexcept { return *circuit_; }
    [[nodiscard]] const ParamLayout &layout() const noexcept { return layout_; }
    [[nodiscard]] std::size_t num_params() const noexcept { return params_.size(); }

    [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
    [[nodiscard]] std::span<const double> theta() const noexcept {
        return std::span(params_).subspan(layout_.theta, layout_.theta_count);
    }
    [[nodiscard]] std::span<const double> conditioning() const noexcept {
        return std::span(params_).subspan(layout_.conditioning, layout_.conditioning_count);
    }
    [[nodiscard]] std::span<const double> readout() const noexcept {
        return std::span(params_).subspan(layout_.readout, layout_.readout_count);
    }
    [[nodiscard]] double bias() const noexcept { return params_[layout_.bias]; }
    [[nodiscard]] double tau_raw() const noexcept { return params_[layout_.tau_raw]; }
    [[nodiscard]] double tau() const noexcept;

    /// Throws std::invalid_argument on size mismatch or non-finite entries.
    void set_params(std::span<const double> params);
    [[nodiscard]] VqcModel with_params(std::span<const double> params) const;

    void set_conditioning(std::span<const double> w_row_major);
    void set_readout(std::span<const double> weights, double bias, double tau_raw);
    void set_theta(std::span<const double> theta);

  private:
    VqcModel() = default;

    std::shared_ptr<const sim::CircuitSpec> circuit_;
    int input_dim_ = 0;
    ParamLayout layout_;
    std::vector<double> params_;
};

/// clip(W x, -1, 1).
std::vector<double> condition_input(const VqcModel &model, std::span<const double> x);

/// Linear rescale of [-1, 1] onto one rotation period [-pi, pi].
double angle_map(double conditioned) noexcept;

/// Per-sample forward quantities.
struct Forward {
    std::vector<double> z; ///< <Z_i> (noise/readout effects included)
    double score = 0.0;    ///< sum_i w_i <Z_i> - b
    double prob = 0.0;     ///< sigmoid(tau * score)
};

/// `shot_seed` is only consumed in shot mode.
Forward forward(const VqcModel &model, std::span<const double> x, const Execution &exec,
                std::uint64_t shot_seed = 0);

double predict_proba(const VqcModel &model, std::span<const double> x, const Execution &exec,
                     std::uint64_t shot_seed = 0);

/// Probabilities for every row; shot seeds derived from `seed` and the row index.
std::vector<double> predict_proba(const VqcModel &model, const FeatureMatrix &x,
                                  const Execution &exec, std::uint64_t seed = 0);

double sigmoid(double z) noexcept;

nlohmann::json to_json(const VqcModel &model);
VqcModel model_from_json(const nlohmann::json &doc);

} // namespace qcstream::vqc
