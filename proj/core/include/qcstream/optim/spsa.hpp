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

#include "qcstream/optim/numdiff.hpp"
#include "qcstream/util/rng.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace qcstream::optim {

/// Spall's gain sequences a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma.
struct SpsaGains {
    double a = 0.1;
    double c = 0.1;
    double A = 0.0;
    double alpha = 0.602;
    double gamma = 0.101;

    [[nodiscard]] double step_size(std::size_t k) const {
        return a / std::pow(static_cast<double>(k) + 1.0 + A, alpha);
    }
    [[nodiscard]] double perturbation(std::size_t k) const {
        return c / std::pow(static_cast<double>(k) + 1.0, gamma);
    }
};

/// Stateful two-evaluation SPSA with Rademacher perturbations. The objective may
/// change between steps (mini-batch training); each step evaluates it exactly twice.
class SpsaOptimizer {
  public:
    SpsaOptimizer(SpsaGains gains, std::uint64_t seed) : gains_(gains), rng_(seed) {}

    struct StepInfo {
        double f_plus = 0.0;
        double f_minus = 0.0;
        double step_size = 0.0;
        double perturbation = 0.0;
    };

    /// Updates `x` in place. Throws std::runtime_error if either evaluation is not finite.
    StepInfo step(const Objective &f, std::vector<double> &x);

    [[nodiscard]] std::size_t iteration() const noexcept { return k_; }
    [[nodiscard]] const SpsaGains &gains() const noexcept { return gains_; }

  private:
    SpsaGains gains_;
    util::Rng rng_;
    std::size_t k_ = 0;
};

struct SpsaMinimizeOptions {
    int max_iters = 300;
    std::uint64_t seed = 0;
    SpsaGains gains{0.2, 0.2, 30.0};
    /// Iterate quality is re-checked this often (and at the end).
    int check_every = 10;
    /// Objective used for best-seen tracking; defaults to the training objective.
    std::optional<Objective> exact;
};

struct SpsaResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::vector<double> last;
    int iterations = 0;
    /// Calls of the training objective (two per iteration).
    std::size_t evaluations = 0;
    /// Best-seen value after each check; non-increasing.
    std::vector<double> best_trace;
};

SpsaResult spsa_minimize(const Objective &objective, std::vector<double> x0,
                         const SpsaMinimizeOptions &options);

} // namespace qcstream::optim
