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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qcstream::optim {

using Objective = std::function<double(std::span<const double>)>;

/// Central differences, (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> central_difference(const Objective &f, std::span<const double> x, double step);

/// Central differences restricted to `indices`; other entries of the result are 0.
std::vector<double> central_difference(const Objective &f, std::span<const double> x, double step,
                                       std::span<const std::size_t> indices);

/// One simultaneous-perturbation estimate with Rademacher directions:
/// g_i = (f(x + c D) - f(x - c D)) / (2 c D_i).
std::vector<double> spsa_direction(const Objective &f, std::span<const double> x, double c,
                                   std::uint64_t seed);

} // namespace qcstream::optim
