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
#include "qcstream/optim/numdiff.hpp"

#include <random>
#include <stdexcept>

namespace qcstream::optim {

std::vector<double> central_difference(const Objective &f, std::span<const double> x,
                                       double step) {
    std::vector<std::size_t> all(x.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    return central_difference(f, x, step, all);
}

std::vector<double> central_difference(const Objective &f, std::span<const double> x, double step,
                                       std::span<const std::size_t> indices) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("finite-difference step must be > 0");
    }
    std::vector<double> grad(x.size(), 0.0);
    std::vector<double> probe(x.begin(), x.end());
    for (const std::size_t i : indices) {
        if (i >= x.size()) {
            throw std::out_of_range("finite-difference index out of range");
        }
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

std::vector<double> spsa_direction(const Objective &f, std::span<const double> x, double c,
                                   std::uint64_t seed) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("SPSA perturbation must be > 0");
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> delta(x.size());
    for (auto &d : delta)
        d = coin(rng) ? 1.0 : -1.0;
    std::vector<double> plus(x.begin(), x.end());
    std::vector<double> minus(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += c * delta[i];
        minus[i] -= c * delta[i];
    }
    const double diff = f(plus) - f(minus);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = diff / (2.0 * c * delta[i]);
    return g;
}

} // namespace qcstream::optim
