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
#include "qcstream/optim/spsa.hpp"

#include <sstream>
#include <stdexcept>

namespace qcstream::optim {

SpsaOptimizer::StepInfo SpsaOptimizer::step(const Objective &f, std::vector<double> &x) {
    StepInfo info;
    info.step_size = gains_.step_size(k_);
    info.perturbation = gains_.perturbation(k_);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> delta(x.size());
    for (auto &d : delta)
        d = coin(rng_) ? 1.0 : -1.0;

    std::vector<double> probe(x);
    for (std::size_t i = 0; i < x.size(); ++i)
        probe[i] = x[i] + info.perturbation * delta[i];
    info.f_plus = f(probe);
    for (std::size_t i = 0; i < x.size(); ++i)
        probe[i] = x[i] - info.perturbation * delta[i];
    info.f_minus = f(probe);

    if (!std::isfinite(info.f_plus) || !std::isfinite(info.f_minus)) {
        std::ostringstream msg;
        msg << "SPSA: non-finite objective at iteration " << k_ << " (f+ = " << info.f_plus
            << ", f- = " << info.f_minus << ")";
        throw std::runtime_error(msg.str());
    }
    const double scale = (info.f_plus - info.f_minus) / (2.0 * info.perturbation);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] -= info.step_size * scale / delta[i];
    ++k_;
    return info;
}

SpsaResult spsa_minimize(const Objective &objective, std::vector<double> x0,
                         const SpsaMinimizeOptions &options) {
    if (options.max_iters < 1) {
        throw std::invalid_argument("spsa_minimize: max_iters must be >= 1");
    }
    if (options.check_every < 1) {
        throw std::invalid_argument("spsa_minimize: check_every must be >= 1");
    }
    SpsaResult result;
    std::size_t calls = 0;
    const Objective counted = [&](std::span<const double> p) {
        ++calls;
        return objective(p);
    };
    const Objective &exact = options.exact ? *options.exact : objective;
    auto check = [&](const std::vector<double> &x) {
        const double v = exact(x);
        if (!std::isfinite(v)) {
            throw std::runtime_error("spsa_minimize: non-finite objective during tracking");
        }
        if (result.best_trace.empty() || v < result.best_value) {
            result.best_value = v;
            result.best = x;
        }
        result.best_trace.push_back(result.best_value);
    };

    SpsaOptimizer opt(options.gains, options.seed);
    std::vector<double> x = std::move(x0);
    check(x);
    for (int it = 1; it <= options.max_iters; ++it) {
        opt.step(counted, x);
        if (it % options.check_every == 0 || it == options.max_iters) {
            check(x);
        }
    }
    result.last = std::move(x);
    result.iterations = options.max_iters;
    result.evaluations = calls;
    return result;
}

} // namespace qcstream::optim
