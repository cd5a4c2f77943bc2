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
#include "qcstream/pipeline/oracle.hpp"

#include "qcstream/metrics/metrics.hpp"
#include "qcstream/vqc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qcstream::pipeline {

double LogisticModel::predict_proba(std::span<const double> x) const {
    if (x.size() != weights.size()) {
        throw std::invalid_argument("LogisticModel: input dimension mismatch");
    }
    double z = bias;
    for (std::size_t j = 0; j < x.size(); ++j)
        z += weights[j] * x[j];
    return vqc::sigmoid(z);
}

namespace {

double objective(const LabeledSet &data, const LogisticModel &m, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double z = m.bias;
        const auto x = data.row(i);
        for (std::size_t j = 0; j < x.size(); ++j)
            z += m.weights[j] * x[j];
        // log(1 + e^z) - y z, evaluated stably.
        loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - data.y[i] * z;
    }
    double reg = 0.0;
    for (double w : m.weights)
        reg += w * w;
    return loss / static_cast<double>(data.size()) + 0.5 * l2 * reg;
}

} // namespace

LogisticModel fit_logistic(const LabeledSet &train, const LogisticOptions &options) {
    train.check();
    std::size_t pos = 0;
    for (int y : train.y)
        pos += static_cast<std::size_t>(y);
    if (pos == 0 || pos == train.size()) {
        throw std::invalid_argument("fit_logistic: training set holds a single class");
    }
    const auto d = static_cast<std::size_t>(train.dim());
    const double n = static_cast<double>(train.size());
    LogisticModel m;
    m.weights.assign(d, 0.0);
    double prev = objective(train, m, options.l2);
    for (int it = 0; it < options.max_iters; ++it) {
        std::vector<double> gw(d, 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const auto x = train.row(i);
            const double r = m.predict_proba(x) - train.y[i];
            for (std::size_t j = 0; j < d; ++j)
                gw[j] += r * x[j];
            gb += r;
        }
        for (std::size_t j = 0; j < d; ++j)
            m.weights[j] -= options.learning_rate * (gw[j] / n + options.l2 * m.weights[j]);
        m.bias -= options.learning_rate * gb / n;
        m.iterations = it + 1;
        const double cur = objective(train, m, options.l2);
        if (std::abs(prev - cur) < options.tolerance)
            break;
        prev = cur;
    }
    return m;
}

double oracle_attack_f1(const LabeledSet &train, const LabeledSet &eval,
                        const LogisticOptions &options) {
    const auto m = fit_logistic(train, options);
    std::vector<double> probs(eval.size());
    for (std::size_t i = 0; i < eval.size(); ++i)
        probs[i] = m.predict_proba(eval.row(i));
    return metrics::attack_f1(probs, eval.y, 0.5);
}

} // namespace qcstream::pipeline
