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

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <vector>

namespace qcstream {

/// Samples are rows; row-major so a row is a contiguous span.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const FeatureMatrix &x, Eigen::Index i) {
    return {x.data() + i * x.cols(), static_cast<std::size_t>(x.cols())};
}

/// Feature rows with binary labels (1 = attack).
struct LabeledSet {
    FeatureMatrix x;
    std::vector<int> y;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    [[nodiscard]] bool empty() const noexcept { return y.empty(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return x.cols(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return row_span(x, static_cast<Eigen::Index>(i));
    }

    /// Rows selected by index, in the given order.
    [[nodiscard]] LabeledSet subset(std::span<const std::size_t> indices) const {
        LabeledSet out;
        out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
        out.y.reserve(indices.size());
        for (std::size_t r = 0; r < indices.size(); ++r) {
            if (indices[r] >= size()) {
                throw std::out_of_range("LabeledSet::subset: index out of range");
            }
            out.x.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(indices[r]));
            out.y.push_back(y[indices[r]]);
        }
        return out;
    }

    void check() const {
        if (static_cast<std::size_t>(x.rows()) != y.size()) {
            throw std::invalid_argument("LabeledSet: row/label count mismatch");
        }
        for (int v : y) {
            if (v != 0 && v != 1) {
                throw std::invalid_argument("LabeledSet: labels must be 0 or 1");
            }
        }
    }
};

/// Concatenates two sets with equal dimension.
inline LabeledSet concat(const LabeledSet &a, const LabeledSet &b) {
    if (a.empty())
        return b;
    if (b.empty())
        return a;
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("concat: dimension mismatch");
    }
    LabeledSet out;
    out.x.resize(a.x.rows() + b.x.rows(), a.x.cols());
    out.x.topRows(a.x.rows()) = a.x;
    out.x.bottomRows(b.x.rows()) = b.x;
    out.y = a.y;
    out.y.insert(out.y.end(), b.y.begin(), b.y.end());
    return out;
}

} // namespace qcstream
