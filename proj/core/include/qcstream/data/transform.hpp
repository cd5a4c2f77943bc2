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

#include "qcstream/util/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <Eigen/Core>

#include <vector>

namespace qcstream::data {

struct PcaResult {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd basis;            ///< d x k, orthonormal columns
    std::vector<double> eigenvalues;  ///< all d, descending
};

/// Top-k eigenvectors of the sample covariance (divisor N - 1). Each column's
/// largest-magnitude entry is made positive (first such entry on ties).
/// Throws when rows or columns < k or the covariance rank is below k.
PcaResult pca_fit(const FeatureMatrix &x, int k);

struct TransformOptions {
    int components = 6;
    double near_constant = 1e-6;
    double clip = 1.5;
};

/// Everything fitted on a task's training split.
struct TransformRecord {
    std::vector<double> median;
    std::vector<double> mean;
    std::vector<double> scale;  ///< population std, 1 where it is 0
    std::vector<double> min1;
    std::vector<double> max1;
    bool pca_applied = false;
    PcaResult pca;
    std::vector<double> min2;
    std::vector<double> max2;
    double near_constant = 1e-6;
    double clip = 1.5;

    [[nodiscard]] int output_dim() const noexcept;
};

/// Median impute, standardize, rescale to [-1, 1] by train min/max (near-constant
/// dims -> 0), PCA to `components`, and the same rescale on the projections.
/// PCA is skipped when the input already has `components` columns; fewer
/// columns is an error.
TransformRecord fit_transform_record(const FeatureMatrix &train, const TransformOptions &options);

/// Applies a fitted record. With `clip`, values are limited to +-record.clip
/// and the number of clipped entries is added to `*clipped`.
FeatureMatrix apply_transform(const TransformRecord &record, const FeatureMatrix &x, bool clip,
                              std::size_t *clipped = nullptr);

nlohmann::json to_json(const TransformRecord &record);
TransformRecord transform_from_json(const nlohmann::json &doc);

} // namespace qcstream::data
