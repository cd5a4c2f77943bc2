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
#include "qcstream/data/transform.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qcstream::data {

PcaResult pca_fit(const FeatureMatrix &x, int k) {
    if (k < 1 || x.rows() < k || x.cols() < k) {
        throw std::invalid_argument("pca_fit: need at least k rows and k columns (k = " +
                                    std::to_string(k) + ")");
    }
    if (x.rows() < 2) {
        throw std::invalid_argument("pca_fit: need at least two rows");
    }
    PcaResult r;
    r.mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - r.mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("pca_fit: eigendecomposition failed");
    }
    const Eigen::Index d = x.cols();
    // Eigen returns ascending eigenvalues.
    for (Eigen::Index i = d - 1; i >= 0; --i)
        r.eigenvalues.push_back(eig.eigenvalues()(i));
    const double top = std::max(r.eigenvalues.front(), 0.0);
    const double kth = r.eigenvalues[static_cast<std::size_t>(k - 1)];
    if (!(kth > 1e-12 * std::max(top, 1e-300)) || top == 0.0) {
        throw std::invalid_argument("pca_fit: covariance rank below " + std::to_string(k) +
                                    " (eigenvalue " + std::to_string(k) + " = " +
                                    std::to_string(kth) + "); reduce the component count");
    }
    r.basis.resize(d, k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - j);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < d; ++i)
            if (std::abs(v(i)) > std::abs(v(arg)))
                arg = i;
        if (v(arg) < 0.0)
            v = -v;
        r.basis.col(j) = v;
    }
    return r;
}

int TransformRecord::output_dim() const noexcept {
    return pca_applied ? static_cast<int>(pca.basis.cols()) : static_cast<int>(mean.size());
}

namespace {

void minmax_fit(const FeatureMatrix &x, std::vector<double> &lo, std::vector<double> &hi) {
    lo.resize(static_cast<std::size_t>(x.cols()));
    hi.resize(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        lo[static_cast<std::size_t>(j)] = x.col(j).minCoeff();
        hi[static_cast<std::size_t>(j)] = x.col(j).maxCoeff();
    }
}

void minmax_apply(FeatureMatrix &x, const std::vector<double> &lo, const std::vector<double> &hi,
                  double near_constant) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double range = hi[jj] - lo[jj];
        if (range < near_constant) {
            x.col(j).setZero();
        } else {
            x.col(j) = ((x.col(j).array() - lo[jj]) * (2.0 / range) - 1.0).matrix();
        }
    }
}

void impute_standardize(FeatureMatrix &x, const TransformRecord &r) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const auto jj = static_cast<std::size_t>(j);
            double &v = x(i, j);
            if (!std::isfinite(v))
                v = r.median[jj];
            v = (v - r.mean[jj]) / r.scale[jj];
        }
    }
}

double median_of(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double a) { return !std::isfinite(a); }), v.end());
    if (v.empty())
        return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1)
        return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

} // namespace

TransformRecord fit_transform_record(const FeatureMatrix &train, const TransformOptions &options) {
    if (train.rows() == 0) {
        throw std::invalid_argument("fit_transform: empty training split");
    }
    if (train.cols() < options.components) {
        throw std::invalid_argument("fit_transform: " + std::to_string(train.cols()) +
                                    " feature columns, need at least " +
                                    std::to_string(options.components));
    }
    TransformRecord r;
    r.near_constant = options.near_constant;
    r.clip = options.clip;
    const auto d = static_cast<std::size_t>(train.cols());
    r.median.resize(d);
    r.mean.resize(d);
    r.scale.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto col = train.col(static_cast<Eigen::Index>(j));
        r.median[j] = median_of(std::vector<double>(col.begin(), col.end()));
    }
    FeatureMatrix x = train;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            if (!std::isfinite(x(i, j)))
                x(i, j) = r.median[static_cast<std::size_t>(j)];
    for (std::size_t j = 0; j < d; ++j) {
        const auto col = x.col(static_cast<Eigen::Index>(j)).array();
        const double m = col.mean();
        const double sd = std::sqrt((col - m).square().mean());
        r.mean[j] = m;
        r.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            x(i, j) = (x(i, j) - r.mean[static_cast<std::size_t>(j)]) / r.scale[static_cast<std::size_t>(j)];
    minmax_fit(x, r.min1, r.max1);
    minmax_apply(x, r.min1, r.max1, r.near_constant);
    if (static_cast<int>(d) != options.components) {
        r.pca_applied = true;
        r.pca = pca_fit(x, options.components);
        FeatureMatrix z = (x.rowwise() - r.pca.mean) * r.pca.basis;
        minmax_fit(z, r.min2, r.max2);
    }
    return r;
}

FeatureMatrix apply_transform(const TransformRecord &r, const FeatureMatrix &x, bool clip,
                              std::size_t *clipped) {
    if (static_cast<std::size_t>(x.cols()) != r.mean.size()) {
        throw std::invalid_argument("apply_transform: column count mismatch");
    }
    FeatureMatrix y = x;
    impute_standardize(y, r);
    minmax_apply(y, r.min1, r.max1, r.near_constant);
    if (r.pca_applied) {
        FeatureMatrix z = (y.rowwise() - r.pca.mean) * r.pca.basis;
        minmax_apply(z, r.min2, r.max2, r.near_constant);
        y = std::move(z);
    }
    if (clip) {
        std::size_t n = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double &v = y.data()[i];
            if (v > r.clip || v < -r.clip) {
                v = std::clamp(v, -r.clip, r.clip);
                ++n;
            }
        }
        if (clipped != nullptr)
            *clipped += n;
    }
    return y;
}

nlohmann::json to_json(const TransformRecord &r) {
    nlohmann::json j{{"median", r.median}, {"mean", r.mean}, {"scale", r.scale},
                     {"min1", r.min1},     {"max1", r.max1}, {"pca_applied", r.pca_applied},
                     {"near_constant", r.near_constant}, {"clip", r.clip}};
    if (r.pca_applied) {
        j["pca_mean"] = std::vector<double>(r.pca.mean.data(), r.pca.mean.data() + r.pca.mean.size());
        std::vector<std::vector<double>> cols;
        for (Eigen::Index c = 0; c < r.pca.basis.cols(); ++c)
            cols.emplace_back(r.pca.basis.col(c).data(), r.pca.basis.col(c).data() + r.pca.basis.rows());
        j["pca_basis_columns"] = cols;
        j["pca_eigenvalues"] = r.pca.eigenvalues;
        j["min2"] = r.min2;
        j["max2"] = r.max2;
    }
    return j;
}

TransformRecord transform_from_json(const nlohmann::json &j) {
    TransformRecord r;
    r.median = j.at("median").get<std::vector<double>>();
    r.mean = j.at("mean").get<std::vector<double>>();
    r.scale = j.at("scale").get<std::vector<double>>();
    r.min1 = j.at("min1").get<std::vector<double>>();
    r.max1 = j.at("max1").get<std::vector<double>>();
    r.pca_applied = j.at("pca_applied").get<bool>();
    r.near_constant = j.at("near_constant").get<double>();
    r.clip = j.at("clip").get<double>();
    if (r.pca_applied) {
        const auto m = j.at("pca_mean").get<std::vector<double>>();
        r.pca.mean = Eigen::Map<const Eigen::RowVectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
        const auto cols = j.at("pca_basis_columns").get<std::vector<std::vector<double>>>();
        r.pca.basis.resize(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            r.pca.basis.col(static_cast<Eigen::Index>(c)) =
                Eigen::Map<const Eigen::VectorXd>(cols[c].data(), static_cast<Eigen::Index>(cols[c].size()));
        r.pca.eigenvalues = j.at("pca_eigenvalues").get<std::vector<double>>();
        r.min2 = j.at("min2").get<std::vector<double>>();
        r.max2 = j.at("max2").get<std::vector<double>>();
    }
    return r;
}

} // namespace qcstream::data
