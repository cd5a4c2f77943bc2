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
#include "qcstream/replay/gmm.hpp"

#include "qcstream/util/hash.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qcstream::replay {

namespace {

double log_gauss_diag(std::span<const double> x, const std::vector<double> &mean,
                      const std::vector<double> &var) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double r = x[j] - mean[j];
        s += std::log(2.0 * std::numbers::pi * var[j]) + r * r / var[j];
    }
    return -0.5 * s;
}

double log_sum_exp(std::span<const double> v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - m);
    return m + std::log(s);
}

} // namespace

double DiagonalGmm::log_likelihood(const FeatureMatrix &x) const {
    std::vector<double> lp(components());
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto row = row_span(x, i);
        for (std::size_t k = 0; k < components(); ++k)
            lp[k] = std::log(weights[k]) + log_gauss_diag(row, means[k], variances[k]);
        total += log_sum_exp(lp);
    }
    return total;
}

FeatureMatrix DiagonalGmm::sample(std::size_t n, util::Rng &rng) const {
    if (components() == 0) {
        throw std::logic_error("DiagonalGmm::sample: empty mixture");
    }
    const auto d = static_cast<Eigen::Index>(means.front().size());
    FeatureMatrix out(static_cast<Eigen::Index>(n), d);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = pick(rng);
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            out(static_cast<Eigen::Index>(i), j) =
                means[k][jj] + std::sqrt(variances[k][jj]) * gauss(rng);
        }
    }
    return out;
}

DiagonalGmm fit_gmm(const FeatureMatrix &x, const GmmOptions &options) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    const auto k_count = static_cast<std::size_t>(options.components);
    if (options.components < 1) {
        throw std::invalid_argument("fit_gmm: components must be >= 1");
    }
    if (n < k_count) {
        throw std::invalid_argument("fit_gmm: fewer rows than mixture components");
    }
    util::Rng rng(options.seed);

    // k-means++ seeding.
    std::vector<std::size_t> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(first(rng));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k_count) {
        const auto c = static_cast<Eigen::Index>(centers.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (x.row(static_cast<Eigen::Index>(i)) - x.row(c)).squaredNorm());
            total += d2[i];
        }
        if (total <= 0.0) {
            centers.push_back(first(rng));
            continue;
        }
        std::discrete_distribution<std::size_t> pick(d2.begin(), d2.end());
        centers.push_back(pick(rng));
    }

    const Eigen::RowVectorXd mean_all = x.colwise().mean();
    std::vector<double> var_all(d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        var_all[j] = std::max((x.col(jj).array() - mean_all(jj)).square().mean(),
                              options.variance_floor);
    }

    DiagonalGmm g;
    g.weights.assign(k_count, 1.0 / static_cast<double>(k_count));
    for (std::size_t k = 0; k < k_count; ++k) {
        const auto row = row_span(x, static_cast<Eigen::Index>(centers[k]));
        g.means.emplace_back(row.begin(), row.end());
        g.variances.push_back(var_all);
    }

    std::vector<double> resp(n * k_count);
    std::vector<double> lp(k_count);
    for (int it = 0; it < options.iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = row_span(x, static_cast<Eigen::Index>(i));
            for (std::size_t k = 0; k < k_count; ++k)
                lp[k] = std::log(g.weights[k]) + log_gauss_diag(row, g.means[k], g.variances[k]);
            const double lse = log_sum_exp(lp);
            for (std::size_t k = 0; k < k_count; ++k)
                resp[i * k_count + k] = std::exp(lp[k] - lse);
        }
        double wsum = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            double nk = 0.0;
            std::vector<double> mu(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k_count + k];
                nk += r;
                const auto row = row_span(x, static_cast<Eigen::Index>(i));
                for (std::size_t j = 0; j < d; ++j)
                    mu[j] += r * row[j];
            }
            if (nk <= 1e-12) {
                // Dead component: keep its previous mean and variance with a tiny weight.
                g.weights[k] = 1e-12;
                wsum += g.weights[k];
                continue;
            }
            for (auto &v : mu)
                v /= nk;
            std::vector<double> var(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k_count + k];
                const auto row = row_span(x, static_cast<Eigen::Index>(i));
                for (std::size_t j = 0; j < d; ++j)
                    var[j] += r * (row[j] - mu[j]) * (row[j] - mu[j]);
            }
            for (auto &v : var)
                v = std::max(v / nk, options.variance_floor);
            g.means[k] = std::move(mu);
            g.variances[k] = std::move(var);
            g.weights[k] = nk;
            wsum += nk;
        }
        for (auto &w : g.weights)
            w /= wsum;
    }
    return g;
}

namespace {

std::uint64_t gmm_digest(int task_id, const std::array<DiagonalGmm, 2> &mix) {
    util::Fnv1a h;
    h.update_value(task_id);
    for (const auto &g : mix) {
        h.update(std::span<const double>(g.weights));
        for (const auto &m : g.means)
            h.update(std::span<const double>(m));
        for (const auto &v : g.variances)
            h.update(std::span<const double>(v));
    }
    return h.digest();
}

nlohmann::json gmm_json(const DiagonalGmm &g) {
    return {{"weights", g.weights}, {"means", g.means}, {"variances", g.variances}};
}

DiagonalGmm gmm_from(const nlohmann::json &j) {
    DiagonalGmm g;
    g.weights = j.at("weights").get<std::vector<double>>();
    g.means = j.at("means").get<std::vector<std::vector<double>>>();
    g.variances = j.at("variances").get<std::vector<std::vector<double>>>();
    if (g.means.size() != g.weights.size() || g.variances.size() != g.weights.size()) {
        throw std::invalid_argument("gmm document: component count mismatch");
    }
    return g;
}

} // namespace

GmmReplaySource::GmmReplaySource(int task_id, std::array<DiagonalGmm, 2> mixtures,
                                 std::size_t support, double attack_fraction)
    : task_id_(task_id), mix_(std::move(mixtures)), support_(support),
      attack_fraction_(attack_fraction), checksum_(gmm_digest(task_id_, mix_)) {}

LabeledSet GmmReplaySource::synthesize(int condition, std::size_t n, std::uint64_t seed) const {
    if (n == 0) {
        throw std::invalid_argument("synthesize: n must be >= 1");
    }
    if (condition != 0 && condition != 1) {
        throw std::invalid_argument("synthesize: condition must be 0 or 1");
    }
    util::Rng rng(seed);
    LabeledSet out;
    out.x = mix_[static_cast<std::size_t>(condition)].sample(n, rng).cwiseMax(-1.5).cwiseMin(1.5);
    out.y.assign(n, condition);
    return out;
}

nlohmann::json GmmReplaySource::to_json() const {
    return {{"kind", kind()},
            {"task_id", task_id_},
            {"mixtures", {gmm_json(mix_[0]), gmm_json(mix_[1])}},
            {"support", support_},
            {"attack_fraction", attack_fraction_},
            {"checksum", util::to_hex(checksum_)}};
}

GmmReplaySource GmmReplaySource::from_json(const nlohmann::json &j) {
    if (j.value("kind", "") != "gmm") {
        throw std::invalid_argument("gmm document: unexpected kind");
    }
    GmmReplaySource s(j.at("task_id").get<int>(),
                      {gmm_from(j.at("mixtures").at(0)), gmm_from(j.at("mixtures").at(1))},
                      j.at("support").get<std::size_t>(), j.at("attack_fraction").get<double>());
    if (util::to_hex(s.checksum()) != j.at("checksum").get<std::string>()) {
        throw std::invalid_argument("gmm document: checksum mismatch");
    }
    return s;
}

GmmReplaySource fit_class_gmm(const LabeledSet &data, int task_id, const GmmOptions &options) {
    data.check();
    std::array<std::vector<std::size_t>, 2> rows;
    for (std::size_t i = 0; i < data.size(); ++i)
        rows[static_cast<std::size_t>(data.y[i])].push_back(i);
    std::array<DiagonalGmm, 2> mix;
    for (std::size_t c = 0; c < 2; ++c) {
        if (rows[c].empty()) {
            throw std::invalid_argument("fit_class_gmm: both classes must be present");
        }
        GmmOptions o = options;
        o.seed = util::derive_seed(options.seed, {c});
        mix[c] = fit_gmm(data.subset(rows[c]).x, o);
    }
    return GmmReplaySource(task_id, std::move(mix), data.size(),
                           static_cast<double>(rows[1].size()) / static_cast<double>(data.size()));
}

} // namespace qcstream::replay
