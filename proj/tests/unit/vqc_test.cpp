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

#include "qcstream/vqc/loss.hpp"
#include "qcstream/vqc/model.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace qcstream::vqc {
namespace {

const Execution kExact{sim::NoiseParams::none(), true, 2048};

VqcModel random_model(int q, int l, int d, std::uint64_t seed) {
    auto m = VqcModel::create(q, l, d, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> p(m.params().begin(), m.params().end());
    for (auto &v : p)
        v = u(rng);
    m.set_params(p);
    return m;
}

std::vector<double> random_input(int d, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (auto &v : x)
        v = u(rng);
    return x;
}

TEST(Conditioning, IdentityKeepsInRangeInputs) {
    const auto m = VqcModel::create(6, 1, 6, 0);
    const std::vector<double> x{0.1, -0.9, 1.0, -1.0, 0.0, 0.5};
    EXPECT_EQ(condition_input(m, x), x);
}

TEST(Conditioning, ClipsToUnitBox) {
    const auto m = VqcModel::create(6, 1, 6, 0);
    const auto c = condition_input(m, std::vector<double>{2.0, -3.0, 0.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(c, (std::vector<double>{1.0, -1.0, 0.0, 0.0, 0.0, 0.0}));
}

TEST(Conditioning, ScaledIdentity) {
    auto m = VqcModel::create(6, 1, 6, 0);
    std::vector<double> w(36, 0.0);
    for (int i = 0; i < 6; ++i)
        w[static_cast<std::size_t>(i * 7)] = 2.0;
    m.set_conditioning(w);
    const auto c = condition_input(m, std::vector<double>(6, 0.3));
    for (double v : c)
        EXPECT_DOUBLE_EQ(v, 0.6);
}

TEST(Conditioning, TruncatedIdentityWhenDimensionsDiffer) {
    const auto wide = VqcModel::create(3, 1, 5, 0);
    EXPECT_EQ(condition_input(wide, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}),
              (std::vector<double>{0.1, 0.2, 0.3}));
    const auto narrow = VqcModel::create(4, 1, 2, 0);
    EXPECT_EQ(condition_input(narrow, std::vector<double>{0.1, 0.2}),
              (std::vector<double>{0.1, 0.2, 0.0, 0.0}));
}

TEST(Conditioning, OutputAlwaysInUnitBox) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 5.0);
    for (int t = 0; t < 50; ++t) {
        const auto m = random_model(4, 1, 5, static_cast<std::uint64_t>(t));
        std::vector<double> x(5);
        for (auto &v : x)
            v = g(rng);
        for (double v : condition_input(m, x)) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Readout, ZeroWeightsGiveHalf) {
    auto m = random_model(4, 2, 4, 3);
    m.set_readout(std::vector<double>(4, 0.0), 0.0, 0.7);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 5; ++i)
        EXPECT_DOUBLE_EQ(predict_proba(m, random_input(4, rng), kExact), 0.5);
}

TEST(Readout, BiasOnly) {
    auto m = random_model(4, 2, 4, 3);
    m.set_readout(std::vector<double>(4, 0.0), 1.0, 0.0);
    std::mt19937_64 rng(2);
    EXPECT_NEAR(predict_proba(m, random_input(4, rng), kExact), 1.0 / (1.0 + std::exp(1.0)), 1e-15);
    EXPECT_NEAR(1.0 / (1.0 + std::exp(1.0)), 0.2689, 1e-4);
}

TEST(Readout, GroundStateScore) {
    auto m = VqcModel::create(3, 2, 3, 0);
    m.set_theta(std::vector<double>(12, 0.0));
    m.set_readout(std::vector<double>{0.2, 0.5, -0.1}, 0.3, std::log(2.0));
    const double expect = sigmoid(2.0 * (0.2 + 0.5 - 0.1 - 0.3));
    EXPECT_NEAR(predict_proba(m, std::vector<double>(3, 0.0), kExact), expect, 1e-12);
}

TEST(Readout, ScaleReparametrizationLeavesProbabilityUnchanged) {
    std::mt19937_64 rng(4);
    const auto m = random_model(4, 2, 4, 5);
    const double c = 3.7;
    std::vector<double> w(m.readout().begin(), m.readout().end());
    for (auto &v : w)
        v *= c;
    auto scaled = m;
    scaled.set_readout(w, m.bias() * c, m.tau_raw() - std::log(c));
    for (int i = 0; i < 10; ++i) {
        const auto x = random_input(4, rng);
        EXPECT_NEAR(predict_proba(m, x, kExact), predict_proba(scaled, x, kExact), 1e-12);
    }
}

TEST(Readout, MonotoneInScore) {
    auto m = random_model(3, 1, 3, 6);
    const std::vector<double> x{0.2, -0.3, 0.8};
    double prev = -1.0;
    for (double b = 2.0; b >= -2.0; b -= 0.25) {
        m.set_readout(std::vector<double>(m.readout().begin(), m.readout().end()), b, m.tau_raw());
        const double p = predict_proba(m, x, kExact);
        EXPECT_GT(p, prev);
        prev = p;
    }
}

TEST(Readout, ExactModeIsDeterministic) {
    const auto m = random_model(4, 2, 4, 7);
    const Execution noisy{sim::NoiseParams::nisq_defaults(), true, 2048};
    const std::vector<double> x{0.1, 0.2, -0.4, 0.9};
    EXPECT_EQ(predict_proba(m, x, noisy, 1), predict_proba(m, x, noisy, 2));
}

TEST(Readout, ShotModeConvergesToExact) {
    const auto m = random_model(3, 2, 3, 8);
    const std::vector<double> x{0.3, -0.6, 0.1};
    const Execution exact{sim::NoiseParams::nisq_defaults(), true, 2048};
    const Execution shots{sim::NoiseParams::nisq_defaults(), false, 200000};
    const auto a = forward(m, x, exact);
    const auto b = forward(m, x, shots, 17);
    for (std::size_t i = 0; i < a.z.size(); ++i)
        EXPECT_NEAR(a.z[i], b.z[i], 0.01);
}

TEST(Model, JsonRoundTrip) {
    const auto m = random_model(4, 3, 5, 9);
    const auto back = model_from_json(to_json(m));
    ASSERT_EQ(back.num_params(), m.num_params());
    for (std::size_t i = 0; i < m.num_params(); ++i)
        EXPECT_EQ(back.params()[i], m.params()[i]);
    EXPECT_EQ(back.input_dim(), 5);
}

TEST(Model, InitialValues) {
    const auto m = VqcModel::create(6, 3, 6, 11);
    EXPECT_EQ(m.num_params(), 36u + 36u + 6u + 2u);
    for (double t : m.theta()) {
        EXPECT_GE(t, -0.1);
        EXPECT_LE(t, 0.1);
    }
    for (double w : m.readout())
        EXPECT_DOUBLE_EQ(w, 1.0 / 6.0);
    EXPECT_EQ(m.bias(), 0.0);
    EXPECT_EQ(m.tau(), 1.0);
    EXPECT_THROW(VqcModel::create(6, 3, 6, 0).with_params(std::vector<double>(3, 0.0)),
                 std::invalid_argument);
}

TEST(Loss, PerfectPredictionIsNearZero) {
    LossConfig cfg;
    EXPECT_LE(sample_loss(1.0, 1, cfg), 1e-6);
    EXPECT_LE(sample_loss(0.0, 0, cfg), 1e-6);
    cfg.kind = LossKind::kFocal;
    EXPECT_LE(sample_loss(1.0, 1, cfg), 1e-6);
}

TEST(Loss, HalfProbabilityIsLog2) {
    LossConfig cfg;
    EXPECT_NEAR(sample_loss(0.5, 1, cfg), std::log(2.0), 1e-15);
}

TEST(Loss, FocalWithoutFocusingIsScaledBce) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    LossConfig bce;
    bce.w0 = 0.7;
    bce.w1 = 1.9;
    LossConfig focal = bce;
    focal.kind = LossKind::kFocal;
    focal.gamma = 0.0;
    focal.alpha = bce.w1 / (bce.w0 + bce.w1);
    std::vector<double> p(64);
    std::vector<int> y(64);
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = u(rng);
        y[i] = static_cast<int>(rng() % 2);
    }
    EXPECT_NEAR(mean_loss(p, y, focal) * (bce.w0 + bce.w1), mean_loss(p, y, bce), 1e-10);
}

TEST(Loss, LogitDerivativeMatchesFiniteDifference) {
    for (auto kind : {LossKind::kWeightedBce, LossKind::kFocal}) {
        LossConfig cfg;
        cfg.kind = kind;
        cfg.w0 = 0.8;
        cfg.w1 = 1.2;
        cfg.alpha = 0.3;
        for (double z : {-3.0, -0.4, 0.0, 1.3, 4.0}) {
            for (int y : {0, 1}) {
                const double h = 1e-6;
                const double fd =
                    (sample_loss(sigmoid(z + h), y, cfg) - sample_loss(sigmoid(z - h), y, cfg)) / (2 * h);
                EXPECT_NEAR(dloss_dlogit(z, y, cfg), fd, 1e-7);
            }
        }
    }
}

TEST(Loss, SampleWeights) {
    LossConfig cfg;
    const std::vector<double> p{0.2, 0.9};
    const std::vector<int> y{1, 1};
    const double a = sample_loss(0.2, 1, cfg);
    const double b = sample_loss(0.9, 1, cfg);
    EXPECT_NEAR(mean_loss(p, y, cfg, std::vector<double>{1.0, 3.0}), (a + 3 * b) / 4, 1e-15);
    EXPECT_THROW(mean_loss(p, y, cfg, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(ClassWeights, BalancedIsSymmetric) {
    std::vector<int> y(100, 0);
    std::fill(y.begin(), y.begin() + 50, 1);
    const auto cw = class_weights(y, WeightStrategy::kAuto);
    EXPECT_DOUBLE_EQ(cw.w0, cw.w1);
    EXPECT_FALSE(cw.use_focal);
}

TEST(ClassWeights, SqrtBoostFormula) {
    std::vector<int> y(1000, 0);
    std::fill(y.begin(), y.begin() + 100, 1);
    const auto cw = class_weights(y, WeightStrategy::kSqrtBoost);
    const double w0 = std::sqrt(1000.0 / 1800.0);
    const double w1 = 1.5 * std::sqrt(1000.0 / 200.0);
    const double mean = (w0 + w1) / 2;
    EXPECT_NEAR(cw.w0, w0 / mean, 1e-12);
    EXPECT_NEAR(cw.w1, w1 / mean, 1e-12);
    EXPECT_NEAR((cw.w0 + cw.w1) / 2, 1.0, 1e-12);
}

TEST(ClassWeights, AutoSwitchesToFocalAboveThreshold) {
    std::vector<int> mild(300, 0);
    std::fill(mild.begin(), mild.begin() + 100, 1);
    EXPECT_FALSE(class_weights(mild, WeightStrategy::kAuto).use_focal);
    std::vector<int> skewed(1000, 0);
    std::fill(skewed.begin(), skewed.begin() + 100, 1);
    const auto cw = class_weights(skewed, WeightStrategy::kAuto);
    EXPECT_TRUE(cw.use_focal);
    EXPECT_NEAR(cw.focal_alpha, 0.9, 1e-15);
    EXPECT_EQ(make_loss_config(cw).kind, LossKind::kFocal);
    EXPECT_THROW(class_weights(std::vector<int>(5, 1), WeightStrategy::kAuto), std::invalid_argument);
}

TEST(ReadoutGradient, MatchesFiniteDifference) {
    std::mt19937_64 rng(13);
    for (auto kind : {LossKind::kWeightedBce, LossKind::kFocal}) {
        const auto m = random_model(4, 2, 4, 14);
        LossConfig cfg;
        cfg.kind = kind;
        cfg.w0 = 0.6;
        cfg.w1 = 1.4;
        cfg.alpha = 0.25;
        LabeledSet batch;
        batch.x.resize(16, 4);
        for (Eigen::Index r = 0; r < 16; ++r) {
            const auto x = random_input(4, rng);
            for (Eigen::Index c = 0; c < 4; ++c)
                batch.x(r, c) = x[static_cast<std::size_t>(c)];
            batch.y.push_back(static_cast<int>(r % 2));
        }
        std::vector<Forward> fw;
        for (std::size_t i = 0; i < batch.size(); ++i)
            fw.push_back(forward(m, batch.row(i), kExact));
        const auto g = readout_gradient(m, fw, batch.y, cfg);
        const auto &lay = m.layout();
        ASSERT_EQ(g.size(), lay.readout_count + 2);
        std::vector<double> p(m.params().begin(), m.params().end());
        for (std::size_t j = 0; j < g.size(); ++j) {
            const std::size_t idx = lay.readout + j;
            const double h = 1e-6;
            auto up = p, dn = p;
            up[idx] += h;
            dn[idx] -= h;
            const double fd = (supervised_loss(m.with_params(up), batch, cfg, kExact) -
                               supervised_loss(m.with_params(dn), batch, cfg, kExact)) /
                              (2 * h);
            EXPECT_NEAR(g[j], fd, 1e-6);
        }
    }
}

} // namespace
} // namespace qcstream::vqc
