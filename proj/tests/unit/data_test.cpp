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

#include "qcstream/data/cache.hpp"
#include "qcstream/data/dataset.hpp"
#include "qcstream/data/phase_map.hpp"
#include "qcstream/data/stream.hpp"
#include "qcstream/data/table.hpp"
#include "qcstream/data/transform.hpp"
#include "qcstream/pipeline/oracle.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

namespace qcstream::data {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("qcstream-data-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(Splits, Counts) {
    const auto a = split_counts(100);
    EXPECT_EQ(a.train, 60u);
    EXPECT_EQ(a.val, 20u);
    EXPECT_EQ(a.test, 20u);
    const auto b = split_counts(103);
    EXPECT_EQ(b.train, 61u);
    EXPECT_EQ(b.val, 20u);
    EXPECT_EQ(b.test, 22u);
    for (std::size_t n = 0; n < 500; ++n) {
        const auto c = split_counts(n);
        EXPECT_EQ(c.train + c.val + c.test, n);
    }
    EXPECT_THROW(split_counts(10, 0.9, 0.2), std::invalid_argument);
}

TEST(Splits, NormalPoolIsDisjointAcrossTasksAndParts) {
    const auto spec = SynthSpec::named("default", 5);
    const auto table = synth_table(spec);
    const auto splits = synth_stream(spec, {5});
    ASSERT_EQ(splits.size(), 3u);
    std::set<std::size_t> seen;
    std::size_t normal_total = 0;
    for (const auto &s : splits) {
        EXPECT_EQ(s.phase, to_string(kAttackPhases[static_cast<std::size_t>(s.task_id)]));
        std::set<std::string> attack_labels;
        for (std::size_t p = 0; p < 3; ++p) {
            const auto &part = s.parts[p];
            const auto &rows = s.source_rows[p];
            ASSERT_EQ(rows.size(), part.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                EXPECT_EQ(part.x.row(static_cast<Eigen::Index>(i)), table.x.row(static_cast<Eigen::Index>(rows[i])));
                if (part.y[i] == 0) {
                    EXPECT_EQ(table.labels[rows[i]], "NORMAL");
                    EXPECT_TRUE(seen.insert(rows[i]).second) << "NORMAL row reused: " << rows[i];
                    ++normal_total;
                } else {
                    attack_labels.insert(table.labels[rows[i]]);
                }
            }
        }
        EXPECT_EQ(attack_labels.size(), 1u);
        const auto attacks = std::count(s.train().y.begin(), s.train().y.end(), 1);
        EXPECT_EQ(attacks, 300);
    }
    EXPECT_EQ(normal_total, 3000u);
}

TEST(Splits, SeedIsBitReproducible) {
    const auto spec = SynthSpec::named("default", 8);
    const auto a = synth_stream(spec, {8});
    const auto b = synth_stream(spec, {8});
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t p = 0; p < 3; ++p) {
            EXPECT_EQ(a[k].parts[p].x, b[k].parts[p].x);
            EXPECT_EQ(a[k].source_rows[p], b[k].source_rows[p]);
        }
    const auto c = synth_stream(spec, {9});
    EXPECT_NE(a[0].source_rows[0], c[0].source_rows[0]);
}

TEST(Transform, ConstantColumnIsZero) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    FeatureMatrix x(50, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x.data()[i] = g(rng);
    x.col(3).setConstant(7.0);
    const auto r = fit_transform_record(x, {});
    EXPECT_FALSE(r.pca_applied);
    const auto y = apply_transform(r, x, false);
    EXPECT_TRUE(y.col(3).isZero(0.0));
    for (Eigen::Index j = 0; j < 6; ++j) {
        if (j == 3)
            continue;
        EXPECT_DOUBLE_EQ(y.col(j).minCoeff(), -1.0);
        EXPECT_DOUBLE_EQ(y.col(j).maxCoeff(), 1.0);
    }
}

TEST(Transform, SymmetricStandardizedDataMapsExtremesToUnit) {
    FeatureMatrix x(4, 6);
    for (Eigen::Index j = 0; j < 6; ++j)
        x.col(j) << -1.0, 1.0, -1.0, 1.0;
    const auto r = fit_transform_record(x, {});
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_NEAR(r.mean[j], 0.0, 1e-15);
        EXPECT_NEAR(r.scale[j], 1.0, 1e-15);
    }
    EXPECT_TRUE(apply_transform(r, x, false).isApprox(x, 1e-15));
}

TEST(Transform, IdempotentGivenRecordAndClipsEvalRows) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    FeatureMatrix train(200, 10), eval(100, 10);
    for (Eigen::Index i = 0; i < train.size(); ++i)
        train.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < eval.size(); ++i)
        eval.data()[i] = 4.0 * g(rng);
    const auto r = fit_transform_record(train, {});
    ASSERT_TRUE(r.pca_applied);
    EXPECT_EQ(r.output_dim(), 6);
    const auto t1 = apply_transform(r, train, false);
    EXPECT_EQ(apply_transform(r, train, false), t1);
    EXPECT_GE(t1.minCoeff(), -1.0 - 1e-12);
    EXPECT_LE(t1.maxCoeff(), 1.0 + 1e-12);
    std::size_t clipped = 0;
    const auto e = apply_transform(r, eval, true, &clipped);
    EXPECT_GT(clipped, 0u);
    EXPECT_LE(e.maxCoeff(), 1.5);
    EXPECT_GE(e.minCoeff(), -1.5);
    const auto back = transform_from_json(to_json(r));
    EXPECT_EQ(apply_transform(back, eval, true), e);
}

TEST(Pca, RankSixReconstruction) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd latent(300, 6), mix(6, 10);
    for (Eigen::Index i = 0; i < latent.size(); ++i)
        latent.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < mix.size(); ++i)
        mix.data()[i] = g(rng);
    const FeatureMatrix x = latent * mix;
    const auto p = pca_fit(x, 6);
    const Eigen::MatrixXd c = x.rowwise() - p.mean;
    const Eigen::MatrixXd recon = c * p.basis * p.basis.transpose();
    EXPECT_LE((recon - c).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_THROW(pca_fit(x, 7), std::invalid_argument);
}

TEST(Pca, AnisotropicOrderingAndIdentities) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    const double sd[6] = {3.0, 2.0, 1.0, 0.7, 0.5, 0.3};
    FeatureMatrix x(10000, 6);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < 6; ++j)
            x(i, j) = sd[j] * g(rng);
    const auto p = pca_fit(x, 3);
    EXPECT_TRUE(std::is_sorted(p.eigenvalues.rbegin(), p.eigenvalues.rend()));
    const double cos_angle = std::abs(p.basis(0, 0));
    EXPECT_GT(cos_angle, std::cos(5.0 * std::numbers::pi / 180.0));
    EXPECT_LE((p.basis.transpose() * p.basis - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd c = x.rowwise() - p.mean;
    const double trace = (c.transpose() * c / double(x.rows() - 1)).trace();
    double sum = 0.0;
    for (double v : p.eigenvalues)
        sum += v;
    EXPECT_NEAR(sum, trace, 1e-10 * trace);
    for (Eigen::Index j = 0; j < 3; ++j) {
        Eigen::Index arg;
        p.basis.col(j).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(p.basis(arg, j), 0.0);
    }
}

TEST(Csv, DropsNonFiniteRowsAndTextColumns) {
    const std::string text = "a,proto,b,label\n"
                             "1,tcp,2,NORMAL\n"
                             "inf,udp,3,RECON_SCAN\n"
                             "4,tcp,-inf,NORMAL\n"
                             "5,udp,6,DOS_RESOURCE\n";
    const auto t = parse_csv(text, {});
    EXPECT_EQ(t.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.x.rows(), 2);
    EXPECT_EQ(t.labels, (std::vector<std::string>{"NORMAL", "DOS_RESOURCE"}));
    EXPECT_EQ(t.dropped_rows, 2u);
    EXPECT_EQ(t.x(1, 1), 6.0);

    const auto clean = parse_csv("a,b,label\n1,2,x\n3,4,y\n", {});
    EXPECT_EQ(clean.x.rows(), 2);
    EXPECT_EQ(clean.dropped_rows, 0u);
    EXPECT_THROW(parse_csv("a,b\n1,2\n", {}), std::invalid_argument);
}

TEST(Csv, UnswDropsMissingCategoryAndIdColumns) {
    const std::string text = "id,dur,attack_cat,label\n"
                             "1,0.5,Normal,0\n"
                             "2,0.7,,1\n"
                             "3,0.9,Exploits,1\n";
    CsvOptions o;
    o.kind = DatasetKind::kUnsw;
    const auto t = parse_csv(text, o);
    EXPECT_EQ(t.feature_names, (std::vector<std::string>{"dur"}));
    EXPECT_EQ(t.labels, (std::vector<std::string>{"Normal", "Exploits"}));
}

TEST(PhaseMaps, LookupAndHash) {
    const auto unsw = unsw_phase_map();
    EXPECT_EQ(unsw.lookup("DoS"), Phase::kDosResource);
    EXPECT_EQ(unsw.lookup(" reconnaissance "), Phase::kReconScan);
    EXPECT_THROW(unsw.lookup("Unknown"), std::invalid_argument);
    EXPECT_EQ(cicids_phase_map().lookup("Web Attack \xe2\x80\x93 XSS"), Phase::kIntrusionMalware);
    auto edited = PhaseMap::from_json(unsw.to_json());
    EXPECT_EQ(edited.hash(), unsw.hash());
    edited = PhaseMap("unsw");
    edited.add("Normal", Phase::kNormal);
    EXPECT_NE(edited.hash(), unsw.hash());
    EXPECT_THROW(edited.add("normal", Phase::kDosResource), std::invalid_argument);
}

TEST(PhaseMaps, TaskStreamFromTable) {
    RawTable t;
    t.feature_names = {"a"};
    const std::size_t n = 40;
    t.x.resize(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
        t.x(static_cast<Eigen::Index>(i), 0) = double(i);
        t.labels.push_back(i < 16 ? "Normal" : (i < 24 ? "DoS" : (i < 32 ? "Fuzzers" : "Worms")));
    }
    const auto s = build_task_stream(t, unsw_phase_map(), {1});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].phase, "RECON_SCAN");
    for (const auto &split : s)
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < split.parts[p].size(); ++i)
                if (split.parts[p].y[i] == 0)
                    EXPECT_LT(split.source_rows[p][i], 16u);
}

TEST(Cache, HitIdempotenceAndCorruption) {
    const auto root = scratch_dir("cache");
    DatasetSpec spec;
    spec.synthetic = "default";
    spec.seed = 3;
    const auto first = prepare_splits(spec, root.string());
    EXPECT_FALSE(first.hit);
    const auto second = prepare_splits(spec, root.string());
    EXPECT_TRUE(second.hit);
    EXPECT_EQ(second.manifest_hash, first.manifest_hash);
    for (std::size_t k = 0; k < first.splits.size(); ++k) {
        for (std::size_t p = 0; p < 3; ++p) {
            EXPECT_EQ(second.splits[k].parts[p].x, first.splits[k].parts[p].x);
            EXPECT_EQ(second.splits[k].parts[p].y, first.splits[k].parts[p].y);
        }
        EXPECT_TRUE(second.splits[k].transformed);
        EXPECT_EQ(apply_transform(second.splits[k].transform, second.splits[k].train().x, false),
                  apply_transform(first.splits[k].transform, first.splits[k].train().x, false));
    }

    {
        std::ofstream out(fs::path(first.directory) / "task_1_val.csv", std::ios::app);
        out << "0,0,0,0,0,0,1\n";
    }
    try {
        (void)prepare_splits(spec, root.string());
        FAIL() << "corrupted cache accepted";
    } catch (const std::runtime_error &e) {
        EXPECT_NE(std::string(e.what()).find("corrupted"), std::string::npos);
    }
    fs::remove_all(root);
}

TEST(Cache, PhaseMapChangeGivesNewDescriptor) {
    const auto root = scratch_dir("phase");
    const auto csv = root / "flows.csv";
    {
        std::ofstream out(csv);
        out << "a,b,c,d,e,f,g,label\n";
        for (int i = 0; i < 5; ++i)
            out << i << ",1,2,3,4,5,6,NORMAL\n";
    }
    const auto map_path = root / "map.json";
    auto write_map = [&](const std::string &phase) {
        std::ofstream out(map_path);
        out << nlohmann::json{{"dataset", "custom"},
                              {"phases", {{"NORMAL", {"NORMAL"}}, {phase, {"scan"}}}}}
                   .dump();
    };
    DatasetSpec spec;
    spec.path = csv.string();
    spec.phase_map_path = map_path.string();
    write_map("RECON_SCAN");
    const auto a = descriptor_hash(dataset_descriptor(spec));
    EXPECT_EQ(descriptor_hash(dataset_descriptor(spec)), a);
    write_map("DOS_RESOURCE");
    EXPECT_NE(descriptor_hash(dataset_descriptor(spec)), a);
    fs::remove_all(root);
}

TEST(Synthetic, SeparableSpecHasPerfectOracle) {
    DatasetSpec spec;
    spec.synthetic = "separable";
    const auto splits = build_splits(spec);
    for (const auto &s : splits)
        EXPECT_EQ(pipeline::oracle_attack_f1(s.train(), s.test()), 1.0) << "task " << s.task_id;
}

TEST(Synthetic, ValidationAndNames) {
    EXPECT_THROW(SynthSpec::named("wavy"), std::invalid_argument);
    auto s = SynthSpec::named("no-shift");
    EXPECT_EQ(s.attack_means[0], s.attack_means[2]);
    s.attack_covs[1](0, 1) = 0.5;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

} // namespace
} // namespace qcstream::data
