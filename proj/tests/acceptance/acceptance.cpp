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

// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include "qcstream/data/dataset.hpp"
#include "qcstream/data/stream.hpp"
#include "qcstream/data/transform.hpp"
#include "qcstream/metrics/metrics.hpp"
#include "qcstream/optim/spsa.hpp"
#include "qcstream/pipeline/artifacts.hpp"
#include "qcstream/pipeline/config.hpp"
#include "qcstream/pipeline/objective.hpp"
#include "qcstream/pipeline/runner.hpp"
#include "qcstream/replay/generator.hpp"
#include "qcstream/sim/circuit.hpp"
#include "qcstream/sim/state.hpp"
#include "qcstream/stability/qfish.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace qcstream;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::vector<std::string> failures;
    std::string detail;

    void check(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            failures.push_back(what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Simulator physics.
Outcome simulator_physics() {
    using namespace sim;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int q = 1 + trial % 6;
        const bool noisy = trial % 2 == 1;
        auto s = QuantumState::zero(q, noisy ? QuantumState::Mode::kMixed : QuantumState::Mode::kPure);
        const NoiseParams n = noisy ? NoiseParams{0.2 * unit(rng), 0.2 * unit(rng), 0.0, true} : NoiseParams::none();
        for (int i = 0; i < 10; ++i) {
            const int a = static_cast<int>(rng() % static_cast<unsigned>(q));
            GateOp g = rng() % 2 ? GateOp::ry(a, angle(rng)) : GateOp::rz(a, angle(rng));
            if (q > 1 && rng() % 3 == 0)
                g = GateOp::cnot(a, (a + 1 + static_cast<int>(rng() % static_cast<unsigned>(q - 1))) % q);
            s = apply_gate(std::move(s), g, n);
        }
        worst = std::max(worst, std::abs(s.trace() - 1.0));
    }
    out.check(worst <= 1e-12, fmt::format("trace error {:.3g}", worst));

    double cos_err = 0.0;
    for (int k = 0; k <= 64; ++k) {
        const double theta = -kPi + 2.0 * kPi * k / 64.0;
        for (auto mode : {QuantumState::Mode::kPure, QuantumState::Mode::kMixed}) {
            const auto s = apply_gate(QuantumState::zero(1, mode), GateOp::ry(0, theta), NoiseParams::none());
            cos_err = std::max(cos_err, std::abs(expectation_z(s, 0, NoiseParams::none()) - std::cos(theta)));
        }
    }
    out.check(cos_err <= 1e-12, fmt::format("RY cosine error {:.3g}", cos_err));

    double dep = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto s = QuantumState::zero(3, QuantumState::Mode::kMixed);
        for (int i = 0; i < 6; ++i) {
            s.apply_unitary(GateOp::ry(i % 3, angle(rng)));
            s.apply_unitary(GateOp::cnot(i % 3, (i + 1) % 3));
        }
        s.depolarize(trial % 3, 1.0);
        dep = std::max(dep, std::abs(s.z_expectation(trial % 3)));
    }
    out.check(dep <= 1e-12, fmt::format("depolarized <Z> {:.3g}", dep));
    const double secs = seconds_since(t0);
    out.check(secs < 30.0, fmt::format("runtime {:.1f}s", secs));
    out.detail = fmt::format("10^4 sequences, max |tr-1| {:.2g}, cos err {:.2g}, p=1 <Z> {:.2g}, {:.1f}s",
                             worst, cos_err, dep, secs);
    return out;
}

// 2. Gradients.
Outcome gradient_suite() {
    using namespace sim;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int q = 1 + trial % 4;
        const int l = 1 + (trial / 4) % 3;
        const auto spec = CircuitSpec::reuploading(q, l);
        std::vector<double> p(spec.param_count()), in(static_cast<std::size_t>(q)), w(in.size());
        for (auto &v : p)
            v = angle(rng);
        for (auto &v : in)
            v = angle(rng);
        for (auto &v : w)
            v = angle(rng);
        const StateReadout f = [&](const QuantumState &s) {
            const auto z = expectations_z(s, NoiseParams::none());
            double acc = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i)
                acc += w[i] * z[i];
            return acc;
        };
        GradientOptions fd;
        fd.method = GradientMethod::kFiniteDifference;
        const auto a = circuit_gradient(spec, p, in, NoiseParams::none(), f, {});
        const auto b = circuit_gradient(spec, p, in, NoiseParams::none(), f, fd);
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    out.check(worst <= 1e-6, fmt::format("parameter-shift vs FD {:.3g}", worst));

    // Readout block of the composite loss, with replay and a stored anchor block.
    auto model = vqc::VqcModel::create(6, 3, 6, 7);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    auto make_set = [&](std::size_t n) {
        LabeledSet s;
        s.x.resize(static_cast<Eigen::Index>(n), 6);
        for (Eigen::Index i = 0; i < s.x.size(); ++i)
            s.x.data()[i] = u(rng);
        for (std::size_t i = 0; i < n; ++i)
            s.y.push_back(static_cast<int>(i % 3 == 0));
        return s;
    };
    const auto real = make_set(24);
    const auto rep = make_set(8);
    const auto anchors = make_set(6);
    pipeline::CompositeOptions o;
    o.exec.noise = NoiseParams::nisq_defaults();
    o.loss.w1 = 1.7;
    std::vector<double> p(model.params().begin(), model.params().end());
    const auto &layout = model.layout();
    for (std::size_t i = layout.readout; i < p.size(); ++i)
        p[i] += 0.2 * u(rng);
    model.set_params(p);
    stability::AnchorMemory mem;
    stability::TaskAnchors ta;
    ta.inputs = anchors.x;
    ta.labels = anchors.y;
    auto star = p;
    for (auto &v : star)
        v += 0.1 * u(rng);
    ta.snapshot_params = star;
    const auto outputs = pipeline::model_outputs(model, o.exec);
    for (std::size_t i = 0; i < anchors.size(); ++i)
        ta.snapshot_outputs.push_back(outputs(star, anchors.row(i)));
    ta.sensitivity.assign(p.size(), 0.3);
    mem.append(ta);
    const auto g = pipeline::readout_composite_gradient(model, real, rep, mem, o);
    double ro_worst = 0.0;
    const double h = 1e-6;
    for (std::size_t j = 0; j < g.size(); ++j) {
        auto q = p;
        q[layout.readout + j] += h;
        const double fp = pipeline::composite_loss(model.with_params(q), real, rep, mem, o).total;
        q[layout.readout + j] -= 2 * h;
        const double fm = pipeline::composite_loss(model.with_params(q), real, rep, mem, o).total;
        ro_worst = std::max(ro_worst, std::abs(g[j] - (fp - fm) / (2 * h)));
    }
    out.check(ro_worst <= 1e-6, fmt::format("readout gradient vs FD {:.3g}", ro_worst));
    const double secs = seconds_since(t0);
    out.check(secs < 120.0, fmt::format("runtime {:.1f}s", secs));
    out.detail = fmt::format("50 circuits PS vs FD {:.2g}, readout block vs FD {:.2g}, {:.1f}s", worst,
                             ro_worst, secs);
    return out;
}

// 3. Q-FISH.
Outcome qfish_suite() {
    Outcome out;
    const auto spec = sim::CircuitSpec::reuploading(1, 1);
    const stability::ScalarFn f = [&](std::span<const double> p, std::span<const double>) {
        return sim::expectation_z(sim::run_circuit(spec, p, std::vector<double>{0.0}, sim::NoiseParams::none()), 0,
                                  sim::NoiseParams::none());
    };
    FeatureMatrix anchor(1, 1);
    anchor << 0.0;
    double est_err = 0.0;
    for (double theta : {0.3, 0.7, 1.2, 2.0}) {
        const auto fhat = stability::estimate_sensitivity(f, std::vector<double>{theta, 0.0}, anchor, 1e-3);
        est_err = std::max(est_err, std::abs(fhat[0] - std::pow(std::sin(theta), 2)));
    }
    out.check(est_err <= 1e-4, fmt::format("sensitivity error {:.3g}", est_err));
    out.check(stability::fidelity_proxy(0.4, 0.4) == 1.0 && stability::fidelity_proxy(1.0, 0.0) == 0.5 &&
                  stability::fidelity_proxy(2.0, 0.0) == 0.0,
              "fidelity proxy hand values");

    const stability::OutputFn frozen = [](std::span<const double>, std::span<const double>) {
        return stability::AnchorOutput{0.25, 0.6};
    };
    stability::AnchorMemory mem;
    stability::TaskAnchors t;
    t.inputs = anchor;
    t.labels = {0};
    t.snapshot_params = {1.0, 1.0};
    t.snapshot_outputs = {frozen(t.snapshot_params, row_span(anchor, 0))};
    t.sensitivity = {1.0, 0.0};
    mem.append(t);
    stability::QfishConfig cfg;
    cfg.lambda_qfi = 0.25;
    cfg.lambda_fid = 0.08;
    const double at_snapshot = stability::regularizer(std::vector<double>{1.0, 1.0}, mem, cfg, frozen);
    const double hand = stability::regularizer(std::vector<double>{1.2, 6.0}, mem, cfg, frozen);
    out.check(at_snapshot == 0.0, fmt::format("penalty at snapshot {:.3g}", at_snapshot));
    out.check(std::abs(hand - 0.01) <= 1e-12, fmt::format("hand example {:.17g}", hand));
    out.detail = fmt::format("sin^2 error {:.2g}, proxy 1/0.5/0, penalty {} at snapshot, hand example {:.15g}",
                             est_err, at_snapshot, hand);
    return out;
}

// 4. Metrics.
double loop_f1(const std::vector<int> &p, const std::vector<int> &y, int pos) {
    long tp = 0, pp = 0, ap = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        pp += p[i] == pos;
        ap += y[i] == pos;
        tp += p[i] == pos && y[i] == pos;
    }
    const double pr = pp ? double(tp) / double(pp) : 0.0;
    const double rc = ap ? double(tp) / double(ap) : 0.0;
    return pr + rc == 0.0 ? 0.0 : 2.0 * pr * rc / (pr + rc);
}

Outcome metrics_suite() {
    Outcome out;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int t = 2 + trial % 6;
        metrics::RMatrix r(t);
        std::vector<std::vector<double>> v(static_cast<std::size_t>(t), std::vector<double>(static_cast<std::size_t>(t), 0.0));
        std::vector<double> b(static_cast<std::size_t>(t)), oracle(static_cast<std::size_t>(t));
        for (int row = 0; row < t; ++row)
            for (int k = 0; k <= std::min(row + 1, t - 1); ++k) {
                v[row][k] = u(rng);
                r.set(row, k, v[row][k]);
            }
        for (auto &x : b)
            x = u(rng);
        for (auto &x : oracle)
            x = u(rng);
        double f = 0.0, w = 0.0, fw = 0.0, in = 0.0;
        for (int k = 0; k <= t - 2; ++k) {
            double m = v[k][k];
            for (int row = k + 1; row <= t - 1; ++row)
                m = std::max(m, v[row][k]);
            f += m - v[t - 1][k];
            w += v[t - 1][k] - v[k][k];
        }
        for (int k = 1; k <= t - 1; ++k)
            fw += v[k - 1][k] - b[k];
        for (int k = 0; k < t; ++k)
            in += oracle[k] - v[k][k];
        worst = std::max({worst, std::abs(metrics::forgetting(r) - f / (t - 1)),
                          std::abs(metrics::bwt(r) - w / (t - 1)), std::abs(metrics::fwt(r, b) - fw / (t - 1)),
                          std::abs(metrics::intransigence(r, oracle) - in / t)});
    }
    out.check(worst <= 1e-12, fmt::format("R-matrix summaries {:.3g}", worst));

    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 80;
        std::bernoulli_distribution coin(u(rng));
        std::vector<int> p(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = coin(rng);
            y[i] = coin(rng);
        }
        const auto prf = metrics::attack_prf(metrics::confusion(p, y));
        if (prf.f1 != loop_f1(p, y, 1) || metrics::f1_macro(p, y) != 0.5 * (loop_f1(p, y, 1) + loop_f1(p, y, 0)))
            ++mismatches;
    }
    out.check(mismatches == 0, fmt::format("{} prediction-set mismatches", mismatches));

    metrics::RMatrix hand(3);
    hand.set(0, 0, 0.9);
    hand.set(1, 0, 0.8);
    hand.set(1, 1, 0.95);
    hand.set(2, 0, 0.7);
    hand.set(2, 1, 0.9);
    hand.set(2, 2, 0.92);
    const double f = metrics::forgetting(hand);
    const double b = metrics::bwt(hand);
    out.check(std::abs(f - 0.125) <= 1e-15 && std::abs(b + 0.125) <= 1e-15,
              fmt::format("hand example forgetting {:.17g} bwt {:.17g}", f, b));
    out.detail = fmt::format("1000 R matrices max diff {:.2g}, 1000 prediction sets exact, hand forgetting {:.6g} bwt {:.6g}",
                             worst, f, b);
    return out;
}

// 5. Replay.
Outcome replay_suite(const fs::path &work) {
    Outcome out;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> target(6), x0(6);
    for (auto &v : target)
        v = u(rng);
    for (auto &v : x0)
        v = u(rng);
    optim::SpsaMinimizeOptions so;
    so.max_iters = 300;
    so.seed = 11;
    const auto bowl = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += (x[i] - target[i]) * (x[i] - target[i]);
        return s;
    };
    const auto res = optim::spsa_minimize(bowl, x0, so);
    out.check(res.best_value <= 1e-2, fmt::format("SPSA bowl {:.3g}", res.best_value));

    replay::GeneratorSnapshot::Fields fields;
    fields.num_qubits = 6;
    fields.num_layers = 2;
    for (int c = 0; c < 2; ++c) {
        fields.phi[c].resize(24);
        for (auto &v : fields.phi[c])
            v = kPi * u(rng);
        fields.mu[c].assign(6, 0.0);
    }
    fields.support = 10;
    auto exact_fields = fields;
    const replay::GeneratorSnapshot exact(exact_fields);
    const auto center = exact.prototype_output(1);
    const auto same = exact.synthesize(1, 50, 3);
    bool identical = true;
    for (Eigen::Index i = 0; i < same.x.rows(); ++i)
        for (Eigen::Index j = 0; j < same.x.cols(); ++j)
            identical = identical && same.x(i, j) == center[static_cast<std::size_t>(j)];
    out.check(identical, "sigma = 0 sample differs from the prototype output");

    fields.sigma = {0.1, 0.1};
    const replay::GeneratorSnapshot spread(fields);
    const std::size_t n = 10000;
    const auto draws = spread.synthesize(0, n, 4);
    const auto c0 = spread.prototype_output(0);
    const Eigen::RowVectorXd mean = draws.x.colwise().mean();
    double worst = 0.0;
    for (std::size_t j = 0; j < c0.size(); ++j)
        worst = std::max(worst, std::abs(mean(static_cast<Eigen::Index>(j)) - c0[j]));
    const double bound = 3.0 * 0.1 / std::sqrt(static_cast<double>(n));
    out.check(worst <= bound, fmt::format("sample mean off by {:.3g} (bound {:.3g})", worst, bound));

    // Generators frozen during a stream keep their serialized form and checksum.
    auto cfg = pipeline::ExperimentConfig{};
    cfg.group = pipeline::Group::kFullGradient;
    cfg.seed = 5;
    cfg.epochs = 2;
    const auto resolved = pipeline::resolve(cfg);
    data::DatasetSpec ds;
    ds.synthetic = "default";
    ds.seed = cfg.seed;
    const auto splits = data::prepare_splits(ds, (work / "cache").string()).splits;
    pipeline::PersistentState state(vqc::VqcModel::create(6, 3, 6, 5), static_cast<int>(splits.size()));
    std::vector<std::string> frozen_docs;
    std::vector<std::uint64_t> frozen_sums;
    std::vector<pipeline::CurvePoint> curves;
    std::vector<const LabeledSet *> seen;
    for (const auto &s : splits) {
        seen.push_back(&s.val());
        const auto report = pipeline::train_task(state, s, resolved, seen, curves);
        frozen_docs.push_back(state.generators.back()->to_json().dump());
        frozen_sums.push_back(*report.generator_checksum);
    }
    bool unchanged = true;
    for (std::size_t k = 0; k < state.generators.size(); ++k) {
        const auto *g = dynamic_cast<const replay::GeneratorSnapshot *>(state.generators[k].get());
        unchanged = unchanged && g != nullptr && g->verify() && g->checksum() == frozen_sums[k] &&
                    g->to_json().dump() == frozen_docs[k];
    }
    out.check(unchanged && state.generators.size() == splits.size(), "generator snapshot changed after freezing");
    out.detail = fmt::format("bowl {:.2g} in 300 iterations, sigma=0 exact, mean err {:.2g} <= {:.2g}, {} snapshots unchanged",
                             res.best_value, worst, bound, state.generators.size());
    return out;
}

// 6. Protocol.
Outcome protocol_suite(const fs::path &work) {
    Outcome out;
    const auto c = data::split_counts(100);
    out.check(c.train == 60 && c.val == 20 && c.test == 20, "100 -> 60/20/20");
    const auto c103 = data::split_counts(103);
    out.check(c103.train == 61 && c103.val == 20 && c103.test == 22, "103 -> 61/20/22");

    const auto spec = data::SynthSpec::named("default", 6);
    const auto table = data::synth_table(spec);
    const auto splits = data::synth_stream(spec, {6});
    std::set<std::size_t> normal;
    std::size_t normal_rows = 0;
    for (const auto &s : splits)
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < s.parts[p].size(); ++i)
                if (s.parts[p].y[i] == 0) {
                    normal.insert(s.source_rows[p][i]);
                    ++normal_rows;
                    if (table.labels[s.source_rows[p][i]] != "NORMAL")
                        out.check(false, "NORMAL row with an attack label");
                }
    out.check(normal.size() == normal_rows, "NORMAL rows shared between partitions");

    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    FeatureMatrix x(500, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x.data()[i] = g(rng);
    x.col(1).setConstant(-2.0);
    x.col(4).setConstant(3.0);
    const auto rec = data::fit_transform_record(x, {});
    const auto y = data::apply_transform(rec, x, false);
    bool scaled = true;
    for (Eigen::Index j : {0, 2, 3, 5})
        scaled = scaled && std::abs(y.col(j).minCoeff() + 1.0) <= 1e-12 && std::abs(y.col(j).maxCoeff() - 1.0) <= 1e-12;
    out.check(y.col(1).isZero(0.0) && y.col(4).isZero(0.0), "constant columns not zeroed");
    out.check(scaled, "remaining columns not mapped onto [-1, 1]");

    const auto pca = data::pca_fit(x.leftCols(4).eval(), 3);
    const double ortho = (pca.basis.transpose() * pca.basis - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd cx = x.leftCols(4).rowwise() - pca.mean;
    const double tr = (cx.transpose() * cx / double(x.rows() - 1)).trace();
    double sum = 0.0;
    for (double v : pca.eigenvalues)
        sum += v;
    out.check(ortho <= 1e-10, fmt::format("B^T B - I {:.3g}", ortho));
    out.check(std::abs(sum - tr) <= 1e-10, fmt::format("eigenvalue sum vs trace {:.3g}", std::abs(sum - tr)));

    const auto root = work / "cache-protocol";
    fs::remove_all(root);
    data::DatasetSpec ds;
    ds.synthetic = "default";
    ds.seed = 6;
    const auto first = data::prepare_splits(ds, root.string());
    const auto second = data::prepare_splits(ds, root.string());
    bool same = !first.hit && second.hit && first.manifest_hash == second.manifest_hash &&
                first.splits.size() == second.splits.size();
    for (std::size_t k = 0; same && k < first.splits.size(); ++k)
        for (std::size_t p = 0; p < 3; ++p)
            same = same && first.splits[k].parts[p].x == second.splits[k].parts[p].x &&
                   first.splits[k].parts[p].y == second.splits[k].parts[p].y;
    out.check(same, "cache reuse differs from the fresh build");
    out.detail = fmt::format("splits exact, {} NORMAL rows disjoint, zeroing exact, |B^T B - I| {:.2g}, trace diff {:.2g}, cache idempotent",
                             normal_rows, ortho, std::abs(sum - tr));
    return out;
}

// 7 and 8. Desk-scale ablation and determinism.
struct RunSummary {
    double mean_f1 = 0.0;
    double forgetting = 0.0;
    double fwt = 0.0;
    std::string rcsv;
};

RunSummary run_group(pipeline::Group group, std::uint64_t seed, const fs::path &work, const fs::path &out_dir) {
    pipeline::ExperimentConfig cfg;
    cfg.group = group;
    cfg.seed = seed;
    const auto resolved = pipeline::resolve(cfg);
    data::DatasetSpec ds;
    ds.synthetic = "default";
    ds.seed = seed;
    const auto cache = data::prepare_splits(ds, (work / "cache").string());
    const auto result = pipeline::run_stream(cache.splits, resolved);
    pipeline::write_artifacts(out_dir.string(), resolved, result, {ds.id(), cache.manifest_hash, "acceptance"});
    std::ifstream in(out_dir / "rmatrix.csv", std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return {metrics::final_mean(result.r), metrics::forgetting(result.r), metrics::fwt(result.r), buf.str()};
}

Outcome ablation(const fs::path &work, std::map<std::string, RunSummary> &runs) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const pipeline::Group groups[] = {pipeline::Group::kBaseline, pipeline::Group::kQfishOnly,
                                      pipeline::Group::kFullGradient, pipeline::Group::kQgrOnly};
    int held[4] = {0, 0, 0, 0};
    nlohmann::json doc = nlohmann::json::array();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::map<pipeline::Group, RunSummary> r;
        for (auto g : groups) {
            const auto name = fmt::format("{}-seed{}", pipeline::to_string(g), seed);
            r[g] = run_group(g, seed, work, work / "runs" / name);
            runs[name] = r[g];
            doc.push_back({{"group", pipeline::to_string(g)}, {"seed", seed}, {"mean_attack_f1", r[g].mean_f1},
                           {"forgetting", r[g].forgetting}, {"fwt", r[g].fwt}});
        }
        const auto &b = r[pipeline::Group::kBaseline];
        const auto &q = r[pipeline::Group::kQfishOnly];
        const auto &f = r[pipeline::Group::kFullGradient];
        const auto &g = r[pipeline::Group::kQgrOnly];
        const bool a = b.forgetting >= 0.05;
        const bool bb = q.forgetting <= 0.5 * b.forgetting;
        const bool c = f.mean_f1 >= b.mean_f1 + 0.03;
        const bool d = g.fwt >= b.fwt;
        held[0] += a;
        held[1] += bb;
        held[2] += c;
        held[3] += d;
        std::cout << fmt::format("  seed {}: baseline F={:.3f} f1={:.3f} fwt={:+.3f} | qfish-only F={:.3f} ({:.2f}x) | "
                                 "full-gradient f1={:.3f} ({:+.3f}) | qgr-only fwt={:+.3f} ({:+.3f})  a={} b={} c={} d={}\n",
                                 seed, b.forgetting, b.mean_f1, b.fwt, q.forgetting,
                                 b.forgetting > 0 ? q.forgetting / b.forgetting : 0.0, f.mean_f1,
                                 f.mean_f1 - b.mean_f1, g.fwt, g.fwt - b.fwt, a, bb, c, d)
                  << std::flush;
    }
    std::ofstream(work / "ablation.json") << doc.dump(2) << "\n";
    const char *names[4] = {"(a) baseline forgetting >= 0.05", "(b) qfish-only forgetting <= 0.5 x baseline",
                            "(c) full-gradient mean F1 >= baseline + 0.03", "(d) qgr-only FWT >= baseline FWT"};
    for (int i = 0; i < 4; ++i)
        out.check(held[i] >= 4, fmt::format("{} held on {}/5 seeds", names[i], held[i]));
    out.detail = fmt::format("(a) {}/5, (b) {}/5, (c) {}/5, (d) {}/5 seeds, {:.0f}s", held[0], held[1], held[2],
                             held[3], seconds_since(t0));
    return out;
}

Outcome determinism(const fs::path &work, const std::map<std::string, RunSummary> &runs) {
    Outcome out;
    const auto first = runs.count("full-gradient-seed1")
                           ? runs.at("full-gradient-seed1")
                           : run_group(pipeline::Group::kFullGradient, 1, work, work / "runs" / "full-gradient-seed1");
    const auto again = run_group(pipeline::Group::kFullGradient, 1, work, work / "runs" / "full-gradient-seed1-repeat");
    out.check(!first.rcsv.empty() && first.rcsv == again.rcsv, "R-matrix CSVs differ between identical runs");
    out.detail = fmt::format("full-gradient seed 1 twice, rmatrix.csv {} bytes, identical={}", again.rcsv.size(),
                             first.rcsv == again.rcsv);
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance criteria runner"};
    std::string work_dir = "acceptance-runs";
    std::vector<int> only;
    app.add_option("--work-dir", work_dir, "Directory for caches and run artifacts");
    app.add_option("--criteria", only, "Subset of criteria to run (default: all)")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::warn);

    const fs::path work(work_dir);
    fs::create_directories(work);
    std::map<std::string, RunSummary> runs;
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, simulator_physics},
        {2, gradient_suite},
        {3, qfish_suite},
        {4, metrics_suite},
        {5, [&] { return replay_suite(work); }},
        {6, [&] { return protocol_suite(work); }},
        {7, [&] { return ablation(work, runs); }},
        {8, [&] { return determinism(work, runs); }},
    };
    bool all = true;
    for (const auto &[id, fn] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        all = all && o.pass;
        std::string line = fmt::format("criterion {}: {}", id, o.pass ? "PASS" : "FAIL");
        if (!o.detail.empty())
            line += " (" + o.detail + ")";
        for (const auto &f : o.failures)
            line += "; failed: " + f;
        std::cout << line << std::endl;
    }
    return all ? 0 : 1;
}
