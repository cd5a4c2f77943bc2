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
#include "qcstream/pipeline/config.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <stdexcept>

namespace qcstream::pipeline {

namespace {

struct GroupName {
    Group group;
    const char *name;
};

constexpr GroupName kGroups[] = {
    {Group::kBaseline, "baseline"},   {Group::kQgrOnly, "qgr-only"},
    {Group::kGmmReplay, "gmm-replay"}, {Group::kEwcOnly, "ewc-only"},
    {Group::kQfishOnly, "qfish-only"}, {Group::kFullState, "full-state"},
    {Group::kFullGradient, "full-gradient"},
};

constexpr double kReplayDefault = 0.3;
constexpr double kQfiDefault = 0.3;
constexpr double kFidDefault = 0.1;
constexpr double kReplayCoupled = 0.1;
constexpr double kQfiCoupled = 0.25;
constexpr double kFidCoupled = 0.08;

} // namespace

Group parse_group(const std::string &name) {
    for (const auto &g : kGroups)
        if (name == g.name)
            return g.group;
    std::string valid;
    for (const auto &g : kGroups)
        valid += (valid.empty() ? "" : ", ") + std::string(g.name);
    throw std::invalid_argument("unknown group '" + name + "'; valid groups: " + valid);
}

std::string to_string(Group g) {
    for (const auto &e : kGroups)
        if (e.group == g)
            return e.name;
    return "baseline";
}

std::vector<std::string> group_names() {
    std::vector<std::string> out;
    for (const auto &g : kGroups)
        out.emplace_back(g.name);
    return out;
}

Mechanisms mechanisms(Group g) {
    Mechanisms m;
    switch (g) {
    case Group::kBaseline:
        break;
    case Group::kQgrOnly:
        m.replay = ReplayKind::kQuantum;
        break;
    case Group::kGmmReplay:
        m.replay = ReplayKind::kGmm;
        break;
    case Group::kEwcOnly:
        m.qfi = true;
        break;
    case Group::kQfishOnly:
        m.qfi = m.fid = true;
        break;
    case Group::kFullState:
        m.replay = ReplayKind::kQuantum;
        m.qfi = m.fid = true;
        m.forced_strategy = stability::AnchorStrategy::kStateSpace;
        break;
    case Group::kFullGradient:
        m.replay = ReplayKind::kQuantum;
        m.qfi = m.fid = true;
        m.forced_strategy = stability::AnchorStrategy::kGradientSpace;
        break;
    }
    return m;
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::kSpsa ? "spsa" : "gradient"; }

OptimizerKind parse_optimizer(const std::string &name) {
    if (name == "spsa")
        return OptimizerKind::kSpsa;
    if (name == "gradient")
        return OptimizerKind::kGradient;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected spsa or gradient)");
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string &key, const std::string &what) {
        throw std::invalid_argument("config key '" + key + "': " + what);
    };
    if (epochs < 1)
        fail("epochs", "must be >= 1");
    if (batch_size < 1)
        fail("batch_size", "must be >= 1");
    if (num_qubits < 1 || num_qubits > sim::kMaxQubits)
        fail("num_qubits", "must lie in [1, 10]");
    if (num_layers < 1)
        fail("num_layers", "must be >= 1");
    if (replay_ratio && !(*replay_ratio >= 0.0 && *replay_ratio <= 1.0))
        fail("replay_ratio", "must lie in [0, 1]");
    if (lambda_qfi && !(*lambda_qfi >= 0.0))
        fail("lambda_qfi", "must be >= 0");
    if (lambda_fid && !(*lambda_fid >= 0.0))
        fail("lambda_fid", "must be >= 0");
    if (!(alpha >= 0.0))
        fail("alpha", "must be >= 0");
    for (auto [key, p] : {std::pair{"noise_1q", noise.p1}, std::pair{"noise_2q", noise.p2},
                          std::pair{"readout_error", noise.p_ro}})
        if (!(p >= 0.0 && p <= 1.0))
            fail(key, "must lie in [0, 1]");
    if (shots < 1)
        fail("shots", "must be >= 1");
    if (generator_layers < 1)
        fail("generator_layers", "must be >= 1");
    if (generator_iters < 1)
        fail("generator_iters", "must be >= 1");
    if (generator_shots < 1)
        fail("generator_shots", "must be >= 1");
    if (gmm_components < 1)
        fail("gmm_components", "must be >= 1");
    if (anchor_budget < 1)
        fail("anchor_budget", "must be >= 1");
    if (epsilon && !(*epsilon > 0.0 && *epsilon <= 0.5))
        fail("epsilon", "must lie in (0, 0.5]");
    if (subsample < 1)
        fail("subsample", "must be >= 1");
    if (!(weight_boost > 0.0))
        fail("weight_boost", "must be > 0");
    if (!(imbalance_threshold >= 1.0))
        fail("imbalance_threshold", "must be >= 1");
    if (!(focal_gamma >= 0.0))
        fail("focal_gamma", "must be >= 0");
    if (!(spsa_a > 0.0))
        fail("spsa_a", "must be > 0");
    if (!(spsa_c > 0.0))
        fail("spsa_c", "must be > 0");
    if (!(spsa_A_fraction >= 0.0))
        fail("spsa_A_fraction", "must be >= 0");
    if (!(learning_rate > 0.0))
        fail("learning_rate", "must be > 0");
    if (optimizer == OptimizerKind::kGradient && !exact_expectations)
        fail("optimizer", "gradient mode needs exact expectations");
}

ResolvedConfig resolve(const ExperimentConfig &cfg) {
    cfg.validate();
    ResolvedConfig r;
    r.base = cfg;
    r.mech = mechanisms(cfg.group);
    r.coupled = r.mech.replay_on() && r.mech.stability_on();
    r.replay_ratio = r.mech.replay_on()
                         ? cfg.replay_ratio.value_or(r.coupled ? kReplayCoupled : kReplayDefault)
                         : 0.0;
    auto &q = r.qfish;
    q.lambda_qfi = r.mech.qfi ? cfg.lambda_qfi.value_or(r.coupled ? kQfiCoupled : kQfiDefault) : 0.0;
    q.lambda_fid = r.mech.fid ? cfg.lambda_fid.value_or(r.coupled ? kFidCoupled : kFidDefault) : 0.0;
    const bool noiseless_exact = !cfg.noise.enabled && cfg.exact_expectations;
    q.epsilon = cfg.epsilon.value_or(noiseless_exact ? 1e-4 : 1e-2);
    q.anchor_budget = cfg.anchor_budget;
    q.qfi_batch = cfg.subsample;
    q.fid_batch = cfg.subsample;
    q.functional = cfg.functional;
    r.strategy = r.mech.forced_strategy.value_or(cfg.anchor_strategy);
    q.strategy = r.strategy;
    q.validate();
    return r;
}

nlohmann::json to_json(const ExperimentConfig &c) {
    nlohmann::json j;
    j["group"] = to_string(c.group);
    j["seed"] = c.seed;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["num_qubits"] = c.num_qubits;
    j["num_layers"] = c.num_layers;
    j["replay_ratio"] = c.replay_ratio ? nlohmann::json(*c.replay_ratio) : nlohmann::json();
    j["lambda_qfi"] = c.lambda_qfi ? nlohmann::json(*c.lambda_qfi) : nlohmann::json();
    j["lambda_fid"] = c.lambda_fid ? nlohmann::json(*c.lambda_fid) : nlohmann::json();
    j["alpha"] = c.alpha;
    j["noise"] = c.noise.enabled;
    j["noise_1q"] = c.noise.p1;
    j["noise_2q"] = c.noise.p2;
    j["readout_error"] = c.noise.p_ro;
    j["exact_expectations"] = c.exact_expectations;
    j["shots"] = c.shots;
    j["generator_layers"] = c.generator_layers;
    j["generator_iters"] = c.generator_iters;
    j["generator_shots"] = c.generator_shots;
    j["generator_shot_training"] = c.generator_shot_training;
    j["gmm_components"] = c.gmm_components;
    j["anchor_budget"] = c.anchor_budget;
    j["anchor_strategy"] = stability::to_string(c.anchor_strategy);
    j["epsilon"] = c.epsilon ? nlohmann::json(*c.epsilon) : nlohmann::json();
    j["subsample"] = c.subsample;
    j["functional"] = stability::to_string(c.functional);
    j["weight_strategy"] = vqc::to_string(c.weight_strategy);
    j["weight_boost"] = c.weight_boost;
    j["imbalance_threshold"] = c.imbalance_threshold;
    j["focal_gamma"] = c.focal_gamma;
    j["optimizer"] = to_string(c.optimizer);
    j["spsa_a"] = c.spsa_a;
    j["spsa_c"] = c.spsa_c;
    j["spsa_A_fraction"] = c.spsa_A_fraction;
    j["learning_rate"] = c.learning_rate;
    j["class_incremental"] = c.class_incremental;
    return j;
}

void apply_json(ExperimentConfig &c, const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("config: expected a JSON object");
    }
    using J = const nlohmann::json &;
    auto opt = [](std::optional<double> &field) {
        return [&field](J v) { field = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
    };
    const std::map<std::string, std::function<void(J)>> setters = {
        {"group", [&](J v) { c.group = parse_group(v.get<std::string>()); }},
        {"seed", [&](J v) { c.seed = v.get<std::uint64_t>(); }},
        {"epochs", [&](J v) { c.epochs = v.get<int>(); }},
        {"batch_size", [&](J v) { c.batch_size = v.get<int>(); }},
        {"num_qubits", [&](J v) { c.num_qubits = v.get<int>(); }},
        {"num_layers", [&](J v) { c.num_layers = v.get<int>(); }},
        {"replay_ratio", opt(c.replay_ratio)},
        {"lambda_qfi", opt(c.lambda_qfi)},
        {"lambda_fid", opt(c.lambda_fid)},
        {"alpha", [&](J v) { c.alpha = v.get<double>(); }},
        {"noise", [&](J v) { c.noise.enabled = v.get<bool>(); }},
        {"noise_1q", [&](J v) { c.noise.p1 = v.get<double>(); }},
        {"noise_2q", [&](J v) { c.noise.p2 = v.get<double>(); }},
        {"readout_error", [&](J v) { c.noise.p_ro = v.get<double>(); }},
        {"exact_expectations", [&](J v) { c.exact_expectations = v.get<bool>(); }},
        {"shots", [&](J v) { c.shots = v.get<std::int64_t>(); }},
        {"generator_layers", [&](J v) { c.generator_layers = v.get<int>(); }},
        {"generator_iters", [&](J v) { c.generator_iters = v.get<int>(); }},
        {"generator_shots", [&](J v) { c.generator_shots = v.get<std::int64_t>(); }},
        {"generator_shot_training", [&](J v) { c.generator_shot_training = v.get<bool>(); }},
        {"gmm_components", [&](J v) { c.gmm_components = v.get<int>(); }},
        {"anchor_budget", [&](J v) { c.anchor_budget = v.get<int>(); }},
        {"anchor_strategy", [&](J v) { c.anchor_strategy = stability::parse_anchor_strategy(v.get<std::string>()); }},
        {"epsilon", opt(c.epsilon)},
        {"subsample", [&](J v) { c.subsample = v.get<int>(); }},
        {"functional", [&](J v) { c.functional = stability::parse_functional_term(v.get<std::string>()); }},
        {"weight_strategy", [&](J v) { c.weight_strategy = vqc::parse_weight_strategy(v.get<std::string>()); }},
        {"weight_boost", [&](J v) { c.weight_boost = v.get<double>(); }},
        {"imbalance_threshold", [&](J v) { c.imbalance_threshold = v.get<double>(); }},
        {"focal_gamma", [&](J v) { c.focal_gamma = v.get<double>(); }},
        {"optimizer", [&](J v) { c.optimizer = parse_optimizer(v.get<std::string>()); }},
        {"spsa_a", [&](J v) { c.spsa_a = v.get<double>(); }},
        {"spsa_c", [&](J v) { c.spsa_c = v.get<double>(); }},
        {"spsa_A_fraction", [&](J v) { c.spsa_A_fraction = v.get<double>(); }},
        {"learning_rate", [&](J v) { c.learning_rate = v.get<double>(); }},
        {"class_incremental", [&](J v) { c.class_incremental = v.get<bool>(); }},
    };
    for (const auto &[key, value] : doc.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw std::invalid_argument("config key '" + key + "': unknown key");
        }
        try {
            it->second(value);
        } catch (const nlohmann::json::exception &e) {
            throw std::invalid_argument("config key '" + key + "': " + e.what());
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("config key '" + key + "': " + e.what());
        }
    }
}

ExperimentConfig config_from_json(const nlohmann::json &doc) {
    ExperimentConfig c;
    apply_json(c, doc);
    c.validate();
    return c;
}

nlohmann::json to_json(const ResolvedConfig &r) {
    const char *replay = r.mech.replay == ReplayKind::kQuantum ? "quantum"
                         : r.mech.replay == ReplayKind::kGmm  ? "gmm"
                                                              : "none";
    return {{"group", to_string(r.base.group)},
            {"replay", replay},
            {"qfi_term", r.mech.qfi},
            {"fid_term", r.mech.fid},
            {"coupled", r.coupled},
            {"replay_ratio", r.replay_ratio},
            {"lambda_qfi", r.qfish.lambda_qfi},
            {"lambda_fid", r.qfish.lambda_fid},
            {"epsilon", r.qfish.epsilon},
            {"anchor_strategy", stability::to_string(r.strategy)},
            {"anchor_budget", r.qfish.anchor_budget},
            {"subsample", r.qfish.qfi_batch},
            {"functional", stability::to_string(r.qfish.functional)},
            {"alpha", r.base.alpha}};
}

} // namespace qcstream::pipeline
