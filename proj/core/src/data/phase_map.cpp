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
#include "qcstream/data/phase_map.hpp"

#include "qcstream/util/hash.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace qcstream::data {

std::string to_string(Phase p) {
    switch (p) {
    case Phase::kNormal:
        return "NORMAL";
    case Phase::kReconScan:
        return "RECON_SCAN";
    case Phase::kDosResource:
        return "DOS_RESOURCE";
    case Phase::kIntrusionMalware:
        return "INTRUSION_MALWARE";
    }
    return "NORMAL";
}

Phase parse_phase(const std::string &name) {
    for (Phase p : {Phase::kNormal, Phase::kReconScan, Phase::kDosResource, Phase::kIntrusionMalware})
        if (to_string(p) == name)
            return p;
    throw std::invalid_argument("unknown phase '" + name +
                                "' (expected NORMAL, RECON_SCAN, DOS_RESOURCE or INTRUSION_MALWARE)");
}

std::string PhaseMap::normalize(const std::string &label) {
    std::string out;
    for (unsigned char c : label)
        if (std::isalnum(c))
            out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

void PhaseMap::add(const std::string &label, Phase phase) {
    const auto key = normalize(label);
    if (key.empty()) {
        throw std::invalid_argument("PhaseMap: empty label");
    }
    const auto [it, inserted] = map_.emplace(key, phase);
    if (!inserted && it->second != phase) {
        throw std::invalid_argument("PhaseMap: label '" + label + "' mapped to two phases");
    }
}

Phase PhaseMap::lookup(const std::string &label) const {
    const auto it = map_.find(normalize(label));
    if (it == map_.end()) {
        throw std::invalid_argument("PhaseMap(" + dataset_ + "): unknown label '" + label + "'");
    }
    return it->second;
}

std::uint64_t PhaseMap::hash() const noexcept {
    util::Fnv1a h;
    h.update(dataset_);
    for (const auto &[k, v] : map_) {
        h.update(k);
        h.update_value(static_cast<int>(v));
    }
    return h.digest();
}

nlohmann::json PhaseMap::to_json() const {
    nlohmann::json phases = nlohmann::json::object();
    for (const auto &[k, v] : map_)
        phases[to_string(v)].push_back(k);
    return {{"dataset", dataset_}, {"phases", phases}};
}

PhaseMap PhaseMap::from_json(const nlohmann::json &doc) {
    PhaseMap m(doc.value("dataset", std::string("custom")));
    for (const auto &[phase, labels] : doc.at("phases").items()) {
        const Phase p = parse_phase(phase);
        for (const auto &l : labels)
            m.add(l.get<std::string>(), p);
    }
    return m;
}

PhaseMap PhaseMap::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read phase map " + path);
    }
    return from_json(nlohmann::json::parse(in));
}

PhaseMap unsw_phase_map() {
    PhaseMap m("unsw");
    m.add("Normal", Phase::kNormal);
    for (const char *l : {"Reconnaissance", "Analysis", "Fuzzers"})
        m.add(l, Phase::kReconScan);
    m.add("DoS", Phase::kDosResource);
    for (const char *l : {"Exploits", "Backdoor", "Backdoors", "Shellcode", "Worms", "Generic"})
        m.add(l, Phase::kIntrusionMalware);
    return m;
}

PhaseMap cicids_phase_map() {
    PhaseMap m("cicids");
    m.add("BENIGN", Phase::kNormal);
    m.add("PortScan", Phase::kReconScan);
    for (const char *l : {"DoS Hulk", "DoS GoldenEye", "DoS slowloris", "DoS Slowhttptest", "DDoS"})
        m.add(l, Phase::kDosResource);
    for (const char *l : {"FTP-Patator", "SSH-Patator", "Bot", "Infiltration", "Heartbleed",
                          "Web Attack - Brute Force", "Web Attack - XSS", "Web Attack - Sql Injection"})
        m.add(l, Phase::kIntrusionMalware);
    return m;
}

PhaseMap identity_phase_map() {
    PhaseMap m("identity");
    for (Phase p : {Phase::kNormal, Phase::kReconScan, Phase::kDosResource, Phase::kIntrusionMalware})
        m.add(to_string(p), p);
    return m;
}

} // namespace qcstream::data
