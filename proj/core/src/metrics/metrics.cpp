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
#include "qcstream/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qcstream::metrics {

namespace {

void check_pair(std::span<const int> predicted, std::span<const int> labels) {
    if (predicted.size() != labels.size()) {
        throw std::invalid_argument("metrics: prediction/label count mismatch");
    }
}

double f1_of(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

} // namespace

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> labels) {
    check_pair(predicted, labels);
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool p = predicted[i] == 1;
        const bool y = labels[i] == 1;
        if (p && y)
            ++c.tp;
        else if (p)
            ++c.fp;
        else if (y)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

Prf attack_prf(const ConfusionCounts &c) {
    Prf out;
    out.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    out.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    out.f1 = out.precision + out.recall == 0.0
                 ? 0.0
                 : 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

double f1_macro(std::span<const int> predicted, std::span<const int> labels) {
    const auto c = confusion(predicted, labels);
    return 0.5 * (f1_of(c.tp, c.fp, c.fn) + f1_of(c.tn, c.fn, c.fp));
}

double f1_weighted(std::span<const int> predicted, std::span<const int> labels) {
    const auto c = confusion(predicted, labels);
    const auto n = c.total();
    if (n == 0)
        return 0.0;
    const double n1 = static_cast<double>(c.tp + c.fn);
    const double n0 = static_cast<double>(c.tn + c.fp);
    return (n1 * f1_of(c.tp, c.fp, c.fn) + n0 * f1_of(c.tn, c.fn, c.fp)) / static_cast<double>(n);
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
    const auto c = confusion(predicted, labels);
    return c.total() == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("roc_auc: score/label count mismatch");
    }
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    const auto neg = static_cast<std::ptrdiff_t>(labels.size()) - pos;
    if (pos == 0 || neg == 0)
        return std::nullopt;
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double area = 0.0;
    double tp = 0.0;
    double fp = 0.0;
    double prev_tpr = 0.0;
    double prev_fpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] == 1 ? tp : fp) += 1.0;
            ++i;
        }
        const double tpr = tp / static_cast<double>(pos);
        const double fpr = fp / static_cast<double>(neg);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return area;
}

std::vector<int> apply_threshold(std::span<const double> probs, double threshold) {
    std::vector<int> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        out[i] = probs[i] >= threshold ? 1 : 0;
    return out;
}

double attack_f1(std::span<const double> probs, std::span<const int> labels, double threshold) {
    return attack_prf(confusion(apply_threshold(probs, threshold), labels)).f1;
}

RMatrix::RMatrix(int num_tasks)
    : num_tasks_(num_tasks), cells_(static_cast<std::size_t>(std::max(num_tasks, 0) * std::max(num_tasks, 0))),
      baseline_(static_cast<std::size_t>(std::max(num_tasks, 0))),
      oracle_(static_cast<std::size_t>(std::max(num_tasks, 0))) {
    if (num_tasks < 0) {
        throw std::invalid_argument("RMatrix: task count must be >= 0");
    }
}

void RMatrix::check_index(int t, int k) const {
    if (t < 0 || k < 0 || t >= num_tasks_ || k >= num_tasks_) {
        throw std::out_of_range("RMatrix: index out of range");
    }
    if (k > t + 1) {
        throw std::invalid_argument("RMatrix: only k <= t + 1 entries are defined");
    }
}

void RMatrix::set(int t, int k, double value) {
    check_index(t, k);
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument("RMatrix: entries must lie in [0, 1]");
    }
    auto &cell = cells_[static_cast<std::size_t>(t * num_tasks_ + k)];
    if (cell.has_value()) {
        throw std::logic_error(fmt::format("RMatrix: entry ({}, {}) already written", t, k));
    }
    cell = value;
}

std::optional<double> RMatrix::get(int t, int k) const {
    if (t < 0 || k < 0 || t >= num_tasks_ || k >= num_tasks_)
        return std::nullopt;
    return cells_[static_cast<std::size_t>(t * num_tasks_ + k)];
}

double RMatrix::at(int t, int k) const {
    const auto v = get(t, k);
    if (!v) {
        throw std::out_of_range(fmt::format("RMatrix: entry ({}, {}) is absent", t, k));
    }
    return *v;
}

int RMatrix::completed_tasks() const {
    int done = 0;
    for (int t = 0; t < num_tasks_; ++t) {
        for (int k = 0; k <= t; ++k)
            if (!has(t, k))
                return done;
        ++done;
    }
    return done;
}

void RMatrix::set_baseline(int k, double value) {
    if (k < 0 || k >= num_tasks_) {
        throw std::out_of_range("RMatrix: baseline index out of range");
    }
    baseline_[static_cast<std::size_t>(k)] = value;
}

std::optional<double> RMatrix::baseline(int k) const {
    return k < 0 || k >= num_tasks_ ? std::nullopt : baseline_[static_cast<std::size_t>(k)];
}

void RMatrix::set_oracle(int k, double value) {
    if (k < 0 || k >= num_tasks_) {
        throw std::out_of_range("RMatrix: oracle index out of range");
    }
    oracle_[static_cast<std::size_t>(k)] = value;
}

std::optional<double> RMatrix::oracle(int k) const {
    return k < 0 || k >= num_tasks_ ? std::nullopt : oracle_[static_cast<std::size_t>(k)];
}

std::string RMatrix::to_csv() const {
    std::string out = "row";
    for (int k = 0; k < num_tasks_; ++k)
        out += fmt::format(",task_{}", k);
    out += '\n';
    auto line = [&](const std::string &name, auto &&cell) {
        out += name;
        for (int k = 0; k < num_tasks_; ++k) {
            out += ',';
            if (const std::optional<double> v = cell(k))
                out += fmt::format("{:.17g}", *v);
        }
        out += '\n';
    };
    for (int t = 0; t < num_tasks_; ++t)
        line(std::to_string(t), [&](int k) { return get(t, k); });
    line("baseline", [&](int k) { return baseline(k); });
    line("oracle", [&](int k) { return oracle(k); });
    return out;
}

RMatrix RMatrix::from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header) || header.rfind("row", 0) != 0) {
        throw std::invalid_argument("RMatrix CSV: missing header");
    }
    const int n = static_cast<int>(std::count(header.begin(), header.end(), ','));
    RMatrix r(n);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (line.back() == ',')
            cells.emplace_back();
        if (static_cast<int>(cells.size()) != n + 1) {
            throw std::invalid_argument("RMatrix CSV: wrong column count in row '" + cells[0] + "'");
        }
        for (int k = 0; k < n; ++k) {
            const auto &c = cells[static_cast<std::size_t>(k + 1)];
            if (c.empty())
                continue;
            const double v = std::stod(c);
            if (cells[0] == "baseline")
                r.set_baseline(k, v);
            else if (cells[0] == "oracle")
                r.set_oracle(k, v);
            else
                r.set(std::stoi(cells[0]), k, v);
        }
    }
    return r;
}

void RMatrix::write_csv(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << to_csv();
}

RMatrix RMatrix::read_csv(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

namespace {

int cl_tasks(const RMatrix &r) {
    const int t = r.completed_tasks();
    if (t < 2) {
        throw std::invalid_argument("continual-learning summary needs at least two completed tasks");
    }
    return t;
}

} // namespace

double final_mean(const RMatrix &r) {
    const int t = r.completed_tasks();
    if (t < 1) {
        throw std::invalid_argument("final_mean: no completed task");
    }
    double s = 0.0;
    for (int k = 0; k < t; ++k)
        s += r.at(t - 1, k);
    return s / t;
}

double forgetting(const RMatrix &r) {
    const int t_count = cl_tasks(r);
    double s = 0.0;
    for (int k = 0; k < t_count - 1; ++k) {
        double best = r.at(k, k);
        for (int t = k + 1; t < t_count; ++t)
            best = std::max(best, r.at(t, k));
        s += best - r.at(t_count - 1, k);
    }
    return s / (t_count - 1);
}

double bwt(const RMatrix &r) {
    const int t_count = cl_tasks(r);
    double s = 0.0;
    for (int k = 0; k < t_count - 1; ++k)
        s += r.at(t_count - 1, k) - r.at(k, k);
    return s / (t_count - 1);
}

double fwt(const RMatrix &r, std::span<const double> baseline) {
    const int t_count = cl_tasks(r);
    if (baseline.size() < static_cast<std::size_t>(t_count)) {
        throw std::invalid_argument("fwt: baseline vector too short");
    }
    double s = 0.0;
    for (int k = 1; k < t_count; ++k) {
        const auto pre = r.get(k - 1, k);
        if (!pre) {
            throw std::invalid_argument(fmt::format("fwt: pre-training entry R[{}][{}] missing", k - 1, k));
        }
        s += *pre - baseline[static_cast<std::size_t>(k)];
    }
    return s / (t_count - 1);
}

double fwt(const RMatrix &r) {
    std::vector<double> b;
    for (int k = 0; k < r.completed_tasks(); ++k) {
        const auto v = r.baseline(k);
        if (!v) {
            throw std::invalid_argument(fmt::format("fwt: baseline b_{} missing", k));
        }
        b.push_back(*v);
    }
    return fwt(r, b);
}

double intransigence(const RMatrix &r, std::span<const double> oracle) {
    const int t_count = r.completed_tasks();
    if (oracle.size() != static_cast<std::size_t>(t_count) || t_count == 0) {
        throw std::invalid_argument("intransigence: oracle length must equal completed task count");
    }
    double s = 0.0;
    for (int k = 0; k < t_count; ++k)
        s += oracle[static_cast<std::size_t>(k)] - r.at(k, k);
    return s / t_count;
}

double intransigence(const RMatrix &r) {
    std::vector<double> o;
    for (int k = 0; k < r.completed_tasks(); ++k) {
        const auto v = r.oracle(k);
        if (!v) {
            throw std::invalid_argument(fmt::format("intransigence: oracle b*_{} missing", k));
        }
        o.push_back(*v);
    }
    return intransigence(r, o);
}

} // namespace qcstream::metrics
