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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qcstream::metrics {

/// Counts with the attack class (label 1) as positive.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    [[nodiscard]] std::int64_t total() const noexcept { return tp + fp + fn + tn; }
};

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> labels);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Zero denominators yield 0.
Prf attack_prf(const ConfusionCounts &counts);

/// Mean of the attack-positive and normal-positive F1.
double f1_macro(std::span<const int> predicted, std::span<const int> labels);
/// Per-class F1 weighted by class support.
double f1_weighted(std::span<const int> predicted, std::span<const int> labels);
double accuracy(std::span<const int> predicted, std::span<const int> labels);
/// Trapezoidal ROC area over score-sorted thresholds (tied scores form one step).
/// Returns nullopt when only one class is present.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels);

/// 1 where prob >= threshold.
std::vector<int> apply_threshold(std::span<const double> probs, double threshold);
double attack_f1(std::span<const double> probs, std::span<const int> labels, double threshold);

/// R[t][k]: performance on task k after training through task t. Entries for
/// k <= t plus the one-step-ahead entries R[k-1][k]; each may be set once.
class RMatrix {
  public:
    explicit RMatrix(int num_tasks = 0);

    [[nodiscard]] int num_tasks() const noexcept { return num_tasks_; }
    void set(int t, int k, double value);
    [[nodiscard]] std::optional<double> get(int t, int k) const;
    [[nodiscard]] double at(int t, int k) const;
    [[nodiscard]] bool has(int t, int k) const { return get(t, k).has_value(); }

    /// Number of leading tasks whose lower-triangle rows are complete.
    [[nodiscard]] int completed_tasks() const;

    void set_baseline(int k, double value);
    [[nodiscard]] std::optional<double> baseline(int k) const;
    void set_oracle(int k, double value);
    [[nodiscard]] std::optional<double> oracle(int k) const;

    /// Rows "t,<v_0>,...", then "baseline,..." and "oracle,..."; absent cells are empty.
    [[nodiscard]] std::string to_csv() const;
    static RMatrix from_csv(const std::string &text);
    void write_csv(const std::string &path) const;
    static RMatrix read_csv(const std::string &path);

  private:
    void check_index(int t, int k) const;

    int num_tasks_;
    std::vector<std::optional<double>> cells_;
    std::vector<std::optional<double>> baseline_;
    std::vector<std::optional<double>> oracle_;
};

/// Mean of R[T-1][k] over k, for T completed tasks.
double final_mean(const RMatrix &r);
/// (1/(T-1)) sum_{k<T-1} [max_{t>=k} R[t][k] - R[T-1][k]]. Throws for T < 2.
double forgetting(const RMatrix &r);
/// (1/(T-1)) sum_{k<T-1} (R[T-1][k] - R[k][k]). Throws for T < 2.
double bwt(const RMatrix &r);
/// (1/(T-1)) sum_{k>=1} (R[k-1][k] - b_k). Throws for T < 2 or missing entries.
double fwt(const RMatrix &r, std::span<const double> baseline);
/// fwt with the baseline stored in the matrix.
double fwt(const RMatrix &r);
/// mean_k (b*_k - R[k][k]).
double intransigence(const RMatrix &r, std::span<const double> oracle);
double intransigence(const RMatrix &r);

} // namespace qcstream::metrics
