// Copyright 2026 The bctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bctx {

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct MetricsReport {
  std::string variant = "fused";
  std::vector<std::string> labels;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::optional<double> macro_auc;

  std::string ToJson() const;
  std::string ToTable() const;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Precision, recall and F1 with 0/0 taken as 0. `scores` (classes x samples)
// enables the one-vs-rest macro AUC.
MetricsReport ComputeMetrics(const std::vector<std::string>& labels, std::span<const std::size_t> truth,
                             std::span<const std::size_t> predicted, const Eigen::MatrixXd* scores = nullptr);

// Trapezoidal area under the ROC curve; tied scores form one threshold.
// Empty when either class is absent.
std::optional<double> BinaryAuc(std::span<const double> scores, std::span<const bool> positive);

double Accuracy(std::span<const std::size_t> truth, std::span<const std::size_t> predicted);

}  // namespace bctx
