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

#include "bctx/metrics.h"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bctx/error.h"

namespace bctx {

std::optional<double> BinaryAuc(std::span<const double> scores, std::span<const bool> positive) {
  const std::size_t n = scores.size();
  const auto pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0.0, tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < n;) {
    double dtp = 0.0, dfp = 0.0;
    std::size_t j = i;
    for (; j < n && scores[order[j]] == scores[order[i]]; ++j) (positive[order[j]] ? dtp : dfp) += 1.0;
    area += dfp / neg * (2.0 * tp + dtp) / (2.0 * pos);
    tp += dtp;
    fp += dfp;
    i = j;
  }
  return area;
}

double Accuracy(std::span<const std::size_t> truth, std::span<const std::size_t> predicted) {
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

MetricsReport ComputeMetrics(const std::vector<std::string>& labels, std::span<const std::size_t> truth,
                             std::span<const std::size_t> predicted, const Eigen::MatrixXd* scores) {
  const std::size_t c = labels.size();
  if (truth.size() != predicted.size()) throw Error(ErrorCode::kDimMismatch, "truth and prediction lengths differ");
  MetricsReport r;
  r.labels = labels;
  r.confusion.assign(c, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= c || predicted[i] >= c) throw Error(ErrorCode::kDimMismatch, "class index out of range");
    ++r.confusion[truth[i]][predicted[i]];
  }
  for (std::size_t k = 0; k < c; ++k) {
    ClassMetrics m;
    m.label = labels[k];
    const std::size_t tp = r.confusion[k][k];
    std::size_t col = 0;
    for (std::size_t t = 0; t < c; ++t) col += r.confusion[t][k];
    m.support = std::accumulate(r.confusion[k].begin(), r.confusion[k].end(), std::size_t{0});
    m.precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
    m.recall = m.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(m.support);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.per_class.push_back(std::move(m));
  }
  if (c > 0) {
    r.macro_precision /= static_cast<double>(c);
    r.macro_recall /= static_cast<double>(c);
    r.macro_f1 /= static_cast<double>(c);
  }
  r.accuracy = Accuracy(truth, predicted);

  if (scores != nullptr) {
    if (static_cast<std::size_t>(scores->rows()) != c || static_cast<std::size_t>(scores->cols()) != truth.size()) {
      throw Error(ErrorCode::kDimMismatch, "score matrix shape");
    }
    double sum = 0.0;
    std::size_t counted = 0;
    std::vector<double> s(truth.size());
    std::unique_ptr<bool[]> pos(new bool[truth.size()]);
    for (std::size_t k = 0; k < c; ++k) {
      for (std::size_t i = 0; i < truth.size(); ++i) {
        s[i] = (*scores)(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        pos[i] = truth[i] == k;
      }
      if (auto a = BinaryAuc(s, std::span<const bool>(pos.get(), truth.size()))) {
        sum += *a;
        ++counted;
      }
    }
    if (counted > 0) r.macro_auc = sum / static_cast<double>(counted);
  }
  return r;
}

std::string MetricsReport::ToJson() const {
  nlohmann::ordered_json j;
  j["variant"] = variant;
  j["labels"] = labels;
  j["accuracy"] = accuracy;
  j["macro_precision"] = macro_precision;
  j["macro_recall"] = macro_recall;
  j["macro_f1"] = macro_f1;
  if (macro_auc) j["macro_auc"] = *macro_auc;
  auto& pc = j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& m : per_class) {
    pc.push_back({{"label", m.label}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                  {"support", m.support}});
  }
  j["confusion"] = confusion;
  return j.dump(2);
}

std::string MetricsReport::ToTable() const {
  std::ostringstream out;
  std::size_t width = 5;
  for (const auto& l : labels) width = std::max(width, l.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %8s\n", static_cast<int>(width), "class", "precision", "recall",
                "f1", "support");
  out << "[" << variant << "]\n" << buf;
  for (const auto& m : per_class) {
    std::snprintf(buf, sizeof buf, "%-*s %9.4f %9.4f %9.4f %8zu\n", static_cast<int>(width), m.label.c_str(),
                  m.precision, m.recall, m.f1, m.support);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-*s %9.4f %9.4f %9.4f\n", static_cast<int>(width), "macro", macro_precision,
                macro_recall, macro_f1);
  out << buf;
  std::snprintf(buf, sizeof buf, "accuracy %.4f", accuracy);
  out << buf;
  if (macro_auc) {
    std::snprintf(buf, sizeof buf, "  macro AUC %.4f", *macro_auc);
    out << buf;
  }
  out << '\n';
  return out.str();
}

}  // namespace bctx
