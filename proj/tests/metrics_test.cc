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

#include <gtest/gtest.h>

#include <memory>

#include <json.hpp>

#include "bctx/metrics.h"
#include "bctx/rng.h"

namespace bctx {
namespace {

// Probability that a random positive outscores a random negative, ties half.
double MannWhitney(const std::vector<double>& s, const std::vector<bool>& pos) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!pos[i] || pos[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

TEST(Metrics, HandComputedConfusion) {
  const std::vector<std::string> labels = {"a", "b", "c"};
  const std::vector<std::size_t> truth = {0, 0, 0, 1, 1, 2};
  const std::vector<std::size_t> pred = {0, 0, 1, 1, 0, 0};
  const auto r = ComputeMetrics(labels, truth, pred);
  EXPECT_EQ(r.confusion, (std::vector<std::vector<std::size_t>>{{2, 1, 0}, {1, 1, 0}, {1, 0, 0}}));
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[0].recall, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.per_class[0].f1, 2 * 0.5 * (2.0 / 3) / (0.5 + 2.0 / 3));
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[1].recall, 0.5);
  // Class c is never predicted: 0/0 precision counts as 0.
  EXPECT_DOUBLE_EQ(r.per_class[2].precision, 0.0);
  EXPECT_DOUBLE_EQ(r.per_class[2].f1, 0.0);
  EXPECT_EQ(r.per_class[2].support, 1u);
  EXPECT_DOUBLE_EQ(r.macro_f1, (r.per_class[0].f1 + r.per_class[1].f1 + 0.0) / 3);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_FALSE(r.macro_auc.has_value());
}

TEST(Metrics, AucMatchesMannWhitney) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.Below(30);
    std::vector<double> s(n);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.Below(6)) / 5.0;  // many ties
      pos[i] = rng.Below(2) == 0;
    }
    pos[0] = true;
    pos[1] = false;
    std::unique_ptr<bool[]> b(new bool[n]);
    for (std::size_t i = 0; i < n; ++i) b[i] = pos[i];
    const auto auc = BinaryAuc(s, std::span<const bool>(b.get(), n));
    ASSERT_TRUE(auc.has_value());
    EXPECT_NEAR(*auc, MannWhitney(s, pos), 1e-12);
  }
  const bool all[] = {true, true};
  const double sc[] = {0.1, 0.2};
  EXPECT_FALSE(BinaryAuc(sc, all).has_value());
}

TEST(Metrics, MacroAucFromScores) {
  const std::vector<std::string> labels = {"a", "b"};
  const std::vector<std::size_t> truth = {0, 1, 0, 1};
  Eigen::MatrixXd scores(2, 4);
  scores << 0.9, 0.2, 0.8, 0.4, 0.1, 0.8, 0.2, 0.6;
  const auto r = ComputeMetrics(labels, truth, std::vector<std::size_t>{0, 1, 0, 1}, &scores);
  ASSERT_TRUE(r.macro_auc.has_value());
  EXPECT_DOUBLE_EQ(*r.macro_auc, 1.0);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
}

TEST(Metrics, JsonAndTable) {
  const auto r = ComputeMetrics({"x", "y"}, std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 0});
  const auto j = nlohmann::json::parse(r.ToJson());
  EXPECT_EQ(j["variant"], "fused");
  EXPECT_DOUBLE_EQ(j["accuracy"].get<double>(), 0.5);
  EXPECT_NE(r.ToTable().find("macro"), std::string::npos);
  EXPECT_DOUBLE_EQ(Accuracy(std::vector<std::size_t>{1, 2}, std::vector<std::size_t>{1, 1}), 0.5);
}

}  // namespace
}  // namespace bctx
