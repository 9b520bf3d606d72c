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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bctx/features.h"
#include "bctx/fusion.h"
#include "bctx/manifest.h"
#include "bctx/metrics.h"

namespace bctx {

// Sorted distinct labels of the records.
std::vector<std::string> LabelSet(std::span<const FeatureRecord> records);
std::vector<std::size_t> LabelIndices(std::span<const FeatureRecord> records, const std::vector<std::string>& labels);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, a seeded shuffle then round(n_c * test_fraction) test samples,
// clamped to [1, n_c - 1]. Throws ClassTooSmall for classes under 2.
Split StratifiedSplit(std::span<const std::size_t> labels, std::size_t num_classes, double test_fraction,
                      std::uint64_t seed);
// Test index sets of k stratified folds. Throws ClassTooSmall when a class
// has fewer than k samples.
std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const std::size_t> labels, std::size_t num_classes,
                                                      std::size_t k, std::uint64_t seed);

// Vocabulary over the context tokens of the chosen records.
Vocabulary BuildRecordVocabulary(std::span<const FeatureRecord> records, std::span<const std::size_t> indices,
                                 std::size_t min_df);
Example MakeExample(const FeatureRecord& record, const Vocabulary& vocab, std::size_t label, bool with_image);
std::vector<Example> MakeExamples(std::span<const FeatureRecord> records, std::span<const std::size_t> indices,
                                  const Vocabulary& vocab, const std::vector<std::string>& labels, bool with_image);

struct ProtocolConfig {
  TrainConfig train;
  std::size_t min_df = 1;
  double test_fraction = 0.2;
  std::string catalog_fingerprint;
  std::string variant = "fused";
};

struct SplitResult {
  MetricsReport report;
  FusionModel model;
  Vocabulary vocab;
  Split split;
  std::vector<EpochLog> log;
  std::vector<Example> test_examples;
};

// Records are put in id order first. Vocabulary comes from the training
// split only; test-only tokens are dropped.
SplitResult EvaluateSplit(std::span<const FeatureRecord> records, const ProtocolConfig& config, std::uint64_t seed);
// Trains on the given indices and scores on the rest of `test`.
SplitResult TrainAndScore(std::span<const FeatureRecord> records, const Split& split,
                          const std::vector<std::string>& labels, const ProtocolConfig& config);

struct CrossValidation {
  std::vector<MetricsReport> folds;
  double mean_macro_f1 = 0.0;
  double std_macro_f1 = 0.0;  // population standard deviation over folds

  std::string ToJson() const;
};
CrossValidation CrossValidate(std::span<const FeatureRecord> records, std::size_t folds, const ProtocolConfig& config,
                              std::uint64_t seed);

// The split protocol with the context and library projections removed.
SplitResult AblateBytecodeOnly(std::span<const FeatureRecord> records, const ProtocolConfig& config,
                               std::uint64_t seed);

enum class ImportanceMetric { kAccuracy, kMacroF1 };

struct Importance {
  View view = View::kBin;
  double value = 0.0;
  double baseline = 0.0;
  std::vector<double> per_repeat;
};

// Mean drop in score when the view's vectors are permuted across samples.
Importance PermutationImportance(const FusionModel& model, std::span<const Example> test, View view,
                                 std::size_t repeats, std::uint64_t seed,
                                 ImportanceMetric metric = ImportanceMetric::kAccuracy);

enum class PerturbOp { kDeadBytes, kManifestFlip, kViewZero };
// Throws UnknownOperator.
PerturbOp ParsePerturbOp(std::string_view name);
std::string_view PerturbOpName(PerturbOp op);

struct PerturbSpec {
  PerturbOp op = PerturbOp::kDeadBytes;
  // dead_bytes: injected bytes as a fraction of the dex stream length;
  // manifest_flip: number of vocabulary tokens toggled.
  double magnitude = 0.0;
  View view = View::kBin;  // view_zero only
};

struct PerturbContext {
  const Vocabulary* vocab = nullptr;         // manifest_flip
  const ExtractConfig* extract = nullptr;    // dead_bytes
  std::optional<ByteView> dex_stream;        // dead_bytes
};

// Appends n seeded random bytes.
Bytes InjectDeadBytes(ByteView dex_stream, std::size_t n, std::uint64_t seed);

// Deterministic in (record id, seed). Throws BadConfig when the context
// lacks what the operator needs.
FeatureRecord PerturbRecord(const FeatureRecord& record, const PerturbSpec& spec, const PerturbContext& context,
                            std::uint64_t seed);

}  // namespace bctx
