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

#include "bctx/protocol.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "bctx/error.h"
#include "bctx/image.h"
#include "bctx/rng.h"

namespace bctx {
namespace {

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::size_t> IdOrder(std::span<const FeatureRecord> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (records[order[i]].id == records[order[i - 1]].id) {
      throw Error(ErrorCode::kBadCorpus, "duplicate record id " + records[order[i]].id);
    }
  }
  return order;
}

std::vector<std::vector<std::size_t>> MembersByClass(std::span<const std::size_t> labels, std::size_t num_classes) {
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) throw Error(ErrorCode::kDimMismatch, "label index out of range");
    members[labels[i]].push_back(i);
  }
  return members;
}

std::vector<FeatureTriple> Features(std::span<const Example> examples) {
  std::vector<FeatureTriple> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.features);
  return out;
}

std::vector<std::size_t> Truth(std::span<const Example> examples) {
  std::vector<std::size_t> out;
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

double Score(const FusionModel& model, std::span<const FeatureTriple> inputs, std::span<const std::size_t> truth,
             ImportanceMetric metric) {
  const auto pred = PredictLabels(model, inputs);
  if (metric == ImportanceMetric::kAccuracy) return Accuracy(truth, pred);
  return ComputeMetrics(model.class_labels, truth, pred).macro_f1;
}

}  // namespace

std::vector<std::string> LabelSet(std::span<const FeatureRecord> records) {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.label);
  return {s.begin(), s.end()};
}

std::vector<std::size_t> LabelIndices(std::span<const FeatureRecord> records, const std::vector<std::string>& labels) {
  std::vector<std::size_t> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = std::lower_bound(labels.begin(), labels.end(), r.label);
    if (it == labels.end() || *it != r.label) throw Error(ErrorCode::kLabelUnseen, "unknown label " + r.label);
    out.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  return out;
}

Split StratifiedSplit(std::span<const std::size_t> labels, std::size_t num_classes, double test_fraction,
                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error(ErrorCode::kBadConfig, "test fraction must be in (0, 1)");
  auto members = MembersByClass(labels, num_classes);
  Rng rng(seed);
  Split split;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& m = members[c];
    if (m.size() < 2) {
      throw Error(ErrorCode::kClassTooSmall, "class " + std::to_string(c) + " has " + std::to_string(m.size()) +
                                                 " samples; a split needs at least 2");
    }
    rng.Shuffle(std::span<std::size_t>(m));
    auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(m.size()) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, m.size() - 1);
    split.test.insert(split.test.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), m.begin() + static_cast<std::ptrdiff_t>(n_test), m.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const std::size_t> labels, std::size_t num_classes,
                                                      std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kBadConfig, "cross-validation needs at least 2 folds");
  auto members = MembersByClass(labels, num_classes);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;  // rotates so that overall fold sizes stay balanced
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& m = members[c];
    if (m.size() < k) {
      throw Error(ErrorCode::kClassTooSmall, "class " + std::to_string(c) + " has " + std::to_string(m.size()) +
                                                 " samples, fewer than " + std::to_string(k) + " folds");
    }
    rng.Shuffle(std::span<std::size_t>(m));
    for (std::size_t j = 0; j < m.size(); ++j) folds[(offset + j) % k].push_back(m[j]);
    offset = (offset + m.size()) % k;
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Vocabulary BuildRecordVocabulary(std::span<const FeatureRecord> records, std::span<const std::size_t> indices,
                                 std::size_t min_df) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(indices.size());
  for (std::size_t i : indices) tokens.push_back(records[i].tokens);
  return BuildVocabulary(tokens, min_df);
}

Example MakeExample(const FeatureRecord& record, const Vocabulary& vocab, std::size_t label, bool with_image) {
  Example e;
  e.id = record.id;
  e.label = label;
  e.features.bin = record.bin;
  const ContextVector bits = Vectorize(record.tokens, vocab);
  e.features.cxt.assign(bits.bits.begin(), bits.bits.end());
  e.features.lib.assign(record.lib.begin(), record.lib.end());
  if (with_image) {
    if (record.image_side == 0) throw Error(ErrorCode::kDimMismatch, "record " + record.id + " carries no image");
    const std::size_t s = record.image_side;
    Tensor3 t(kImageChannels, s, s);
    for (std::size_t y = 0; y < s; ++y) {
      for (std::size_t x = 0; x < s; ++x) {
        for (std::size_t c = 0; c < kImageChannels; ++c) t.at(c, y, x) = record.image[(y * s + x) * kImageChannels + c] / 255.0;
      }
    }
    e.features.image = std::move(t);
  }
  return e;
}

std::vector<Example> MakeExamples(std::span<const FeatureRecord> records, std::span<const std::size_t> indices,
                                  const Vocabulary& vocab, const std::vector<std::string>& labels, bool with_image) {
  std::vector<Example> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto label = LabelIndices(records.subspan(i, 1), labels).front();
    out.push_back(MakeExample(records[i], vocab, label, with_image));
  }
  return out;
}

SplitResult TrainAndScore(std::span<const FeatureRecord> records, const Split& split,
                          const std::vector<std::string>& labels, const ProtocolConfig& config) {
  const bool with_image = config.train.encoder.has_value();
  SplitResult r;
  r.split = split;
  r.vocab = BuildRecordVocabulary(records, split.train, config.min_df);
  const auto train = MakeExamples(records, split.train, r.vocab, labels, with_image);
  r.test_examples = MakeExamples(records, split.test, r.vocab, labels, with_image);
  TrainResult tr = Train(config.train, train, labels, r.vocab.Fingerprint(), config.catalog_fingerprint);
  r.model = std::move(tr.model);
  r.log = std::move(tr.log);
  const auto inputs = Features(r.test_examples);
  const Eigen::MatrixXd probs = PredictBatch(r.model, inputs);
  std::vector<std::size_t> pred;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    Eigen::Index arg = 0;
    probs.col(c).maxCoeff(&arg);
    pred.push_back(static_cast<std::size_t>(arg));
  }
  r.report = ComputeMetrics(labels, Truth(r.test_examples), pred, &probs);
  r.report.variant = config.variant;
  return r;
}

SplitResult EvaluateSplit(std::span<const FeatureRecord> records, const ProtocolConfig& config, std::uint64_t seed) {
  const auto labels = LabelSet(records);
  if (labels.size() < 2) throw Error(ErrorCode::kLabelUnseen, "evaluation needs at least two classes");
  const auto order = IdOrder(records);
  std::vector<FeatureRecord> sorted;
  sorted.reserve(records.size());
  for (std::size_t i : order) sorted.push_back(records[i]);
  const auto y = LabelIndices(sorted, labels);
  const Split s = StratifiedSplit(y, labels.size(), config.test_fraction, seed);
  SplitResult r = TrainAndScore(sorted, s, labels, config);
  for (auto& i : r.split.train) i = order[i];
  for (auto& i : r.split.test) i = order[i];
  return r;
}

CrossValidation CrossValidate(std::span<const FeatureRecord> records, std::size_t folds, const ProtocolConfig& config,
                              std::uint64_t seed) {
  const auto labels = LabelSet(records);
  if (labels.size() < 2) throw Error(ErrorCode::kLabelUnseen, "evaluation needs at least two classes");
  const auto order = IdOrder(records);
  std::vector<FeatureRecord> sorted;
  sorted.reserve(records.size());
  for (std::size_t i : order) sorted.push_back(records[i]);
  const auto y = LabelIndices(sorted, labels);
  const auto test_sets = StratifiedFolds(y, labels.size(), folds, seed);
  CrossValidation cv;
  for (const auto& test : test_sets) {
    Split s;
    s.test = test;
    std::vector<bool> in_test(sorted.size(), false);
    for (std::size_t i : test) in_test[i] = true;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (!in_test[i]) s.train.push_back(i);
    }
    cv.folds.push_back(TrainAndScore(sorted, s, labels, config).report);
  }
  for (const auto& f : cv.folds) cv.mean_macro_f1 += f.macro_f1;
  cv.mean_macro_f1 /= static_cast<double>(cv.folds.size());
  for (const auto& f : cv.folds) cv.std_macro_f1 += (f.macro_f1 - cv.mean_macro_f1) * (f.macro_f1 - cv.mean_macro_f1);
  cv.std_macro_f1 = std::sqrt(cv.std_macro_f1 / static_cast<double>(cv.folds.size()));
  return cv;
}

std::string CrossValidation::ToJson() const {
  nlohmann::ordered_json j;
  j["folds"] = folds.size();
  j["mean_macro_f1"] = mean_macro_f1;
  j["std_macro_f1"] = std_macro_f1;
  auto& arr = j["reports"] = nlohmann::ordered_json::array();
  for (const auto& f : folds) arr.push_back(nlohmann::ordered_json::parse(f.ToJson()));
  return j.dump(2);
}

SplitResult AblateBytecodeOnly(std::span<const FeatureRecord> records, const ProtocolConfig& config,
                               std::uint64_t seed) {
  ProtocolConfig c = config;
  c.train.views = kBytecodeOnlyMask;
  c.variant = "bytecode-only";
  return EvaluateSplit(records, c, seed);
}

Importance PermutationImportance(const FusionModel& model, std::span<const Example> test, View view,
                                 std::size_t repeats, std::uint64_t seed, ImportanceMetric metric) {
  if (test.size() < 2) throw Error(ErrorCode::kEmptyDataset, "permutation importance needs at least 2 test samples");
  if (repeats == 0) throw Error(ErrorCode::kBadConfig, "repeats must be positive");
  const auto base_inputs = Features(test);
  const auto truth = Truth(test);
  Importance imp;
  imp.view = view;
  imp.baseline = Score(model, base_inputs, truth, metric);
  Rng rng(seed);
  std::vector<std::size_t> perm(test.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(std::span<std::size_t>(perm));
    auto inputs = base_inputs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      inputs[i].view(view) = base_inputs[perm[i]].view(view);
      if (view == View::kBin) inputs[i].image = base_inputs[perm[i]].image;
    }
    imp.per_repeat.push_back(imp.baseline - Score(model, inputs, truth, metric));
  }
  imp.value = std::accumulate(imp.per_repeat.begin(), imp.per_repeat.end(), 0.0) / static_cast<double>(repeats);
  return imp;
}

PerturbOp ParsePerturbOp(std::string_view name) {
  if (name == "dead_bytes") return PerturbOp::kDeadBytes;
  if (name == "manifest_flip") return PerturbOp::kManifestFlip;
  if (name == "view_zero") return PerturbOp::kViewZero;
  throw Error(ErrorCode::kUnknownOperator,
              "unknown perturbation '" + std::string(name) + "' (expected dead_bytes, manifest_flip or view_zero)");
}

std::string_view PerturbOpName(PerturbOp op) {
  switch (op) {
    case PerturbOp::kDeadBytes: return "dead_bytes";
    case PerturbOp::kManifestFlip: return "manifest_flip";
    case PerturbOp::kViewZero: return "view_zero";
  }
  return "?";
}

Bytes InjectDeadBytes(ByteView dex_stream, std::size_t n, std::uint64_t seed) {
  Bytes out(dex_stream.begin(), dex_stream.end());
  out.reserve(out.size() + n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(rng.Next() & 0xFF));
  return out;
}

FeatureRecord PerturbRecord(const FeatureRecord& record, const PerturbSpec& spec, const PerturbContext& context,
                            std::uint64_t seed) {
  FeatureRecord out = record;
  const std::uint64_t local_seed = seed ^ Fnv1a(record.id);
  switch (spec.op) {
    case PerturbOp::kDeadBytes: {
      if (context.extract == nullptr || !context.dex_stream) {
        throw Error(ErrorCode::kBadConfig, "dead_bytes needs the dex stream and the extraction config");
      }
      if (!(spec.magnitude >= 0.0)) throw Error(ErrorCode::kBadConfig, "dead_bytes magnitude must be non-negative");
      const auto n = static_cast<std::size_t>(std::llround(spec.magnitude * static_cast<double>(context.dex_stream->size())));
      const BytecodeImage image = BytesToImage(InjectDeadBytes(*context.dex_stream, n, local_seed));
      out.bin = EmbedImage(image, *context.extract);
      if (!out.image.empty()) out.image = BoxDownsample(image.data, kImageSide, out.image_side, kImageChannels);
      break;
    }
    case PerturbOp::kManifestFlip: {
      if (context.vocab == nullptr) throw Error(ErrorCode::kBadConfig, "manifest_flip needs a vocabulary");
      const auto m = static_cast<std::size_t>(std::llround(spec.magnitude));
      const std::size_t v = context.vocab->size();
      if (!(spec.magnitude >= 0.0) || m > v) {
        throw Error(ErrorCode::kBadConfig, "manifest_flip magnitude must lie in [0, vocabulary size]");
      }
      std::vector<std::size_t> idx(v);
      std::iota(idx.begin(), idx.end(), 0);
      Rng rng(local_seed);
      rng.Shuffle(std::span<std::size_t>(idx));
      std::set<std::string> tokens(out.tokens.begin(), out.tokens.end());
      for (std::size_t i = 0; i < m; ++i) {
        const std::string& t = context.vocab->tokens()[idx[i]];
        if (!tokens.erase(t)) tokens.insert(t);
      }
      out.tokens.assign(tokens.begin(), tokens.end());
      break;
    }
    case PerturbOp::kViewZero:
      if (spec.view == View::kBin) {
        std::fill(out.bin.begin(), out.bin.end(), 0.0);
        std::fill(out.image.begin(), out.image.end(), 0);
      } else if (spec.view == View::kCxt) {
        out.tokens.clear();
      } else {
        std::fill(out.lib.begin(), out.lib.end(), 0);
      }
      break;
  }
  return out;
}

}  // namespace bctx
