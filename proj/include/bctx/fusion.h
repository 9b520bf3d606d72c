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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bctx/bytes.h"
#include "bctx/embedder.h"

namespace bctx {

enum class View { kBin = 0, kCxt = 1, kLib = 2 };
inline constexpr std::array<View, 3> kAllViews{View::kBin, View::kCxt, View::kLib};
std::string_view ViewName(View v);
// Throws BadConfig for anything but "bin", "cxt" or "lib".
View ParseView(std::string_view name);

using ViewMask = std::array<bool, 3>;
inline constexpr ViewMask kAllViewsMask{true, true, true};
inline constexpr ViewMask kBytecodeOnlyMask{true, false, false};

struct FeatureTriple {
  std::vector<double> bin;
  std::vector<double> cxt;
  std::vector<double> lib;  // raw path counts; transformed inside the model
  // Encoder input; required only when the model carries a CNN encoder.
  std::optional<Tensor3> image;

  std::vector<double>& view(View v) { return v == View::kBin ? bin : v == View::kCxt ? cxt : lib; }
  const std::vector<double>& view(View v) const { return v == View::kBin ? bin : v == View::kCxt ? cxt : lib; }
};

struct Example {
  std::string id;
  FeatureTriple features;
  std::size_t label = 0;
};

struct TrainConfig {
  std::size_t hidden_layers = 3;
  std::size_t hidden_width = 256;
  std::size_t d_common = 128;
  std::size_t batch_size = 256;
  std::size_t epochs = 30;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  bool raw_counts = false;
  ViewMask views = kAllViewsMask;
  // When set, f_bin is produced by a dense CNN trained jointly from
  // FeatureTriple::image; otherwise f_bin is taken as given.
  std::optional<DenseCnnConfig> encoder;
  bool train_encoder = true;

  static TrainConfig FullProfile();
  // Throws BadConfig on non-positive dimensions.
  void Validate() const;
};

struct Linear {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
  friend bool operator==(const Linear& a, const Linear& b) {
    return a.w.rows() == b.w.rows() && a.w.cols() == b.w.cols() && a.b.size() == b.b.size() && a.w == b.w &&
           a.b == b.b;
  }
};

struct FusionModel {
  ViewMask views = kAllViewsMask;
  std::array<std::size_t, 3> view_dims{};
  std::size_t d_common = 0;
  std::array<Linear, 3> projections;  // empty for disabled views
  std::vector<Linear> hidden;
  Linear output;
  std::vector<std::string> class_labels;
  std::string vocab_fingerprint;
  std::string catalog_fingerprint;
  bool raw_counts = false;
  std::optional<DenseCnnParams> encoder;

  // Glorot-uniform weights and zero biases, drawn in a fixed order from `seed`.
  // With an encoder, view_dims[bin] is taken from its embedding size.
  static FusionModel Init(const std::array<std::size_t, 3>& view_dims, const TrainConfig& config,
                          std::vector<std::string> class_labels);
  std::size_t num_classes() const { return class_labels.size(); }
  FusionModel ZerosLike() const;
  std::vector<std::span<double>> Blocks();
  std::vector<std::span<const double>> Blocks() const;
  std::size_t ParameterCount() const;
  friend bool operator==(const FusionModel&, const FusionModel&) = default;
};

// The model-side transform of a count vector (log1p unless raw_counts).
Eigen::VectorXd LibTransform(std::span<const double> counts, bool raw_counts);

// Max-subtracted softmax of each column.
Eigen::MatrixXd Softmax(const Eigen::MatrixXd& logits);

// Class probabilities; columns follow the input order. Throws DimMismatch.
Eigen::MatrixXd PredictBatch(const FusionModel& model, std::span<const FeatureTriple> inputs);
Eigen::VectorXd Predict(const FusionModel& model, const FeatureTriple& input);
std::vector<std::size_t> PredictLabels(const FusionModel& model, std::span<const FeatureTriple> inputs);

struct LossAndGrads {
  double loss = 0.0;
  std::size_t correct = 0;
  FusionModel grads;
};
// Mean cross-entropy over the batch and its gradient with respect to every
// parameter. Throws DimMismatch for bad inputs or labels.
LossAndGrads ComputeLossAndGrads(const FusionModel& model, std::span<const Example> batch);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  FusionModel model;
  std::vector<EpochLog> log;
};

// Samples are put in canonical id order first, so the result does not depend
// on the order of `examples`. Throws EmptyDataset or LabelUnseen.
TrainResult Train(const TrainConfig& config, std::span<const Example> examples,
                  std::vector<std::string> class_labels, std::string vocab_fingerprint = {},
                  std::string catalog_fingerprint = {});

void WriteTrainingLog(std::span<const EpochLog> log, std::ostream& out);

inline constexpr std::uint32_t kModelFormatVersion = 1;
Bytes SerializeModel(const FusionModel& model);
FusionModel DeserializeModel(ByteView data);
void SaveModel(const FusionModel& model, const std::filesystem::path& path);
FusionModel LoadModel(const std::filesystem::path& path);
// Throws FingerprintMismatch unless allow_mismatch.
void CheckFingerprints(const FusionModel& model, std::string_view vocab_fingerprint,
                       std::string_view catalog_fingerprint, bool allow_mismatch);

}  // namespace bctx
