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
#include <span>
#include <vector>

#include "bctx/image.h"

namespace bctx {

// Texture-grid featurizer: 10x10 cells of 30x30 pixels, per cell and channel
// the mean and population standard deviation of values scaled to [0, 1]
// (laid out cell-major, then channel, then {mean, std}), followed by a
// normalized 16-bin histogram per channel.
inline constexpr std::size_t kTextureGridCells = 10;
inline constexpr std::size_t kTextureGridHistogramBins = 16;
inline constexpr std::size_t kTextureGridDim =
    kTextureGridCells * kTextureGridCells * kImageChannels * 2 + kImageChannels * kTextureGridHistogramBins;

std::vector<double> EmbedTextureGrid(const BytecodeImage& image);

// Channel-major activation volume.
struct Tensor3 {
  std::size_t channels = 0, height = 0, width = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t c, std::size_t h, std::size_t w) : channels(c), height(h), width(w), data(c * h * w) {}
  double& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

struct DenseCnnConfig {
  std::size_t input_side = 64;
  std::size_t stem_channels = 8;
  std::size_t blocks = 2;
  std::size_t layers_per_block = 3;
  std::size_t growth_rate = 4;

  // Input channel count of every layer of block `b` (0-based).
  std::vector<std::size_t> LayerInputChannels(std::size_t block) const;
  std::size_t EmbeddingDim() const;
  friend bool operator==(const DenseCnnConfig&, const DenseCnnConfig&) = default;
};

struct ConvParams {
  std::size_t out_channels = 0, in_channels = 0, kernel = 0;
  std::vector<double> weight;  // [out][in][ky][kx]
  std::vector<double> bias;    // [out]
  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

// Parameters (or, with the same shape, gradients) of the dense-block CNN.
struct DenseCnnParams {
  DenseCnnConfig config;
  ConvParams stem;
  std::vector<std::vector<ConvParams>> block_layers;
  std::vector<ConvParams> transitions;

  // Glorot-uniform weights, zero biases. Throws ShapeMismatch for configs
  // whose spatial size does not survive the pooling stages.
  static DenseCnnParams Init(const DenseCnnConfig& config, std::uint64_t seed);
  DenseCnnParams ZerosLike() const;
  // Every weight and bias array, in a fixed order.
  std::vector<std::span<double>> Blocks();
  std::vector<std::span<const double>> Blocks() const;
  std::size_t ParameterCount() const;
  friend bool operator==(const DenseCnnParams&, const DenseCnnParams&) = default;
};

// Activations retained by the forward pass for reverse accumulation.
struct DenseCnnTrace {
  Tensor3 input;
  Tensor3 stem_pre;                   // before rectifier
  std::vector<Tensor3> block_tensor;  // block input + all layer outputs, concatenated
  std::vector<std::vector<Tensor3>> layer_pre;  // per layer, before rectifier
  std::vector<Tensor3> transition_out;          // after 1x1 conv, before pooling
  std::vector<Tensor3> pooled;
  // Recorded input channel count of every dense layer, block-major.
  std::vector<std::size_t> layer_input_channels;
};

// Box-downsamples the 300x300 image to input_side and scales to [0, 1].
Tensor3 ImageToInput(const BytecodeImage& image, std::size_t input_side);

std::vector<double> DenseCnnForward(const Tensor3& input, const DenseCnnParams& params,
                                    DenseCnnTrace* trace = nullptr);
std::vector<double> EmbedDenseCnn(const BytecodeImage& image, const DenseCnnParams& params);

// Gradients of <upstream, embedding> with respect to every parameter.
DenseCnnParams DenseCnnBackward(const DenseCnnTrace& trace, const DenseCnnParams& params,
                                std::span<const double> upstream);

}  // namespace bctx
