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

#include "bctx/embedder.h"

#include <algorithm>
#include <cmath>

#include "bctx/error.h"
#include "bctx/rng.h"

namespace bctx {
namespace {

constexpr std::size_t kCellSide = kImageSide / kTextureGridCells;

ConvParams MakeConv(std::size_t out, std::size_t in, std::size_t kernel) {
  ConvParams p;
  p.out_channels = out;
  p.in_channels = in;
  p.kernel = kernel;
  p.weight.assign(out * in * kernel * kernel, 0.0);
  p.bias.assign(out, 0.0);
  return p;
}

void GlorotFill(ConvParams& p, Rng& rng) {
  const double fan_in = static_cast<double>(p.in_channels * p.kernel * p.kernel);
  const double fan_out = static_cast<double>(p.out_channels * p.kernel * p.kernel);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& w : p.weight) w = rng.Uniform(-limit, limit);
}

// Convolution with stride 1 and zero padding kernel/2 over the first
// p.in_channels channels of `in`; writes p.out_channels channels to `out`
// starting at channel out_offset.
void ConvForward(const Tensor3& in, const ConvParams& p, Tensor3& out, std::size_t out_offset) {
  const std::size_t h = in.height, w = in.width, k = p.kernel;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    double* dst = &out.data[(out_offset + o) * h * w];
    std::fill(dst, dst + h * w, p.bias[o]);
    for (std::size_t i = 0; i < p.in_channels; ++i) {
      const double* src = &in.data[i * h * w];
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const double wt = p.weight[((o * p.in_channels + i) * k + ky) * k + kx];
          if (wt == 0.0) continue;
          const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
          const std::size_t y0 = dy < 0 ? static_cast<std::size_t>(-dy) : 0;
          const std::size_t y1 = dy > 0 ? h - static_cast<std::size_t>(dy) : h;
          const std::size_t x0 = dx < 0 ? static_cast<std::size_t>(-dx) : 0;
          const std::size_t x1 = dx > 0 ? w - static_cast<std::size_t>(dx) : w;
          for (std::size_t y = y0; y < y1; ++y) {
            const double* srow = src + static_cast<std::ptrdiff_t>(y + dy) * static_cast<std::ptrdiff_t>(w) + dx;
            double* drow = dst + y * w;
            for (std::size_t x = x0; x < x1; ++x) drow[x] += wt * srow[x];
          }
        }
      }
    }
  }
}

// Reverse of ConvForward: accumulates weight/bias gradients into `grad` and
// input gradients into the first p.in_channels channels of `din` (if non-null).
void ConvBackward(const Tensor3& in, const ConvParams& p, const Tensor3& dout, std::size_t out_offset,
                  ConvParams& grad, Tensor3* din) {
  const std::size_t h = in.height, w = in.width, k = p.kernel;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    const double* g = &dout.data[(out_offset + o) * h * w];
    double bsum = 0.0;
    for (std::size_t t = 0; t < h * w; ++t) bsum += g[t];
    grad.bias[o] += bsum;
    for (std::size_t i = 0; i < p.in_channels; ++i) {
      const double* src = &in.data[i * h * w];
      double* dsrc = din != nullptr ? &din->data[i * h * w] : nullptr;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::size_t widx = ((o * p.in_channels + i) * k + ky) * k + kx;
          const double wt = p.weight[widx];
          const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
          const std::size_t y0 = dy < 0 ? static_cast<std::size_t>(-dy) : 0;
          const std::size_t y1 = dy > 0 ? h - static_cast<std::size_t>(dy) : h;
          const std::size_t x0 = dx < 0 ? static_cast<std::size_t>(-dx) : 0;
          const std::size_t x1 = dx > 0 ? w - static_cast<std::size_t>(dx) : w;
          double wsum = 0.0;
          for (std::size_t y = y0; y < y1; ++y) {
            const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(y + dy) * static_cast<std::ptrdiff_t>(w) + dx;
            const double* grow = g + y * w;
            const double* srow = src + off;
            for (std::size_t x = x0; x < x1; ++x) wsum += grow[x] * srow[x];
            if (dsrc != nullptr && wt != 0.0) {
              double* drow = dsrc + off;
              for (std::size_t x = x0; x < x1; ++x) drow[x] += wt * grow[x];
            }
          }
          grad.weight[widx] += wsum;
        }
      }
    }
  }
}

Tensor3 Relu(const Tensor3& t) {
  Tensor3 out = t;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor3 AvgPool2(const Tensor3& in) {
  Tensor3 out(in.channels, in.height / 2, in.width / 2);
  for (std::size_t c = 0; c < in.channels; ++c) {
    for (std::size_t y = 0; y < out.height; ++y) {
      for (std::size_t x = 0; x < out.width; ++x) {
        out.at(c, y, x) = 0.25 * (in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) +
                                  in.at(c, 2 * y + 1, 2 * x) + in.at(c, 2 * y + 1, 2 * x + 1));
      }
    }
  }
  return out;
}

void CheckConfig(const DenseCnnConfig& c) {
  if (c.input_side == 0 || c.stem_channels == 0 || c.blocks == 0 || c.growth_rate == 0) {
    throw Error(ErrorCode::kShapeMismatch, "dense CNN dimensions must be positive");
  }
  if ((c.input_side >> c.blocks) == 0) {
    throw Error(ErrorCode::kShapeMismatch, "input side too small for the number of pooling stages");
  }
}

}  // namespace

std::vector<double> EmbedTextureGrid(const BytecodeImage& image) {
  std::vector<double> out(kTextureGridDim, 0.0);
  constexpr double kCellPixels = static_cast<double>(kCellSide * kCellSide);
  for (std::size_t cy = 0; cy < kTextureGridCells; ++cy) {
    for (std::size_t cx = 0; cx < kTextureGridCells; ++cx) {
      for (std::size_t c = 0; c < kImageChannels; ++c) {
        double sum = 0.0;
        for (std::size_t y = cy * kCellSide; y < (cy + 1) * kCellSide; ++y) {
          for (std::size_t x = cx * kCellSide; x < (cx + 1) * kCellSide; ++x) sum += image.at(x, y, c) / 255.0;
        }
        const double mean = sum / kCellPixels;
        double sq = 0.0;
        for (std::size_t y = cy * kCellSide; y < (cy + 1) * kCellSide; ++y) {
          for (std::size_t x = cx * kCellSide; x < (cx + 1) * kCellSide; ++x) {
            const double d = image.at(x, y, c) / 255.0 - mean;
            sq += d * d;
          }
        }
        const std::size_t base = ((cy * kTextureGridCells + cx) * kImageChannels + c) * 2;
        out[base] = mean;
        out[base + 1] = std::sqrt(sq / kCellPixels);
      }
    }
  }
  const std::size_t hist_base = kTextureGridCells * kTextureGridCells * kImageChannels * 2;
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    out[hist_base + (i % kImageChannels) * kTextureGridHistogramBins + image.data[i] / 16] += 1.0;
  }
  const double total = static_cast<double>(kImageSide * kImageSide);
  for (std::size_t i = hist_base; i < out.size(); ++i) out[i] /= total;
  return out;
}

std::vector<std::size_t> DenseCnnConfig::LayerInputChannels(std::size_t block) const {
  std::size_t in = stem_channels;
  for (std::size_t b = 0; b < block; ++b) in = std::max<std::size_t>(1, (in + layers_per_block * growth_rate) / 2);
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < layers_per_block; ++l) out.push_back(in + l * growth_rate);
  return out;
}

std::size_t DenseCnnConfig::EmbeddingDim() const {
  std::size_t in = stem_channels;
  for (std::size_t b = 0; b < blocks; ++b) in = std::max<std::size_t>(1, (in + layers_per_block * growth_rate) / 2);
  return in;
}

DenseCnnParams DenseCnnParams::Init(const DenseCnnConfig& config, std::uint64_t seed) {
  CheckConfig(config);
  Rng rng(seed);
  DenseCnnParams p;
  p.config = config;
  p.stem = MakeConv(config.stem_channels, kImageChannels, 3);
  GlorotFill(p.stem, rng);
  for (std::size_t b = 0; b < config.blocks; ++b) {
    std::vector<ConvParams> layers;
    for (std::size_t in : config.LayerInputChannels(b)) {
      layers.push_back(MakeConv(config.growth_rate, in, 3));
      GlorotFill(layers.back(), rng);
    }
    const std::size_t block_out = config.LayerInputChannels(b).front() + config.layers_per_block * config.growth_rate;
    p.transitions.push_back(MakeConv(std::max<std::size_t>(1, block_out / 2), block_out, 1));
    GlorotFill(p.transitions.back(), rng);
    p.block_layers.push_back(std::move(layers));
  }
  return p;
}

DenseCnnParams DenseCnnParams::ZerosLike() const {
  DenseCnnParams z = *this;
  for (auto block : z.Blocks()) std::fill(block.begin(), block.end(), 0.0);
  return z;
}

std::vector<std::span<double>> DenseCnnParams::Blocks() {
  std::vector<std::span<double>> out;
  auto add = [&out](ConvParams& c) {
    out.emplace_back(c.weight);
    out.emplace_back(c.bias);
  };
  add(stem);
  for (std::size_t b = 0; b < block_layers.size(); ++b) {
    for (auto& l : block_layers[b]) add(l);
    add(transitions[b]);
  }
  return out;
}

std::vector<std::span<const double>> DenseCnnParams::Blocks() const {
  std::vector<std::span<const double>> out;
  for (auto s : const_cast<DenseCnnParams*>(this)->Blocks()) out.emplace_back(s.data(), s.size());
  return out;
}

std::size_t DenseCnnParams::ParameterCount() const {
  std::size_t n = 0;
  for (auto s : Blocks()) n += s.size();
  return n;
}

Tensor3 ImageToInput(const BytecodeImage& image, std::size_t input_side) {
  const auto small = BoxDownsample(image.data, kImageSide, input_side, kImageChannels);
  Tensor3 t(kImageChannels, input_side, input_side);
  for (std::size_t y = 0; y < input_side; ++y) {
    for (std::size_t x = 0; x < input_side; ++x) {
      for (std::size_t c = 0; c < kImageChannels; ++c) {
        t.at(c, y, x) = small[(y * input_side + x) * kImageChannels + c] / 255.0;
      }
    }
  }
  return t;
}

std::vector<double> DenseCnnForward(const Tensor3& input, const DenseCnnParams& params, DenseCnnTrace* trace) {
  const auto& cfg = params.config;
  if (input.channels != kImageChannels || input.height != cfg.input_side || input.width != cfg.input_side ||
      params.block_layers.size() != cfg.blocks || params.transitions.size() != cfg.blocks) {
    throw Error(ErrorCode::kShapeMismatch, "dense CNN input or parameters do not match config");
  }
  DenseCnnTrace local;
  DenseCnnTrace& t = trace != nullptr ? *trace : local;
  t = DenseCnnTrace{};
  t.input = input;

  t.stem_pre = Tensor3(cfg.stem_channels, input.height, input.width);
  ConvForward(input, params.stem, t.stem_pre, 0);
  Tensor3 current = Relu(t.stem_pre);

  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const auto& layers = params.block_layers[b];
    const std::size_t c0 = current.channels;
    const std::size_t side = current.height;
    Tensor3 block(c0 + layers.size() * cfg.growth_rate, side, side);
    std::copy(current.data.begin(), current.data.end(), block.data.begin());
    std::vector<Tensor3> pre;
    std::size_t channels = c0;
    for (const auto& layer : layers) {
      if (layer.in_channels != channels || layer.out_channels != cfg.growth_rate) {
        throw Error(ErrorCode::kShapeMismatch, "dense layer channel count breaks concatenation law");
      }
      t.layer_input_channels.push_back(channels);
      Tensor3 z(cfg.growth_rate, side, side);
      ConvForward(block, layer, z, 0);
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        block.data[channels * side * side + i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
      }
      pre.push_back(std::move(z));
      channels += cfg.growth_rate;
    }
    const auto& trans = params.transitions[b];
    if (trans.in_channels != channels) throw Error(ErrorCode::kShapeMismatch, "transition input channels");
    Tensor3 tout(trans.out_channels, side, side);
    ConvForward(block, trans, tout, 0);
    current = AvgPool2(tout);
    t.block_tensor.push_back(std::move(block));
    t.layer_pre.push_back(std::move(pre));
    t.transition_out.push_back(std::move(tout));
    t.pooled.push_back(current);
  }

  std::vector<double> embedding(current.channels, 0.0);
  const double area = static_cast<double>(current.height * current.width);
  for (std::size_t c = 0; c < current.channels; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < current.height * current.width; ++i) s += current.data[c * current.height * current.width + i];
    embedding[c] = s / area;
  }
  return embedding;
}

std::vector<double> EmbedDenseCnn(const BytecodeImage& image, const DenseCnnParams& params) {
  return DenseCnnForward(ImageToInput(image, params.config.input_side), params);
}

DenseCnnParams DenseCnnBackward(const DenseCnnTrace& trace, const DenseCnnParams& params,
                                std::span<const double> upstream) {
  const auto& cfg = params.config;
  if (trace.pooled.size() != cfg.blocks || upstream.size() != trace.pooled.back().channels) {
    throw Error(ErrorCode::kShapeMismatch, "upstream gradient does not match embedding");
  }
  DenseCnnParams grad = params.ZerosLike();

  // Global average pooling.
  const Tensor3& last = trace.pooled.back();
  Tensor3 dcur(last.channels, last.height, last.width);
  const double inv_area = 1.0 / static_cast<double>(last.height * last.width);
  for (std::size_t c = 0; c < last.channels; ++c) {
    for (std::size_t i = 0; i < last.height * last.width; ++i) dcur.data[c * last.height * last.width + i] = upstream[c] * inv_area;
  }

  for (std::size_t b = cfg.blocks; b-- > 0;) {
    const Tensor3& block = trace.block_tensor[b];
    const std::size_t side = block.height;
    // 2x2 average pooling.
    const Tensor3& tout = trace.transition_out[b];
    Tensor3 dtout(tout.channels, side, side);
    for (std::size_t c = 0; c < dcur.channels; ++c) {
      for (std::size_t y = 0; y < dcur.height; ++y) {
        for (std::size_t x = 0; x < dcur.width; ++x) {
          const double g = 0.25 * dcur.at(c, y, x);
          dtout.at(c, 2 * y, 2 * x) += g;
          dtout.at(c, 2 * y, 2 * x + 1) += g;
          dtout.at(c, 2 * y + 1, 2 * x) += g;
          dtout.at(c, 2 * y + 1, 2 * x + 1) += g;
        }
      }
    }
    Tensor3 dblock(block.channels, side, side);
    ConvBackward(block, params.transitions[b], dtout, 0, grad.transitions[b], &dblock);

    // Dense layers in reverse: each layer's output channels are complete
    // once every later consumer has been processed.
    const auto& layers = params.block_layers[b];
    for (std::size_t l = layers.size(); l-- > 0;) {
      const std::size_t in_ch = layers[l].in_channels;
      const Tensor3& z = trace.layer_pre[b][l];
      Tensor3 dz(z.channels, side, side);
      for (std::size_t i = 0; i < dz.data.size(); ++i) {
        dz.data[i] = z.data[i] > 0.0 ? dblock.data[in_ch * side * side + i] : 0.0;
      }
      ConvBackward(block, layers[l], dz, 0, grad.block_layers[b][l], &dblock);
    }
    // The first c0 channels of the block are its input.
    const std::size_t c0 = layers.empty() ? block.channels : layers.front().in_channels;
    dcur = Tensor3(c0, side, side);
    std::copy_n(dblock.data.begin(), c0 * side * side, dcur.data.begin());
  }

  // Stem rectifier and convolution; the input gradient is not needed.
  Tensor3 dstem(trace.stem_pre.channels, trace.stem_pre.height, trace.stem_pre.width);
  for (std::size_t i = 0; i < dstem.data.size(); ++i) {
    dstem.data[i] = trace.stem_pre.data[i] > 0.0 ? dcur.data[i] : 0.0;
  }
  ConvBackward(trace.input, params.stem, dstem, 0, grad.stem, nullptr);
  return grad;
}

}  // namespace bctx
